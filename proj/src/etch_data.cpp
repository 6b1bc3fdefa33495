// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "vacpack/error.hpp"
#include "vacpack/release_etch.hpp"

namespace vacpack
{
namespace
{
std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(std::string_view s, int line)
{
    s = trim(s);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
    {
        throw InputError("etch data line " + std::to_string(line) + ": '" + std::string(s)
                         + "' is not a number");
    }
    return v;
}
}  // namespace

std::vector<EtchObservation> parse_etch_data(std::string_view text)
{
    std::vector<EtchObservation> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto nl = text.find('\n', pos);
        auto line = trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;

        std::vector<std::string_view> f;
        std::size_t s = 0;
        while (true)
        {
            auto c = line.find(',', s);
            f.push_back(trim(line.substr(s, c == line.npos ? line.npos : c - s)));
            if (c == line.npos)
                break;
            s = c + 1;
        }
        if (f.size() != 6)
        {
            throw InputError("etch data line " + std::to_string(line_no)
                             + ": expected 6 comma-separated fields");
        }
        double d1 = to_number(f[1], line_no) * units::um;
        double d2 = to_number(f[2], line_no) * units::um;
        Hole hole = [&] {
            if (f[0] == "circle")
                return Hole::circle(d1);
            if (f[0] == "square")
                return Hole::square(d1);
            if (f[0] == "rectangle")
                return Hole::rectangle(d1, d2);
            throw InputError("etch data line " + std::to_string(line_no) + ": unknown shape '"
                             + std::string(f[0]) + "'");
        }();
        out.push_back({hole,
                       to_number(f[3], line_no) * units::um,
                       to_number(f[4], line_no) * units::min,
                       to_number(f[5], line_no) * units::um});
    }
    return out;
}

std::vector<EtchObservation> read_etch_data(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open etch data file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_etch_data(ss.str());
}
}  // namespace vacpack
