// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "vacpack/error.hpp"
#include "vacpack/recipe.hpp"

namespace vacpack
{
namespace
{
std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class Table
{
  public:
    void add(std::string field, char const* unit, double value)
    {
        rows_.push_back({std::move(field), unit, value});
    }
    std::vector<TabularField> const& rows() const { return rows_; }

  private:
    std::vector<TabularField> rows_;
};

Table tabulate(ProcessReport const& r)
{
    using namespace units;
    Table t;
    t.add("t_release", "min", r.t_release / min);
    t.add("structural_loss", "nm", r.structural_loss / nm);
    t.add("report_time", "min", r.report_time / min);
    for (std::size_t i = 0; i < r.holes.size(); ++i)
    {
        auto const& h = r.holes[i];
        std::string p = "hole" + std::to_string(i) + ".";
        t.add(p + "underetch", "um", h.underetch / um);
        t.add(p + "clog_thickness", "um", h.clog_thickness / um);
        t.add(p + "remaining_aperture", "nm", h.remaining_aperture / nm);
        t.add(p + "residue", "nm", h.residue_thickness / nm);
        t.add(p + "residue_footprint", "um", h.residue_footprint / um);
        t.add(p + "sealed", "bool", h.sealed ? 1 : 0);
    }
    t.add("governing_clog_thickness", "um", r.governing_clog_thickness / um);
    t.add("clog_deposition", "um", r.clog_deposition / um);
    t.add("cavity_pressure", "mbar", r.cavity_pressure / mbar);
    t.add("cap_thickness_total", "um", r.cap_thickness_total / um);
    t.add("molding_pressure", "MPa", r.molding_pressure / MPa);
    t.add("w_max", "nm", r.w_max / nm);
    t.add("sigma_max", "MPa", r.sigma_max / MPa);
    t.add("max_deflection", "nm", r.max_deflection / nm);
    t.add("allowable_stress", "MPa", r.allowable_stress / MPa);
    t.add("check.sealed", "bool", r.sealed_ok ? 1 : 0);
    t.add("check.deflection", "bool", r.deflection_ok ? 1 : 0);
    t.add("check.stress", "bool", r.stress_ok ? 1 : 0);
    t.add("pass", "bool", r.passed() ? 1 : 0);
    return t;
}

char const* verdict(bool ok)
{
    return ok ? "pass" : "FAIL";
}

std::string sanitize(std::string s)
{
    for (auto& c : s)
    {
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    }
    return s;
}
}  // namespace

std::string emit_report(ProcessReport const& r, ReportFormat format)
{
    using namespace units;
    std::ostringstream os;
    if (format == ReportFormat::tabular)
    {
        os << report_header << '\n';
        auto const table = tabulate(r);
        for (auto const& row : table.rows())
            os << row.field << ',' << row.units << ',' << num(row.value) << '\n';
        return os.str();
    }

    os << "Release\n"
       << "  time to release      " << num(r.t_release / min) << " min\n"
       << "  structural loss      " << num(r.structural_loss / nm) << " nm\n"
       << "Holes (underetch at " << num(r.report_time / min) << " min)\n";
    for (std::size_t i = 0; i < r.holes.size(); ++i)
    {
        auto const& h = r.holes[i];
        os << "  #" << i << "  underetch " << num(h.underetch / um) << " um"
           << ", clogs at " << num(h.clog_thickness / um) << " um"
           << ", remaining " << num(h.remaining_aperture / nm) << " nm"
           << ", residue " << num(h.residue_thickness / nm) << " nm over "
           << num(h.residue_footprint / um) << " um\n";
    }
    os << "Sealing\n"
       << "  governing clog thickness  " << num(r.governing_clog_thickness / um) << " um\n"
       << "  deposited                 " << num(r.clog_deposition / um) << " um ("
       << verdict(r.sealed_ok) << ")\n"
       << "  cavity pressure           " << num(r.cavity_pressure / mbar) << " mbar\n"
       << "Molding (" << num(r.molding_pressure / MPa) << " MPa on "
       << num(r.cap_thickness_total / um) << " um cap)\n"
       << "  max deflection  " << num(r.w_max / nm) << " nm (limit "
       << num(r.max_deflection / nm) << " nm, " << verdict(r.deflection_ok) << ")\n"
       << "  max stress      " << num(r.sigma_max / MPa) << " MPa (allowable "
       << num(r.allowable_stress / MPa) << " MPa, " << verdict(r.stress_ok) << ")\n"
       << "Overall: " << verdict(r.passed()) << '\n';
    return os.str();
}

std::string emit_molding_check(MoldingCheck const& c, ReportFormat format)
{
    using namespace units;
    std::ostringstream os;
    if (format == ReportFormat::tabular)
    {
        os << report_header << '\n'
           << "cap_thickness,um," << num(c.cap_thickness / um) << '\n'
           << "w_max,nm," << num(c.w_max / nm) << '\n'
           << "sigma_max,MPa," << num(c.sigma_max / MPa) << '\n'
           << "allowable_stress,MPa," << num(c.allowable_stress / MPa) << '\n'
           << "check.deflection,bool," << (c.deflection_ok ? 1 : 0) << '\n'
           << "check.stress,bool," << (c.stress_ok ? 1 : 0) << '\n';
        if (c.min_thickness)
            os << "min_cap_thickness,um," << num(*c.min_thickness / um) << '\n';
        return os.str();
    }
    os << "Cap thickness   " << num(c.cap_thickness / um) << " um\n"
       << "Max deflection  " << num(c.w_max / nm) << " nm (" << verdict(c.deflection_ok) << ")\n"
       << "Max stress      " << num(c.sigma_max / MPa) << " MPa (allowable "
       << num(c.allowable_stress / MPa) << " MPa, " << verdict(c.stress_ok) << ")\n";
    if (c.min_thickness)
        os << "Thinnest feasible cap  " << num(*c.min_thickness / um) << " um\n";
    return os.str();
}

std::vector<TabularField> parse_tabular_report(std::string_view text)
{
    std::vector<TabularField> out;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != report_header)
        throw InputError("tabular report must start with '" + std::string(report_header) + "'");
    int line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        auto c1 = line.find(',');
        auto c2 = c1 == line.npos ? line.npos : line.find(',', c1 + 1);
        if (c2 == line.npos)
            throw InputError("tabular line " + std::to_string(line_no) + ": expected 3 fields");
        std::string value = line.substr(c2 + 1);
        char* end = nullptr;
        double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0')
            throw InputError("tabular line " + std::to_string(line_no) + ": bad number");
        out.push_back({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), v});
    }
    return out;
}

std::string emit_sweep(std::vector<SweepRow> const& rows, ReportFormat format)
{
    using namespace units;
    std::ostringstream os;
    if (format == ReportFormat::text)
    {
        for (auto const& row : rows)
        {
            os << "== " << row.value << " (" << row.status << ")\n";
            if (row.report)
                os << emit_report(*row.report, ReportFormat::text);
        }
        return os.str();
    }

    os << sweep_header << '\n';
    for (auto const& row : rows)
    {
        os << sanitize(row.value) << ',';
        if (row.report)
        {
            auto const& r = *row.report;
            double remaining = 0;
            double residue = 0;
            double footprint = 0;
            for (auto const& h : r.holes)
            {
                remaining = std::max(remaining, h.remaining_aperture);
                residue = std::max(residue, h.residue_thickness);
                footprint = std::max(footprint, h.residue_footprint);
            }
            double u = r.holes.empty() ? 0.0 : r.holes.front().underetch;
            os << num(r.t_release / min) << ',' << num(r.structural_loss / nm) << ','
               << num(u / um) << ',' << num(r.governing_clog_thickness / um) << ','
               << num(remaining / nm) << ',' << num(residue / nm) << ',' << num(footprint / um)
               << ',' << num(r.cavity_pressure / mbar) << ',' << num(r.w_max / nm) << ','
               << num(r.sigma_max / MPa) << ',' << (r.passed() ? 1 : 0) << ',';
        }
        else
        {
            for (int i = 0; i < 11; ++i)
                os << "nan,";
        }
        os << sanitize(row.status) << '\n';
    }
    return os.str();
}
}  // namespace vacpack
