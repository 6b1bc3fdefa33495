// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "vacpack/error.hpp"
#include "vacpack/recipe.hpp"

namespace vacpack
{
namespace
{
//---------------------------------------------------------------------------//
// Quantities
//---------------------------------------------------------------------------//
// Exponents of (length, time, pressure).
struct Dim
{
    int length = 0;
    int time = 0;
    int pressure = 0;

    bool operator==(Dim const&) const = default;
};

constexpr Dim dimensionless{};
constexpr Dim length{1, 0, 0};
constexpr Dim area{2, 0, 0};
constexpr Dim duration{0, 1, 0};
constexpr Dim velocity{1, -1, 0};
constexpr Dim stress{0, 0, 1};

std::string describe(Dim d)
{
    if (d == dimensionless)
        return "dimensionless";
    std::ostringstream os;
    auto part = [&](char const* name, int e) {
        if (e == 0)
            return;
        if (os.tellp() > 0)
            os << ' ';
        os << name;
        if (e != 1)
            os << '^' << e;
    };
    part("length", d.length);
    part("time", d.time);
    part("pressure", d.pressure);
    return os.str();
}

struct UnitAtom
{
    std::string_view name;
    double scale;
    Dim dim;
};

constexpr std::array<UnitAtom, 10> unit_atoms{{
    {"nm", units::nm, length},
    {"um", units::um, length},
    {"\xC2\xB5m", units::um, length},  // µm
    {"mm", units::mm, length},
    {"min", units::min, duration},
    {"s", units::s, duration},
    {"MPa", units::MPa, stress},
    {"GPa", units::GPa, stress},
    {"bar", units::bar, stress},
    {"mbar", units::mbar, stress},
}};

struct ParseFailure
{
    std::string message;
};

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// "um", "um^2", "um/min", "nm/min"
std::pair<double, Dim> parse_unit(std::string_view u)
{
    double scale = 1;
    Dim dim{};
    int sign = 1;
    std::size_t pos = 0;
    bool first = true;
    while (pos < u.size() || first)
    {
        if (!first)
        {
            if (u[pos] != '/')
                throw ParseFailure{"malformed unit '" + std::string(u) + "'"};
            sign = -1;
            ++pos;
        }
        first = false;
        auto end = u.find_first_of("/^", pos);
        auto name = u.substr(pos, end == u.npos ? u.npos : end - pos);
        pos = end == u.npos ? u.size() : end;
        int power = 1;
        if (pos < u.size() && u[pos] == '^')
        {
            ++pos;
            auto [p, ec] = std::from_chars(u.data() + pos, u.data() + u.size(), power);
            if (ec != std::errc{})
                throw ParseFailure{"malformed unit exponent in '" + std::string(u) + "'"};
            pos = static_cast<std::size_t>(p - u.data());
        }
        auto it = std::find_if(unit_atoms.begin(), unit_atoms.end(),
                               [&](UnitAtom const& a) { return a.name == name; });
        if (it == unit_atoms.end())
            throw ParseFailure{"unknown unit '" + std::string(name) + "'"};
        scale *= std::pow(it->scale, sign * power);
        dim.length += sign * power * it->dim.length;
        dim.time += sign * power * it->dim.time;
        dim.pressure += sign * power * it->dim.pressure;
    }
    return {scale, dim};
}

double parse_quantity(std::string_view text, Dim expected)
{
    text = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr == text.data())
        throw ParseFailure{"'" + std::string(text) + "' does not start with a number"};
    auto unit = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
    if (!std::isfinite(v))
        throw ParseFailure{"non-finite value '" + std::string(text) + "'"};
    if (unit.empty())
    {
        if (expected != dimensionless)
        {
            throw ParseFailure{"'" + std::string(text) + "' needs a unit (expected "
                               + describe(expected) + ")"};
        }
        return v;
    }
    auto [scale, dim] = parse_unit(unit);
    if (dim != expected)
    {
        throw ParseFailure{"dimension mismatch: '" + std::string(text) + "' is "
                           + describe(dim) + ", expected " + describe(expected)};
    }
    return v * scale;
}

int parse_count(std::string_view text)
{
    text = trim(text);
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseFailure{"'" + std::string(text) + "' is not an integer count"};
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true)
    {
        auto c = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, c == s.npos ? s.npos : c - pos)));
        if (c == s.npos)
            break;
        pos = c + 1;
    }
    return out;
}

// Splits "a <word> b" on a standalone keyword.
std::pair<std::string_view, std::string_view> split_keyword(std::string_view s,
                                                            std::string_view word)
{
    std::size_t pos = 0;
    while ((pos = s.find(word, pos)) != s.npos)
    {
        bool left = pos == 0 || s[pos - 1] == ' ' || s[pos - 1] == '\t';
        auto after = pos + word.size();
        bool right = after == s.size() || s[after] == ' ' || s[after] == '\t';
        if (left && right)
            return {trim(s.substr(0, pos)), trim(s.substr(after))};
        pos = after;
    }
    return {trim(s), {}};
}

Point parse_point(std::string_view s)
{
    auto parts = split(s, ',');
    if (parts.size() != 2)
        throw ParseFailure{"expected a point 'x, y', got '" + std::string(s) + "'"};
    return {parse_quantity(parts[0], length), parse_quantity(parts[1], length)};
}

std::pair<double, double> parse_extent(std::string_view s)
{
    auto parts = split(s, 'x');
    if (parts.size() != 2)
        throw ParseFailure{"expected 'A x B', got '" + std::string(s) + "'"};
    return {parse_quantity(parts[0], length), parse_quantity(parts[1], length)};
}

// "circle 1.5um", "square 5.394um", "rectangle 4um x 7um"
Hole parse_shape(std::string_view s, Point center)
{
    s = trim(s);
    auto sp = s.find_first_of(" \t");
    auto kind = s.substr(0, sp);
    auto rest = sp == s.npos ? std::string_view{} : trim(s.substr(sp));
    try
    {
        if (kind == "circle")
            return Hole::circle(parse_quantity(rest, length), center);
        if (kind == "square")
            return Hole::square(parse_quantity(rest, length), center);
        if (kind == "rectangle")
        {
            auto [w, l] = parse_extent(rest);
            return Hole::rectangle(w, l, center);
        }
    }
    catch (InputError const& e)
    {
        throw ParseFailure{e.what()};
    }
    throw ParseFailure{"unknown hole shape '" + std::string(kind) + "'"};
}

//---------------------------------------------------------------------------//
// Numeric fields shared by the parser and sweep overrides
//---------------------------------------------------------------------------//
struct NumericField
{
    Dim dim;
    std::function<void(Recipe&, double)> set;
    bool integer = false;
    bool allow_none = false;  // accepts "none" meaning +infinity
};

using FieldTable = std::map<std::string, NumericField, std::less<>>;

FieldTable const& numeric_fields()
{
    static FieldTable const table = [] {
        FieldTable t;
        auto add = [&](std::string key, Dim d, std::function<void(Recipe&, double)> f) {
            t.emplace(std::move(key), NumericField{d, std::move(f)});
        };
        add("stack.sacrificial_thickness", length,
            [](Recipe& r, double v) { r.stack.sacrificial_thickness = v; });
        add("stack.cap_thickness", length, [](Recipe& r, double v) { r.stack.cap_thickness = v; });
        add("stack.clog_deposition", length,
            [](Recipe& r, double v) { r.stack.clog_deposition = v; });

        add("holes.grid_pitch", length, [](Recipe& r, double v) { r.grid_pitch = v; });

        add("release.R0", velocity, [](Recipe& r, double v) { r.etch.rate = v; });
        add("release.c_aperture", area, [](Recipe& r, double v) { r.etch.c_aperture = v; });
        add("release.c_path", dimensionless, [](Recipe& r, double v) { r.etch.c_path = v; });
        add("release.reference_thickness", length,
            [](Recipe& r, double v) { r.etch.reference_thickness = v; });
        add("release.max_time", duration, [](Recipe& r, double v) { r.release.max_time = v; });
        add("release.time_tolerance", duration,
            [](Recipe& r, double v) { r.release.time_tolerance = v; });
        add("release.step", duration, [](Recipe& r, double v) { r.release.integration.step = v; });
        add("release.report_time", duration, [](Recipe& r, double v) { r.report_time = v; });

        add("clogging.kappa0", dimensionless, [](Recipe& r, double v) { r.clogging.kappa0 = v; });
        add("clogging.s_ref", dimensionless, [](Recipe& r, double v) { r.clogging.s_ref = v; });
        add("clogging.ar_knee", dimensionless, [](Recipe& r, double v) { r.clogging.ar_knee = v; });
        add("clogging.atten_exponent", dimensionless,
            [](Recipe& r, double v) { r.clogging.atten_exponent = v; });
        add("clogging.residue_fraction_scale", dimensionless,
            [](Recipe& r, double v) { r.clogging.residue_fraction_scale = v; });
        add("clogging.spread_factor", dimensionless,
            [](Recipe& r, double v) { r.clogging.spread_factor = v; });
        add("clogging.max_deposition", length,
            [](Recipe& r, double v) { r.clogging.max_deposition = v; });
        add("clogging.step", length, [](Recipe& r, double v) { r.clogging.step = v; });
        add("clogging.tolerance", length, [](Recipe& r, double v) { r.clogging.tolerance = v; });
        add("clogging.chamber_pressure", stress,
            [](Recipe& r, double v) { r.chamber_pressure = v; });

        add("molding.pressure", stress, [](Recipe& r, double v) { r.molding.pressure = v; });
        add("molding.safety_factor", dimensionless,
            [](Recipe& r, double v) { r.molding.safety_factor = v; });
        add("molding.side_a", length, [](Recipe& r, double v) { r.molding.side_a = v; });
        add("molding.side_b", length, [](Recipe& r, double v) { r.molding.side_b = v; });
        add("molding.t_min", length, [](Recipe& r, double v) { r.molding.t_min = v; });
        add("molding.t_max", length, [](Recipe& r, double v) { r.molding.t_max = v; });
        t.emplace("molding.max_deflection",
                  NumericField{length,
                               [](Recipe& r, double v) { r.molding.max_deflection = v; },
                               false, true});
        t.emplace("molding.grid_n",
                  NumericField{dimensionless,
                               [](Recipe& r, double v) { r.molding.grid_n = static_cast<int>(v); },
                               true});
        return t;
    }();
    return table;
}

struct MaterialProperty
{
    std::string_view name;
    Dim dim;
    double Material::*member;
};

constexpr std::array<MaterialProperty, 6> material_properties{{
    {"etch_rate", velocity, &Material::intrinsic_etch_rate},
    {"selectivity_loss", velocity, &Material::selectivity_loss},
    {"sticking_coefficient", dimensionless, &Material::sticking_coefficient},
    {"youngs_modulus", stress, &Material::youngs_modulus},
    {"poisson_ratio", dimensionless, &Material::poisson_ratio},
    {"failure_stress", stress, &Material::failure_stress},
}};

double parse_field_value(NumericField const& f, std::string_view value)
{
    value = trim(value);
    if (f.allow_none && value == "none")
        return std::numeric_limits<double>::infinity();
    if (f.integer)
        return parse_count(value);
    return parse_quantity(value, f.dim);
}

// Returns false if the path is not a numeric field.
bool try_set_numeric(Recipe& r, std::string_view path, std::string_view value)
{
    auto const& table = numeric_fields();
    if (auto it = table.find(path); it != table.end())
    {
        it->second.set(r, parse_field_value(it->second, value));
        return true;
    }
    constexpr std::string_view mat_prefix = "materials.";
    if (path.starts_with(mat_prefix))
    {
        auto rest = path.substr(mat_prefix.size());
        auto dot = rest.rfind('.');
        if (dot == rest.npos)
            return false;
        auto name = rest.substr(0, dot);
        auto prop = rest.substr(dot + 1);
        for (auto const& p : material_properties)
        {
            if (p.name != prop)
                continue;
            auto it = r.materials.find(name);
            if (it == r.materials.end())
                throw ParseFailure{"unknown material '" + std::string(name) + "'"};
            it->second.*p.member = parse_quantity(value, p.dim);
            return true;
        }
        return false;
    }
    if (path == "holes.size" || path == "holes.length")
    {
        double v = parse_quantity(value, length);
        for (auto& h : r.holes)
        {
            try
            {
                h = path == "holes.size" ? h.with_min_dimension(v) : h.with_length(v);
            }
            catch (InputError const& e)
            {
                throw ParseFailure{e.what()};
            }
        }
        return true;
    }
    return false;
}

//---------------------------------------------------------------------------//
// Parser
//---------------------------------------------------------------------------//
constexpr std::array<std::string_view, 6> section_names{
    "materials", "stack", "holes", "release", "clogging", "molding"};

class RecipeParser
{
  public:
    explicit RecipeParser(ParseOptions const& opts) : opts_(opts) {}

    Recipe parse(std::string_view text)
    {
        std::size_t pos = 0;
        int line_no = 0;
        while (pos <= text.size())
        {
            auto nl = text.find('\n', pos);
            auto raw = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
            pos = nl == text.npos ? text.size() + 1 : nl + 1;
            ++line_no;
            auto hash = raw.find('#');
            auto line = trim(raw.substr(0, hash));
            if (line.empty())
                continue;
            try
            {
                handle_line(line, line_no);
            }
            catch (ParseFailure const& f)
            {
                throw InputError("line " + std::to_string(line_no) + ": " + f.message);
            }
        }
        finish();
        return std::move(recipe_);
    }

  private:
    void handle_line(std::string_view line, int line_no)
    {
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ParseFailure{"unterminated section header"};
            auto name = trim(line.substr(1, line.size() - 2));
            if (std::find(section_names.begin(), section_names.end(), name) == section_names.end())
                throw ParseFailure{"unknown section [" + std::string(name) + "]"};
            auto [it, fresh] = section_lines_.emplace(std::string(name), line_no);
            if (!fresh)
            {
                throw ParseFailure{"duplicate section [" + std::string(name) + "] (first at line "
                                   + std::to_string(it->second) + ", again at line "
                                   + std::to_string(line_no) + ")"};
            }
            section_ = name;
            return;
        }
        auto eq = line.find('=');
        if (eq == line.npos)
            throw ParseFailure{"expected 'key = value'"};
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseFailure{"empty key"};
        if (value.empty())
            throw ParseFailure{"key '" + std::string(key) + "' has no value"};
        if (section_.empty())
            throw ParseFailure{"key '" + std::string(key) + "' outside of any section"};

        std::string path = section_ + "." + std::string(key);
        bool repeatable = section_ == "holes" && (key == "hole" || key == "array");
        if (!repeatable)
        {
            auto [it, fresh] = key_lines_.emplace(path, line_no);
            if (!fresh)
            {
                throw ParseFailure{"duplicate key '" + std::string(key) + "' (first at line "
                                   + std::to_string(it->second) + ")"};
            }
        }

        if (section_ == "materials")
            return material_entry(key, value);
        if (section_ == "stack")
        {
            if (key == "footprint")
            {
                auto [w, h] = parse_extent(value);
                recipe_.stack.cavity_footprint.width = w;
                recipe_.stack.cavity_footprint.height = h;
                return;
            }
            if (key == "footprint_origin")
            {
                auto p = parse_point(value);
                recipe_.stack.cavity_footprint.x0 = p.x;
                recipe_.stack.cavity_footprint.y0 = p.y;
                return;
            }
        }
        if (section_ == "holes")
        {
            if (key == "hole")
                return hole_entry(value);
            if (key == "array")
                return array_entry(value);
        }
        if (section_ == "release" && key == "calibrate")
        {
            std::filesystem::path p{std::string(value)};
            recipe_.etch_calibration_file = p.is_relative() ? opts_.base_dir / p : p;
            return;
        }
        if (!try_set_numeric(recipe_, path, value))
            throw ParseFailure{"unknown key '" + std::string(key) + "' in [" + section_ + "]"};
    }

    void material_entry(std::string_view key, std::string_view value)
    {
        if (key == "sacrificial" || key == "structural" || key == "clog")
        {
            std::string name(value);
            (key == "sacrificial" ? recipe_.sacrificial
             : key == "structural" ? recipe_.structural
                                   : recipe_.clog)
                = name;
            return;
        }
        auto dot = key.rfind('.');
        if (dot == key.npos)
            throw ParseFailure{"unknown key '" + std::string(key) + "' in [materials]"};
        auto name = std::string(key.substr(0, dot));
        auto prop = key.substr(dot + 1);
        auto found = std::find_if(material_properties.begin(), material_properties.end(),
                                  [&](MaterialProperty const& p) { return p.name == prop; });
        if (found == material_properties.end())
            throw ParseFailure{"unknown material property '" + std::string(prop) + "'"};
        if (!recipe_.materials.contains(name))
        {
            // New material: every property must be given.
            Material m;
            m.name = name;
            recipe_.materials.emplace(name, m);
            incomplete_[name] = {};
        }
        recipe_.materials.at(name).*found->member = parse_quantity(value, found->dim);
        if (auto it = incomplete_.find(name); it != incomplete_.end())
            it->second.insert(std::string(prop));
    }

    void hole_entry(std::string_view value)
    {
        auto [shape, at] = split_keyword(value, "at");
        if (at.empty())
            throw ParseFailure{"hole needs a position: '<shape> <size> at x, y'"};
        recipe_.holes.push_back(parse_shape(shape, parse_point(at)));
    }

    // "<shape> <size> pitch px, py count nx x ny at x0, y0"
    void array_entry(std::string_view value)
    {
        auto [shape, rest1] = split_keyword(value, "pitch");
        auto [pitch, rest2] = split_keyword(rest1, "count");
        auto [count, at] = split_keyword(rest2, "at");
        if (pitch.empty() || count.empty() || at.empty())
            throw ParseFailure{"array needs '<shape> <size> pitch px, py count nx x ny at x0, y0'"};
        auto p = parse_point(pitch);
        auto n = split(count, 'x');
        if (n.size() != 2)
            throw ParseFailure{"array count must be 'nx x ny'"};
        int nx = parse_count(n[0]);
        int ny = parse_count(n[1]);
        if (nx < 1 || ny < 1)
            throw ParseFailure{"array count must be positive"};
        auto origin = parse_point(at);
        Hole proto = parse_shape(shape, origin);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                recipe_.holes.push_back(proto.with_center({origin.x + i * p.x, origin.y + j * p.y}));
    }

    void finish()
    {
        for (auto key : {"stack.sacrificial_thickness", "stack.cap_thickness",
                         "stack.clog_deposition", "stack.footprint"})
        {
            if (!key_lines_.contains(key))
                throw InputError("missing required key '" + std::string(key) + "'");
        }
        if (recipe_.holes.empty())
            throw InputError("recipe declares no holes");
        for (auto const& [name, props] : incomplete_)
        {
            for (auto const& p : material_properties)
            {
                if (!props.contains(std::string(p.name)))
                {
                    throw InputError("material '" + name + "' is missing property '"
                                     + std::string(p.name) + "'");
                }
            }
        }
        if (recipe_.etch_calibration_file)
        {
            for (auto key : {"release.R0", "release.c_aperture", "release.c_path"})
            {
                if (key_lines_.contains(key))
                {
                    throw InputError("'" + std::string(key)
                                     + "' conflicts with release.calibrate (line "
                                     + std::to_string(key_lines_.at(key)) + ")");
                }
            }
            auto data = read_etch_data(*recipe_.etch_calibration_file);
            EtchCalibrationOptions copts;
            copts.initial = recipe_.etch;
            copts.integration = recipe_.release.integration;
            recipe_.etch = calibrate_etch(data, copts).params;
        }
        else if (!key_lines_.contains("release.R0"))
        {
            double r0 = recipe_.material(recipe_.sacrificial).intrinsic_etch_rate;
            if (!(r0 > 0))
                throw InputError("sacrificial material '" + recipe_.sacrificial
                                 + "' has no etch_rate and release.R0 is not set");
            recipe_.etch.rate = r0;
        }
        validate_recipe(recipe_);
    }

    ParseOptions opts_;
    Recipe recipe_;
    std::string section_;
    std::map<std::string, int, std::less<>> section_lines_;
    std::map<std::string, int, std::less<>> key_lines_;
    std::map<std::string, std::set<std::string>> incomplete_;
};
}  // namespace

//---------------------------------------------------------------------------//
Material const& Recipe::material(std::string_view name) const
{
    auto it = materials.find(name);
    if (it == materials.end())
        throw InputError("unknown material '" + std::string(name) + "'");
    return it->second;
}

double Recipe::plate_side_a() const
{
    return molding.side_a > 0 ? molding.side_a : stack.cavity_footprint.width;
}

double Recipe::plate_side_b() const
{
    return molding.side_b > 0 ? molding.side_b : stack.cavity_footprint.height;
}

void validate_recipe(Recipe const& r)
{
    for (auto const* name : {&r.sacrificial, &r.structural, &r.clog})
        r.material(*name).validate();
    r.stack.validate(r.holes);
    if (r.holes.empty())
        throw InputError("recipe declares no holes");
    if (!(r.grid_pitch >= 0))
        throw InputError("grid_pitch must be >= 0");
    r.etch.validate();
    if (!(r.release.max_time > 0) || !(r.release.time_tolerance > 0)
        || !(r.release.integration.step > 0))
        throw InputError("release max_time, time_tolerance and step must be > 0");
    if (!(r.report_time >= 0))
        throw InputError("report_time must be >= 0");
    r.clogging.validate();
    if (!(r.chamber_pressure >= 0))
        throw InputError("chamber_pressure must be >= 0");
    auto const& m = r.molding;
    if (!(m.pressure >= 0))
        throw InputError("molding pressure must be >= 0");
    if (!(m.max_deflection > 0))
        throw InputError("max_deflection must be > 0");
    if (!(m.safety_factor >= 1))
        throw InputError("safety_factor must be >= 1");
    if (m.grid_n < 16)
        throw InputError("molding grid_n must be >= 16");
    if (!(m.t_min > 0) || !(m.t_min < m.t_max))
        throw InputError("molding thickness bounds need 0 < t_min < t_max");
    if (!(m.side_a >= 0) || !(m.side_b >= 0))
        throw InputError("molding sides must be >= 0");
}

Recipe parse_recipe(std::string_view text, ParseOptions const& opts)
{
    return RecipeParser(opts).parse(text);
}

Recipe load_recipe(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open recipe " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    ParseOptions opts;
    opts.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_recipe(ss.str(), opts);
}

void set_recipe_value(Recipe& recipe, std::string_view path, std::string_view value)
{
    try
    {
        if (!try_set_numeric(recipe, path, value))
        {
            throw InputError("'" + std::string(path)
                             + "' does not address a numeric recipe field");
        }
    }
    catch (ParseFailure const& f)
    {
        throw InputError(std::string(path) + ": " + f.message);
    }
}
}  // namespace vacpack
