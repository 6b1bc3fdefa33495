#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "vacpack/error.hpp"
#include "vacpack/mechanics.hpp"
#include "vacpack/recipe.hpp"
#include "vacpack/units.hpp"

using namespace vacpack;
using namespace vacpack::units;

namespace
{
std::string const minimal = R"(
[stack]
sacrificial_thickness = 5um
cap_thickness = 2um
clog_deposition = 2.5um
footprint = 10um x 10um

[holes]
hole = circle 1.5um at 5um, 5um
)";

std::string error_of(std::string const& text)
{
    try
    {
        parse_recipe(text);
    }
    catch (InputError const& e)
    {
        return e.what();
    }
    return {};
}

Recipe reference()
{
    return load_recipe(VACPACK_SOURCE_DIR "/recipes/reference.recipe");
}

std::string tabular(Recipe const& r)
{
    return emit_report(run_recipe(r), ReportFormat::tabular);
}
}  // namespace

TEST_CASE("minimal recipe takes library defaults")
{
    auto r = parse_recipe(minimal);
    CHECK(r.stack.sacrificial_thickness == doctest::Approx(5e-6));
    CHECK(r.stack.cavity_footprint.width == doctest::Approx(10e-6));
    REQUIRE(r.holes.size() == 1);
    CHECK(hole_min_dimension(r.holes[0]) == doctest::Approx(1.5e-6));
    CHECK(r.holes[0].center().x == doctest::Approx(5e-6));
    CHECK(r.sacrificial == "aSi");
    CHECK(r.structural == "SiO2");
    CHECK(r.etch.rate == doctest::Approx(default_materials().at("aSi").intrinsic_etch_rate));
    CHECK(r.etch.c_path == EtchParams{}.c_path);
    CHECK(r.clogging.kappa0 == ClogParams{}.kappa0);
    CHECK(r.chamber_pressure == doctest::Approx(5e-7 * mbar));
    CHECK(r.molding.pressure == doctest::Approx(10 * MPa));
    CHECK(std::isinf(r.molding.max_deflection));
}

TEST_CASE("units and quantities")
{
    auto r = parse_recipe(minimal + R"(
[release]
R0 = 0.5um/s
c_aperture = 2um^2
c_path = 3
max_time = 90s
[clogging]
chamber_pressure = 2e-6 mbar
[molding]
pressure = 5 MPa
max_deflection = 0.02 µm
side_a = 0.03mm
)");
    CHECK(r.etch.rate == doctest::Approx(0.5e-6));
    CHECK(r.etch.c_aperture == doctest::Approx(2e-12));
    CHECK(r.etch.c_path == 3);
    CHECK(r.release.max_time == doctest::Approx(90));
    CHECK(r.chamber_pressure == doctest::Approx(2e-4));
    CHECK(r.molding.pressure == doctest::Approx(5e6));
    CHECK(r.molding.max_deflection == doctest::Approx(20e-9));
    CHECK(r.plate_side_a() == doctest::Approx(30e-6));
    CHECK(r.plate_side_b() == doctest::Approx(10e-6));
}

TEST_CASE("hole declarations")
{
    auto r = parse_recipe(R"(
[stack]
sacrificial_thickness = 5um
cap_thickness = 2um
clog_deposition = 2.5um
footprint = 40um x 40um
footprint_origin = -20um, -20um
[holes]
hole = square 3um at 0um, 0um
hole = rectangle 6um x 2um at 10um, 10um
array = circle 1um pitch 5um, 4um count 3 x 2 at -15um, -15um
)");
    REQUIRE(r.holes.size() == 8);
    CHECK(std::holds_alternative<Square>(r.holes[0].shape()));
    CHECK(hole_min_dimension(r.holes[1]) == doctest::Approx(2e-6));
    CHECK(r.holes[2].center().x == doctest::Approx(-15e-6));
    CHECK(r.holes[4].center().x == doctest::Approx(-5e-6));
    CHECK(r.holes[5].center().y == doctest::Approx(-11e-6));
    CHECK(r.stack.cavity_footprint.x0 == doctest::Approx(-20e-6));
}

TEST_CASE("duplicate section names both lines")
{
    auto msg = error_of(minimal + "\n[stack]\n");
    CHECK(msg.find("duplicate section [stack]") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 11") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers")
{
    CHECK(error_of(minimal + "[holes2]\n").find("line 10") != std::string::npos);
    CHECK(error_of("[stack]\nsacrificial_thickness 5um\n").find("line 2") != std::string::npos);
    CHECK(error_of("cap_thickness = 2um\n").find("outside of any section") != std::string::npos);
    CHECK(error_of("[stack]\ncap_thickness = 2\n").find("line 2") != std::string::npos);
    CHECK(error_of("[stack]\ncap_thickness = 2furlong\n").find("unit") != std::string::npos);
    CHECK(error_of("[stack]\ncap_thickness = 2min\n").find("dimension mismatch")
          != std::string::npos);
    CHECK(error_of("[stack]\ncolour = 2um\n").find("unknown key") != std::string::npos);
    CHECK(error_of("[stack]\ncap_thickness = 2um\ncap_thickness = 3um\n").find("duplicate key")
          != std::string::npos);
    CHECK(error_of(minimal + "[holes]\n").find("duplicate section") != std::string::npos);
    CHECK(error_of("[holes]\nhole = hexagon 2um at 1um, 1um\n").find("hexagon")
          != std::string::npos);
    CHECK(error_of("[holes]\nhole = circle 2um\n").find("position") != std::string::npos);
    CHECK(error_of("[stack\n").find("unterminated") != std::string::npos);
}

TEST_CASE("missing and inconsistent content")
{
    CHECK(error_of("[stack]\ncap_thickness = 2um\n").find("missing required key")
          != std::string::npos);
    std::string no_holes = minimal.substr(0, minimal.find("[holes]"));
    CHECK(error_of(no_holes).find("no holes") != std::string::npos);
    CHECK(error_of(minimal + "[materials]\nstructural = unobtainium\n").find("unknown material")
          != std::string::npos);
    std::string outside = minimal;
    outside.replace(outside.find("at 5um, 5um"), 11, "at 50um, 5um");
    CHECK_THROWS_AS(parse_recipe(outside), InputError);
}

TEST_CASE("materials can be overridden and added")
{
    auto r = parse_recipe(minimal + R"(
[materials]
SiO2.youngs_modulus = 72GPa
Ti.etch_rate = 0um/min
Ti.selectivity_loss = 0.1nm/min
Ti.sticking_coefficient = 0.5
Ti.youngs_modulus = 110GPa
Ti.poisson_ratio = 0.32
Ti.failure_stress = 0.9GPa
structural = Ti
)");
    CHECK(r.material("SiO2").youngs_modulus == doctest::Approx(72e9));
    CHECK(r.structural == "Ti");
    CHECK(r.material("Ti").poisson_ratio == doctest::Approx(0.32));

    auto msg = error_of(minimal + "[materials]\nTi.youngs_modulus = 110GPa\n");
    CHECK(msg.find("material 'Ti' is missing property") != std::string::npos);
    CHECK(error_of(minimal + "[materials]\nSiO2.colour = 1\n").find("unknown material property")
          != std::string::npos);
}

TEST_CASE("calibration directive")
{
    auto base = std::string(VACPACK_SOURCE_DIR "/data/release_underetch_2min.csv");
    auto r = parse_recipe(minimal + "[release]\ncalibrate = " + base + "\n");
    CHECK(r.etch.rate == doctest::Approx(EtchParams{}.rate).epsilon(0.005));
    CHECK(r.etch.c_path == doctest::Approx(EtchParams{}.c_path).epsilon(0.005));

    auto msg = error_of(minimal + "[release]\ncalibrate = " + base + "\nc_path = 2\n");
    CHECK(msg.find("conflicts with release.calibrate") != std::string::npos);
    CHECK_THROWS_AS(parse_recipe(minimal + "[release]\ncalibrate = no_such_file.csv\n"),
                    InputError);
}

TEST_CASE("reference recipe report")
{
    auto r = reference();
    auto rep = run_recipe(r);
    CHECK(rep.t_release > 0);
    CHECK(rep.structural_loss / nm <= rep.t_release / min);
    REQUIRE(rep.holes.size() == 9);
    for (auto const& h : rep.holes)
    {
        CHECK(h.sealed);
        CHECK(h.residue_thickness / nm == doctest::Approx(80).epsilon(0.5));
        CHECK(h.residue_footprint / um >= 8);
        CHECK(h.residue_footprint / um <= 10);
    }
    CHECK(rep.cavity_pressure == doctest::Approx(5e-7 * mbar));
    CHECK(rep.cavity_pressure == r.chamber_pressure);
    CHECK(rep.molding_pressure == doctest::Approx(10 * MPa));
    CHECK(rep.cap_thickness_total == doctest::Approx(4.5 * um));
    CHECK(rep.w_max / nm == doctest::Approx(25).epsilon(0.5));
    CHECK(rep.passed());
}

TEST_CASE("pipeline equals the stages run by hand")
{
    auto r = reference();
    auto rep = run_recipe(r);
    auto const& st = r.stack;
    auto const& sio2 = r.material("SiO2");

    ReleaseOptions ro = r.release;
    auto rel = time_to_release(st.cavity_footprint, r.holes, st, r.etch, sio2, ro);
    CHECK(rep.t_release == rel.time);
    CHECK(rep.structural_loss == rel.structural_loss);

    double governing = 0;
    for (std::size_t i = 0; i < r.holes.size(); ++i)
    {
        double tc = thickness_to_clog(r.holes[i], st.cap_thickness, sio2, r.clogging);
        governing = std::max(governing, tc);
        CHECK(rep.holes[i].clog_thickness == tc);
        auto res = residue_estimate(r.holes[i], st.cap_thickness, st.clog_deposition, sio2, r.clogging);
        CHECK(rep.holes[i].residue_thickness == res.thickness);
        CHECK(rep.holes[i].underetch
              == underetch(r.holes[i], st, r.etch, r.report_time, r.release.integration));
    }
    CHECK(rep.governing_clog_thickness == governing);

    PlateSpec spec{30 * um, 30 * um, st.cap_thickness + st.clog_deposition, sio2, 10 * MPa};
    auto sol = solve_plate(spec, 128);
    CHECK(rep.w_max == sol.w_max);
    CHECK(rep.sigma_max == sol.sigma_max);
}

TEST_CASE("zero molding pressure passes the mechanical checks")
{
    auto r = reference();
    set_recipe_value(r, "molding.pressure", "0bar");
    auto rep = run_recipe(r);
    CHECK(rep.w_max == 0);
    CHECK(rep.sigma_max == 0);
    CHECK(rep.deflection_ok);
    CHECK(rep.stress_ok);
}

TEST_CASE("stage errors are labelled")
{
    auto r = reference();
    set_recipe_value(r, "release.max_time", "1min");
    try
    {
        run_recipe(r);
        FAIL("expected ModelError");
    }
    catch (ModelError const& e)
    {
        CHECK(std::string(e.what()).rfind("release: release too slow", 0) == 0);
    }

    r = reference();
    set_recipe_value(r, "clogging.max_deposition", "1um");
    try
    {
        run_recipe(r);
        FAIL("expected ModelError");
    }
    catch (ModelError const& e)
    {
        CHECK(std::string(e.what()).rfind("clogging: unclottable", 0) == 0);
    }
}

TEST_CASE("recipe overrides")
{
    auto r = reference();
    set_recipe_value(r, "stack.sacrificial_thickness", "1.1um");
    CHECK(r.stack.sacrificial_thickness == doctest::Approx(1.1e-6));
    set_recipe_value(r, "materials.SiO2.sticking_coefficient", "0.3");
    CHECK(r.material("SiO2").sticking_coefficient == doctest::Approx(0.3));
    set_recipe_value(r, "holes.size", "2um");
    CHECK(std::all_of(r.holes.begin(), r.holes.end(),
                      [](Hole const& h) { return std::abs(hole_min_dimension(h) - 2e-6) < 1e-15; }));
    set_recipe_value(r, "molding.max_deflection", "none");
    CHECK(std::isinf(r.molding.max_deflection));
    set_recipe_value(r, "molding.grid_n", "64");
    CHECK(r.molding.grid_n == 64);

    CHECK_THROWS_AS(set_recipe_value(r, "stack.colour", "1um"), InputError);
    CHECK_THROWS_AS(set_recipe_value(r, "materials", "1um"), InputError);
    CHECK_THROWS_AS(set_recipe_value(r, "stack.cap_thickness", "2min"), InputError);
    CHECK_THROWS_AS(set_recipe_value(r, "molding.grid_n", "6.5"), InputError);
    CHECK_THROWS_AS(set_recipe_value(r, "materials.Unobtainium.poisson_ratio", "0.2"), InputError);
}

TEST_CASE("tabular report format and round trip")
{
    auto rep = run_recipe(reference());
    auto text = emit_report(rep, ReportFormat::tabular);
    CHECK(text.substr(0, text.find('\n')) == report_header);
    auto fields = parse_tabular_report(text);
    auto find = [&](std::string const& name) {
        auto it = std::find_if(fields.begin(), fields.end(),
                               [&](TabularField const& f) { return f.field == name; });
        REQUIRE(it != fields.end());
        return *it;
    };
    CHECK(find("t_release").units == "min");
    CHECK(find("t_release").value == doctest::Approx(rep.t_release / min).epsilon(1e-5));
    CHECK(find("w_max").value == doctest::Approx(rep.w_max / nm).epsilon(1e-5));
    CHECK(find("hole8.residue").value
          == doctest::Approx(rep.holes[8].residue_thickness / nm).epsilon(1e-5));
    CHECK(find("pass").value == 1);

    // Re-emitting the parsed numbers reproduces the text byte for byte.
    std::string again = std::string(report_header) + "\n";
    char buf[64];
    for (auto const& f : fields)
    {
        std::snprintf(buf, sizeof buf, "%.6g", f.value);
        again += f.field + "," + f.units + "," + buf + "\n";
    }
    CHECK(again == text);

    CHECK_THROWS_AS(parse_tabular_report("a,b,c\n"), InputError);
    CHECK_THROWS_AS(parse_tabular_report(std::string(report_header) + "\nx,y\n"), InputError);
    CHECK_THROWS_AS(parse_tabular_report(std::string(report_header) + "\nx,y,z\n"), InputError);

    auto human = emit_report(rep, ReportFormat::text);
    CHECK(human.find("Overall: pass") != std::string::npos);
}

TEST_CASE("molding check")
{
    auto r = reference();
    auto c = check_molding(r);
    auto rep = run_recipe(r);
    CHECK(c.w_max == rep.w_max);
    CHECK(c.cap_thickness == rep.cap_thickness_total);
    REQUIRE(c.min_thickness.has_value());
    CHECK(*c.min_thickness < c.cap_thickness);
    auto text = emit_molding_check(c, ReportFormat::tabular);
    CHECK(text.find("min_cap_thickness,um,") != std::string::npos);
    CHECK(parse_tabular_report(text).size() == 7);
}

TEST_CASE("sweeps")
{
    auto r = reference();
    auto empty = emit_sweep(sweep(r, "holes.size", {}), ReportFormat::tabular);
    CHECK(empty == std::string(sweep_header) + "\n");

    auto one = sweep(r, "stack.clog_deposition", {"2.5um"});
    REQUIRE(one.size() == 1);
    REQUIRE(one[0].report.has_value());
    CHECK(emit_report(*one[0].report, ReportFormat::tabular) == tabular(r));
    CHECK(one[0].status == "ok");

    CHECK_THROWS_AS(sweep(r, "stack.nothing", {"1um"}), InputError);
    CHECK_THROWS_AS(sweep(r, "stack.cap_thickness", {"1um", "2 parsecs"}), InputError);

    auto rows = sweep(r, "stack.clog_deposition", {"1um", "2.5um"});
    CHECK(rows[0].status == "fail");
    CHECK_FALSE(rows[0].report->sealed_ok);

    auto err = sweep(r, "release.max_time", {"1min", "120min"});
    CHECK(err[0].status.rfind("error: release:", 0) == 0);
    CHECK_FALSE(err[0].report.has_value());
    CHECK(err[1].status == "ok");
    auto table = emit_sweep(err, ReportFormat::tabular);
    CHECK(table.find("1min,nan,nan,") != std::string::npos);
}

TEST_CASE("sweep rows are independent of order and thread count")
{
    auto r = reference();
    std::vector<std::string> values{"1.2um", "1.5um", "2um", "2.5um", "3um"};
    std::vector<std::string> reversed(values.rbegin(), values.rend());
    auto serial = emit_sweep(sweep(r, "holes.size", values, 1), ReportFormat::tabular);
    for (unsigned t : {2u, 3u, 8u})
        CHECK(emit_sweep(sweep(r, "holes.size", values, t), ReportFormat::tabular) == serial);

    auto lines = [](std::string const& s) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos < s.size())
        {
            auto nl = s.find('\n', pos);
            out.push_back(s.substr(pos, nl - pos));
            pos = nl + 1;
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto back = emit_sweep(sweep(r, "holes.size", reversed, 4), ReportFormat::tabular);
    CHECK(lines(back) == lines(serial));
}
