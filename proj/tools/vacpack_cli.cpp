// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vacpack/error.hpp"
#include "vacpack/mechanics.hpp"
#include "vacpack/recipe.hpp"
#include "vacpack/release_etch.hpp"

namespace
{
enum ExitCode : int
{
    exit_ok = 0,
    exit_constraint = 1,
    exit_input = 2,
    exit_model = 3,
};

void write_output(std::string const& text, std::string const& out)
{
    if (out.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f)
        throw vacpack::InputError("cannot write " + out);
    f << text;
}

std::string calibration_text(vacpack::EtchCalibration const& c,
                             std::size_t n_obs,
                             vacpack::ReportFormat format)
{
    using namespace vacpack::units;
    char buf[256];
    std::ostringstream os;
    if (format == vacpack::ReportFormat::tabular)
    {
        os << vacpack::report_header << '\n';
        std::snprintf(buf, sizeof buf,
                      "R0,um/min,%.6g\nc_aperture,um^2,%.6g\nc_path,1,%.6g\n"
                      "reference_thickness,um,%.6g\nresidual_norm,um,%.6g\nobservations,1,%zu\n",
                      c.params.rate / um_per_min, c.params.c_aperture / um2, c.params.c_path,
                      c.params.reference_thickness / um, c.residual_norm / um, n_obs);
        os << buf;
        return os.str();
    }
    std::snprintf(buf, sizeof buf,
                  "Calibrated release parameters (%zu observations)\n"
                  "  R0          %.6g um/min (at %.6g um sacrificial layer)\n"
                  "  c_aperture  %.6g um^2\n"
                  "  c_path      %.6g\n"
                  "  residual    %.6g um\n",
                  n_obs, c.params.rate / um_per_min, c.params.reference_thickness / um,
                  c.params.c_aperture / um2, c.params.c_path, c.residual_norm / um);
    return buf;
}

std::vector<std::string> split_values(std::string const& list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Thin-film vacuum packaging process simulator"};
    app.require_subcommand(1);

    std::string format_name = "text";
    std::string out;

    std::string recipe_path;
    auto* simulate = app.add_subcommand("simulate", "Run release, clogging and molding check");
    simulate->add_option("recipe", recipe_path, "Recipe file")->required();

    std::string param;
    std::string values;
    unsigned threads = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Repeat the simulation over parameter values");
    sweep_cmd->add_option("recipe", recipe_path, "Recipe file")->required();
    sweep_cmd->add_option("--param", param, "Field path, e.g. stack.sacrificial_thickness")
        ->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values with units")->required();
    sweep_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string data_path;
    double reference_um = 1.0;
    auto* calibrate = app.add_subcommand("calibrate-etch", "Fit release parameters to data");
    calibrate->add_option("datafile", data_path, "Underetch observations")->required();
    calibrate->add_option("--reference-thickness", reference_um,
                          "Sacrificial thickness (um) at which R0 is quoted");

    std::string field_out;
    auto* molding = app.add_subcommand("check-molding", "Cap deflection and stress only");
    molding->add_option("recipe", recipe_path, "Recipe file")->required();
    molding->add_option("--field", field_out, "Also write the deflection field (x_um,y_um,w_nm)");

    for (auto* sub : {simulate, sweep_cmd, calibrate, molding})
    {
        sub->add_option("--format", format_name, "Output format")
            ->check(CLI::IsMember({"text", "tabular"}));
        sub->add_option("--out", out, "Write output to this file instead of stdout");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    auto format = format_name == "tabular" ? vacpack::ReportFormat::tabular
                                           : vacpack::ReportFormat::text;
    try
    {
        if (*simulate)
        {
            auto recipe = vacpack::load_recipe(recipe_path);
            auto report = vacpack::run_recipe(recipe);
            write_output(vacpack::emit_report(report, format), out);
            return report.passed() ? exit_ok : exit_constraint;
        }
        if (*sweep_cmd)
        {
            auto recipe = vacpack::load_recipe(recipe_path);
            auto rows = vacpack::sweep(recipe, param, split_values(values), threads);
            write_output(vacpack::emit_sweep(rows, format), out);
            return exit_ok;
        }
        if (*calibrate)
        {
            auto data = vacpack::read_etch_data(data_path);
            vacpack::EtchCalibrationOptions opts;
            opts.initial.reference_thickness = reference_um * vacpack::units::um;
            auto cal = vacpack::calibrate_etch(data, opts);
            write_output(calibration_text(cal, data.size(), format), out);
            return exit_ok;
        }
        if (*molding)
        {
            auto recipe = vacpack::load_recipe(recipe_path);
            auto check = vacpack::check_molding(recipe);
            write_output(vacpack::emit_molding_check(check, format), out);
            if (!field_out.empty())
            {
                vacpack::PlateSpec spec{recipe.plate_side_a(), recipe.plate_side_b(),
                                        check.cap_thickness, recipe.material(recipe.structural),
                                        recipe.molding.pressure};
                std::ofstream f(field_out);
                if (!f)
                    throw vacpack::InputError("cannot write " + field_out);
                vacpack::write_deflection_field(f, vacpack::solve_plate(spec, recipe.molding.grid_n));
            }
            return check.deflection_ok && check.stress_ok ? exit_ok : exit_constraint;
        }
    }
    catch (vacpack::InputError const& e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_input;
    }
    catch (vacpack::ModelError const& e)
    {
        std::cerr << "model error: " << e.what() << '\n';
        return exit_model;
    }
    return exit_ok;
}
