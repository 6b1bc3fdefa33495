// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vacpack/clogging.hpp"
#include "vacpack/designer.hpp"
#include "vacpack/geometry.hpp"
#include "vacpack/material.hpp"
#include "vacpack/release_etch.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
struct MoldingSettings
{
    double pressure = 100.0 * units::bar;
    double max_deflection = std::numeric_limits<double>::infinity();
    double safety_factor = 1.0;
    double side_a = 0;  //!< 0: use the footprint width
    double side_b = 0;  //!< 0: use the footprint height
    int grid_n = 128;
    double t_min = 0.1 * units::um;
    double t_max = 20.0 * units::um;
};

//! A parsed process description. All quantities SI.
struct Recipe
{
    MaterialLibrary materials = default_materials();
    std::string sacrificial = "aSi";
    std::string structural = "SiO2";
    std::string clog = "SiO2";

    PackageStack stack;
    std::vector<Hole> holes;
    double grid_pitch = 0;  //!< coverage raster; 0 selects the default

    EtchParams etch;
    ReleaseOptions release;
    double report_time = 2.0 * units::min;
    std::optional<std::filesystem::path> etch_calibration_file;

    ClogParams clogging;
    double chamber_pressure = 5e-7 * units::mbar;

    MoldingSettings molding;

    Material const& material(std::string_view name) const;
    double plate_side_a() const;
    double plate_side_b() const;
};

struct ParseOptions
{
    //! Directory against which relative data-file paths are resolved.
    std::filesystem::path base_dir = ".";
};

/*!
 * Parse the line-oriented recipe grammar:
 *
 *   # comment
 *   [section]
 *   key = value
 *
 * Sections: materials, stack, holes, release, clogging, molding. Each may
 * appear once. Physical quantities carry a unit suffix built from
 * nm, um, mm, min, s, MPa, GPa, bar, mbar (with '/' and '^', e.g. um/min,
 * um^2). Errors are reported as InputError with the line number.
 */
Recipe parse_recipe(std::string_view text, ParseOptions const& opts = {});
Recipe load_recipe(std::filesystem::path const& path);

//! Re-check every cross-field invariant (used after overrides).
void validate_recipe(Recipe const& recipe);

/*!
 * Set one numeric recipe field addressed as "section.key" (or
 * "materials.<name>.<property>", "holes.size", "holes.length") from a
 * quantity string such as "2.5um". Throws InputError for unknown or
 * non-numeric paths.
 */
void set_recipe_value(Recipe& recipe, std::string_view path, std::string_view value);

//---------------------------------------------------------------------------//
struct HoleReport
{
    double underetch = 0;            //!< at report_time, m
    double clog_thickness = 0;       //!< m
    double remaining_aperture = 0;   //!< after the recipe deposit, m
    double residue_thickness = 0;    //!< m
    double residue_footprint = 0;    //!< m
    bool sealed = false;
};

struct ProcessReport
{
    double t_release = 0;        //!< s
    double structural_loss = 0;  //!< m
    double report_time = 0;      //!< s
    std::vector<HoleReport> holes;
    double governing_clog_thickness = 0;  //!< m
    double clog_deposition = 0;           //!< m
    double cavity_pressure = 0;           //!< Pa
    double cap_thickness_total = 0;       //!< m
    double molding_pressure = 0;          //!< Pa
    double w_max = 0;                     //!< m
    double sigma_max = 0;                 //!< Pa
    double max_deflection = 0;            //!< m (inf: unconstrained)
    double allowable_stress = 0;          //!< Pa

    bool sealed_ok = false;
    bool deflection_ok = false;
    bool stress_ok = false;

    bool passed() const { return sealed_ok && deflection_ok && stress_ok; }
};

//! Release, clog, residue and molding check in process order. Stage errors
//! are rethrown with the stage name prefixed.
ProcessReport run_recipe(Recipe const& recipe);

//---------------------------------------------------------------------------//
struct MoldingCheck
{
    double cap_thickness = 0;
    double w_max = 0;
    double sigma_max = 0;
    double allowable_stress = 0;
    bool deflection_ok = false;
    bool stress_ok = false;
    //! Thinnest feasible cap, when a deflection limit and load are given.
    std::optional<double> min_thickness;
};

MoldingCheck check_molding(Recipe const& recipe);

//---------------------------------------------------------------------------//
enum class ReportFormat
{
    text,
    tabular
};

//! Header line of single-run tabular output.
inline constexpr std::string_view report_header = "field,units,value";
//! Header line of sweep output.
inline constexpr std::string_view sweep_header
    = "value,t_release_min,structural_loss_nm,underetch_um,clog_thickness_um,"
      "remaining_aperture_nm,residue_nm,residue_footprint_um,cavity_pressure_mbar,"
      "w_max_nm,sigma_max_MPa,pass,status";

std::string emit_report(ProcessReport const& report, ReportFormat format);
std::string emit_molding_check(MoldingCheck const& check, ReportFormat format);

//! Fields of a tabular report, in order, as (field, units, value).
struct TabularField
{
    std::string field;
    std::string units;
    double value;
};
std::vector<TabularField> parse_tabular_report(std::string_view text);

//---------------------------------------------------------------------------//
struct SweepRow
{
    std::string value;  //!< the literal value as given
    std::optional<ProcessReport> report;
    std::string status;  //!< "ok", "fail" (constraint) or "error: ..."
};

/*!
 * One run per value with \c path overridden; rows keep the order of
 * \c values. Rows are computed on up to \c threads workers and are
 * independent of each other.
 */
std::vector<SweepRow> sweep(Recipe const& recipe,
                            std::string_view path,
                            std::vector<std::string> const& values,
                            unsigned threads = 1);

std::string emit_sweep(std::vector<SweepRow> const& rows, ReportFormat format);
}  // namespace vacpack
