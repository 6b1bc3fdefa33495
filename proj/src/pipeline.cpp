// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "vacpack/error.hpp"
#include "vacpack/mechanics.hpp"
#include "vacpack/recipe.hpp"

namespace vacpack
{
namespace
{
template<class F>
auto stage(char const* name, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (SolverError const& e)
    {
        throw SolverError(std::string(name) + ": " + e.what());
    }
    catch (ModelError const& e)
    {
        throw ModelError(std::string(name) + ": " + e.what());
    }
    catch (InputError const& e)
    {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

ReleaseOptions release_options(Recipe const& r)
{
    ReleaseOptions opts = r.release;
    opts.grid_pitch = r.grid_pitch;
    return opts;
}
}  // namespace

ProcessReport run_recipe(Recipe const& r)
{
    validate_recipe(r);
    ProcessReport rep;
    Material const& structural = r.material(r.structural);
    Material const& clog = r.material(r.clog);
    auto const& stack = r.stack;

    stage("release", [&] {
        auto res = time_to_release(stack.cavity_footprint, r.holes, stack, r.etch, structural,
                                   release_options(r));
        rep.t_release = res.time;
        rep.structural_loss = res.structural_loss;
        rep.report_time = r.report_time;
        rep.holes.resize(r.holes.size());
        for (std::size_t i = 0; i < r.holes.size(); ++i)
        {
            rep.holes[i].underetch
                = underetch(r.holes[i], stack, r.etch, r.report_time, r.release.integration);
        }
    });

    stage("clogging", [&] {
        rep.clog_deposition = stack.clog_deposition;
        for (std::size_t i = 0; i < r.holes.size(); ++i)
        {
            auto& hr = rep.holes[i];
            hr.clog_thickness = thickness_to_clog(r.holes[i], stack.cap_thickness, clog, r.clogging);
            rep.governing_clog_thickness = std::max(rep.governing_clog_thickness, hr.clog_thickness);
            auto s = clog_state(r.holes[i], stack.cap_thickness, stack.clog_deposition, clog,
                                r.clogging);
            hr.remaining_aperture = s.remaining_aperture;
            hr.sealed = s.sealed;
            hr.residue_thickness = s.residue_thickness;
            hr.residue_footprint = s.residue_footprint;
        }
        rep.sealed_ok = std::all_of(rep.holes.begin(), rep.holes.end(),
                                    [](HoleReport const& h) { return h.sealed; });
        // The cavity keeps the ambient of the sealing deposition.
        rep.cavity_pressure = r.chamber_pressure;
    });

    stage("molding", [&] {
        rep.cap_thickness_total = stack.cap_thickness + stack.clog_deposition;
        rep.molding_pressure = r.molding.pressure;
        PlateSpec spec{r.plate_side_a(), r.plate_side_b(), rep.cap_thickness_total, structural,
                       r.molding.pressure};
        auto sol = solve_plate(spec, r.molding.grid_n);
        rep.w_max = sol.w_max;
        rep.sigma_max = sol.sigma_max;
        rep.max_deflection = r.molding.max_deflection;
        rep.allowable_stress = structural.failure_stress / r.molding.safety_factor;
        rep.deflection_ok = rep.w_max <= rep.max_deflection;
        rep.stress_ok = rep.sigma_max <= rep.allowable_stress;
    });
    return rep;
}

MoldingCheck check_molding(Recipe const& r)
{
    validate_recipe(r);
    Material const& structural = r.material(r.structural);
    MoldingCheck c;
    c.cap_thickness = r.stack.cap_thickness + r.stack.clog_deposition;
    PlateSpec spec{r.plate_side_a(), r.plate_side_b(), c.cap_thickness, structural,
                   r.molding.pressure};
    auto sol = stage("molding", [&] { return solve_plate(spec, r.molding.grid_n); });
    c.w_max = sol.w_max;
    c.sigma_max = sol.sigma_max;
    c.allowable_stress = structural.failure_stress / r.molding.safety_factor;
    c.deflection_ok = c.w_max <= r.molding.max_deflection;
    c.stress_ok = c.sigma_max <= c.allowable_stress;
    if (r.molding.pressure > 0 && std::isfinite(r.molding.max_deflection))
    {
        DesignConstraints dc;
        dc.max_deflection = r.molding.max_deflection;
        dc.safety_factor = r.molding.safety_factor;
        dc.pressure = r.molding.pressure;
        dc.side_a = r.plate_side_a();
        dc.side_b = r.plate_side_b();
        dc.t_min = r.molding.t_min;
        dc.t_max = r.molding.t_max;
        dc.grid_n = r.molding.grid_n;
        try
        {
            c.min_thickness = min_cap_thickness(structural, dc).thickness;
        }
        catch (ModelError const&)
        {
            // Infeasible within bounds; reported as absent.
        }
    }
    return c;
}

std::vector<SweepRow> sweep(Recipe const& recipe,
                            std::string_view path,
                            std::vector<std::string> const& values,
                            unsigned threads)
{
    // Apply every override up front so bad paths or values fail before any
    // simulation runs.
    std::vector<Recipe> variants;
    variants.reserve(values.size());
    for (auto const& v : values)
    {
        Recipe copy = recipe;
        set_recipe_value(copy, path, v);
        variants.push_back(std::move(copy));
    }

    std::vector<SweepRow> rows(values.size());
    auto run_one = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        try
        {
            row.report = run_recipe(variants[i]);
            row.status = row.report->passed() ? "ok" : "fail";
        }
        catch (std::exception const& e)
        {
            row.status = std::string("error: ") + e.what();
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            run_one(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++)
                    run_one(i);
            });
        }
    }
    return rows;
}
}  // namespace vacpack
