// SPDX-License-Identifier: Apache-2.0
#include "vacpack/designer.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "vacpack/error.hpp"
#include "vacpack/root_finding.hpp"

namespace vacpack
{
void DesignConstraints::validate() const
{
    if (!(max_deflection > 0))
        throw InputError("max_deflection must be > 0");
    if (!(safety_factor >= 1))
        throw InputError("safety_factor must be >= 1");
    if (!(pressure > 0))
        throw InputError("design pressure must be > 0");
    if (!(side_a > 0) || !(side_b > 0))
        throw InputError("membrane sides must be > 0");
    if (!(t_min > 0) || !(t_min < t_max))
        throw InputError("thickness bounds need 0 < t_min < t_max");
    if (!(thickness_step > 0))
        throw InputError("thickness_step must be > 0");
}

CapEvaluator::CapEvaluator(Material material, DesignConstraints constraints)
    : material_(std::move(material)), constraints_(constraints)
{
    constraints_.validate();
    material_.validate();
    op_ = PlateOperator::cached(constraints_.side_a, constraints_.side_b, constraints_.grid_n);
    curvature_unit_ = op_->unit_curvature_max(material_.poisson_ratio);
}

double CapEvaluator::w_max(double t) const
{
    return op_->unit_w_max() * constraints_.pressure / flexural_rigidity(material_, t);
}

double CapEvaluator::sigma_max(double t) const
{
    // 6 M / t^2 with M = D * curvature and curvature = (q / D) * unit.
    return 6 * constraints_.pressure * curvature_unit_ / (t * t);
}

double CapEvaluator::allowable_stress() const
{
    return material_.failure_stress / constraints_.safety_factor;
}

bool CapEvaluator::deflection_ok(double t) const
{
    return w_max(t) <= constraints_.max_deflection;
}

bool CapEvaluator::stress_ok(double t) const
{
    return sigma_max(t) <= allowable_stress();
}

CapDesign min_cap_thickness(Material const& material, DesignConstraints const& constraints)
{
    CapEvaluator eval(material, constraints);
    auto const& c = eval.constraints();

    auto last = static_cast<std::int64_t>(std::ceil((c.t_max - c.t_min) / c.thickness_step - 1e-9));
    auto thickness_at = [&](std::int64_t k) {
        return std::min(c.t_max, c.t_min + static_cast<double>(k) * c.thickness_step);
    };

    if (!eval.feasible(c.t_max))
    {
        std::ostringstream os;
        os << "no feasible thickness for " << material.name << " up to " << c.t_max / units::um
           << " um:";
        if (!eval.deflection_ok(c.t_max))
        {
            os << " deflection " << eval.w_max(c.t_max) / units::nm << " nm > "
               << c.max_deflection / units::nm << " nm;";
        }
        if (!eval.stress_ok(c.t_max))
        {
            os << " stress " << eval.sigma_max(c.t_max) / units::MPa << " MPa > "
               << eval.allowable_stress() / units::MPa << " MPa;";
        }
        throw ModelError(os.str());
    }

    auto k = first_true_index([&](std::int64_t i) { return eval.feasible(thickness_at(i)); },
                              0, last);
    CapDesign d;
    d.thickness = thickness_at(k);

    PlateSpec spec{c.side_a, c.side_b, d.thickness, material, c.pressure};
    auto sol = solve_plate(spec, c.grid_n);
    d.w_max = sol.w_max;
    d.sigma_max = sol.sigma_max;
    return d;
}

double equivalent_thickness(Material const& material_a,
                            double t_a,
                            Material const& material_b,
                            DesignConstraints const& constraints,
                            MatchMode mode)
{
    if (!(t_a > 0))
        throw InputError("equivalent_thickness: t_a must be > 0");
    CapEvaluator ea(material_a, constraints);
    CapEvaluator eb(material_b, constraints);
    auto const& c = eb.constraints();

    // Both targets decrease monotonically in thickness; match in log space.
    auto mismatch = [&](double t) {
        if (mode == MatchMode::deflection)
            return std::log(eb.w_max(t) / ea.w_max(t_a));
        double sf_a = material_a.failure_stress / ea.sigma_max(t_a);
        double sf_b = material_b.failure_stress / eb.sigma_max(t);
        return std::log(sf_a / sf_b);
    };
    double lo = mismatch(c.t_min);
    double hi = mismatch(c.t_max);
    if (lo < 0 || hi > 0)
    {
        std::ostringstream os;
        os << "equivalent thickness of " << material_b.name << " lies outside ["
           << c.t_min / units::um << ", " << c.t_max / units::um << "] um";
        throw ModelError(os.str());
    }
    return bisect_root(mismatch, c.t_min, c.t_max, 1e-6 * units::nm);
}
}  // namespace vacpack
