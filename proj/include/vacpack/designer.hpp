// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <memory>

#include "vacpack/material.hpp"
#include "vacpack/mechanics.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
struct DesignConstraints
{
    double max_deflection = std::numeric_limits<double>::infinity();  //!< m
    double safety_factor = 1.0;  //!< applied to failure_stress
    double pressure = 0;         //!< Pa
    double side_a = 0;
    double side_b = 0;
    double t_min = 0.1 * units::um;
    double t_max = 20.0 * units::um;
    double thickness_step = 10.0 * units::nm;
    int grid_n = 128;

    void validate() const;
};

/*!
 * Deflection and stress of one cap geometry as a function of thickness.
 *
 * The plate operator is factorized once; w_max scales as 1 / D(t) and the
 * peak bending stress as 1 / t^2, so every query after construction is
 * O(1).
 */
class CapEvaluator
{
  public:
    CapEvaluator(Material material, DesignConstraints constraints);

    double w_max(double thickness) const;
    double sigma_max(double thickness) const;
    double allowable_stress() const;
    bool deflection_ok(double thickness) const;
    bool stress_ok(double thickness) const;
    bool feasible(double thickness) const { return deflection_ok(thickness) && stress_ok(thickness); }

    Material const& material() const { return material_; }
    DesignConstraints const& constraints() const { return constraints_; }

  private:
    Material material_;
    DesignConstraints constraints_;
    std::shared_ptr<PlateOperator const> op_;
    double curvature_unit_;
};

struct CapDesign
{
    double thickness = 0;  //!< m
    double w_max = 0;      //!< m, from the verification solve
    double sigma_max = 0;  //!< Pa
};

/*!
 * Thinnest cap on the grid t_min + k * thickness_step (capped at t_max)
 * meeting both the deflection and the stress limit. Throws ModelError
 * listing the violated limits when even t_max fails.
 */
CapDesign min_cap_thickness(Material const& material, DesignConstraints const& constraints);

enum class MatchMode
{
    deflection,     //!< same w_max
    safety_factor,  //!< same failure_stress / sigma_max
};

/*!
 * Thickness of \c material_b matching (\c material_a, \c t_a) under the
 * pressure and geometry of \c constraints. Throws ModelError when the match
 * lies outside [t_min, t_max].
 */
double equivalent_thickness(Material const& material_a,
                            double t_a,
                            Material const& material_b,
                            DesignConstraints const& constraints,
                            MatchMode mode = MatchMode::deflection);
}  // namespace vacpack
