// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vacpack/material.hpp"

namespace vacpack
{
//! Rectangular cap membrane, clamped on all four edges, under uniform
//! transverse pressure. SI units.
struct PlateSpec
{
    double side_a = 0;  //!< extent along x
    double side_b = 0;  //!< extent along y
    double thickness = 0;
    Material material;
    double pressure = 0;

    void validate() const;
};

struct PlateSolution
{
    int grid_n = 0;  //!< divisions per side; nodes are (grid_n + 1)^2
    double side_a = 0;
    double side_b = 0;
    std::vector<double> deflection;  //!< row-major, index j * (grid_n + 1) + i
    double w_max = 0;                //!< m
    double sigma_max = 0;            //!< Pa
    std::vector<std::string> warnings;

    double at(int i, int j) const
    {
        return deflection[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_n + 1)
                          + static_cast<std::size_t>(i)];
    }
};

//! D = E t^3 / (12 (1 - nu^2)), in N*m.
double flexural_rigidity(Material const& material, double thickness);

/*!
 * Factorized finite-difference biharmonic operator for one plate geometry.
 *
 * Thirteen-point stencil on a (grid_n + 1)^2 node grid; the clamped edge
 * uses mirrored ghost nodes (zero slope) and zero deflection. Because the
 * problem is linear in q / D, one factorization serves every load,
 * thickness and material on the same geometry.
 */
class PlateOperator
{
  public:
    PlateOperator(double side_a, double side_b, int grid_n);
    ~PlateOperator();
    PlateOperator(PlateOperator const&) = delete;
    PlateOperator& operator=(PlateOperator const&) = delete;

    int grid_n() const { return n_; }
    double side_a() const { return a_; }
    double side_b() const { return b_; }

    //! Nodal deflection for q / D = 1 m^-3, i.e. deflection per unit q / D.
    std::vector<double> const& unit_field() const { return unit_; }
    //! Peak deflection of the unit field.
    double unit_w_max() const { return unit_w_max_; }
    //! max |w_xx + nu w_yy| (or its y twin) of the unit field.
    double unit_curvature_max(double poisson_ratio) const;

    //! Shared instance for a geometry (thread safe).
    static std::shared_ptr<PlateOperator const> cached(double side_a, double side_b, int grid_n);

  private:
    double a_;
    double b_;
    int n_;
    std::vector<double> unit_;
    double unit_w_max_ = 0;
};

//! Max bending moment per unit rigidity, from the second differences of
//! \c field (mirrored ghost node on the clamped boundary).
double curvature_max(std::span<double const> field,
                     int grid_n,
                     double side_a,
                     double side_b,
                     double poisson_ratio);

PlateSolution solve_plate(PlateSpec const& spec, int grid_n = 128);

//! sigma_max = 6 M_max / t^2 in Pa.
double max_bending_stress(PlateSpec const& spec, PlateSolution const& solution);

struct MaterialComparisonRow
{
    std::string material;
    double thickness = 0;      //!< m
    double w_max = 0;          //!< m
    double sigma_max = 0;      //!< Pa
    double safety_factor = 0;  //!< failure_stress / sigma_max (inf at zero load)
};

std::vector<MaterialComparisonRow> compare_materials(std::span<PlateSpec const> specs,
                                                     int grid_n = 128);

//! "x_um,y_um,w_nm" table of every node.
void write_deflection_field(std::ostream& os, PlateSolution const& solution);
}  // namespace vacpack
