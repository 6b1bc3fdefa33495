// SPDX-License-Identifier: Apache-2.0
#include "vacpack/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "vacpack/error.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
void PlateSpec::validate() const
{
    if (!(side_a > 0) || !(side_b > 0))
        throw InputError("plate sides must be > 0");
    if (!(thickness > 0))
        throw InputError("plate thickness must be > 0");
    if (!(pressure >= 0) || !std::isfinite(pressure))
        throw InputError("plate pressure must be >= 0");
    material.validate();
}

double flexural_rigidity(Material const& material, double thickness)
{
    if (!(thickness > 0))
        throw InputError("flexural_rigidity: thickness must be > 0");
    double nu = material.poisson_ratio;
    return material.youngs_modulus * thickness * thickness * thickness / (12 * (1 - nu * nu));
}

//---------------------------------------------------------------------------//
PlateOperator::PlateOperator(double side_a, double side_b, int grid_n)
    : a_(side_a), b_(side_b), n_(grid_n)
{
    if (grid_n < 16)
        throw InputError("plate grid_n must be >= 16");
    if (!(side_a > 0) || !(side_b > 0))
        throw InputError("plate sides must be > 0");

    int const m = n_ - 1;  // interior nodes per direction
    double const hx = a_ / n_;
    double const hy = b_ / n_;
    // Equation scaled by hx^2 hy^2 keeps the coefficients O(1).
    double const cx = hy * hy / (hx * hx);
    double const cy = hx * hx / (hy * hy);
    double const cxy = 2.0;

    auto index = [m](int i, int j) { return (j - 1) * m + (i - 1); };
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m) * 13);

    auto add = [&](int row, int i, int j, double c) {
        // Mirror ghosts across the clamped edge: w(-1) = w(1).
        if (i == -1)
            i = 1;
        else if (i == n_ + 1)
            i = n_ - 1;
        if (j == -1)
            j = 1;
        else if (j == n_ + 1)
            j = n_ - 1;
        if (i <= 0 || i >= n_ || j <= 0 || j >= n_)
            return;  // w = 0 on the boundary
        trips.emplace_back(row, index(i, j), c);
    };

    for (int j = 1; j < n_; ++j)
    {
        for (int i = 1; i < n_; ++i)
        {
            int row = index(i, j);
            // w_xxxx
            add(row, i - 2, j, cx);
            add(row, i - 1, j, -4 * cx);
            add(row, i, j, 6 * cx);
            add(row, i + 1, j, -4 * cx);
            add(row, i + 2, j, cx);
            // w_yyyy
            add(row, i, j - 2, cy);
            add(row, i, j - 1, -4 * cy);
            add(row, i, j, 6 * cy);
            add(row, i, j + 1, -4 * cy);
            add(row, i, j + 2, cy);
            // 2 w_xxyy
            add(row, i - 1, j - 1, cxy);
            add(row, i + 1, j - 1, cxy);
            add(row, i - 1, j + 1, cxy);
            add(row, i + 1, j + 1, cxy);
            add(row, i - 1, j, -2 * cxy);
            add(row, i + 1, j, -2 * cxy);
            add(row, i, j - 1, -2 * cxy);
            add(row, i, j + 1, -2 * cxy);
            add(row, i, j, 4 * cxy);
        }
    }

    Eigen::SparseMatrix<double> A(m * m, m * m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(m * m, hx * hx * hy * hy);

    Eigen::VectorXd x;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() == Eigen::Success)
    {
        x = ldlt.solve(rhs);
    }
    if (ldlt.info() != Eigen::Success || !x.allFinite())
    {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
        if (lu.info() != Eigen::Success)
            throw SolverError("plate operator is singular");
        x = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !x.allFinite())
            throw SolverError("plate solve failed");
    }

    unit_.assign(static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1), 0.0);
    for (int j = 1; j < n_; ++j)
        for (int i = 1; i < n_; ++i)
            unit_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1)
                  + static_cast<std::size_t>(i)]
                = x[index(i, j)];
    unit_w_max_ = *std::max_element(unit_.begin(), unit_.end());
}

PlateOperator::~PlateOperator() = default;

double PlateOperator::unit_curvature_max(double poisson_ratio) const
{
    return curvature_max(unit_, n_, a_, b_, poisson_ratio);
}

std::shared_ptr<PlateOperator const> PlateOperator::cached(double side_a, double side_b, int grid_n)
{
    using Key = std::tuple<double, double, int>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<PlateOperator const>> cache;

    Key key{side_a, side_b, grid_n};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto op = std::make_shared<PlateOperator const>(side_a, side_b, grid_n);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(op)).first->second;
}

//---------------------------------------------------------------------------//
double curvature_max(std::span<double const> w,
                     int n,
                     double side_a,
                     double side_b,
                     double nu)
{
    double const hx = side_a / n;
    double const hy = side_b / n;
    auto at = [&](int i, int j) {
        return w[static_cast<std::size_t>(j) * static_cast<std::size_t>(n + 1)
                 + static_cast<std::size_t>(i)];
    };
    // Normal curvature at a clamped edge through the same mirrored ghost
    // node the operator uses: (w(h) - 2 w(0) + w(-h)) / h^2 = 2 w(h) / h^2.
    auto edge = [](double w1, double h) { return 2 * w1 / (h * h); };

    double best = 0;
    for (int j = 0; j <= n; ++j)
    {
        for (int i = 0; i <= n; ++i)
        {
            bool bx = (i == 0 || i == n);
            bool by = (j == 0 || j == n);
            double wxx = 0;
            double wyy = 0;
            if (bx && by)
                continue;  // corner: both curvatures vanish
            if (bx)
            {
                int s = i == 0 ? 1 : -1;
                wxx = edge(at(i + s, j), hx);
            }
            else if (by)
            {
                int s = j == 0 ? 1 : -1;
                wyy = edge(at(i, j + s), hy);
            }
            else
            {
                wxx = (at(i - 1, j) - 2 * at(i, j) + at(i + 1, j)) / (hx * hx);
                wyy = (at(i, j - 1) - 2 * at(i, j) + at(i, j + 1)) / (hy * hy);
            }
            double mx = std::abs(wxx + nu * wyy);
            double my = std::abs(wyy + nu * wxx);
            best = std::max({best, mx, my});
        }
    }
    return best;
}

PlateSolution solve_plate(PlateSpec const& spec, int grid_n)
{
    spec.validate();
    auto op = PlateOperator::cached(spec.side_a, spec.side_b, grid_n);
    double D = flexural_rigidity(spec.material, spec.thickness);
    double scale = spec.pressure / D;

    PlateSolution sol;
    sol.grid_n = grid_n;
    sol.side_a = spec.side_a;
    sol.side_b = spec.side_b;
    sol.deflection = op->unit_field();
    for (auto& v : sol.deflection)
        v *= scale;
    sol.w_max = op->unit_w_max() * scale;
    sol.sigma_max = max_bending_stress(spec, sol);
    if (spec.thickness > std::min(spec.side_a, spec.side_b) / 5)
        sol.warnings.emplace_back("thickness exceeds side/5: thin-plate assumption is weak");
    return sol;
}

double max_bending_stress(PlateSpec const& spec, PlateSolution const& solution)
{
    double D = flexural_rigidity(spec.material, spec.thickness);
    double curv = curvature_max(solution.deflection,
                                solution.grid_n,
                                solution.side_a,
                                solution.side_b,
                                spec.material.poisson_ratio);
    return 6 * D * curv / (spec.thickness * spec.thickness);
}

std::vector<MaterialComparisonRow> compare_materials(std::span<PlateSpec const> specs, int grid_n)
{
    if (specs.empty())
        throw InputError("compare_materials needs at least one plate");
    std::vector<MaterialComparisonRow> rows;
    for (auto const& spec : specs)
    {
        auto sol = solve_plate(spec, grid_n);
        double sf = sol.sigma_max > 0 ? spec.material.failure_stress / sol.sigma_max
                                      : std::numeric_limits<double>::infinity();
        rows.push_back({spec.material.name, spec.thickness, sol.w_max, sol.sigma_max, sf});
    }
    return rows;
}

void write_deflection_field(std::ostream& os, PlateSolution const& solution)
{
    int n = solution.grid_n;
    double hx = solution.side_a / n;
    double hy = solution.side_b / n;
    char buf[96];
    os << "x_um,y_um,w_nm\n";
    for (int j = 0; j <= n; ++j)
    {
        for (int i = 0; i <= n; ++i)
        {
            std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", i * hx / units::um,
                          j * hy / units::um, solution.at(i, j) / units::nm);
            os << buf;
        }
    }
}
}  // namespace vacpack
