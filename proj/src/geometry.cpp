// SPDX-License-Identifier: Apache-2.0
#include "vacpack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vacpack/error.hpp"

namespace vacpack
{
namespace
{
template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, char const* what)
{
    if (!(v > 0) || !std::isfinite(v))
    {
        throw InputError(std::string(what) + " must be strictly positive");
    }
}

// Half extents of a box-like hole along x and y.
std::pair<double, double> half_extents(HoleShape const& s)
{
    return std::visit(
        overloaded{
            [](Circle const& c) { return std::pair{c.diameter / 2, c.diameter / 2}; },
            [](Square const& q) { return std::pair{q.side / 2, q.side / 2}; },
            [](Slot const& r) {
                return r.length_axis == Axis::x
                           ? std::pair{r.length / 2, r.width / 2}
                           : std::pair{r.width / 2, r.length / 2};
            }},
        s);
}

// Visits cell centres relative to the footprint corner, which keeps the
// raster translation invariant. The callback receives the centre and the
// cell's ramp width.
template<class F>
void for_each_cell(Rect const& fp, double pitch, F&& f)
{
    auto nx = std::max<long>(1, static_cast<long>(std::ceil(fp.width / pitch - 1e-9)));
    auto ny = std::max<long>(1, static_cast<long>(std::ceil(fp.height / pitch - 1e-9)));
    double dx = fp.width / static_cast<double>(nx);
    double dy = fp.height / static_cast<double>(ny);
    double ramp = std::sqrt(dx * dy);
    for (long j = 0; j < ny; ++j)
    {
        for (long i = 0; i < nx; ++i)
        {
            Point rel{(static_cast<double>(i) + 0.5) * dx,
                      (static_cast<double>(j) + 0.5) * dy};
            if (!f(rel, ramp))
                return;
        }
    }
}

double signed_distance(HoleShape const& shape, double dx, double dy)
{
    if (auto const* c = std::get_if<Circle>(&shape))
        return std::hypot(dx, dy) - c->diameter / 2;
    auto [hx, hy] = half_extents(shape);
    double qx = std::abs(dx) - hx;
    double qy = std::abs(dy) - hy;
    return std::hypot(std::max(qx, 0.0), std::max(qy, 0.0)) + std::min(std::max(qx, qy), 0.0);
}

// Covered fraction of one cell: a linear ramp across the cell in the signed
// distance to the dilated union (negative inside).
double cell_fraction(Rect const& fp,
                     std::span<Hole const> holes,
                     std::span<double const> underetch,
                     Point rel,
                     double ramp)
{
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < holes.size(); ++k)
    {
        Point c = holes[k].center();
        double d = signed_distance(holes[k].shape(), rel.x - (c.x - fp.x0), rel.y - (c.y - fp.y0));
        s = std::min(s, d - underetch[k]);
    }
    double f = 0.5 - s / ramp;
    if (f >= 1 - 1e-9)
        return 1.0;
    return std::max(0.0, f);
}

void check_coverage_args(std::span<Hole const> holes,
                         std::span<double const> underetch,
                         double grid_pitch)
{
    if (holes.size() != underetch.size())
        throw InputError("release_coverage: one underetch value per hole required");
    require_positive(grid_pitch, "grid pitch");
}
}  // namespace

//---------------------------------------------------------------------------//
Hole Hole::circle(double diameter, Point center)
{
    require_positive(diameter, "hole diameter");
    return Hole(Circle{diameter}, center);
}

Hole Hole::square(double side, Point center)
{
    require_positive(side, "hole side");
    return Hole(Square{side}, center);
}

Hole Hole::rectangle(double width, double length, Point center)
{
    require_positive(width, "hole width");
    require_positive(length, "hole length");
    if (width <= length)
        return Hole(Slot{width, length, Axis::y}, center);
    return Hole(Slot{length, width, Axis::x}, center);
}

Hole Hole::with_center(Point c) const
{
    Hole h = *this;
    h.center_ = c;
    return h;
}

Hole Hole::with_min_dimension(double d) const
{
    return std::visit(overloaded{[&](Circle const&) { return circle(d, center_); },
                                 [&](Square const&) { return square(d, center_); },
                                 [&](Slot const& r) {
                                     Hole h = rectangle(d, std::max(d, r.length), center_);
                                     std::get<Slot>(h.shape_).length_axis = r.length_axis;
                                     return h;
                                 }},
                      shape_);
}

Hole Hole::with_length(double length) const
{
    if (auto const* r = std::get_if<Slot>(&shape_))
    {
        Hole h = rectangle(r->width, length, center_);
        if (r->length_axis == Axis::x && r->width <= length)
            std::get<Slot>(h.shape_).length_axis = Axis::x;
        return h;
    }
    return *this;
}

//---------------------------------------------------------------------------//
double hole_area(Hole const& hole)
{
    return std::visit(
        overloaded{[](Circle const& c) { return std::numbers::pi * c.diameter * c.diameter / 4; },
                   [](Square const& q) { return q.side * q.side; },
                   [](Slot const& r) { return r.width * r.length; }},
        hole.shape());
}

double hole_min_dimension(Hole const& hole)
{
    return std::visit(overloaded{[](Circle const& c) { return c.diameter; },
                                 [](Square const& q) { return q.side; },
                                 [](Slot const& r) { return r.width; }},
                      hole.shape());
}

double hole_perimeter(Hole const& hole)
{
    return std::visit(
        overloaded{[](Circle const& c) { return std::numbers::pi * c.diameter; },
                   [](Square const& q) { return 4 * q.side; },
                   [](Slot const& r) { return 2 * (r.width + r.length); }},
        hole.shape());
}

double hole_hydraulic_diameter(Hole const& hole)
{
    return 4 * hole_area(hole) / hole_perimeter(hole);
}

double aspect_ratio(Hole const& hole, double cap_thickness)
{
    require_positive(cap_thickness, "cap thickness");
    return hole_min_dimension(hole) / cap_thickness;
}

double distance_to_hole(Hole const& hole, Point p)
{
    double dx = p.x - hole.center().x;
    double dy = p.y - hole.center().y;
    if (auto const* c = std::get_if<Circle>(&hole.shape()))
        return std::max(0.0, std::hypot(dx, dy) - c->diameter / 2);
    auto [hx, hy] = half_extents(hole.shape());
    double ox = std::max(0.0, std::abs(dx) - hx);
    double oy = std::max(0.0, std::abs(dy) - hy);
    return std::hypot(ox, oy);
}

//---------------------------------------------------------------------------//
void PackageStack::validate(std::span<Hole const> holes) const
{
    require_positive(sacrificial_thickness, "sacrificial thickness");
    require_positive(cap_thickness, "cap thickness");
    require_positive(clog_deposition, "clog deposition");
    require_positive(cavity_footprint.width, "footprint width");
    require_positive(cavity_footprint.height, "footprint height");
    for (std::size_t i = 0; i < holes.size(); ++i)
    {
        if (!cavity_footprint.contains(holes[i].center()))
        {
            throw InputError("hole " + std::to_string(i)
                             + " center lies outside the cavity footprint");
        }
    }
}

double default_grid_pitch(std::span<Hole const> holes)
{
    double d = std::numeric_limits<double>::infinity();
    for (auto const& h : holes)
        d = std::min(d, hole_min_dimension(h));
    if (!std::isfinite(d))
        throw InputError("default grid pitch needs at least one hole");
    return d / 8;
}

double release_coverage(Rect const& footprint,
                        std::span<Hole const> holes,
                        std::span<double const> underetch,
                        double grid_pitch)
{
    check_coverage_args(holes, underetch, grid_pitch);
    if (holes.empty())
        return 0.0;
    long total = 0;
    double sum = 0;
    for_each_cell(footprint, grid_pitch, [&](Point rel, double ramp) {
        ++total;
        sum += cell_fraction(footprint, holes, underetch, rel, ramp);
        return true;
    });
    return sum / static_cast<double>(total);
}

bool fully_released(Rect const& footprint,
                    std::span<Hole const> holes,
                    std::span<double const> underetch,
                    double grid_pitch)
{
    check_coverage_args(holes, underetch, grid_pitch);
    if (holes.empty())
        return false;
    bool all = true;
    for_each_cell(footprint, grid_pitch, [&](Point rel, double ramp) {
        all = cell_fraction(footprint, holes, underetch, rel, ramp) == 1.0;
        return all;
    });
    return all;
}
}  // namespace vacpack
