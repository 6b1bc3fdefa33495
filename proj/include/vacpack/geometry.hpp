// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <variant>
#include <vector>

namespace vacpack
{
struct Point
{
    double x = 0;
    double y = 0;
};

//! Axis-aligned rectangle given by its lower-left corner and extents.
struct Rect
{
    double x0 = 0;
    double y0 = 0;
    double width = 0;
    double height = 0;

    double area() const { return width * height; }
    bool contains(Point p) const
    {
        return p.x >= x0 && p.x <= x0 + width && p.y >= y0 && p.y <= y0 + height;
    }
};

struct Circle
{
    double diameter;
};

struct Square
{
    double side;
};

enum class Axis
{
    x,
    y
};

//! Rectangular opening. Always normalized so that width <= length; the
//! long side runs along \c length_axis.
struct Slot
{
    double width;
    double length;
    Axis length_axis = Axis::y;
};

using HoleShape = std::variant<Circle, Square, Slot>;

//---------------------------------------------------------------------------//
/*!
 * A release perforation through the cap. Dimensions are in metres and are
 * validated on construction.
 */
class Hole
{
  public:
    static Hole circle(double diameter, Point center = {});
    static Hole square(double side, Point center = {});
    //! Either argument order is accepted; the narrow side becomes the width.
    static Hole rectangle(double width, double length, Point center = {});

    HoleShape const& shape() const { return shape_; }
    Point center() const { return center_; }

    Hole with_center(Point c) const;
    //! Copy with the governing (minimum) dimension replaced. A rectangle
    //! keeps its length unless \c d exceeds it, in which case both sides
    //! become \c d.
    Hole with_min_dimension(double d) const;
    //! Copy with the long side replaced (rectangles only; others unchanged).
    Hole with_length(double length) const;

  private:
    Hole(HoleShape s, Point c) : shape_(s), center_(c) {}

    HoleShape shape_;
    Point center_;
};

double hole_area(Hole const& hole);
double hole_min_dimension(Hole const& hole);
//! Hydraulic diameter 4A/P. Equals the min dimension for circles and squares.
double hole_hydraulic_diameter(Hole const& hole);
double hole_perimeter(Hole const& hole);
double aspect_ratio(Hole const& hole, double cap_thickness);

//! Distance from a point to the hole outline (0 inside).
double distance_to_hole(Hole const& hole, Point p);

//---------------------------------------------------------------------------//
struct PackageStack
{
    double sacrificial_thickness = 0;
    double cap_thickness = 0;
    double clog_deposition = 0;
    Rect cavity_footprint;

    //! Throws InputError if a thickness is not positive or a hole lies
    //! outside the footprint.
    void validate(std::span<Hole const> holes) const;
};

//! Default raster pitch for coverage queries: min hole dimension / 8.
double default_grid_pitch(std::span<Hole const> holes);

/*!
 * Fraction of \c footprint covered by the union of every hole dilated by its
 * underetch distance (Minkowski sum with a disc). The footprint is rastered
 * at spacing \c grid_pitch; each cell contributes a partial fraction from
 * the signed distance of its centre to the dilated boundary, ramped linearly
 * over one cell width.
 */
double release_coverage(Rect const& footprint,
                        std::span<Hole const> holes,
                        std::span<double const> underetch,
                        double grid_pitch);

//! True when every raster cell is entirely covered (coverage == 1).
bool fully_released(Rect const& footprint,
                    std::span<Hole const> holes,
                    std::span<double const> underetch,
                    double grid_pitch);
}  // namespace vacpack
