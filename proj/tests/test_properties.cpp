#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "vacpack/clogging.hpp"
#include "vacpack/designer.hpp"
#include "vacpack/geometry.hpp"
#include "vacpack/material.hpp"
#include "vacpack/mechanics.hpp"
#include "vacpack/release_etch.hpp"
#include "vacpack/units.hpp"

using namespace vacpack;
using namespace vacpack::units;

namespace
{
constexpr int cases = 1000;

class Sampler
{
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng_); }

    Hole hole(Point c, double lo = 0.5 * um, double hi = 4 * um)
    {
        double d = uniform(lo, hi);
        switch (integer(0, 2))
        {
            case 0: return Hole::circle(d, c);
            case 1: return Hole::square(d, c);
            default: return Hole::rectangle(d, d * uniform(1, 3), c);
        }
    }

    Rect footprint(double w, double h)
    {
        return {uniform(-50, 50) * um, uniform(-50, 50) * um, w, h};
    }

    std::vector<Hole> holes_in(Rect const& fp, int n, double lo = 0.5 * um, double hi = 4 * um)
    {
        std::vector<Hole> out;
        for (int i = 0; i < n; ++i)
        {
            Point c{fp.x0 + uniform(0.1, 0.9) * fp.width, fp.y0 + uniform(0.1, 0.9) * fp.height};
            out.push_back(hole(c, lo, hi));
        }
        return out;
    }

    EtchParams etch()
    {
        EtchParams p;
        p.rate = log_uniform(1, 100) * um_per_min;
        p.c_aperture = log_uniform(0.1, 300) * um2;
        p.c_path = log_uniform(0.1, 10);
        return p;
    }

  private:
    std::mt19937_64 rng_;
};

PackageStack stack_for(Rect const& fp, double h_s)
{
    return {h_s, 2 * um, 2.5 * um, fp};
}

Material const& sio2()
{
    static auto const lib = default_materials();
    return lib.at("SiO2");
}
}  // namespace

//---------------------------------------------------------------------------//
// Geometry
//---------------------------------------------------------------------------//
TEST_CASE("property: area and min dimension have closed forms")
{
    Sampler s(1);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        double a = s.uniform(0.1, 10) * um;
        double b = s.uniform(0.1, 10) * um;
        bad += std::abs(hole_area(Hole::circle(a)) - std::numbers::pi * a * a / 4) > 1e-12 * a * a;
        bad += hole_area(Hole::square(a)) != a * a;
        bad += hole_area(Hole::rectangle(a, b)) != a * b;
        bad += hole_min_dimension(Hole::circle(a)) != a;
        bad += hole_min_dimension(Hole::square(a)) != a;
        bad += hole_min_dimension(Hole::rectangle(a, b)) != std::min(a, b);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: coverage is monotone in each underetch")
{
    Sampler s(2);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto fp = s.footprint(20 * um, 20 * um);
        auto holes = s.holes_in(fp, s.integer(1, 4));
        std::vector<double> u(holes.size());
        for (auto& v : u)
            v = s.uniform(0, 8) * um;
        double before = release_coverage(fp, holes, u, 0.5 * um);
        u[static_cast<std::size_t>(s.integer(0, static_cast<int>(u.size()) - 1))] += s.uniform(0, 3) * um;
        double after = release_coverage(fp, holes, u, 0.5 * um);
        bad += after < before;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: coverage is translation invariant")
{
    Sampler s(3);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto fp = s.footprint(20 * um, 15 * um);
        auto holes = s.holes_in(fp, s.integer(1, 4));
        std::vector<double> u(holes.size());
        for (auto& v : u)
            v = s.uniform(0, 8) * um;
        double dx = s.uniform(-100, 100) * um;
        double dy = s.uniform(-100, 100) * um;
        Rect moved = fp;
        moved.x0 += dx;
        moved.y0 += dy;
        std::vector<Hole> shifted;
        for (auto const& h : holes)
            shifted.push_back(h.with_center({h.center().x + dx, h.center().y + dy}));
        double c0 = release_coverage(fp, holes, u, 0.5 * um);
        double c1 = release_coverage(moved, shifted, u, 0.5 * um);
        // Rounding may flip a cell whose centre sits exactly on an etch front.
        bad += std::abs(c0 - c1) > 2.0 / (40 * 30);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: coverage converges under pitch refinement")
{
    Sampler s(4);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto fp = s.footprint(s.uniform(5, 15) * um, s.uniform(5, 15) * um);
        auto holes = s.holes_in(fp, s.integer(1, 3), 1.5 * um, 4 * um);
        std::vector<double> u(holes.size());
        for (auto& v : u)
            v = s.uniform(0, 5) * um;
        double pitch = default_grid_pitch(holes) * 2;  // min dimension / 4
        double c1 = release_coverage(fp, holes, u, pitch);
        double c2 = release_coverage(fp, holes, u, pitch / 2);
        bad += std::abs(c1 - c2) >= 0.01;
    }
    CHECK(bad == 0);
}

//---------------------------------------------------------------------------//
// Release
//---------------------------------------------------------------------------//
TEST_CASE("property: etch rate bounds and monotonicity")
{
    Sampler s(5);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto p = s.etch();
        double h_s = s.uniform(0.5, 6) * um;
        PackageStack st = stack_for({0, 0, 1, 1}, h_s);
        double d = s.uniform(0.5, 10) * um;
        auto small = Hole::circle(d);
        auto big = Hole::circle(d * s.uniform(1.01, 3));
        double u = s.uniform(0, 10) * um;
        double r = etch_rate(small, st, p, u);
        double ceiling = p.rate * p.reference_thickness / h_s;
        bad += !(r > 0 && r <= ceiling);
        bad += !(etch_rate(small, st, p, u + s.uniform(0.01, 2) * um) < r);
        bad += !(etch_rate(big, st, p, u) > r);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: underetch is monotone in time and a semigroup")
{
    Sampler s(6);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto p = s.etch();
        PackageStack st = stack_for({0, 0, 1, 1}, s.uniform(0.5, 6) * um);
        auto hole = s.hole({});
        double t1 = s.uniform(0, 5) * min;
        double t2 = s.uniform(0, 5) * min;
        double u1 = underetch(hole, st, p, t1);
        double u12 = underetch(hole, st, p, t1 + t2);
        bad += u12 < u1;
        double chained = underetch_from(u1, hole, st, p, t2);
        bad += std::abs(chained - u12) > 1e-3 * u12 + 1e-15;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: release time never grows when a hole grows or is added")
{
    Sampler s(7);
    auto const& structural = sio2();
    ReleaseOptions opts;
    opts.grid_pitch = 0.5 * um;
    opts.time_tolerance = 0.05 * min;
    opts.max_time = 1000 * min;
    EtchParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto fp = s.footprint(8 * um, 8 * um);
        auto st = stack_for(fp, s.uniform(1, 3) * um);
        auto holes = s.holes_in(fp, s.integer(1, 3), 1 * um, 4 * um);
        double t0 = time_to_release(fp, holes, st, p, structural, opts).time;

        auto grown = holes;
        auto& h = grown[static_cast<std::size_t>(s.integer(0, static_cast<int>(grown.size()) - 1))];
        h = h.with_min_dimension(hole_min_dimension(h) * s.uniform(1.05, 1.5));
        bad += time_to_release(fp, grown, st, p, structural, opts).time > t0;

        auto more = holes;
        more.push_back(s.holes_in(fp, 1, 1 * um, 4 * um).front());
        bad += time_to_release(fp, more, st, p, structural, opts).time > t0;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: adding a free parameter never raises the fit residual")
{
    // Each case runs three multi-start fits; fewer cases keep the suite fast.
    Sampler s(8);
    int bad = 0;
    for (int k = 0; k < 30; ++k)
    {
        auto truth = s.etch();
        std::vector<EtchObservation> obs;
        for (double d : {2.0, 4.0, 6.0, 9.0})
        {
            for (double h : {1.1, 3.3})
            {
                auto hole = Hole::circle(d * um);
                double u = underetch(hole, stack_for({0, 0, 1, 1}, h * um), truth, 2 * min);
                obs.push_back({hole, h * um, 2 * min, u * s.uniform(0.9, 1.1)});
            }
        }
        EtchCalibrationOptions one;
        one.fit_c_aperture = false;
        one.fit_c_path = false;
        EtchCalibrationOptions two = one;
        two.fit_c_path = true;
        EtchCalibrationOptions three;
        double r1 = calibrate_etch(obs, one).residual_norm;
        double r2 = calibrate_etch(obs, two).residual_norm;
        double r3 = calibrate_etch(obs, three).residual_norm;
        bad += r2 > r1 * (1 + 1e-9);
        bad += r3 > r2 * (1 + 1e-9);
    }
    CHECK(bad == 0);
}

//---------------------------------------------------------------------------//
// Clogging
//---------------------------------------------------------------------------//
TEST_CASE("property: closure rate is linear in the sticking coefficient")
{
    Sampler s(9);
    ClogParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        Material m = sio2();
        m.sticking_coefficient = s.uniform(0.001, 0.5);
        double f = s.uniform(0.1, 1.9);
        double a = s.uniform(0, 6) * um;
        double depth = s.uniform(0.5, 6) * um;
        double r = closure_rate(a, depth, m, p);
        m.sticking_coefficient *= f;
        bad += std::abs(closure_rate(a, depth, m, p) - f * r) > 1e-12 * std::abs(r);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: deeper holes close no faster")
{
    Sampler s(10);
    ClogParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        double a = s.uniform(0.01, 6) * um;
        double d1 = s.uniform(0.5, 6) * um;
        double d2 = d1 * s.uniform(1, 4);
        bad += closure_rate(a, d2, sio2(), p) > closure_rate(a, d1, sio2(), p);
        bad += closure_attenuation(a / d2, p) > closure_attenuation(a / d1, p);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: aperture closure is monotone and ends exactly at zero")
{
    Sampler s(11);
    ClogParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto hole = s.hole({}, 0.3 * um, 3 * um);
        double h_c = s.uniform(1, 3) * um;
        double x1 = s.uniform(0, 3) * um;
        double x2 = x1 + s.uniform(0, 1) * um;
        double a1 = aperture_after(hole, h_c, x1, sio2(), p);
        double a2 = aperture_after(hole, h_c, x2, sio2(), p);
        bad += a2 > a1;
        auto wider = hole.with_min_dimension(hole_min_dimension(hole) * s.uniform(1, 1.5));
        bad += aperture_after(wider, h_c, x1, sio2(), p) < a1;

        double seal = thickness_to_clog(hole, h_c, sio2(), p);
        bad += aperture_after(hole, h_c, seal + s.uniform(0, 2) * um, sio2(), p) != 0;

        auto st = clog_state(hole, h_c, x1, sio2(), p);
        bad += st.sealed != (st.remaining_aperture == 0);
    }
    CHECK(bad == 0);
}

TEST_CASE("property: narrower equal-area rectangles clog first")
{
    Sampler s(12);
    ClogParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        double side = s.uniform(0.5, 4) * um;
        double w = side * s.uniform(0.3, 0.99);
        double h_c = s.uniform(1, 3) * um;
        double t_rect = thickness_to_clog(Hole::rectangle(w, side * side / w), h_c, sio2(), p);
        double t_sq = thickness_to_clog(Hole::square(side), h_c, sio2(), p);
        bad += t_rect > t_sq;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: residue is bounded by the flux and frozen after sealing")
{
    Sampler s(13);
    ClogParams p;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto hole = s.hole({}, 0.3 * um, 3 * um);
        double h_c = s.uniform(1, 3) * um;
        double x = s.uniform(0, 4) * um;
        auto r = residue_estimate(hole, h_c, x, sio2(), p);
        bad += r.thickness > x * p.residue_fraction_scale * (1 + 1e-12);
        auto more = residue_estimate(hole, h_c, x + s.uniform(0, 1) * um, sio2(), p);
        bad += more.thickness < r.thickness;

        double seal = thickness_to_clog(hole, h_c, sio2(), p);
        auto a = residue_estimate(hole, h_c, seal + 0.5 * um, sio2(), p);
        auto b = residue_estimate(hole, h_c, seal + s.uniform(0.5, 3) * um, sio2(), p);
        bad += a.thickness != b.thickness;
    }
    CHECK(bad == 0);
}

//---------------------------------------------------------------------------//
// Mechanics
//---------------------------------------------------------------------------//
TEST_CASE("property: plate response is linear in load and cubic in thickness")
{
    Sampler s(14);
    auto lib = default_materials();
    std::vector<Material> mats;
    for (auto const& [name, m] : lib)
        mats.push_back(m);
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        double a = s.uniform(10, 60) * um;
        double b = a * (k % 2 ? 1.0 : 0.5);
        Material m = mats[static_cast<std::size_t>(s.integer(0, static_cast<int>(mats.size()) - 1))];
        double t = s.uniform(0.5, 6) * um;
        double q = s.log_uniform(0.01, 20) * MPa;
        double alpha = s.uniform(0.1, 10);
        auto base = solve_plate({a, b, t, m, q}, 32);
        auto scaled = solve_plate({a, b, t, m, alpha * q}, 32);
        auto thick = solve_plate({a, b, 2 * t, m, q}, 32);
        bad += std::abs(scaled.w_max - alpha * base.w_max) > 1e-12 * alpha * base.w_max;
        bad += std::abs(scaled.sigma_max - alpha * base.sigma_max) > 1e-12 * alpha * base.sigma_max;
        bad += std::abs(thick.w_max / base.w_max - 0.125) > 0.125e-3;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: square plate fields have the full square symmetry")
{
    Sampler s(15);
    Material m = sio2();
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        // Aspect ratio alone fixes the shape of the field, so sample grid
        // sizes as well as lengths to exercise distinct operators.
        int n = 2 * s.integer(8, 16);
        double a = s.uniform(10, 60) * um;
        auto sol = solve_plate({a, a, 2 * um, m, 1 * MPa}, n);
        double worst = 0;
        for (int j = 0; j <= n; ++j)
        {
            for (int i = 0; i <= n; ++i)
            {
                double w = sol.at(i, j);
                for (double v : {sol.at(n - i, j), sol.at(i, n - j), sol.at(n - i, n - j),
                                 sol.at(j, i), sol.at(n - j, i), sol.at(j, n - i),
                                 sol.at(n - j, n - i)})
                    worst = std::max(worst, std::abs(v - w));
            }
        }
        bad += worst > 1e-6 * sol.w_max;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: grid halving changes w_max by under 1 percent")
{
    // w_max scales exactly with q a^4 / D, so only the aspect ratio matters;
    // a modest sample of ratios covers it.
    Sampler s(16);
    Material m = sio2();
    int bad = 0;
    for (int k = 0; k < 12; ++k)
    {
        double ratio = s.uniform(0.5, 1);
        PlateSpec spec{30 * um, 30 * um * ratio, 2 * um, m, 1 * MPa};
        double w64 = solve_plate(spec, 64).w_max;
        double w128 = solve_plate(spec, 128).w_max;
        bad += std::abs(w64 - w128) / w128 >= 0.01;
    }
    CHECK(bad == 0);
}

//---------------------------------------------------------------------------//
// Designer
//---------------------------------------------------------------------------//
TEST_CASE("property: designed caps are feasible and minimal")
{
    Sampler s(17);
    auto lib = default_materials();
    std::vector<Material> mats{lib.at("LTO"), lib.at("SiN_PECVD"), lib.at("polySi_LPCVD")};
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        Material const& m = mats[static_cast<std::size_t>(k % 3)];
        DesignConstraints c;
        c.side_a = 30 * um;
        c.side_b = 30 * um;
        c.pressure = s.log_uniform(0.5, 20) * MPa;
        c.max_deflection = s.log_uniform(5, 200) * nm;
        c.safety_factor = s.uniform(1, 10);
        CapEvaluator eval(m, c);
        if (!eval.feasible(c.t_max))
            continue;
        auto d = min_cap_thickness(m, c);
        bad += !eval.feasible(d.thickness);
        if (d.thickness - 50 * nm >= c.t_min)
            bad += eval.feasible(d.thickness - 50 * nm);

        auto harder = c;
        harder.pressure *= s.uniform(1, 2);
        bad += min_cap_thickness(m, harder).thickness < d.thickness;
        auto looser = c;
        looser.max_deflection *= s.uniform(1, 2);
        bad += min_cap_thickness(m, looser).thickness > d.thickness;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: equivalent thickness is an involution")
{
    Sampler s(18);
    auto lib = default_materials();
    std::vector<Material> mats{lib.at("LTO"), lib.at("SiN_PECVD"), lib.at("polySi_LPCVD"),
                               lib.at("aSi")};
    DesignConstraints c;
    c.side_a = 30 * um;
    c.side_b = 30 * um;
    c.pressure = 10 * MPa;
    int bad = 0;
    for (int k = 0; k < cases; ++k)
    {
        auto const& ma = mats[static_cast<std::size_t>(s.integer(0, 3))];
        auto const& mb = mats[static_cast<std::size_t>(s.integer(0, 3))];
        // Keeps both directions inside [t_min, t_max] for every pairing.
        double t_a = s.uniform(1, 6) * um;
        auto mode = k % 2 ? MatchMode::deflection : MatchMode::safety_factor;
        double t_b = equivalent_thickness(ma, t_a, mb, c, mode);
        double back = equivalent_thickness(mb, t_b, ma, c, mode);
        bad += std::abs(back - t_a) > 0.01 * t_a;
    }
    CHECK(bad == 0);
}
