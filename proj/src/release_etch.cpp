// SPDX-License-Identifier: Apache-2.0
#include "vacpack/release_etch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "vacpack/error.hpp"
#include "vacpack/root_finding.hpp"

namespace vacpack
{
void EtchParams::validate() const
{
    if (!(rate > 0) || !std::isfinite(rate))
        throw InputError("etch rate R0 must be > 0");
    if (!(c_aperture >= 0) || !std::isfinite(c_aperture))
        throw InputError("c_aperture must be >= 0");
    if (!(c_path >= 0) || !std::isfinite(c_path))
        throw InputError("c_path must be >= 0");
    if (!(reference_thickness > 0))
        throw InputError("etch reference thickness must be > 0");
}

namespace
{
// Everything the rate needs, hoisted out of the integration loop.
struct RateTerms
{
    double supply;    // R0 * h_ref / h_s
    double aperture;  // 1 + c_aperture / A
    double path;      // c_path / h_s

    double operator()(double u) const { return supply / (aperture + path * u); }
};

RateTerms rate_terms(double area, double h_s, EtchParams const& p)
{
    return {p.rate * p.reference_thickness / h_s, 1.0 + p.c_aperture / area, p.c_path / h_s};
}

double integrate(RateTerms const& f, double u, double t, double step)
{
    if (!(t >= 0))
        throw InputError("etch time must be >= 0");
    if (!(step > 0))
        throw InputError("integration step must be > 0");
    auto rk4 = [&](double h) {
        double k1 = f(u);
        double k2 = f(u + h / 2 * k1);
        double k3 = f(u + h / 2 * k2);
        double k4 = f(u + h * k3);
        u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    auto n = static_cast<long>(std::floor(t / step));
    for (long i = 0; i < n; ++i)
        rk4(step);
    double rest = t - static_cast<double>(n) * step;
    if (rest > 0)
        rk4(rest);
    return u;
}

std::vector<double> underetch_all(std::span<Hole const> holes,
                                  PackageStack const& stack,
                                  EtchParams const& params,
                                  double t,
                                  EtchIntegration const& integ)
{
    std::vector<double> u(holes.size());
    for (std::size_t i = 0; i < holes.size(); ++i)
        u[i] = underetch(holes[i], stack, params, t, integ);
    return u;
}
}  // namespace

double etch_rate(Hole const& hole,
                 PackageStack const& stack,
                 EtchParams const& params,
                 double underetch_distance)
{
    if (!(underetch_distance >= 0))
        throw InputError("underetch distance must be >= 0");
    return rate_terms(hole_area(hole), stack.sacrificial_thickness, params)(underetch_distance);
}

double underetch(Hole const& hole,
                 PackageStack const& stack,
                 EtchParams const& params,
                 double t,
                 EtchIntegration const& integ)
{
    return underetch_from(0.0, hole, stack, params, t, integ);
}

double underetch_from(double u0,
                      Hole const& hole,
                      PackageStack const& stack,
                      EtchParams const& params,
                      double t,
                      EtchIntegration const& integ)
{
    if (!(u0 >= 0))
        throw InputError("initial underetch must be >= 0");
    auto f = rate_terms(hole_area(hole), stack.sacrificial_thickness, params);
    return integrate(f, u0, t, integ.step);
}

//---------------------------------------------------------------------------//
EtchState etch_state(Rect const& footprint,
                     std::span<Hole const> holes,
                     PackageStack const& stack,
                     EtchParams const& params,
                     Material const& structural,
                     double t,
                     ReleaseOptions const& opts)
{
    EtchState s;
    s.underetch = underetch_all(holes, stack, params, t, opts.integration);
    s.elapsed = t;
    s.structural_loss = structural.selectivity_loss * t;
    double pitch = opts.grid_pitch > 0 ? opts.grid_pitch : default_grid_pitch(holes);
    s.released = fully_released(footprint, holes, s.underetch, pitch);
    return s;
}

ReleaseResult time_to_release(Rect const& footprint,
                              std::span<Hole const> holes,
                              PackageStack const& stack,
                              EtchParams const& params,
                              Material const& structural,
                              ReleaseOptions const& opts)
{
    if (holes.empty())
        throw InputError("time_to_release needs at least one hole");
    params.validate();
    double pitch = opts.grid_pitch > 0 ? opts.grid_pitch : default_grid_pitch(holes);
    auto released_at = [&](double t) {
        auto u = underetch_all(holes, stack, params, t, opts.integration);
        return fully_released(footprint, holes, u, pitch);
    };

    ReleaseResult r;
    if (released_at(0.0))
        return r;
    double lo = 0.0;
    double hi = std::min(opts.max_time, std::max(opts.time_tolerance, 1.0 * units::min));
    while (!released_at(hi))
    {
        if (hi >= opts.max_time)
        {
            std::ostringstream os;
            os << "release too slow: footprint not released after "
               << opts.max_time / units::min << " min";
            throw ModelError(os.str());
        }
        lo = hi;
        hi = std::min(opts.max_time, 2 * hi);
    }
    auto br = bisect_predicate(released_at, lo, hi, opts.time_tolerance);
    r.time = br.second;
    r.structural_loss = structural.selectivity_loss * r.time;
    return r;
}

//---------------------------------------------------------------------------//
// Calibration
//---------------------------------------------------------------------------//
namespace
{
enum Slot_ : int
{
    slot_rate = 0,
    slot_aperture,
    slot_path
};

struct FreeSet
{
    std::vector<int> slots;

    EtchParams apply(Eigen::VectorXd const& theta, EtchParams p) const
    {
        for (std::size_t k = 0; k < slots.size(); ++k)
        {
            double v = std::exp(theta[static_cast<Eigen::Index>(k)]);
            switch (slots[k])
            {
                case slot_rate: p.rate = v; break;
                case slot_aperture: p.c_aperture = v; break;
                case slot_path: p.c_path = v; break;
            }
        }
        return p;
    }
};

Eigen::VectorXd residuals(std::span<EtchObservation const> obs,
                          EtchParams const& p,
                          EtchIntegration const& integ)
{
    Eigen::VectorXd r(static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i)
    {
        auto const& o = obs[i];
        auto f = rate_terms(hole_area(o.hole), o.sacrificial_thickness, p);
        r[static_cast<Eigen::Index>(i)] = integrate(f, 0.0, o.time, integ.step) - o.underetch;
    }
    return r;
}

struct LmResult
{
    Eigen::VectorXd theta;
    double cost;
};

LmResult levenberg_marquardt(std::span<EtchObservation const> obs,
                             FreeSet const& free,
                             EtchParams const& base,
                             Eigen::VectorXd theta,
                             EtchIntegration const& integ)
{
    auto const n = theta.size();
    auto eval = [&](Eigen::VectorXd const& th) {
        return residuals(obs, free.apply(th, base), integ);
    };
    Eigen::VectorXd r = eval(theta);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    constexpr double fd_step = 1e-7;

    for (int iter = 0; iter < 300; ++iter)
    {
        Eigen::MatrixXd J(r.size(), n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            Eigen::VectorXd th = theta;
            th[k] += fd_step;
            J.col(k) = (eval(th) - r) / fd_step;
        }
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-30)
            break;

        bool improved = false;
        while (lambda < 1e12)
        {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index k = 0; k < n; ++k)
                A(k, k) += lambda * std::max(JtJ(k, k), 1e-300);
            Eigen::VectorXd delta = A.ldlt().solve(-g);
            Eigen::VectorXd trial = theta + delta;
            Eigen::VectorXd rt = eval(trial);
            double ct = rt.squaredNorm();
            if (std::isfinite(ct) && ct < cost)
            {
                double gain = (cost - ct) / cost;
                theta = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda / 3, 1e-12);
                improved = true;
                if (gain < 1e-15 || delta.lpNorm<Eigen::Infinity>() < 1e-12)
                    return {theta, cost};
                break;
            }
            lambda *= 4;
        }
        if (!improved)
            break;
    }
    return {theta, cost};
}
}  // namespace

double etch_residual_norm(std::span<EtchObservation const> observations,
                          EtchParams const& params,
                          EtchIntegration const& integ)
{
    return residuals(observations, params, integ).norm();
}

EtchCalibration calibrate_etch(std::span<EtchObservation const> obs,
                               EtchCalibrationOptions const& opts)
{
    FreeSet free{{slot_rate}};
    if (opts.fit_c_aperture)
        free.slots.push_back(slot_aperture);
    if (opts.fit_c_path)
        free.slots.push_back(slot_path);

    if (obs.size() < free.slots.size())
    {
        throw InputError("calibrate_etch: " + std::to_string(obs.size())
                         + " observation(s) cannot determine "
                         + std::to_string(free.slots.size()) + " free parameters");
    }
    std::set<double> areas;
    for (auto const& o : obs)
    {
        if (!(o.time > 0) || !(o.underetch >= 0) || !(o.sacrificial_thickness > 0))
            throw InputError("calibrate_etch: observation needs t > 0, U >= 0, h_s > 0");
        areas.insert(hole_area(o.hole));
    }
    if (opts.fit_c_aperture && areas.size() < 2)
        throw InputError("calibrate_etch: fitting c_aperture needs at least two hole sizes");

    EtchParams base = opts.initial;
    if (!opts.fit_c_aperture)
        base.c_aperture = std::max(0.0, base.c_aperture);
    if (!opts.fit_c_path)
        base.c_path = std::max(0.0, base.c_path);

    // With the path term frozen at zero the model is linear in R0.
    if (free.slots.size() == 1 && base.c_path == 0)
    {
        double num = 0;
        double den = 0;
        for (auto const& o : obs)
        {
            double x = base.reference_thickness / o.sacrificial_thickness * o.time
                       / (1.0 + base.c_aperture / hole_area(o.hole));
            num += x * o.underetch;
            den += x * x;
        }
        EtchParams p = base;
        p.rate = num / den;
        if (!(p.rate > 0))
            throw InputError("calibrate_etch: data imply a non-positive etch rate");
        return {p, etch_residual_norm(obs, p, opts.integration)};
    }

    // Starting points: scale R0 from the fastest observed advance.
    double mean_area = 0;
    double rate_guess = 0;
    for (auto const& o : obs)
    {
        mean_area += hole_area(o.hole) / static_cast<double>(obs.size());
        rate_guess = std::max(rate_guess, o.underetch * o.sacrificial_thickness
                                              / (o.time * base.reference_thickness));
    }
    rate_guess = std::max(rate_guess, 1e-12);

    std::vector<EtchParams> starts;
    for (double rs : {1.0, 10.0})
        for (double as : {0.3, 3.0, 30.0})
            for (double cp : {0.1, 1.0, 10.0})
            {
                EtchParams p = base;
                p.rate = rate_guess * rs;
                if (opts.fit_c_aperture)
                    p.c_aperture = mean_area * as;
                if (opts.fit_c_path)
                    p.c_path = cp;
                starts.push_back(p);
            }
    starts.push_back(base);

    auto to_theta = [&](EtchParams const& p) {
        Eigen::VectorXd th(static_cast<Eigen::Index>(free.slots.size()));
        for (std::size_t k = 0; k < free.slots.size(); ++k)
        {
            double v = free.slots[k] == slot_rate       ? p.rate
                       : free.slots[k] == slot_aperture ? p.c_aperture
                                                        : p.c_path;
            // Log parameterization cannot start at exactly zero.
            th[static_cast<Eigen::Index>(k)] = std::log(std::max(v, 1e-30));
        }
        return th;
    };

    LmResult best{{}, std::numeric_limits<double>::infinity()};
    for (auto const& s : starts)
    {
        auto res = levenberg_marquardt(obs, free, base, to_theta(s), opts.integration);
        if (res.cost < best.cost)
            best = std::move(res);
    }
    EtchParams p = free.apply(best.theta, base);
    return {p, std::sqrt(best.cost)};
}

//---------------------------------------------------------------------------//
}  // namespace vacpack
