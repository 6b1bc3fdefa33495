// SPDX-License-Identifier: Apache-2.0
#include "vacpack/clogging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vacpack/error.hpp"
#include "vacpack/root_finding.hpp"

namespace vacpack
{
void ClogParams::validate() const
{
    if (!(kappa0 > 0))
        throw InputError("kappa0 must be > 0");
    if (!(s_ref > 0 && s_ref <= 1))
        throw InputError("s_ref must lie in (0, 1]");
    if (!(ar_knee > 0))
        throw InputError("ar_knee must be > 0");
    if (!(atten_exponent > 0 && atten_exponent < 1))
        throw InputError("atten_exponent must lie in (0, 1) for holes to seal");
    if (!(residue_fraction_scale >= 0))
        throw InputError("residue_fraction_scale must be >= 0");
    if (!(spread_factor >= 0))
        throw InputError("spread_factor must be >= 0");
    if (!(step > 0) || !(max_deposition > 0) || !(tolerance > 0))
        throw InputError("clogging step, max_deposition and tolerance must be > 0");
}

double closure_attenuation(double ratio, ClogParams const& params)
{
    if (!(ratio > 0))
        return 0.0;
    return std::min(1.0, std::pow(ratio / params.ar_knee, params.atten_exponent));
}

double closure_rate(double aperture,
                    double cap_depth,
                    Material const& material,
                    ClogParams const& params)
{
    if (!(cap_depth > 0))
        throw InputError("closure_rate: cap depth must be > 0");
    if (!(aperture > 0))
        return 0.0;
    return 2 * params.kappa0 * (material.sticking_coefficient / params.s_ref)
           * closure_attenuation(aperture / cap_depth, params);
}

namespace
{
// Opening tracked as (narrow side, long side); circles and squares keep
// both equal.
struct Opening
{
    double width;
    double length;
    bool slot;

    double hydraulic() const
    {
        if (!slot)
            return width;
        return width > 0 ? 2 * width * length / (width + length) : 0.0;
    }
};

Opening initial_opening(Hole const& hole)
{
    if (auto const* r = std::get_if<Slot>(&hole.shape()))
        return {r->width, r->length, true};
    double d = hole_min_dimension(hole);
    return {d, d, false};
}

ClogState integrate_closure(Hole const& hole,
                            double cap_thickness,
                            double deposited,
                            Material const& material,
                            ClogParams const& params)
{
    if (!(deposited >= 0))
        throw InputError("deposited thickness must be >= 0");
    if (!(cap_thickness > 0))
        throw InputError("cap thickness must be > 0");
    params.validate();

    Opening o = initial_opening(hole);
    double const w0 = o.width;

    // d(width)/dx = -rate, d(length)/dx = -rate, d(residue)/dx = flux.
    auto rate = [&](double w, double len, double x) {
        Opening cur{std::max(w, 0.0), std::max(len, 0.0), o.slot};
        return closure_rate(cur.hydraulic(), cap_thickness + x, material, params);
    };
    auto flux = [&](double w, double len, double x) {
        if (!(w > 0))
            return 0.0;
        Opening cur{w, std::max(len, 0.0), o.slot};
        double r = cur.hydraulic() / (cap_thickness + x);
        return params.residue_fraction_scale * (w / w0) * closure_attenuation(r, params);
    };

    ClogState s;
    double x = 0;
    double residue = 0;
    while (x < deposited && o.width > 0)
    {
        double h = std::min(params.step, deposited - x);
        double k1 = rate(o.width, o.length, x);
        double q1 = flux(o.width, o.length, x);
        double k2 = rate(o.width - h / 2 * k1, o.length - h / 2 * k1, x + h / 2);
        double q2 = flux(o.width - h / 2 * k1, o.length - h / 2 * k1, x + h / 2);
        double k3 = rate(o.width - h / 2 * k2, o.length - h / 2 * k2, x + h / 2);
        double q3 = flux(o.width - h / 2 * k2, o.length - h / 2 * k2, x + h / 2);
        double k4 = rate(o.width - h * k3, o.length - h * k3, x + h);
        double q4 = flux(o.width - h * k3, o.length - h * k3, x + h);
        double dw = h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        double dres = h / 6 * (q1 + 2 * q2 + 2 * q3 + q4);
        if (dw >= o.width)
        {
            // Seals inside this step: keep the residue gathered up to the
            // crossing, assuming linear closure within the step.
            double frac = o.width / dw;
            residue += frac * dres;
            x += frac * h;
            o.width = 0;
            o.length = std::max(0.0, o.length - dw);
            break;
        }
        o.width -= dw;
        o.length -= dw;
        residue += dres;
        x += h;
    }

    s.deposited = deposited;
    s.remaining_aperture = std::max(0.0, o.width);
    s.sealed = s.remaining_aperture == 0;
    s.residue_thickness = residue;
    s.residue_footprint = residue > 0 ? w0 + 2 * cap_thickness * params.spread_factor : 0.0;
    return s;
}
}  // namespace

ClogState clog_state(Hole const& hole,
                     double cap_thickness,
                     double deposited,
                     Material const& material,
                     ClogParams const& params)
{
    return integrate_closure(hole, cap_thickness, deposited, material, params);
}

double aperture_after(Hole const& hole,
                      double cap_thickness,
                      double deposited,
                      Material const& material,
                      ClogParams const& params)
{
    return integrate_closure(hole, cap_thickness, deposited, material, params)
        .remaining_aperture;
}

double thickness_to_clog(Hole const& hole,
                         double cap_thickness,
                         Material const& material,
                         ClogParams const& params)
{
    auto sealed = [&](double x) {
        return aperture_after(hole, cap_thickness, x, material, params) == 0;
    };
    if (sealed(0.0))
        return 0.0;
    double lo = 0.0;
    double hi = std::min(params.max_deposition, 0.25 * units::um);
    while (!sealed(hi))
    {
        if (hi >= params.max_deposition)
        {
            std::ostringstream os;
            os << "unclottable: hole of min dimension " << hole_min_dimension(hole) / units::um
               << " um stays open after " << params.max_deposition / units::um << " um of "
               << material.name;
            throw ModelError(os.str());
        }
        lo = hi;
        hi = std::min(params.max_deposition, 2 * hi);
    }
    return bisect_predicate(sealed, lo, hi, params.tolerance).second;
}

Residue residue_estimate(Hole const& hole,
                         double cap_thickness,
                         double deposited,
                         Material const& material,
                         ClogParams const& params)
{
    auto s = integrate_closure(hole, cap_thickness, deposited, material, params);
    return {s.residue_thickness, s.residue_footprint};
}
}  // namespace vacpack
