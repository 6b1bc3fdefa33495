// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vacpack/geometry.hpp"
#include "vacpack/material.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
//---------------------------------------------------------------------------//
/*!
 * Constants of the aperture-closure model for non-conformal sputtering.
 *
 * The opening narrows on every side at kappa0 * (s / s_ref) per unit of
 * deposited film, attenuated once the opening becomes narrow compared with
 * its depth:
 *
 *   atten(r) = min(1, (r / ar_knee)^atten_exponent),  r = D_h / depth
 *
 * where D_h is the hydraulic diameter of the remaining opening and the depth
 * grows with the deposit (h_c + deposited). The sub-linear exponent makes
 * holes seal after a finite deposit.
 */
struct ClogParams
{
    double kappa0 = 0.7989;
    double s_ref = 0.26;
    double ar_knee = 0.3;
    double atten_exponent = 0.5;
    double residue_fraction_scale = 0.1704;
    double spread_factor = 1.875;

    double step = 1.0 * units::nm;               //!< deposit integration step
    double max_deposition = 10.0 * units::um;    //!< thickness_to_clog search limit
    double tolerance = 1.0 * units::nm;          //!< thickness_to_clog bisection

    void validate() const;
};

struct ClogState
{
    double remaining_aperture = 0;  //!< min dimension of the opening, m
    double deposited = 0;           //!< m
    double residue_thickness = 0;   //!< m
    double residue_footprint = 0;   //!< diameter, m
    bool sealed = false;
};

//! Aspect-ratio attenuation of the flux reaching the waist of the opening.
double closure_attenuation(double ratio, ClogParams const& params);

/*!
 * Closure of the min dimension (both sides together) per unit deposited
 * thickness, for an opening of effective width \c aperture at depth
 * \c cap_depth.
 */
double closure_rate(double aperture,
                    double cap_depth,
                    Material const& material,
                    ClogParams const& params);

//! Full closure state after depositing \c deposited of \c material.
ClogState clog_state(Hole const& hole,
                     double cap_thickness,
                     double deposited,
                     Material const& material,
                     ClogParams const& params);

//! Remaining min dimension in metres (0 once sealed).
double aperture_after(Hole const& hole,
                      double cap_thickness,
                      double deposited,
                      Material const& material,
                      ClogParams const& params);

//! Smallest deposit that seals the hole. Throws ModelError ("unclottable")
//! past params.max_deposition.
double thickness_to_clog(Hole const& hole,
                         double cap_thickness,
                         Material const& material,
                         ClogParams const& params);

struct Residue
{
    double thickness = 0;           //!< m
    double footprint_diameter = 0;  //!< m
};

Residue residue_estimate(Hole const& hole,
                         double cap_thickness,
                         double deposited,
                         Material const& material,
                         ClogParams const& params);
}  // namespace vacpack
