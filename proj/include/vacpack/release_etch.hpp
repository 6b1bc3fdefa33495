// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "vacpack/geometry.hpp"
#include "vacpack/material.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
//---------------------------------------------------------------------------//
/*!
 * Constants of the transport-limited release model.
 *
 * The lateral etch front advances at
 *
 *   dU/dt = R0 * (h_ref / h_s) / (1 + c_aperture / A + c_path * U / h_s)
 *
 * The denominator is the species supply in series: reaction at the front,
 * conductance of the opening (area A), and conductance of the lateral
 * channel of height h_s and length U. The h_ref / h_s factor converts the
 * supply into front advance: a thicker sacrificial layer consumes more
 * species per unit of lateral travel.
 */
struct EtchParams
{
    double rate = 40.21 * units::um_per_min;     //!< R0 at h_s = h_ref
    double c_aperture = 100.6 * units::um2;
    double c_path = 2.710;
    double reference_thickness = 1.0 * units::um;  //!< h_ref

    void validate() const;
};

struct EtchIntegration
{
    double step = 0.01 * units::min;
};

//! Front velocity in m/s at underetch \c underetch_distance.
double etch_rate(Hole const& hole,
                 PackageStack const& stack,
                 EtchParams const& params,
                 double underetch_distance);

//! Underetch distance after time \c t starting from zero (fixed-step RK4).
double underetch(Hole const& hole,
                 PackageStack const& stack,
                 EtchParams const& params,
                 double t,
                 EtchIntegration const& integ = {});

//! Continue an etch already at \c u0 for another \c t seconds.
double underetch_from(double u0,
                      Hole const& hole,
                      PackageStack const& stack,
                      EtchParams const& params,
                      double t,
                      EtchIntegration const& integ = {});

//---------------------------------------------------------------------------//
struct EtchState
{
    std::vector<double> underetch;  //!< per hole, m
    double elapsed = 0;             //!< s
    double structural_loss = 0;     //!< m
    bool released = false;
};

struct ReleaseOptions
{
    double max_time = 120.0 * units::min;
    double time_tolerance = 1e-3 * units::min;
    double grid_pitch = 0;  //!< 0 selects default_grid_pitch()
    EtchIntegration integration;
};

//! Snapshot of the release after \c t seconds.
EtchState etch_state(Rect const& footprint,
                     std::span<Hole const> holes,
                     PackageStack const& stack,
                     EtchParams const& params,
                     Material const& structural,
                     double t,
                     ReleaseOptions const& opts = {});

struct ReleaseResult
{
    double time = 0;             //!< s
    double structural_loss = 0;  //!< m
};

/*!
 * Earliest time at which the dilated holes cover the whole footprint.
 *
 * Brackets the release by doubling from 1 min, then bisects on the monotone
 * coverage predicate until the bracket is narrower than
 * \c opts.time_tolerance and returns its upper end, so the footprint is
 * released at the reported time. Throws ModelError if the footprint is not
 * released by \c opts.max_time.
 */
ReleaseResult time_to_release(Rect const& footprint,
                              std::span<Hole const> holes,
                              PackageStack const& stack,
                              EtchParams const& params,
                              Material const& structural,
                              ReleaseOptions const& opts = {});

//---------------------------------------------------------------------------//
struct EtchObservation
{
    Hole hole;
    double sacrificial_thickness;  //!< m
    double time;                   //!< s
    double underetch;              //!< m
};

struct EtchCalibrationOptions
{
    bool fit_c_aperture = true;
    bool fit_c_path = true;
    //! Values used for frozen parameters and as an extra starting point.
    EtchParams initial{};
    EtchIntegration integration;
};

struct EtchCalibration
{
    EtchParams params;
    double residual_norm = 0;  //!< sqrt(sum of squared errors), m
};

/*!
 * Least-squares fit of (R0, c_aperture, c_path) to measured underetch.
 *
 * Levenberg-Marquardt in log-parameter space from a small grid of starting
 * points; the best local solution wins. Throws InputError when the data
 * cannot determine the free parameters.
 */
EtchCalibration calibrate_etch(std::span<EtchObservation const> observations,
                               EtchCalibrationOptions const& opts = {});

//! Sum-of-squares residual norm of \c params against \c observations.
double etch_residual_norm(std::span<EtchObservation const> observations,
                          EtchParams const& params,
                          EtchIntegration const& integ = {});

//! Reads "shape, dim1_um, dim2_um, h_s_um, t_min, U_um" lines; # comments.
std::vector<EtchObservation> parse_etch_data(std::string_view text);
std::vector<EtchObservation> read_etch_data(std::filesystem::path const& path);
}  // namespace vacpack
