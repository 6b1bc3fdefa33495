// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

namespace vacpack
{
//! Film material constants, SI units throughout.
struct Material
{
    std::string name;
    double intrinsic_etch_rate = 0;  // m/s
    double selectivity_loss = 0;     // m/s, attack on this film during release
    double sticking_coefficient = 1;
    double youngs_modulus = 0;       // Pa
    double poisson_ratio = 0;
    double failure_stress = 0;       // Pa

    //! Throws InputError naming the offending field.
    void validate() const;
};

using MaterialLibrary = std::map<std::string, Material, std::less<>>;

/*!
 * Built-in materials.
 *
 * Mechanical constants for LTO and PECVD nitride are implementer defaults
 * (typical thin-film values); failure stresses and sticking coefficients
 * are the measured ones. Override any field per recipe.
 */
MaterialLibrary default_materials();
}  // namespace vacpack
