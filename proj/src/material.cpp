// SPDX-License-Identifier: Apache-2.0
#include "vacpack/material.hpp"

#include <cmath>

#include "vacpack/error.hpp"
#include "vacpack/units.hpp"

namespace vacpack
{
void Material::validate() const
{
    auto fail = [&](char const* what) {
        throw InputError("material '" + name + "': " + what);
    };
    if (name.empty())
        throw InputError("material without a name");
    if (!(intrinsic_etch_rate >= 0))
        fail("intrinsic_etch_rate must be >= 0");
    if (!(selectivity_loss >= 0))
        fail("selectivity_loss must be >= 0");
    if (!(sticking_coefficient > 0 && sticking_coefficient <= 1))
        fail("sticking_coefficient must lie in (0, 1]");
    if (!(youngs_modulus > 0) || !std::isfinite(youngs_modulus))
        fail("youngs_modulus must be > 0");
    if (!(poisson_ratio > 0 && poisson_ratio < 0.5))
        fail("poisson_ratio must lie in (0, 0.5)");
    if (!(failure_stress > 0))
        fail("failure_stress must be > 0");
}

MaterialLibrary default_materials()
{
    using namespace units;
    MaterialLibrary lib;
    auto add = [&](Material m) { lib.emplace(m.name, std::move(m)); };

    // Sacrificial layer. Its etch rate mirrors the default release
    // parameters (rate for a 1 um layer without transport limits).
    add({"aSi", 40.21 * um_per_min, 0.0, 0.3, 80 * GPa, 0.22, 1.0 * GPa});
    // Sputtered oxide used for the cap and for sealing.
    add({"SiO2", 0.0, 0.8 * nm_per_min, 0.26, 70 * GPa, 0.17, 2 * GPa});
    add({"LTO", 0.0, 0.8 * nm_per_min, 0.26, 70 * GPa, 0.17, 2 * GPa});
    add({"SiN_PECVD", 0.0, 0.5 * nm_per_min, 0.26, 250 * GPa, 0.25, 9 * GPa});
    add({"polySi_LPCVD", 0.0, 0.0, 0.008, 160 * GPa, 0.22, 1.2 * GPa});
    return lib;
}
}  // namespace vacpack
