// SPDX-License-Identifier: Apache-2.0
#pragma once

// Everything inside the library is SI (m, s, Pa). The constants below are
// the only place where the I/O units appear.

namespace vacpack::units
{
inline constexpr double m = 1.0;
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double nm = 1e-9;

inline constexpr double s = 1.0;
inline constexpr double min = 60.0;

inline constexpr double Pa = 1.0;
inline constexpr double MPa = 1e6;
inline constexpr double GPa = 1e9;
inline constexpr double bar = 1e5;
inline constexpr double mbar = 1e2;

inline constexpr double um_per_min = um / min;
inline constexpr double nm_per_min = nm / min;
inline constexpr double um2 = um * um;
}  // namespace vacpack::units
