// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace thznoma {

// Propagation constant used throughout the link-budget arithmetic. Kept at
// 2.998e8 rather than the CODATA value so dB figures are stable to 0.01 dB
// against the configuration defaults.
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

inline constexpr double kPi = 3.14159265358979323846;

// Full sphere measured in square degrees; the directivity approximation
// G = kFullSphereSquareDeg / (theta_az * theta_el).
inline constexpr double kFullSphereSquareDeg = 41253.0;

}  // namespace thznoma
