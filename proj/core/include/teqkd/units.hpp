#pragma once

// Natural units throughout: hbar = 1, so energies are angular frequencies.
// Every frequency in the library is an angular frequency in s^-1, every time
// is in seconds and every distance in meters.

namespace teqkd {

using Seconds = double;
using AngularFrequency = double;  // s^-1
using Rate = double;              // s^-1
using Meters = double;
using MetersPerSecond = double;

/// Vacuum light speed rounded the way the 10 us <-> 3 km conversion assumes.
inline constexpr MetersPerSecond kDefaultLightSpeed = 3.0e8;

/// Clock granularity of the registration electronics.
inline constexpr Seconds kDefaultTimingResolution = 1.0e-10;

/// Significant digits used when times are written to the wire.
inline constexpr int kWireDigits = 12;

}  // namespace teqkd
