#pragma once

// Shared basic types and the error taxonomy for the gmtd library.
//
// Error classes map onto process exit codes at the CLI boundary:
//   validation_error -> 2, numerical_error -> 3, io_error -> 4.

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gmtd {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Bad configuration or malformed input values.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear-algebra breakdowns (non-PSD covariance, singular matrices, ...).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File system / serialization failures.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid/pixel coordinate. row indexes the Doppler axis (increasing Doppler),
// col indexes the angle axis (increasing spatial frequency).
struct Point {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Point&, const Point&) = default;
};

// Wrap an angle difference into (-pi, pi]; a 180 degree turn maps to +pi.
inline double wrap_angle(double x) {
    double w = std::fmod(x + kPi, 2.0 * kPi);
    if (w <= 0.0) w += 2.0 * kPi;
    return w - kPi;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace gmtd
