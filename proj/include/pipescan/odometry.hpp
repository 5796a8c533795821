#pragma once

#include <cmath>

#include "pipescan/errors.hpp"

namespace pipescan {

struct WheelSpec {
    double circumference = 0.35; // m
    int pulses_per_rev = 1000;

    void validate() const {
        if (!(circumference > 0.0) || pulses_per_rev < 1)
            raise(ErrorKind::InvalidArgument, "invalid wheel spec");
    }
};

inline long long encoder_ticks_for(double axial_m, const WheelSpec& wheel) {
    return static_cast<long long>(
        std::llround(axial_m / wheel.circumference * wheel.pulses_per_rev));
}

// Axial displacement for a (non-negative) tick delta.
inline double advance_odometry(long long ticks_delta, const WheelSpec& wheel) {
    if (ticks_delta < 0) raise(ErrorKind::InvalidArgument, "negative tick delta");
    return static_cast<double>(ticks_delta) / wheel.pulses_per_rev * wheel.circumference;
}

// Signed variant used when reconstructing positions from raw cumulative counts.
inline double odometry_displacement(long long ticks, const WheelSpec& wheel) {
    return static_cast<double>(ticks) / wheel.pulses_per_rev * wheel.circumference;
}

} // namespace pipescan
