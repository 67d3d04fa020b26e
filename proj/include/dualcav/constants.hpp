#pragma once

#include <numbers>

namespace dualcav {

/// SI defining constants (2019 redefinition; hbar derived from the exact h).
struct PhysicalConstants {
    double hbar;  // J*s
    double c;     // m/s
    double k_b;   // J/K
};

inline constexpr double kPlanck = 6.62607015e-34;

inline constexpr PhysicalConstants kSI{
    kPlanck / (2.0 * std::numbers::pi),
    299792458.0,
    1.380649e-23,
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace dualcav
