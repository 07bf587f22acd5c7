#pragma once

#include <numbers>

// Internal units are rad/s and seconds; files use GHz, MHz and ns.
namespace rqr::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double ghz(double f) { return kTwoPi * f * 1e9; }
constexpr double mhz(double f) { return kTwoPi * f * 1e6; }
constexpr double ns(double t) { return t * 1e-9; }

constexpr double to_ghz(double w) { return w / (kTwoPi * 1e9); }
constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }
constexpr double to_ns(double t) { return t * 1e9; }

}  // namespace rqr::units
