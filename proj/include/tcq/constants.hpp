#pragma once

#include <numbers>

namespace tcq::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2.0 * pi);
inline constexpr double e = 1.602176634e-19;
inline constexpr double k_b = 1.380649e-23;
inline constexpr double flux_quantum = h / (2.0 * e);
// reduced flux quantum hbar/2e
inline constexpr double phi0 = flux_quantum / (2.0 * pi);

// internal energy unit for operators: h * 1 GHz
inline constexpr double energy_unit = h * 1e9;

}  // namespace tcq::constants

namespace tcq {
inline constexpr const char* toolkit_version = "0.3.1";
}
