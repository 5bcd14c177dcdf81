#pragma once
// Default tolerances and knobs. Every other module reads its defaults from here.

#include <cmath>

namespace ncmart::defaults {

inline constexpr double hermitian_tol = 1e-10;     // ‖x − x*‖ ≤ tol·‖x‖
inline constexpr double psd_tol = 1e-10;           // eigenvalues ≥ −tol·‖x‖ count as positive
inline constexpr double spectral_tol = 1e-9;       // inclusion slack at interval ends
inline constexpr double merge_tol = 1e-9;          // relative tie-merge for singular values
inline constexpr double submaj_tol = 1e-9;         // slack for ≺≺
inline constexpr double orlicz_rel_tol = 1e-10;    // Luxemburg bisection
inline constexpr int orlicz_max_iter = 200;
inline constexpr double cuculescu_tol = 1e-8;      // property certificates, times scale
inline constexpr double epsilon = 0.01;            // ε in λ
inline constexpr int kcurve_points = 33;
inline constexpr double kcurve_span = 1e3;         // grid covers [t*/span, t*·span]
inline constexpr int lambda_grid = 17;
inline constexpr double quad_rel_tol = 1e-3;
inline constexpr int quad_max_points = 4096;
inline constexpr double tail_tol = 0.01;           // regime checks at the grid ends
inline constexpr double certificate_slack = 1e-8;  // relative slack on asserted constants

/// √10 + 4 + 2√2 + √2 ε
inline double jones_constant(double eps = epsilon) {
  return std::sqrt(10.0) + 4.0 + 2.0 * std::sqrt(2.0) + std::sqrt(2.0) * eps;
}
inline double y_constant() { return std::sqrt(10.0) + 4.0; }

}  // namespace ncmart::defaults
