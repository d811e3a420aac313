#pragma once

namespace roadnet {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
/// Power series for x <= 1, Lentz continued fraction above.
double expint_e1(double x);

/// Entire exponential integral Ein(x) = ∫_0^x (1 - e^{-t})/t dt
///                                   = γ + ln x + E1(x)   (x > 0).
/// Evaluated by its alternating series for x <= 1 so small arguments keep
/// full relative precision; Ein(0) = 0.
double expint_ein(double x);

} // namespace roadnet
