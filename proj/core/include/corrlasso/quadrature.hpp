#pragma once

#include <functional>
#include <span>

namespace corrlasso {

/// E[f(Z)] for Z ~ N(0,1) where f is smooth between the listed breakpoints
/// (kinks or jumps). The real line is truncated to [-12, 12], cut at every
/// breakpoint inside it, and each piece is integrated with composite
/// Gauss-Legendre panels of width at most one. Absolute error is at rounding
/// level for the piecewise-polynomial integrands used by the theory code,
/// which a single global Gauss-Hermite rule cannot deliver across a kink.
double gaussian_expectation(const std::function<double(double)>& f,
                            std::span<const double> breakpoints = {});

}  // namespace corrlasso
