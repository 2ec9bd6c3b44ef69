#pragma once

#include <string>
#include <vector>

#include "fracext/types.hpp"

namespace fracext::functions {

/// f(t) = c.
HolderFunction constant(double c);

/// f(t) = amplitude * sin(frequency * t + phase).
HolderFunction sine(double amplitude = 1.0, double frequency = 1.0, double phase = 0.0);

/// f(t) = amplitude * cos(frequency * t + phase).
HolderFunction cosine(double amplitude = 1.0, double frequency = 1.0, double phase = 0.0);

/// Smooth compactly supported bump, height * exp(1 - 1/(1 - u^2)) with
/// u = (t - center)/radius; peaks at `height` at the center.
HolderFunction bump(double center = 0.0, double radius = 1.0, double height = 1.0);

/// offset + bump: a bump sitting on a nonzero constant background.
HolderFunction shifted_bump(double center = 0.0, double radius = 1.0, double height = 1.0,
                            double offset = 0.5);

/// (t - a)_+^{s-1} held constant on (a, a + clamp]: the clamped
/// Riemann-Liouville kernel. Stationary for the left derivative on
/// (a + clamp, infinity) up to a defect of order clamp^s (1/s - 1).
HolderFunction power_stationary(double a, double s, double clamp = 1e-8);

/// exp(rate * t). Unbounded: the declared bound is the value at t = 0 and is
/// only meaningful for evaluation points where the used half-line decays.
HolderFunction exponential(double rate = 1.0);

/// Cubic interpolant of (t, value) samples; constant continuation outside.
HolderFunction table(std::vector<double> t, std::vector<double> values);

/// Periodic cubic interpolant; `t` must be uniform and span one period.
HolderFunction periodic_table(std::vector<double> t, std::vector<double> values, double period);

/// Reads a two-column CSV (t, value; optional header) into `table`.
HolderFunction table_from_csv(const std::string& path);

}  // namespace fracext::functions
