#pragma once

#include "tdin/pp/event_sequence.hpp"
#include "tdin/pp/intensity.hpp"

namespace tdin::pp {

// Integrated intensity over [a, b]: composite Gauss-Legendre quadrature on
// the smooth pieces between breakpoints. n_nodes is the evaluation budget per
// piece. Interior-only nodes keep the result well defined where the intensity
// jumps.
double compensator(const Intensity& lambda, double a, double b, int n_nodes = 64);

// Sum of log intensities at the events minus the compensator over the window.
double log_likelihood(const EventSequence& seq, const Intensity& lambda,
                      const Window& window, int n_nodes = 64);

// Density of the next event at t given the last event at t_last:
// f(t) = lambda(t) * exp(-integral of lambda over [t_last, t]).
double density_from_intensity(const Intensity& lambda, double t_last, double t,
                              int n_nodes = 64);

// Expected next-event time with history frozen at t_c, truncated at the
// horizon: probability mass beyond the horizon is assigned to the horizon
// point. n_points is the total subinterval budget across [t_c, horizon].
double expected_next_time(const Intensity& lambda, double t_c, double horizon,
                          int n_points = 256);

}  // namespace tdin::pp
