#pragma once

#include <vector>

#include "dualsmooth/penalty.hpp"

namespace dualsmooth {

// Fitted log-concave maximum-likelihood density: the log-density is
// concave piecewise-linear with knots at the unique sample points and
// -inf outside [knots.front(), knots.back()].
struct MLEDensity {
  std::vector<double> knots;       // sorted, strictly increasing
  std::vector<double> log_values;  // phi at the knots
  int sample_size = 0;
};

// Unique sorted sample points with multiplicity weights summing to one.
struct WeightedKnots {
  std::vector<double> knots;
  std::vector<double> weights;
};
WeightedKnots merge_samples(std::vector<double> samples);

// Integral of exp(piecewise-linear interpolant) over [knots.front(),
// knots.back()]: sum of (t_{j+1}-t_j) J(v_j, v_{j+1}) with
// J(a,b) = (e^a - e^b)/(a - b), series branch for |a-b| < 1e-5.
double exp_integral(const std::vector<double>& knots,
                    const std::vector<double>& values);

// Negative average log-likelihood plus normalization mass:
// sigma(v) = -sum_j w_j v_j + exp_integral(knots, v). The MLE minimizes
// sigma over concave v; at the optimum the integral is 1.
double mle_objective(const WeightedKnots& wk, const std::vector<double>& values);

// Log-barrier Newton fit (barrier 1 down to 1e-10 by factors of 10,
// Newton tolerance 1e-12) over concave piecewise-linear log-densities.
MLEDensity fit_logconcave_mle(std::vector<double> samples);

// The convex penalty g = -phi as a PiecewiseLinear1D penalty.
PenaltyPtr penalty_from_mle(const MLEDensity& d);

}  // namespace dualsmooth
