#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "dualsmooth/linear_system.hpp"
#include "dualsmooth/penalty.hpp"
#include "dualsmooth/rng.hpp"

namespace dualsmooth::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> entries) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v[i++] = e;
  return v;
}

inline Eigen::VectorXd scalar(double x) { return vec({x}); }

inline Eigen::VectorXd random_vector(Rng& rng, int dim, double radius = 2.0) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-radius, radius);
  return v;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols,
                                     double radius = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-radius, radius);
  return m;
}

// SPD matrix with eigenvalues in [lo, hi]
inline Eigen::MatrixXd random_spd(Rng& rng, int dim, double lo = 0.5,
                                  double hi = 2.0) {
  const Eigen::MatrixXd raw = random_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw +
                                           3.0 * Eigen::MatrixXd::Identity(dim, dim));
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd eigs(dim);
  for (int i = 0; i < dim; ++i) eigs[i] = rng.uniform(lo, hi);
  return q * eigs.asDiagonal() * q.transpose();
}

inline std::shared_ptr<const LinearSystem> random_system(Rng& rng, int horizon,
                                                         int nx, int nz,
                                                         double f_radius = 0.6) {
  std::vector<Eigen::MatrixXd> dynamics;
  for (int t = 0; t < horizon; ++t)
    dynamics.push_back(random_matrix(rng, nx, nx, f_radius));
  std::vector<Eigen::MatrixXd> measurement;
  for (int t = 0; t <= horizon; ++t)
    measurement.push_back(random_matrix(rng, nz, nx, 1.0));
  return std::make_shared<LinearSystem>(horizon, nx, nz, std::move(dynamics),
                                        std::move(measurement));
}

// The section-4 system: T steps of [[1,1],[0,1]] dynamics with [1 1] rows.
inline std::shared_ptr<const LinearSystem> tracking_system(int horizon = 10) {
  Eigen::MatrixXd f(2, 2);
  f << 1, 1, 0, 1;
  Eigen::MatrixXd h(1, 2);
  h << 1, 1;
  return std::make_shared<LinearSystem>(
      horizon, 2, 1, std::vector<Eigen::MatrixXd>(horizon, f),
      std::vector<Eigen::MatrixXd>(horizon + 1, h));
}

// Random convex piecewise-linear penalty: sorted knots, integrated
// nondecreasing slopes.
inline std::shared_ptr<const PiecewiseLinearPenalty> random_pwl(Rng& rng,
                                                                int num_knots = 6) {
  std::vector<double> knots(num_knots);
  double x = rng.uniform(-3.0, -1.0);
  for (int j = 0; j < num_knots; ++j) {
    knots[j] = x;
    x += rng.uniform(0.2, 1.2);
  }
  std::vector<double> slopes(num_knots - 1);
  double s = rng.uniform(-4.0, 0.0);
  for (int j = 0; j < num_knots - 1; ++j) {
    slopes[j] = s;
    s += rng.uniform(0.0, 2.0);
  }
  std::vector<double> values(num_knots);
  values[0] = rng.uniform(-1.0, 1.0);
  for (int j = 0; j + 1 < num_knots; ++j)
    values[j + 1] = values[j] + slopes[j] * (knots[j + 1] - knots[j]);
  return std::make_shared<PiecewiseLinearPenalty>(std::move(knots),
                                                  std::move(values));
}

}  // namespace dualsmooth::testing
