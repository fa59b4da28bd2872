#pragma once

#include <cstdint>

#include "dualsmooth/linear_system.hpp"
#include "dualsmooth/rng.hpp"

namespace dualsmooth {

struct NoiseSpec {
  enum class Kind { Gaussian, Laplace, None };
  Kind kind = Kind::None;
  Eigen::MatrixXd covariance;  // Gaussian: PSD, dim x dim
  double scale = 1.0;          // Laplace: per-coordinate scale > 0
  int dim = 0;

  static NoiseSpec gaussian(Eigen::MatrixXd covariance);
  static NoiseSpec laplace(double scale, int dim);
  static NoiseSpec none(int dim);
};

// One multivariate draw. Gaussian draws use a PSD square root of the
// covariance applied to per-coordinate standard normals; Laplace draws
// are i.i.d. per coordinate via the inverse CDF.
Eigen::VectorXd sample_noise(const NoiseSpec& spec, Rng& rng);

Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& covariance, Rng& rng);
double sample_laplace(double scale, Rng& rng);

struct SimulationResult {
  Supervector true_states;        // x with x_0 = w_0, x_{t+1} = F_t x_t + w_{t+1}
  Supervector measurements;       // z_t = H_t x_t + v_t
  Supervector process_noise;      // w draws
  Supervector measurement_noise;  // v draws
};

// Draw order: w_0..w_T then v_0..v_T; identical seeds give identical output.
SimulationResult simulate(const LinearSystem& system,
                          const NoiseSpec& process_noise,
                          const NoiseSpec& measurement_noise,
                          std::uint64_t seed);

}  // namespace dualsmooth
