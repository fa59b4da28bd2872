#include "dualsmooth/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace dualsmooth {

NoiseSpec NoiseSpec::gaussian(Eigen::MatrixXd covariance) {
  NoiseSpec s;
  s.kind = Kind::Gaussian;
  s.dim = static_cast<int>(covariance.rows());
  s.covariance = std::move(covariance);
  if (s.covariance.rows() != s.covariance.cols() || s.dim < 1)
    throw std::invalid_argument("NoiseSpec: covariance must be square");
  return s;
}

NoiseSpec NoiseSpec::laplace(double scale, int dim) {
  if (!(scale > 0)) throw std::invalid_argument("NoiseSpec: scale must be > 0");
  if (dim < 1) throw std::invalid_argument("NoiseSpec: dim must be >= 1");
  NoiseSpec s;
  s.kind = Kind::Laplace;
  s.scale = scale;
  s.dim = dim;
  return s;
}

NoiseSpec NoiseSpec::none(int dim) {
  if (dim < 1) throw std::invalid_argument("NoiseSpec: dim must be >= 1");
  NoiseSpec s;
  s.kind = Kind::None;
  s.dim = dim;
  return s;
}

Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& covariance, Rng& rng) {
  if (covariance.rows() != covariance.cols())
    throw std::invalid_argument("sample_gaussian: covariance must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("sample_gaussian: eigendecomposition failed");
  const double max_eig = eig.eigenvalues().size()
                             ? eig.eigenvalues().maxCoeff()
                             : 0.0;
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, max_eig))
    throw std::invalid_argument("sample_gaussian: covariance not PSD");
  Eigen::VectorXd std_normal(covariance.rows());
  for (Eigen::Index i = 0; i < std_normal.size(); ++i)
    std_normal[i] = rng.standard_normal();
  const Eigen::VectorXd sqrt_eigs =
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * sqrt_eigs.asDiagonal() *
         (eig.eigenvectors().transpose() * std_normal);
}

double sample_laplace(double scale, Rng& rng) {
  if (!(scale > 0)) throw std::invalid_argument("sample_laplace: scale must be > 0");
  return rng.laplace(scale);
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case NoiseSpec::Kind::Gaussian:
      return sample_gaussian(spec.covariance, rng);
    case NoiseSpec::Kind::Laplace: {
      Eigen::VectorXd v(spec.dim);
      for (int i = 0; i < spec.dim; ++i) v[i] = rng.laplace(spec.scale);
      return v;
    }
    case NoiseSpec::Kind::None:
      return Eigen::VectorXd::Zero(spec.dim);
  }
  throw std::logic_error("sample_noise: unknown kind");
}

SimulationResult simulate(const LinearSystem& system,
                          const NoiseSpec& process_noise,
                          const NoiseSpec& measurement_noise,
                          std::uint64_t seed) {
  if (process_noise.dim != system.state_dim())
    throw std::invalid_argument("simulate: process noise dimension mismatch");
  if (measurement_noise.dim != system.meas_dim())
    throw std::invalid_argument("simulate: measurement noise dimension mismatch");
  const int T = system.horizon();
  Rng rng(seed);

  SimulationResult out;
  out.process_noise = Supervector::Zero(T + 1, system.state_dim());
  out.measurement_noise = Supervector::Zero(T + 1, system.meas_dim());
  for (int t = 0; t <= T; ++t)
    out.process_noise.block(t) = sample_noise(process_noise, rng);
  for (int t = 0; t <= T; ++t)
    out.measurement_noise.block(t) = sample_noise(measurement_noise, rng);

  out.true_states = states_from_noise(system, out.process_noise);
  out.measurements = apply_measurement(system, out.true_states);
  out.measurements.data += out.measurement_noise.data;
  return out;
}

}  // namespace dualsmooth
