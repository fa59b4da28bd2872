#include "dualsmooth/linear_system.hpp"

#include <stdexcept>
#include <string>

namespace dualsmooth {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_blocks(const Supervector& v, int num_blocks, int block_dim,
                  const char* name) {
  require(v.block_dim == block_dim,
          std::string(name) + ": block dimension mismatch");
  require(v.num_blocks() == num_blocks,
          std::string(name) + ": block count mismatch");
}

}  // namespace

Supervector::Supervector(Eigen::VectorXd d, int dim) : data(std::move(d)), block_dim(dim) {
  if (dim <= 0 || data.size() % dim != 0)
    throw std::invalid_argument("Supervector: size not a multiple of block dimension");
}

Supervector Supervector::Zero(int num_blocks, int block_dim) {
  return Supervector(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_blocks) * block_dim),
      block_dim);
}

LinearSystem::LinearSystem(int horizon, int state_dim, int meas_dim,
                           std::vector<Eigen::MatrixXd> dynamics,
                           std::vector<Eigen::MatrixXd> measurement)
    : horizon_(horizon),
      state_dim_(state_dim),
      meas_dim_(meas_dim),
      dynamics_(std::move(dynamics)),
      measurement_(std::move(measurement)) {
  require(horizon_ >= 0, "LinearSystem: horizon must be >= 0");
  require(state_dim_ >= 1, "LinearSystem: state_dim must be >= 1");
  require(meas_dim_ >= 1, "LinearSystem: meas_dim must be >= 1");
  require(static_cast<int>(dynamics_.size()) == horizon_,
          "LinearSystem: need exactly T dynamics matrices");
  require(static_cast<int>(measurement_.size()) == horizon_ + 1,
          "LinearSystem: need exactly T+1 measurement matrices");
  for (const auto& f : dynamics_)
    require(f.rows() == state_dim_ && f.cols() == state_dim_,
            "LinearSystem: F_t must be state_dim x state_dim");
  for (const auto& h : measurement_)
    require(h.rows() == meas_dim_ && h.cols() == state_dim_,
            "LinearSystem: H_t must be meas_dim x state_dim");
}

BlockMatrix build_dynamics_supermatrix(const LinearSystem& system) {
  const int n = system.state_dim();
  const int T = system.horizon();
  const Eigen::Index dim = static_cast<Eigen::Index>(T + 1) * n;
  BlockMatrix out;
  out.dense = Eigen::MatrixXd::Identity(dim, dim);
  out.structure = BlockMatrix::Structure::LowerBidiagonal;
  out.rows_per_block = n;
  out.cols_per_block = n;
  for (int t = 0; t < T; ++t)
    out.dense.block((t + 1) * n, t * n, n, n) = -system.dynamics(t);
  return out;
}

BlockMatrix build_measurement_supermatrix(const LinearSystem& system) {
  const int n = system.state_dim();
  const int m = system.meas_dim();
  const int T = system.horizon();
  BlockMatrix out;
  out.dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T + 1) * m,
                                    static_cast<Eigen::Index>(T + 1) * n);
  out.structure = BlockMatrix::Structure::BlockDiagonal;
  out.rows_per_block = m;
  out.cols_per_block = n;
  for (int t = 0; t <= T; ++t)
    out.dense.block(t * m, t * n, m, n) = system.measurement(t);
  return out;
}

Supervector states_from_noise(const LinearSystem& system, const Supervector& w) {
  const int T = system.horizon();
  check_blocks(w, T + 1, system.state_dim(), "states_from_noise");
  Supervector x = Supervector::Zero(T + 1, system.state_dim());
  x.block(0) = w.block(0);
  for (int t = 0; t < T; ++t)
    x.block(t + 1) = system.dynamics(t) * x.block(t) + w.block(t + 1);
  return x;
}

Supervector apply_dynamics(const LinearSystem& system, const Supervector& x) {
  const int T = system.horizon();
  check_blocks(x, T + 1, system.state_dim(), "apply_dynamics");
  Supervector w = Supervector::Zero(T + 1, system.state_dim());
  w.block(0) = x.block(0);
  for (int t = 0; t < T; ++t)
    w.block(t + 1) = x.block(t + 1) - system.dynamics(t) * x.block(t);
  return w;
}

Supervector apply_dynamics_transpose(const LinearSystem& system,
                                     const Supervector& y) {
  const int T = system.horizon();
  check_blocks(y, T + 1, system.state_dim(), "apply_dynamics_transpose");
  Supervector r = Supervector::Zero(T + 1, system.state_dim());
  r.block(T) = y.block(T);
  for (int t = 0; t < T; ++t)
    r.block(t) = y.block(t) - system.dynamics(t).transpose() * y.block(t + 1);
  return r;
}

Supervector solve_dynamics_transpose(const LinearSystem& system,
                                     const Supervector& r) {
  const int T = system.horizon();
  check_blocks(r, T + 1, system.state_dim(), "solve_dynamics_transpose");
  Supervector y = Supervector::Zero(T + 1, system.state_dim());
  y.block(T) = r.block(T);
  for (int t = T - 1; t >= 0; --t)
    y.block(t) = r.block(t) + system.dynamics(t).transpose() * y.block(t + 1);
  return y;
}

Supervector apply_measurement(const LinearSystem& system, const Supervector& x) {
  const int T = system.horizon();
  check_blocks(x, T + 1, system.state_dim(), "apply_measurement");
  Supervector z = Supervector::Zero(T + 1, system.meas_dim());
  for (int t = 0; t <= T; ++t) z.block(t) = system.measurement(t) * x.block(t);
  return z;
}

Supervector apply_measurement_transpose(const LinearSystem& system,
                                        const Supervector& u) {
  const int T = system.horizon();
  check_blocks(u, T + 1, system.meas_dim(), "apply_measurement_transpose");
  Supervector r = Supervector::Zero(T + 1, system.state_dim());
  for (int t = 0; t <= T; ++t)
    r.block(t) = system.measurement(t).transpose() * u.block(t);
  return r;
}

Residuals residuals(const LinearSystem& system, const Supervector& x,
                    const Supervector& z) {
  check_blocks(z, system.horizon() + 1, system.meas_dim(), "residuals");
  Residuals out;
  out.w = apply_dynamics(system, x);
  out.v = Supervector::Zero(system.horizon() + 1, system.meas_dim());
  out.v.data = z.data - apply_measurement(system, x).data;
  return out;
}

}  // namespace dualsmooth
