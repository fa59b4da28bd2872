#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dualsmooth {

// Concatenation of a per-time-step variable across all steps t = 0..T,
// stored contiguously with uniform block dimension.
struct Supervector {
  Eigen::VectorXd data;
  int block_dim = 0;

  Supervector() = default;
  Supervector(Eigen::VectorXd d, int dim);

  static Supervector Zero(int num_blocks, int block_dim);

  int num_blocks() const {
    return block_dim == 0 ? 0 : static_cast<int>(data.size()) / block_dim;
  }

  Eigen::VectorBlock<Eigen::VectorXd> block(int t) {
    return data.segment(static_cast<Eigen::Index>(t) * block_dim, block_dim);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> block(int t) const {
    return data.segment(static_cast<Eigen::Index>(t) * block_dim, block_dim);
  }
};

// Dense supermatrix with a note of the block structure it was built from.
struct BlockMatrix {
  enum class Structure { LowerBidiagonal, BlockDiagonal };
  Eigen::MatrixXd dense;
  Structure structure;
  int rows_per_block = 0;
  int cols_per_block = 0;
};

// Linear time-varying system x_{t+1} = F_t x_t + w_{t+1}, x_0 = w_0,
// z_t = H_t x_t + v_t, for t = 0..T. Immutable once constructed.
class LinearSystem {
 public:
  LinearSystem(int horizon, int state_dim, int meas_dim,
               std::vector<Eigen::MatrixXd> dynamics,
               std::vector<Eigen::MatrixXd> measurement);

  int horizon() const { return horizon_; }
  int state_dim() const { return state_dim_; }
  int meas_dim() const { return meas_dim_; }

  // F_t for t in [0, T)
  const Eigen::MatrixXd& dynamics(int t) const { return dynamics_[t]; }
  // H_t for t in [0, T]
  const Eigen::MatrixXd& measurement(int t) const { return measurement_[t]; }

 private:
  int horizon_;
  int state_dim_;
  int meas_dim_;
  std::vector<Eigen::MatrixXd> dynamics_;
  std::vector<Eigen::MatrixXd> measurement_;
};

// A: identity diagonal blocks, -F_t subdiagonal blocks.
BlockMatrix build_dynamics_supermatrix(const LinearSystem& system);
// H: block-diagonal stack of H_0..H_T.
BlockMatrix build_measurement_supermatrix(const LinearSystem& system);

// x = A^{-1} w by forward substitution: x_0 = w_0, x_{t+1} = F_t x_t + w_{t+1}.
Supervector states_from_noise(const LinearSystem& system, const Supervector& w);

// w = A x: w_0 = x_0, w_{t+1} = x_{t+1} - F_t x_t.
Supervector apply_dynamics(const LinearSystem& system, const Supervector& x);

// A' y: (A'y)_t = y_t - F_t' y_{t+1} for t < T, (A'y)_T = y_T.
Supervector apply_dynamics_transpose(const LinearSystem& system,
                                     const Supervector& y);

// y = A'^{-1} r by backward substitution: y_T = r_T, y_t = r_t + F_t' y_{t+1}.
Supervector solve_dynamics_transpose(const LinearSystem& system,
                                     const Supervector& r);

// (H x)_t = H_t x_t.
Supervector apply_measurement(const LinearSystem& system, const Supervector& x);

// (H' u)_t = H_t' u_t.
Supervector apply_measurement_transpose(const LinearSystem& system,
                                        const Supervector& u);

struct Residuals {
  Supervector w;  // dynamics residual A x
  Supervector v;  // measurement residual z - H x
};
Residuals residuals(const LinearSystem& system, const Supervector& x,
                    const Supervector& z);

}  // namespace dualsmooth
