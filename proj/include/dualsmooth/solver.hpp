#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dualsmooth/problems.hpp"

namespace dualsmooth {

struct SolverOptions {
  int max_iters = 50000;
  double tol_gap = 1e-8;       // relative duality-gap tolerance
  double tol_residual = 1e-9;  // primal/dual residual tolerance
  double step_ratio = 1.0;     // sigma / tau
  double over_relaxation = 1.0;  // theta in [0, 1]
  std::uint64_t seed = 0;        // randomized initialization (power iteration)
  bool record_trace = false;     // keep the per-check convergence trace
};

struct TracePoint {
  int iteration;
  double primal_value;
  double dual_value;
  double gap;
  double residual;
};

struct Solution {
  Supervector x, w, u, y;  // w = Ax exactly, y from the backward recursion
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;  // iterates blew up; problem likely infeasible
  std::vector<TracePoint> trace;
};

// Matrix-free linear map.
struct LinearOperator {
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_transpose;
};

// Power iteration on K'K (200 iterations or relative change < 1e-12),
// inflated by 1.01 so step sizes built from it are safe.
double operator_norm_estimate(const LinearOperator& k, std::uint64_t seed = 0);

// Primal-dual hybrid gradient on min_x f(Ax) + g(z - Hx).
Solution solve_first_order(const PrimalProblem& p, const SolverOptions& opts = {});

// Direct linear-algebra oracle for all-quadratic process penalties
// (M positive definite) with quadratic or zero-indicator measurement
// penalties; solves normal equations or the KKT system.
Solution solve_quadratic_direct(const PrimalProblem& p);

struct Reconstruction {
  Supervector w, x;
};

// From a (near-)optimal control u: derive y, set w_t = grad f_t*(y_t),
// x = A^{-1} w. Throws when some f_t* is not differentiable at y_t.
Reconstruction reconstruct_primal_from_dual(const DualProblem& d,
                                            const Supervector& u);

}  // namespace dualsmooth
