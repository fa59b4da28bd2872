#include "dualsmooth/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "dualsmooth/extended_real.hpp"
#include "dualsmooth/rng.hpp"

namespace dualsmooth {

namespace {

constexpr int kCheckEvery = 25;
constexpr double kDivergenceFactor = 1e12;

void validate_options(const SolverOptions& opts) {
  if (opts.max_iters < 1)
    throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
  if (!(opts.tol_gap > 0) || !(opts.tol_residual > 0))
    throw std::invalid_argument("SolverOptions: tolerances must be > 0");
  if (!(opts.step_ratio > 0))
    throw std::invalid_argument("SolverOptions: step_ratio must be > 0");
  if (opts.over_relaxation < 0 || opts.over_relaxation > 1)
    throw std::invalid_argument("SolverOptions: over_relaxation must be in [0, 1]");
}

LinearOperator stacked_operator(const LinearSystem& sys) {
  const int nx = sys.state_dim();
  const int nz = sys.meas_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(sys.horizon() + 1) * nx;
  const Eigen::Index m = static_cast<Eigen::Index>(sys.horizon() + 1) * nz;
  LinearOperator op;
  op.input_dim = n;
  op.output_dim = n + m;
  op.apply = [&sys, nx, n, m](const Eigen::VectorXd& v) {
    const Supervector x{v, nx};
    Eigen::VectorXd out(n + m);
    out.head(n) = apply_dynamics(sys, x).data;
    out.tail(m) = apply_measurement(sys, x).data;
    return out;
  };
  op.apply_transpose = [&sys, nx, nz, n, m](const Eigen::VectorXd& v) {
    const Supervector p{v.head(n), nx};
    const Supervector q{v.tail(m), nz};
    return Eigen::VectorXd(apply_dynamics_transpose(sys, p).data +
                           apply_measurement_transpose(sys, q).data);
  };
  return op;
}

struct Candidate {
  double primal = kPlusInf;
  double dual = kMinusInf;
  double gap = kPlusInf;
};

Candidate evaluate(const PrimalProblem& p, const DualProblem& d,
                   const Supervector& x, const Supervector& u) {
  Candidate c;
  c.primal = primal_objective(p, x);
  c.dual = dual_objective(d, u).value;
  if (c.primal != kPlusInf && c.dual != kMinusInf) c.gap = c.primal - c.dual;
  return c;
}

}  // namespace

double operator_norm_estimate(const LinearOperator& k, std::uint64_t seed) {
  if (k.input_dim <= 0 || !k.apply || !k.apply_transpose)
    throw std::invalid_argument("operator_norm_estimate: incomplete operator");
  Rng rng(seed);
  Eigen::VectorXd v(k.input_dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  const double vnorm = v.norm();
  if (vnorm == 0.0) v[0] = 1.0; else v /= vnorm;

  double estimate = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd w = k.apply_transpose(k.apply(v));
    const double rayleigh = v.dot(w);
    const double next = rayleigh > 0 ? std::sqrt(rayleigh) : 0.0;
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;  // K'K v in the null space: norm is 0 on this start
    v = w / wnorm;
    if (it > 0 && std::abs(next - estimate) <= 1e-12 * std::max(1.0, next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate * 1.01;
}

Solution solve_first_order(const PrimalProblem& p, const SolverOptions& opts) {
  validate_options(opts);
  const LinearSystem& sys = *p.system;
  const int nb = sys.horizon() + 1;
  const int nx = sys.state_dim();
  const int nz = sys.meas_dim();
  const SeparablePenalty& f = p.process_penalties;
  const SeparablePenalty& g = p.measurement_penalties;
  const Supervector& z = p.measurements;
  const DualProblem dual = build_dual(p);

  {
    const DualityCertificate cert = certify_strong_duality(p);
    if (cert.status == DualityStatus::Unknown)
      std::cerr << "solve_first_order: strong duality certificate is UNKNOWN; "
                   "attempting solve anyway\n";
  }

  const double norm_k =
      std::max(operator_norm_estimate(stacked_operator(sys), opts.seed), 1e-12);
  const double tau = 1.0 / (norm_k * std::sqrt(opts.step_ratio));
  const double sigma = std::sqrt(opts.step_ratio) / norm_k;
  const double theta = opts.over_relaxation;

  Supervector x = Supervector::Zero(nb, nx);
  Supervector x_prev = x;
  Supervector x_bar = x;
  Supervector lam_a = Supervector::Zero(nb, nx);  // multiplier for Ax
  Supervector lam_h = Supervector::Zero(nb, nz);  // multiplier for Hx
  Supervector lam_a_prev = lam_a, lam_h_prev = lam_h;

  Supervector s_a = lam_a, s_h = lam_h;
  Supervector gres = Supervector::Zero(nb, nz);   // z - s_h/sigma
  Supervector gprox = gres;
  Supervector x_sum = x;                          // running sums for ergodic averages
  Supervector lam_h_sum = lam_h;
  Supervector u = Supervector::Zero(nb, nz);
  Supervector u_avg = u;
  Supervector x_avg = x;

  const double z_scale = 1.0 + z.data.norm();

  Solution sol;
  sol.x = x;
  int iter = 0;
  bool best_is_ergodic = false;
  Candidate best;
  std::vector<double> residual_history;

  while (iter < opts.max_iters) {
    ++iter;
    lam_a_prev.data = lam_a.data;
    lam_h_prev.data = lam_h.data;

    // dual ascent step: lam <- prox_{sigma F*}(lam + sigma K x_bar)
    s_a.data = lam_a.data + sigma * apply_dynamics(sys, x_bar).data;
    s_h.data = lam_h.data + sigma * apply_measurement(sys, x_bar).data;
    f.conjugate_prox(s_a, sigma, lam_a);
    // prox of sigma * (g tilde)* with g~(q) = g(z - q), via Moreau
    gres.data = z.data - s_h.data / sigma;
    g.prox(gres, 1.0 / sigma, gprox);
    lam_h.data = s_h.data - sigma * (z.data - gprox.data);

    // primal descent step (no primal regularizer: plain gradient)
    x_prev.data = x.data;
    x.data -= tau * (apply_dynamics_transpose(sys, lam_a).data +
                     apply_measurement_transpose(sys, lam_h).data);
    x_bar.data = x.data + theta * (x.data - x_prev.data);

    x_sum.data += x.data;
    lam_h_sum.data += lam_h.data;

    if (iter % kCheckEvery != 0 && iter != opts.max_iters) continue;

    // paper variables: u = -lam_h, y recomputed from u
    u.data = -lam_h.data;
    x_avg.data = x_sum.data / static_cast<double>(iter);
    u_avg.data = -lam_h_sum.data / static_cast<double>(iter);

    const Candidate last = evaluate(p, dual, x, u);
    const Candidate ergodic = evaluate(p, dual, x_avg, u_avg);
    best_is_ergodic = ergodic.gap < last.gap;
    best = best_is_ergodic ? ergodic : last;

    // fixed-point residuals of the update map
    const double rp = (x_prev.data - x.data).norm() / tau;
    const Eigen::VectorXd drift_a =
        apply_dynamics(sys, x_prev).data - apply_dynamics(sys, x).data;
    const double rd_a =
        ((lam_a_prev.data - lam_a.data) / sigma + drift_a).norm();
    const Eigen::VectorXd drift_h =
        apply_measurement(sys, x_prev).data - apply_measurement(sys, x).data;
    const double rd_h =
        ((lam_h_prev.data - lam_h.data) / sigma + drift_h).norm();
    const double scale =
        1.0 + x.data.norm() + lam_a.data.norm() + lam_h.data.norm();
    const double res_abs = std::max(rp, std::hypot(rd_a, rd_h));
    const double residual = res_abs / scale;

    sol.trace.push_back({iter, best.primal, best.dual, best.gap, residual});
    residual_history.push_back(res_abs);

    // infeasible problems drift at constant speed: the unnormalized
    // fixed-point displacement stalls far above tolerance
    bool stalled = false;
    if (iter >= 5000) {
      const double past = residual_history[residual_history.size() / 2];
      stalled = res_abs > 1e3 * opts.tol_residual * z_scale &&
                res_abs >= 0.9999 * past;
    }
    if (stalled || x.data.norm() > kDivergenceFactor * z_scale ||
        lam_a.data.norm() + lam_h.data.norm() > kDivergenceFactor * z_scale) {
      sol.diverged = true;
      break;
    }

    if (best.gap != kPlusInf) {
      if (best.gap <= opts.tol_gap * (1.0 + std::abs(best.primal))) {
        sol.converged = true;
        break;
      }
    } else if (residual <= opts.tol_residual) {
      sol.converged = true;
      break;
    }
  }

  u.data = -lam_h.data;
  x_avg.data = x_sum.data / static_cast<double>(std::max(iter, 1));
  u_avg.data = -lam_h_sum.data / static_cast<double>(std::max(iter, 1));
  sol.x = best_is_ergodic ? x_avg : x;
  sol.u = best_is_ergodic ? u_avg : u;
  sol.w = apply_dynamics(sys, sol.x);
  sol.y = adjoint_states(sys, sol.u);
  sol.primal_value = primal_objective(p, sol.x);
  const DualEvaluation de = dual_objective(dual, sol.u);
  sol.dual_value = de.value;
  sol.gap = (sol.primal_value != kPlusInf && sol.dual_value != kMinusInf)
                ? sol.primal_value - sol.dual_value
                : kPlusInf;
  sol.iterations = iter;
  if (!opts.record_trace) sol.trace.shrink_to_fit();
  return sol;
}

Solution solve_quadratic_direct(const PrimalProblem& p) {
  const LinearSystem& sys = *p.system;
  const int nb = sys.horizon() + 1;
  const int nx = sys.state_dim();
  const int nz = sys.meas_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(nb) * nx;
  const Eigen::Index m = static_cast<Eigen::Index>(nb) * nz;

  std::vector<const QuadraticPenalty*> fq(nb);
  for (int t = 0; t < nb; ++t) {
    fq[t] = dynamic_cast<const QuadraticPenalty*>(&p.process_penalties.block(t));
    if (!fq[t] || !fq[t]->positive_definite())
      throw std::invalid_argument(
          "solve_quadratic_direct: every process penalty must be Quadratic with M > 0");
  }
  std::vector<const QuadraticPenalty*> gq(nb, nullptr);
  std::vector<int> zero_steps;
  for (int t = 0; t < nb; ++t) {
    const Penalty& b = p.measurement_penalties.block(t);
    if (b.kind() == Penalty::Kind::ZeroIndicator) {
      zero_steps.push_back(t);
    } else if ((gq[t] = dynamic_cast<const QuadraticPenalty*>(&b)) == nullptr) {
      throw std::invalid_argument(
          "solve_quadratic_direct: measurement penalties must be Quadratic or ZeroIndicator");
    }
  }

  const Eigen::MatrixXd a = build_dynamics_supermatrix(sys).dense;
  const Eigen::MatrixXd h = build_measurement_supermatrix(sys).dense;
  Eigen::MatrixXd mf = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < nb; ++t)
    mf.block(t * nx, t * nx, nx, nx) = fq[t]->matrix();
  Eigen::MatrixXd mg = Eigen::MatrixXd::Zero(m, m);
  for (int t = 0; t < nb; ++t) {
    if (gq[t]) mg.block(t * nz, t * nz, nz, nz) = gq[t]->matrix();
  }

  const Eigen::MatrixXd quad = a.transpose() * mf * a + h.transpose() * mg * h;
  const Eigen::VectorXd lin = h.transpose() * mg * p.measurements.data;

  Supervector x = Supervector::Zero(nb, nx);
  Supervector u = Supervector::Zero(nb, nz);

  if (zero_steps.empty()) {
    Eigen::LLT<Eigen::MatrixXd> llt(quad);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("solve_quadratic_direct: normal equations not positive definite");
    x.data = llt.solve(lin);
  } else {
    const Eigen::Index nc = static_cast<Eigen::Index>(zero_steps.size()) * nz;
    Eigen::MatrixXd hz(nc, n);
    Eigen::VectorXd zz(nc);
    for (size_t i = 0; i < zero_steps.size(); ++i) {
      const int t = zero_steps[i];
      hz.middleRows(i * nz, nz) = h.middleRows(t * nz, nz);
      zz.segment(i * nz, nz) = p.measurements.block(t);
    }
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + nc, n + nc);
    kkt.topLeftCorner(n, n) = quad;
    kkt.topRightCorner(n, nc) = hz.transpose();
    kkt.bottomLeftCorner(nc, n) = hz;
    Eigen::VectorXd rhs(n + nc);
    rhs.head(n) = lin;
    rhs.tail(nc) = zz;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
      throw std::runtime_error(
          "solve_quadratic_direct: singular KKT system (measurements inconsistent or underdetermined)");
    const Eigen::VectorXd solvec = lu.solve(rhs);
    x.data = solvec.head(n);
    for (size_t i = 0; i < zero_steps.size(); ++i)
      u.block(zero_steps[i]) = -solvec.segment(n + i * nz, nz);
  }

  // stationarity in the residual: u_t = Mg_t (z_t - H_t x_t) on quadratic steps
  const Supervector hx = apply_measurement(sys, x);
  for (int t = 0; t < nb; ++t) {
    if (gq[t]) u.block(t) = gq[t]->matrix() * (p.measurements.block(t) - hx.block(t));
  }

  Solution sol;
  sol.x = x;
  sol.u = u;
  sol.w = apply_dynamics(sys, x);
  sol.y = adjoint_states(sys, u);
  sol.primal_value = primal_objective(p, x);
  const DualEvaluation de = dual_objective(build_dual(p), u);
  sol.dual_value = de.value;
  sol.gap = (sol.primal_value != kPlusInf && sol.dual_value != kMinusInf)
                ? sol.primal_value - sol.dual_value
                : kPlusInf;
  sol.iterations = 0;
  sol.converged =
      sol.gap != kPlusInf && sol.gap <= 1e-8 * (1.0 + std::abs(sol.primal_value));
  return sol;
}

Reconstruction reconstruct_primal_from_dual(const DualProblem& d,
                                            const Supervector& u) {
  const LinearSystem& sys = *d.system;
  const int nb = sys.horizon() + 1;
  if (u.num_blocks() != nb || u.block_dim != sys.meas_dim())
    throw std::invalid_argument("reconstruct_primal_from_dual: u has wrong shape");
  const Supervector y = adjoint_states(sys, u);
  Supervector w = Supervector::Zero(nb, sys.state_dim());
  for (int t = 0; t < nb; ++t) {
    const auto grad = d.process_penalties.block(t).conjugate_gradient(y.block(t));
    if (!grad)
      throw std::runtime_error(
          "reconstruct_primal_from_dual: conjugate of process penalty not "
          "differentiable at time step " + std::to_string(t));
    w.block(t) = *grad;
  }
  Reconstruction rec;
  rec.w = w;
  rec.x = states_from_noise(sys, w);
  return rec;
}

}  // namespace dualsmooth
