#include "dualsmooth/problems.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

#include "dualsmooth/extended_real.hpp"

namespace dualsmooth {

PrimalProblem build_primal(std::shared_ptr<const LinearSystem> system,
                           std::vector<PenaltyPtr> process_penalties,
                           std::vector<PenaltyPtr> measurement_penalties,
                           Supervector measurements) {
  if (!system) throw std::invalid_argument("build_primal: null system");
  const int blocks = system->horizon() + 1;
  SeparablePenalty f(std::move(process_penalties));
  SeparablePenalty g(std::move(measurement_penalties));
  if (f.num_blocks() != blocks || f.block_dim() != system->state_dim())
    throw std::invalid_argument("build_primal: process penalties must be T+1 blocks of dim state_dim");
  if (g.num_blocks() != blocks || g.block_dim() != system->meas_dim())
    throw std::invalid_argument("build_primal: measurement penalties must be T+1 blocks of dim meas_dim");
  if (measurements.num_blocks() != blocks ||
      measurements.block_dim != system->meas_dim())
    throw std::invalid_argument("build_primal: measurements must be T+1 blocks of dim meas_dim");
  return PrimalProblem{std::move(system), std::move(f), std::move(g),
                       std::move(measurements)};
}

double primal_objective(const PrimalProblem& p, const Supervector& x) {
  const Supervector w = apply_dynamics(*p.system, x);
  const double fw = p.process_penalties.value(w);
  if (fw == kPlusInf) return kPlusInf;
  Supervector r = p.measurements;
  r.data -= apply_measurement(*p.system, x).data;
  return ext_add(fw, p.measurement_penalties.value(r));
}

DualProblem build_dual(const PrimalProblem& p) {
  return DualProblem{p.system, p.process_penalties, p.measurement_penalties,
                     p.measurements};
}

Supervector adjoint_states(const LinearSystem& system, const Supervector& u) {
  return solve_dynamics_transpose(system, apply_measurement_transpose(system, u));
}

DualEvaluation dual_objective(const DualProblem& d, const Supervector& u) {
  DualEvaluation out{0.0, adjoint_states(*d.system, u)};
  const double f_conj = d.process_penalties.conjugate_value(out.y);
  const double g_conj = d.measurement_penalties.conjugate_value(u);
  if (f_conj == kPlusInf || g_conj == kPlusInf) {
    out.value = kMinusInf;
    return out;
  }
  out.value = d.measurements.data.dot(u.data) - f_conj - g_conj;
  return out;
}

double duality_gap(const PrimalProblem& p, const Supervector& x,
                   const Supervector& u) {
  const double pv = primal_objective(p, x);
  const DualEvaluation dv = dual_objective(build_dual(p), u);
  if (pv == kPlusInf && dv.value == kMinusInf)
    throw std::domain_error("duality_gap: both candidates infeasible, gap undefined");
  if (pv == kPlusInf || dv.value == kMinusInf) return kPlusInf;
  return pv - dv.value;
}

const char* to_string(DualityStatus s) {
  switch (s) {
    case DualityStatus::PlqAutomatic: return "PLQ_AUTOMATIC";
    case DualityStatus::StrictFeasibility: return "STRICT_FEASIBILITY";
    case DualityStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

namespace {

// Any point with a finite penalty value, used to center the quadratic
// surrogate. Monitoring and quadratic penalties are finite at 0; the
// piecewise-linear domain midpoint is always finite.
Eigen::VectorXd domain_point(const Penalty& p) {
  if (auto ip = p.interior_point()) return *ip;
  return Eigen::VectorXd::Zero(p.dim());
}

// Feasibility probe for the PLQ certificate: minimize the surrogate
// |Ax - cf|^2 + weight * |Hx - (z - cg)|^2 and test the true objective
// at the minimizer. A heavy weight pushes residuals onto the centers,
// which lie inside dom g.
bool plq_witness_feasible(const PrimalProblem& p, double weight) {
  const LinearSystem& sys = *p.system;
  const int blocks = sys.horizon() + 1;
  Supervector cf = Supervector::Zero(blocks, sys.state_dim());
  Supervector cg = Supervector::Zero(blocks, sys.meas_dim());
  for (int t = 0; t < blocks; ++t) {
    cf.block(t) = domain_point(p.process_penalties.block(t));
    cg.block(t) = domain_point(p.measurement_penalties.block(t));
  }
  const Eigen::MatrixXd a = build_dynamics_supermatrix(sys).dense;
  const Eigen::MatrixXd h = build_measurement_supermatrix(sys).dense;
  const Eigen::MatrixXd normal =
      a.transpose() * a + weight * h.transpose() * h;
  const Eigen::VectorXd rhs =
      a.transpose() * cf.data +
      weight * h.transpose() * (p.measurements.data - cg.data);
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) return false;
  const Supervector x{llt.solve(rhs), sys.state_dim()};
  return is_finite(primal_objective(p, x));
}

}  // namespace

DualityCertificate certify_strong_duality(const PrimalProblem& p) {
  const LinearSystem& sys = *p.system;
  const int blocks = sys.horizon() + 1;

  // strict feasibility: w from penalty interiors, x = A^{-1} w, then
  // check the measurement residuals land in int dom g
  {
    Supervector w = Supervector::Zero(blocks, sys.state_dim());
    bool have_interior = true;
    for (int t = 0; t < blocks && have_interior; ++t) {
      if (auto ip = p.process_penalties.block(t).interior_point())
        w.block(t) = *ip;
      else
        have_interior = false;
    }
    if (have_interior) {
      const Supervector x = states_from_noise(sys, w);
      const Supervector hx = apply_measurement(sys, x);
      bool interior = true;
      for (int t = 0; t < blocks && interior; ++t) {
        const Eigen::VectorXd r = p.measurements.block(t) - hx.block(t);
        interior = p.measurement_penalties.block(t).in_domain_interior(r);
      }
      if (interior) {
        DualityCertificate cert;
        cert.status = DualityStatus::StrictFeasibility;
        cert.witness = std::make_pair(x, w);
        return cert;
      }
    }
  }

  // all implemented kinds are piecewise linear-quadratic, so the PLQ
  // certificate only needs a feasible point
  if (plq_witness_feasible(p, 1.0) || plq_witness_feasible(p, 1e6))
    return DualityCertificate{DualityStatus::PlqAutomatic, std::nullopt};

  return DualityCertificate{DualityStatus::Unknown, std::nullopt};
}

}  // namespace dualsmooth
