#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "dualsmooth/linear_system.hpp"
#include "dualsmooth/separable.hpp"

namespace dualsmooth {

// MAP smoothing program: min_x f(Ax) + g(z - Hx).
struct PrimalProblem {
  std::shared_ptr<const LinearSystem> system;
  SeparablePenalty process_penalties;      // f_t over T+1 blocks of dim n_x
  SeparablePenalty measurement_penalties;  // g_t over T+1 blocks of dim n_z
  Supervector measurements;                // z
};

// Dual optimal-control program over controls u, with adjoint states y
// generated by the backward recursion y_T = H_T'u_T, y_t = F_t'y_{t+1} + H_t'u_t.
// Shares the system and penalty banks of the primal it was built from.
struct DualProblem {
  std::shared_ptr<const LinearSystem> system;
  SeparablePenalty process_penalties;      // f_t, conjugates evaluated through them
  SeparablePenalty measurement_penalties;  // g_t
  Supervector measurements;                // z
};

PrimalProblem build_primal(std::shared_ptr<const LinearSystem> system,
                           std::vector<PenaltyPtr> process_penalties,
                           std::vector<PenaltyPtr> measurement_penalties,
                           Supervector measurements);

// f(Ax) + g(z - Hx), in R ∪ {+inf}.
double primal_objective(const PrimalProblem& p, const Supervector& x);

DualProblem build_dual(const PrimalProblem& p);

// Adjoint states from controls; the derived y satisfies A'y = H'u exactly.
Supervector adjoint_states(const LinearSystem& system, const Supervector& u);

struct DualEvaluation {
  double value;   // z'u - f*(y) - g*(u); -inf when a conjugate is +inf
  Supervector y;  // derived adjoint states
};
DualEvaluation dual_objective(const DualProblem& d, const Supervector& u);

// primal_objective(x) - dual_objective(u); >= 0 up to roundoff by weak
// duality. +inf when exactly one side is infinite; throws when both are.
double duality_gap(const PrimalProblem& p, const Supervector& x,
                   const Supervector& u);

enum class DualityStatus { PlqAutomatic, StrictFeasibility, Unknown };

struct DualityCertificate {
  DualityStatus status = DualityStatus::Unknown;
  // strictly feasible (x, w) pair backing a STRICT_FEASIBILITY verdict
  std::optional<std::pair<Supervector, Supervector>> witness;
};

DualityCertificate certify_strong_duality(const PrimalProblem& p);

const char* to_string(DualityStatus s);

}  // namespace dualsmooth
