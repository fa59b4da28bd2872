#pragma once

#include <vector>

#include "dualsmooth/linear_system.hpp"
#include "dualsmooth/penalty.hpp"

namespace dualsmooth {

// Execution path for the per-block kernels. Results are bitwise identical
// across paths: block outputs are disjoint and value reductions are folded
// in block order.
enum class Exec { Serial, Parallel };

// Block-separable penalty over a supervector: f(x) = sum_t f_t(x_t).
// All per-step penalties share one block dimension.
class SeparablePenalty {
 public:
  explicit SeparablePenalty(std::vector<PenaltyPtr> blocks);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_dim() const { return block_dim_; }
  const Penalty& block(int t) const { return *blocks_[t]; }
  const PenaltyPtr& block_ptr(int t) const { return blocks_[t]; }
  const std::vector<PenaltyPtr>& blocks() const { return blocks_; }

  double value(const Supervector& x, Exec exec = Exec::Parallel) const;
  double conjugate_value(const Supervector& y, Exec exec = Exec::Parallel) const;
  void prox(const Supervector& v, double step, Supervector& out,
            Exec exec = Exec::Parallel) const;
  void conjugate_prox(const Supervector& v, double step, Supervector& out,
                      Exec exec = Exec::Parallel) const;

  Supervector prox(const Supervector& v, double step,
                   Exec exec = Exec::Parallel) const;
  Supervector conjugate_prox(const Supervector& v, double step,
                             Exec exec = Exec::Parallel) const;

 private:
  // OpenMP pays off only past this many scalar entries per call.
  static constexpr int kParallelCutoff = 4096;

  bool use_parallel(Exec exec) const;

  std::vector<PenaltyPtr> blocks_;
  int block_dim_ = 0;
};

}  // namespace dualsmooth
