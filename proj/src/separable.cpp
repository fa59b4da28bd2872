#include "dualsmooth/separable.hpp"

#include <stdexcept>

#include "dualsmooth/extended_real.hpp"

namespace dualsmooth {

SeparablePenalty::SeparablePenalty(std::vector<PenaltyPtr> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty())
    throw std::invalid_argument("SeparablePenalty: need at least one block");
  for (const auto& b : blocks_) {
    if (!b) throw std::invalid_argument("SeparablePenalty: null penalty");
  }
  block_dim_ = blocks_.front()->dim();
  for (const auto& b : blocks_) {
    if (b->dim() != block_dim_)
      throw std::invalid_argument("SeparablePenalty: block dimensions differ");
  }
}

bool SeparablePenalty::use_parallel(Exec exec) const {
#if defined(_OPENMP)
  return exec == Exec::Parallel &&
         num_blocks() * block_dim_ >= kParallelCutoff;
#else
  (void)exec;
  return false;
#endif
}

double SeparablePenalty::value(const Supervector& x, Exec exec) const {
  if (x.block_dim != block_dim_ || x.num_blocks() != num_blocks())
    throw std::invalid_argument("SeparablePenalty::value: shape mismatch");
  const int nb = num_blocks();
  if (use_parallel(exec)) {
    std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nb; ++t) partial[t] = blocks_[t]->value(x.block(t));
    double total = 0.0;
    for (int t = 0; t < nb; ++t) total = ext_add(total, partial[t]);
    return total;
  }
  double total = 0.0;
  for (int t = 0; t < nb; ++t) total = ext_add(total, blocks_[t]->value(x.block(t)));
  return total;
}

double SeparablePenalty::conjugate_value(const Supervector& y, Exec exec) const {
  if (y.block_dim != block_dim_ || y.num_blocks() != num_blocks())
    throw std::invalid_argument("SeparablePenalty::conjugate_value: shape mismatch");
  const int nb = num_blocks();
  if (use_parallel(exec)) {
    std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nb; ++t)
      partial[t] = blocks_[t]->conjugate_value(y.block(t));
    double total = 0.0;
    for (int t = 0; t < nb; ++t) total = ext_add(total, partial[t]);
    return total;
  }
  double total = 0.0;
  for (int t = 0; t < nb; ++t)
    total = ext_add(total, blocks_[t]->conjugate_value(y.block(t)));
  return total;
}

void SeparablePenalty::prox(const Supervector& v, double step, Supervector& out,
                            Exec exec) const {
  if (v.block_dim != block_dim_ || v.num_blocks() != num_blocks())
    throw std::invalid_argument("SeparablePenalty::prox: shape mismatch");
  if (out.data.size() != v.data.size() || out.block_dim != block_dim_)
    out = Supervector::Zero(num_blocks(), block_dim_);
  const int nb = num_blocks();
  if (use_parallel(exec)) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nb; ++t)
      out.block(t) = blocks_[t]->prox(v.block(t), step);
    return;
  }
  for (int t = 0; t < nb; ++t) out.block(t) = blocks_[t]->prox(v.block(t), step);
}

void SeparablePenalty::conjugate_prox(const Supervector& v, double step,
                                      Supervector& out, Exec exec) const {
  if (v.block_dim != block_dim_ || v.num_blocks() != num_blocks())
    throw std::invalid_argument("SeparablePenalty::conjugate_prox: shape mismatch");
  if (out.data.size() != v.data.size() || out.block_dim != block_dim_)
    out = Supervector::Zero(num_blocks(), block_dim_);
  const int nb = num_blocks();
  if (use_parallel(exec)) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nb; ++t)
      out.block(t) = blocks_[t]->conjugate_prox(v.block(t), step);
    return;
  }
  for (int t = 0; t < nb; ++t)
    out.block(t) = blocks_[t]->conjugate_prox(v.block(t), step);
}

Supervector SeparablePenalty::prox(const Supervector& v, double step,
                                   Exec exec) const {
  Supervector out = Supervector::Zero(num_blocks(), block_dim_);
  prox(v, step, out, exec);
  return out;
}

Supervector SeparablePenalty::conjugate_prox(const Supervector& v, double step,
                                             Exec exec) const {
  Supervector out = Supervector::Zero(num_blocks(), block_dim_);
  conjugate_prox(v, step, out, exec);
  return out;
}

}  // namespace dualsmooth
