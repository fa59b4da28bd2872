#include "dualsmooth/logconcave.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualsmooth {

namespace {

constexpr double kSeriesCutoff = 1e-5;

// Segment kernels: with d = b - a, the integral of exp over a unit
// parametrization is e^a jk(d) for weights 1, t, t^2, (1-t), ...
double j0(double d) {
  if (std::abs(d) < kSeriesCutoff)
    return 1.0 + d * (1.0 / 2 + d * (1.0 / 6 + d * (1.0 / 24 + d / 120)));
  return std::expm1(d) / d;
}

double j01(double d) {
  if (std::abs(d) < kSeriesCutoff)
    return 0.5 + d * (1.0 / 3 + d * (1.0 / 8 + d * (1.0 / 30 + d / 144)));
  return (std::exp(d) * (d - 1.0) + 1.0) / (d * d);
}

double j02(double d) {
  if (std::abs(d) < kSeriesCutoff)
    return 1.0 / 3 + d * (1.0 / 4 + d * (1.0 / 10 + d * (1.0 / 36 + d / 168)));
  return (std::exp(d) * (d * d - 2.0 * d + 2.0) - 2.0) / (d * d * d);
}

double j10(double d) { return j0(d) - j01(d); }
double j11(double d) { return j01(d) - j02(d); }
double j20(double d) { return j0(d) - 2.0 * j01(d) + j02(d); }

void check_knots(const std::vector<double>& knots,
                 const std::vector<double>& values) {
  if (knots.size() != values.size())
    throw std::invalid_argument("exp_integral: knots/values size mismatch");
  if (knots.empty()) throw std::invalid_argument("exp_integral: empty knots");
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    if (!(knots[j] < knots[j + 1]))
      throw std::invalid_argument("exp_integral: knots must be strictly increasing");
  }
}

// Concavity constraints c_j(v) = s_j - s_{j-1} <= 0, one per interior knot.
struct ConcavityConstraints {
  std::vector<double> inv_len;  // 1 / (t_{j+1} - t_j) per segment

  explicit ConcavityConstraints(const std::vector<double>& knots) {
    inv_len.resize(knots.size() - 1);
    for (size_t j = 0; j + 1 < knots.size(); ++j)
      inv_len[j] = 1.0 / (knots[j + 1] - knots[j]);
  }

  int count() const { return static_cast<int>(inv_len.size()) - 1; }

  double eval(const Eigen::VectorXd& v, int j) const {
    // j in [0, count): constraint at interior knot j+1
    return (v[j + 2] - v[j + 1]) * inv_len[j + 1] -
           (v[j + 1] - v[j]) * inv_len[j];
  }

  bool feasible(const Eigen::VectorXd& v, double slack = 0.0) const {
    for (int j = 0; j < count(); ++j)
      if (eval(v, j) >= -slack) return false;
    return true;
  }
};

}  // namespace

WeightedKnots merge_samples(std::vector<double> samples) {
  for (double s : samples) {
    if (!std::isfinite(s))
      throw std::invalid_argument("merge_samples: samples must be finite");
  }
  std::sort(samples.begin(), samples.end());
  WeightedKnots wk;
  const double n = static_cast<double>(samples.size());
  for (size_t i = 0; i < samples.size();) {
    size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    wk.knots.push_back(samples[i]);
    wk.weights.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return wk;
}

double exp_integral(const std::vector<double>& knots,
                    const std::vector<double>& values) {
  check_knots(knots, values);
  double acc = 0.0;
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    const double a = values[j];
    const double b = values[j + 1];
    acc += (knots[j + 1] - knots[j]) * std::exp(a) * j0(b - a);
  }
  return acc;
}

double mle_objective(const WeightedKnots& wk, const std::vector<double>& values) {
  if (values.size() != wk.knots.size())
    throw std::invalid_argument("mle_objective: values size mismatch");
  double lin = 0.0;
  for (size_t j = 0; j < values.size(); ++j) lin += wk.weights[j] * values[j];
  return -lin + exp_integral(wk.knots, values);
}

MLEDensity fit_logconcave_mle(std::vector<double> samples) {
  if (samples.size() < 3)
    throw std::invalid_argument("fit_logconcave_mle: need at least 3 samples");
  const int sample_size = static_cast<int>(samples.size());
  WeightedKnots wk = merge_samples(std::move(samples));
  const int m = static_cast<int>(wk.knots.size());
  if (m < 2)
    throw std::invalid_argument("fit_logconcave_mle: degenerate sample (all points equal)");

  const ConcavityConstraints cons(wk.knots);
  const int nc = cons.count();

  // strictly concave start: log-density of the moment-matched Gaussian
  double mean = 0.0, sq = 0.0, total = 0.0;
  for (int j = 0; j < m; ++j) {
    mean += wk.weights[j] * wk.knots[j];
    total += wk.weights[j];
  }
  mean /= total;
  for (int j = 0; j < m; ++j)
    sq += wk.weights[j] * (wk.knots[j] - mean) * (wk.knots[j] - mean);
  const double sd = std::max(std::sqrt(sq / total), 1e-8);
  Eigen::VectorXd v(m);
  for (int j = 0; j < m; ++j) {
    const double zscore = (wk.knots[j] - mean) / sd;
    v[j] = -0.5 * zscore * zscore - std::log(sd * std::sqrt(2.0 * M_PI));
  }

  auto barrier_objective = [&](const Eigen::VectorXd& vv, double mu) {
    double val = 0.0;
    for (int j = 0; j < m; ++j) val -= wk.weights[j] * vv[j];
    for (int j = 0; j + 1 < m; ++j)
      val += (wk.knots[j + 1] - wk.knots[j]) * std::exp(vv[j]) * j0(vv[j + 1] - vv[j]);
    for (int j = 0; j < nc; ++j) val -= mu * std::log(-cons.eval(vv, j));
    return val;
  };

  for (double mu = 1.0; mu >= 1e-10 * 0.999; mu *= 0.1) {
    for (int newton = 0; newton < 100; ++newton) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
      for (int j = 0; j < m; ++j) grad[j] = -wk.weights[j];
      for (int j = 0; j + 1 < m; ++j) {
        const double len = wk.knots[j + 1] - wk.knots[j];
        const double ea = std::exp(v[j]);
        const double d = v[j + 1] - v[j];
        grad[j] += len * ea * j10(d);
        grad[j + 1] += len * ea * j01(d);
        hess(j, j) += len * ea * j20(d);
        hess(j + 1, j + 1) += len * ea * j02(d);
        hess(j, j + 1) += len * ea * j11(d);
        hess(j + 1, j) += len * ea * j11(d);
      }
      for (int j = 0; j < nc; ++j) {
        const double c = cons.eval(v, j);
        Eigen::Vector3d gc(cons.inv_len[j],
                           -(cons.inv_len[j] + cons.inv_len[j + 1]),
                           cons.inv_len[j + 1]);
        for (int a = 0; a < 3; ++a) {
          grad[j + a] += mu * gc[a] / (-c);
          for (int b = 0; b < 3; ++b)
            hess(j + a, j + b) += mu * gc[a] * gc[b] / (c * c);
        }
      }

      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      Eigen::VectorXd step;
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-grad);
      } else {
        // fall back to a regularized system if roundoff broke definiteness
        step = (hess + 1e-10 * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(-grad);
      }
      const double decrement = -0.5 * grad.dot(step);
      if (decrement <= 1e-12) break;

      const double base = barrier_objective(v, mu);
      double t = 1.0;
      Eigen::VectorXd trial = v + step;
      for (int back = 0; back < 80; ++back) {
        if (cons.feasible(trial) &&
            barrier_objective(trial, mu) <= base + 1e-4 * t * grad.dot(step))
          break;
        t *= 0.5;
        trial = v + t * step;
      }
      v = trial;
    }
  }

  MLEDensity out;
  out.knots = wk.knots;
  out.log_values.assign(v.data(), v.data() + m);
  out.sample_size = sample_size;

  const double mass = exp_integral(out.knots, out.log_values);
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::runtime_error("fit_logconcave_mle: optimizer failed to normalize the density");
  for (int j = 0; j < nc; ++j) {
    if (cons.eval(v, j) > 1e-10)
      throw std::runtime_error("fit_logconcave_mle: concavity violated at the optimum");
  }
  return out;
}

PenaltyPtr penalty_from_mle(const MLEDensity& d) {
  std::vector<double> g(d.log_values.size());
  for (size_t j = 0; j < g.size(); ++j) g[j] = -d.log_values[j];
  return std::make_shared<PiecewiseLinearPenalty>(d.knots, g);
}

}  // namespace dualsmooth
