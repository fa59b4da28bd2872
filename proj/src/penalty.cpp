#include "dualsmooth/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualsmooth {

namespace {

constexpr double kPsdFloor = -1e-10;
constexpr double kSlopeTol = 1e-12;

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

}  // namespace

Penalty::Penalty(Kind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("Penalty: dimension must be >= 1");
}

void Penalty::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("Penalty: argument dimension mismatch");
}

Eigen::VectorXd Penalty::prox(const Eigen::VectorXd& v, double step) const {
  check_dim(v);
  if (!(step > 0)) throw std::invalid_argument("prox: step must be > 0");
  return prox_impl(v, step);
}

Eigen::VectorXd Penalty::conjugate_prox(const Eigen::VectorXd& v,
                                        double step) const {
  check_dim(v);
  if (!(step > 0)) throw std::invalid_argument("conjugate_prox: step must be > 0");
  return v - step * prox(v / step, 1.0 / step);
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticPenalty::QuadraticPenalty(Eigen::MatrixXd m)
    : Penalty(Kind::Quadratic, static_cast<int>(m.rows())), m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("QuadraticPenalty: M must be square");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + m_.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("QuadraticPenalty: M must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("QuadraticPenalty: eigendecomposition failed");
  basis_ = eig.eigenvectors();
  scale_ = eig.eigenvalues();
  const double max_eig = scale_.size() ? scale_.maxCoeff() : 0.0;
  if (scale_.minCoeff() < kPsdFloor * std::max(1.0, max_eig))
    throw std::invalid_argument("QuadraticPenalty: M must be PSD");
  zero_tol_ = 1e-10 * std::max(1.0, max_eig);
}

bool QuadraticPenalty::positive_definite() const {
  return scale_.minCoeff() > zero_tol_;
}

double QuadraticPenalty::value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return 0.5 * x.dot(m_ * x);
}

double QuadraticPenalty::conjugate_value(const Eigen::VectorXd& y) const {
  check_dim(y);
  const Eigen::VectorXd c = basis_.transpose() * y;
  const double range_tol = 1e-10 * (1.0 + y.norm());
  double acc = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    if (scale_[i] > zero_tol_) {
      acc += 0.5 * c[i] * c[i] / scale_[i];
    } else if (std::abs(c[i]) > range_tol) {
      return kPlusInf;  // y outside range(M)
    }
  }
  return acc;
}

Eigen::VectorXd QuadraticPenalty::prox_impl(const Eigen::VectorXd& v,
                                       double step) const {
  check_dim(v);
  // (I + step M)^{-1} v through the eigenbasis
  Eigen::VectorXd c = basis_.transpose() * v;
  for (int i = 0; i < c.size(); ++i)
    c[i] /= 1.0 + step * std::max(scale_[i], 0.0);
  return basis_ * c;
}

std::optional<Eigen::VectorXd> QuadraticPenalty::interior_point() const {
  return Eigen::VectorXd::Zero(dim());
}

bool QuadraticPenalty::in_domain_interior(const Eigen::VectorXd& x) const {
  check_dim(x);
  return true;
}

std::optional<Eigen::VectorXd> QuadraticPenalty::conjugate_gradient(
    const Eigen::VectorXd& y) const {
  check_dim(y);
  if (!positive_definite()) return std::nullopt;
  Eigen::VectorXd c = basis_.transpose() * y;
  for (int i = 0; i < c.size(); ++i) c[i] /= scale_[i];
  return basis_ * c;
}

// ---------------------------------------------------------------------------
// Monitoring (box U, diagonal M)

MonitoringPenalty::MonitoringPenalty(Eigen::VectorXd lower,
                                     Eigen::VectorXd upper,
                                     Eigen::VectorXd m_diag)
    : Penalty(Kind::Monitoring, static_cast<int>(lower.size())),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      m_diag_(std::move(m_diag)) {
  if (upper_.size() != dim() || m_diag_.size() != dim())
    throw std::invalid_argument("MonitoringPenalty: l, u, M_diag sizes differ");
  for (int i = 0; i < dim(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i])
      throw std::invalid_argument("MonitoringPenalty: U must be nonempty (l <= u)");
    if (lower_[i] == kPlusInf || upper_[i] == kMinusInf)
      throw std::invalid_argument("MonitoringPenalty: box bounds out of order");
    if (m_diag_[i] < kPsdFloor)
      throw std::invalid_argument("MonitoringPenalty: M_diag must be PSD");
  }
  m_diag_ = m_diag_.cwiseMax(0.0);
}

double MonitoringPenalty::value(const Eigen::VectorXd& x) const {
  check_dim(x);
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double m = m_diag_[i];
    if (m > 0.0) {
      const double c = clamp(x[i] / m, lower_[i], upper_[i]);
      acc += x[i] * c - 0.5 * m * c * c;
    } else if (x[i] > 0.0) {
      if (upper_[i] == kPlusInf) return kPlusInf;
      acc += x[i] * upper_[i];
    } else if (x[i] < 0.0) {
      if (lower_[i] == kMinusInf) return kPlusInf;
      acc += x[i] * lower_[i];
    }
    // x[i] == 0 contributes sup_{c in U} 0 = 0
  }
  return acc;
}

double MonitoringPenalty::conjugate_value(const Eigen::VectorXd& y) const {
  check_dim(y);
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) {
    // box membership up to roundoff: prox points can land one ulp outside
    const double tol = 1e-12 * (1.0 + std::abs(y[i]));
    if (y[i] < lower_[i] - tol || y[i] > upper_[i] + tol) return kPlusInf;
    acc += 0.5 * m_diag_[i] * y[i] * y[i];
  }
  return acc;
}

Eigen::VectorXd MonitoringPenalty::prox_impl(const Eigen::VectorXd& v,
                                        double step) const {
  check_dim(v);
  Eigen::VectorXd w(dim());
  for (int i = 0; i < dim(); ++i) {
    const double c = clamp(v[i] / (step + m_diag_[i]), lower_[i], upper_[i]);
    w[i] = v[i] - step * c;
  }
  return w;
}

std::optional<Eigen::VectorXd> MonitoringPenalty::interior_point() const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (m_diag_[i] > 0.0) continue;  // dom_i = R
    const bool up_inf = upper_[i] == kPlusInf;
    const bool lo_inf = lower_[i] == kMinusInf;
    if (up_inf && lo_inf) return std::nullopt;  // dom_i = {0}
    if (up_inf) p[i] = -1.0;                    // dom_i = (-inf, 0]
    if (lo_inf) p[i] = 1.0;                     // dom_i = [0, inf)
  }
  return p;
}

bool MonitoringPenalty::in_domain_interior(const Eigen::VectorXd& x) const {
  check_dim(x);
  for (int i = 0; i < dim(); ++i) {
    if (m_diag_[i] > 0.0) continue;
    const bool up_inf = upper_[i] == kPlusInf;
    const bool lo_inf = lower_[i] == kMinusInf;
    if (up_inf && x[i] >= 0.0) return false;
    if (lo_inf && x[i] <= 0.0) return false;
  }
  return true;
}

std::optional<Eigen::VectorXd> MonitoringPenalty::conjugate_gradient(
    const Eigen::VectorXd& y) const {
  check_dim(y);
  Eigen::VectorXd g(dim());
  for (int i = 0; i < dim(); ++i) {
    if (y[i] <= lower_[i] || y[i] >= upper_[i]) return std::nullopt;
    g[i] = m_diag_[i] * y[i];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Piecewise linear (1-D)

PiecewiseLinearPenalty::PiecewiseLinearPenalty(std::vector<double> knots,
                                               std::vector<double> values)
    : Penalty(Kind::PiecewiseLinear1D, 1),
      knots_(std::move(knots)),
      values_(std::move(values)) {
  if (knots_.size() < 2)
    throw std::invalid_argument("PiecewiseLinearPenalty: need >= 2 knots");
  if (values_.size() != knots_.size())
    throw std::invalid_argument("PiecewiseLinearPenalty: knots/values size mismatch");
  for (size_t j = 0; j + 1 < knots_.size(); ++j) {
    if (!(knots_[j] < knots_[j + 1]))
      throw std::invalid_argument("PiecewiseLinearPenalty: knots must be strictly increasing");
  }
  for (double v : values_) {
    if (!std::isfinite(v))
      throw std::invalid_argument("PiecewiseLinearPenalty: values must be finite");
  }
  slopes_.resize(knots_.size() - 1);
  for (size_t j = 0; j + 1 < knots_.size(); ++j)
    slopes_[j] = (values_[j + 1] - values_[j]) / (knots_[j + 1] - knots_[j]);
  for (size_t j = 0; j + 1 < slopes_.size(); ++j) {
    const double tol =
        kSlopeTol * std::max({1.0, std::abs(slopes_[j]), std::abs(slopes_[j + 1])});
    if (slopes_[j + 1] < slopes_[j] - tol)
      throw std::invalid_argument("PiecewiseLinearPenalty: slopes must be nondecreasing (not convex)");
  }
  sorted_slopes_ = slopes_;
  for (size_t j = 1; j < sorted_slopes_.size(); ++j)
    sorted_slopes_[j] = std::max(sorted_slopes_[j], sorted_slopes_[j - 1]);
}

double PiecewiseLinearPenalty::value_at(double x) const {
  // domain membership up to roundoff: solutions sitting on the boundary
  // may land one ulp outside
  const double tol = 1e-12 * (1.0 + std::abs(x));
  if (x < knots_.front() - tol || x > knots_.back() + tol) return kPlusInf;
  x = clamp(x, knots_.front(), knots_.back());
  // segment index: largest j with knots_[j] <= x, capped at last segment
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  size_t j = static_cast<size_t>(it - knots_.begin());
  j = (j == 0) ? 0 : j - 1;
  if (j >= slopes_.size()) j = slopes_.size() - 1;
  return values_[j] + slopes_[j] * (x - knots_[j]);
}

int PiecewiseLinearPenalty::conjugate_argmax(double y) const {
  // knot_j y - g_j is unimodal in j; the max sits where the slope crosses y
  const auto it =
      std::upper_bound(sorted_slopes_.begin(), sorted_slopes_.end(), y);
  return static_cast<int>(it - sorted_slopes_.begin());
}

double PiecewiseLinearPenalty::conjugate_at(double y) const {
  const int j = conjugate_argmax(y);
  return knots_[j] * y - values_[j];
}

double PiecewiseLinearPenalty::prox_at(double v, double step) const {
  const size_t nseg = slopes_.size();
  // smallest segment j whose image right endpoint knot_{j+1} + step*s_j
  // reaches v; w then lies in segment j or at its left knot
  size_t lo = 0, hi = nseg;
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (knots_[mid + 1] + step * sorted_slopes_[mid] < v)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == nseg) return knots_.back();
  return clamp(v - step * slopes_[lo], knots_[lo], knots_[lo + 1]);
}

double PiecewiseLinearPenalty::value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return value_at(x[0]);
}

double PiecewiseLinearPenalty::conjugate_value(const Eigen::VectorXd& y) const {
  check_dim(y);
  return conjugate_at(y[0]);
}

Eigen::VectorXd PiecewiseLinearPenalty::prox_impl(const Eigen::VectorXd& v,
                                             double step) const {
  check_dim(v);
  Eigen::VectorXd w(1);
  w[0] = prox_at(v[0], step);
  return w;
}

std::optional<Eigen::VectorXd> PiecewiseLinearPenalty::interior_point() const {
  Eigen::VectorXd p(1);
  p[0] = 0.5 * (knots_.front() + knots_.back());
  return p;
}

bool PiecewiseLinearPenalty::in_domain_interior(const Eigen::VectorXd& x) const {
  check_dim(x);
  return x[0] > knots_.front() && x[0] < knots_.back();
}

std::optional<Eigen::VectorXd> PiecewiseLinearPenalty::conjugate_gradient(
    const Eigen::VectorXd& y) const {
  check_dim(y);
  const int j = conjugate_argmax(y[0]);
  const double tol = 1e-12 * (1.0 + std::abs(y[0]));
  // ties with an adjacent knot make the subdifferential set-valued
  if (j > 0 && std::abs(y[0] - slopes_[j - 1]) <= tol) return std::nullopt;
  if (j < static_cast<int>(slopes_.size()) &&
      std::abs(y[0] - slopes_[j]) <= tol)
    return std::nullopt;
  Eigen::VectorXd g(1);
  g[0] = knots_[j];
  return g;
}

// ---------------------------------------------------------------------------
// Zero indicator

ZeroIndicatorPenalty::ZeroIndicatorPenalty(int dim)
    : Penalty(Kind::ZeroIndicator, dim) {}

double ZeroIndicatorPenalty::value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return x.cwiseAbs().maxCoeff() <= kMembershipTol ? 0.0 : kPlusInf;
}

double ZeroIndicatorPenalty::conjugate_value(const Eigen::VectorXd& y) const {
  check_dim(y);
  return 0.0;
}

Eigen::VectorXd ZeroIndicatorPenalty::prox_impl(const Eigen::VectorXd& v,
                                           double /*step*/) const {
  check_dim(v);
  return Eigen::VectorXd::Zero(dim());
}

std::optional<Eigen::VectorXd> ZeroIndicatorPenalty::interior_point() const {
  return std::nullopt;  // {0} has empty interior
}

bool ZeroIndicatorPenalty::in_domain_interior(const Eigen::VectorXd& x) const {
  check_dim(x);
  return false;
}

std::optional<Eigen::VectorXd> ZeroIndicatorPenalty::conjugate_gradient(
    const Eigen::VectorXd& y) const {
  check_dim(y);
  return Eigen::VectorXd::Zero(dim());
}

// ---------------------------------------------------------------------------

ConjugateEstimate numeric_conjugate_oracle(const Penalty& p, double y,
                                           double lo, double hi, double step) {
  if (p.dim() != 1)
    throw std::invalid_argument("numeric_conjugate_oracle: penalty must be 1-D");
  if (!(lo < hi) || !(step > 0))
    throw std::invalid_argument("numeric_conjugate_oracle: bad grid");
  ConjugateEstimate best;
  const long n = static_cast<long>(std::floor((hi - lo) / step));
  Eigen::VectorXd x(1);
  long best_k = -1;
  for (long k = 0; k <= n; ++k) {
    x[0] = lo + static_cast<double>(k) * step;
    const double fx = p.value(x);
    if (fx == kPlusInf) continue;
    const double cand = x[0] * y - fx;
    if (cand > best.value) {
      best.value = cand;
      best_k = k;
    }
  }
  best.max_at_boundary = (best_k == 0 || best_k == n);
  return best;
}

}  // namespace dualsmooth
