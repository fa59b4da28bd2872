#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "dualsmooth/extended_real.hpp"

namespace dualsmooth {

// Extended-real-valued proper lsc convex penalty with closed-form value,
// Fenchel conjugate and proximal map. Immutable after construction.
class Penalty {
 public:
  enum class Kind { Quadratic, Monitoring, PiecewiseLinear1D, ZeroIndicator };

  virtual ~Penalty() = default;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  // f(x), in R ∪ {+inf}.
  virtual double value(const Eigen::VectorXd& x) const = 0;

  // f*(y) = sup_x { x'y - f(x) }, in closed form.
  virtual double conjugate_value(const Eigen::VectorXd& y) const = 0;

  // argmin_w { f(w) + |w - v|^2 / (2 step) }, step > 0.
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const;

  // prox of step * f* at v, via the Moreau decomposition
  // v = prox_{step f*}(v) + step * prox_{f/step}(v/step).
  Eigen::VectorXd conjugate_prox(const Eigen::VectorXd& v, double step) const;

  // A point in int dom(f) when the domain is full-dimensional.
  virtual std::optional<Eigen::VectorXd> interior_point() const = 0;

  // Whether x lies in the interior of dom(f).
  virtual bool in_domain_interior(const Eigen::VectorXd& x) const = 0;

  // ∇f*(y) where f* is differentiable at y; nullopt where the
  // subdifferential is set-valued or empty.
  virtual std::optional<Eigen::VectorXd> conjugate_gradient(
      const Eigen::VectorXd& y) const = 0;

 protected:
  Penalty(Kind kind, int dim);

  void check_dim(const Eigen::VectorXd& x) const;

 private:
  virtual Eigen::VectorXd prox_impl(const Eigen::VectorXd& v, double step) const = 0;

  Kind kind_;
  int dim_;
};

using PenaltyPtr = std::shared_ptr<const Penalty>;

// f(x) = x'Mx/2 with M symmetric PSD (eigenvalue floor -1e-10).
class QuadraticPenalty : public Penalty {
 public:
  explicit QuadraticPenalty(Eigen::MatrixXd m);

  double value(const Eigen::VectorXd& x) const override;
  double conjugate_value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox_impl(const Eigen::VectorXd& v, double step) const override;
  std::optional<Eigen::VectorXd> interior_point() const override;
  bool in_domain_interior(const Eigen::VectorXd& x) const override;
  std::optional<Eigen::VectorXd> conjugate_gradient(
      const Eigen::VectorXd& y) const override;

  const Eigen::MatrixXd& matrix() const { return m_; }
  bool positive_definite() const;

 private:
  Eigen::MatrixXd m_;
  // Eigendecomposition m_ = basis * scale * basis'; zero eigenvalues are
  // detected against zero_tol_ for range tests and pseudo-inversion.
  Eigen::MatrixXd basis_;
  Eigen::VectorXd scale_;
  double zero_tol_;
};

// rho_{U,M}(x) = sup_{c in U} { x'c - c'Mc/2 } with U a box [l, u]
// (entries may be -inf/+inf) and M diagonal PSD.
class MonitoringPenalty : public Penalty {
 public:
  MonitoringPenalty(Eigen::VectorXd lower, Eigen::VectorXd upper,
                    Eigen::VectorXd m_diag);

  double value(const Eigen::VectorXd& x) const override;
  double conjugate_value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox_impl(const Eigen::VectorXd& v, double step) const override;
  std::optional<Eigen::VectorXd> interior_point() const override;
  bool in_domain_interior(const Eigen::VectorXd& x) const override;
  std::optional<Eigen::VectorXd> conjugate_gradient(
      const Eigen::VectorXd& y) const override;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& m_diag() const { return m_diag_; }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd m_diag_;
};

// Convex piecewise-linear function on [knots.front(), knots.back()],
// +inf outside; slopes nondecreasing (tolerance 1e-12).
class PiecewiseLinearPenalty : public Penalty {
 public:
  PiecewiseLinearPenalty(std::vector<double> knots, std::vector<double> values);

  double value(const Eigen::VectorXd& x) const override;
  double conjugate_value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox_impl(const Eigen::VectorXd& v, double step) const override;
  std::optional<Eigen::VectorXd> interior_point() const override;
  bool in_domain_interior(const Eigen::VectorXd& x) const override;
  std::optional<Eigen::VectorXd> conjugate_gradient(
      const Eigen::VectorXd& y) const override;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  double value_at(double x) const;
  double conjugate_at(double y) const;
  double prox_at(double v, double step) const;

 private:
  int conjugate_argmax(double y) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;         // as computed, may jitter within tol
  std::vector<double> sorted_slopes_;  // running max, for binary search
};

// Indicator of {0}; membership tested with absolute tolerance 1e-9 so
// hard-constrained solutions accurate to roundoff evaluate as feasible.
class ZeroIndicatorPenalty : public Penalty {
 public:
  explicit ZeroIndicatorPenalty(int dim);

  static constexpr double kMembershipTol = 1e-9;

  double value(const Eigen::VectorXd& x) const override;
  double conjugate_value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox_impl(const Eigen::VectorXd& v, double step) const override;
  std::optional<Eigen::VectorXd> interior_point() const override;
  bool in_domain_interior(const Eigen::VectorXd& x) const override;
  std::optional<Eigen::VectorXd> conjugate_gradient(
      const Eigen::VectorXd& y) const override;
};

struct ConjugateEstimate {
  double value = kMinusInf;
  // maximum attained at a grid endpoint: window likely too small
  bool max_at_boundary = false;
};

// Brute-force sup over an equispaced grid of x*y - p(x) for 1-D penalties;
// within Lipschitz*step of the truth when the maximizer lies in [lo, hi].
ConjugateEstimate numeric_conjugate_oracle(const Penalty& p, double y,
                                           double lo, double hi, double step);

}  // namespace dualsmooth
