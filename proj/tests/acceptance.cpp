// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dualsmooth/cli.hpp"
#include "dualsmooth/csv_io.hpp"
#include "dualsmooth/extended_real.hpp"
#include "dualsmooth/logconcave.hpp"
#include "dualsmooth/problems.hpp"
#include "dualsmooth/rng.hpp"
#include "dualsmooth/simulate.hpp"
#include "dualsmooth/solver.hpp"

using namespace dualsmooth;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label, bool ok,
               const std::string& detail) {
  std::printf("%s  %d  %s (%s)\n", ok ? "PASS" : "FAIL", id, label.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

PenaltyPtr unit_quadratic(int dim) {
  return std::make_shared<QuadraticPenalty>(Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::MatrixXd random_spd(Rng& rng, int dim) {
  Eigen::MatrixXd raw(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) raw(r, c) = rng.uniform(-1.0, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw + 3.0 * Eigen::MatrixXd::Identity(dim, dim));
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd eigs(dim);
  for (int i = 0; i < dim; ++i) eigs[i] = rng.uniform(0.5, 2.0);
  return q * eigs.asDiagonal() * q.transpose();
}

std::shared_ptr<const LinearSystem> random_system(Rng& rng, int horizon, int nx,
                                                  int nz) {
  std::vector<Eigen::MatrixXd> dynamics, measurement;
  for (int t = 0; t < horizon; ++t) {
    Eigen::MatrixXd f(nx, nx);
    for (int r = 0; r < nx; ++r)
      for (int c = 0; c < nx; ++c) f(r, c) = rng.uniform(-0.6, 0.6);
    dynamics.push_back(f);
  }
  for (int t = 0; t <= horizon; ++t) {
    Eigen::MatrixXd h(nz, nx);
    for (int r = 0; r < nz; ++r)
      for (int c = 0; c < nx; ++c) h(r, c) = rng.uniform(-1.0, 1.0);
    measurement.push_back(h);
  }
  return std::make_shared<LinearSystem>(horizon, nx, nz, std::move(dynamics),
                                        std::move(measurement));
}

// 1. scalar closed-form instance
void criterion_scalar() {
  auto sys = std::make_shared<LinearSystem>(
      0, 1, 1, std::vector<Eigen::MatrixXd>{},
      std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Identity(1, 1)});
  Supervector z = Supervector::Zero(1, 1);
  z.block(0)[0] = 1.0;
  const PrimalProblem p =
      build_primal(sys, {unit_quadratic(1)}, {unit_quadratic(1)}, z);
  SolverOptions opts;
  opts.tol_gap = 5e-9;
  const Solution sol = solve_first_order(p, opts);
  const bool ok = sol.converged && sol.gap <= 1e-8 &&
                  std::abs(sol.x.block(0)[0] - 0.5) <= 1e-4 &&
                  std::abs(sol.u.block(0)[0] - 0.5) <= 1e-4 &&
                  std::abs(sol.primal_value - 0.25) <= 1e-8 &&
                  std::abs(sol.dual_value - 0.25) <= 1e-8;
  criterion(1, "scalar closed-form instance", ok,
            "x=" + fmt(sol.x.block(0)[0]) + " u=" + fmt(sol.u.block(0)[0]) +
                " gap=" + fmt(sol.gap));
}

// 2. Gaussian oracle equivalence on 20 random systems
void criterion_gaussian_oracle() {
  Rng rng(20240601);
  double worst_x = 0.0, worst_gap = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int horizon = 1 + static_cast<int>(rng.next_u64() % 10);
    const int nx = 1 + static_cast<int>(rng.next_u64() % 4);
    const int nz = 1 + static_cast<int>(rng.next_u64() % 2);
    auto sys = random_system(rng, horizon, nx, nz);
    std::vector<PenaltyPtr> f, g;
    for (int t = 0; t <= horizon; ++t) {
      f.push_back(std::make_shared<QuadraticPenalty>(random_spd(rng, nx)));
      g.push_back(std::make_shared<QuadraticPenalty>(random_spd(rng, nz)));
    }
    Supervector z = Supervector::Zero(horizon + 1, nz);
    for (int t = 0; t <= horizon; ++t)
      for (int i = 0; i < nz; ++i) z.block(t)[i] = rng.uniform(-2.0, 2.0);
    const PrimalProblem p = build_primal(sys, f, g, z);

    const Solution direct = solve_quadratic_direct(p);
    SolverOptions opts;
    opts.tol_gap = 1e-14;
    opts.tol_residual = 1e-13;
    opts.max_iters = 400000;
    const Solution fo = solve_first_order(p, opts);

    const double x_err = (fo.x.data - direct.x.data).norm() /
                         (1.0 + direct.x.data.norm());
    const double gap_rel = fo.gap / (1.0 + std::abs(fo.primal_value));
    worst_x = std::max(worst_x, x_err);
    worst_gap = std::max(worst_gap, gap_rel);
    ok = ok && x_err <= 1e-6 && gap_rel <= 1e-8;
  }
  criterion(2, "Gaussian oracle equivalence, 20 random systems", ok,
            "worst |dx|=" + fmt(worst_x) + " worst gap=" + fmt(worst_gap));
}

// 3. monitoring conjugate lemma against the grid oracle
void criterion_monitoring_conjugate() {
  Rng rng(33);
  const double h = 1e-3;
  bool ok = true;
  double worst = 0.0;
  for (int pen = 0; pen < 50; ++pen) {
    Eigen::VectorXd l(1), u(1), m(1);
    l[0] = rng.uniform(-3.0, -0.1);
    u[0] = rng.uniform(0.1, 3.0);
    m[0] = (pen % 3 == 0) ? 0.0 : rng.uniform(0.05, 2.0);
    const MonitoringPenalty rho(l, u, m);
    for (int q = 0; q < 20; ++q) {
      Eigen::VectorXd y(1);
      if (q < 12) {
        y[0] = rng.uniform(l[0], u[0]);
        const double closed = rho.conjugate_value(y);
        const auto est = numeric_conjugate_oracle(rho, y[0], -10.0, 10.0, h);
        const double err = std::abs(closed - est.value);
        worst = std::max(worst, err);
        ok = ok && !est.max_at_boundary && err <= 2.0 * h;
      } else {
        y[0] = (q % 2 == 0) ? u[0] + rng.uniform(0.05, 2.0)
                            : l[0] - rng.uniform(0.05, 2.0);
        ok = ok && rho.conjugate_value(y) == kPlusInf;
      }
    }
  }
  criterion(3, "monitoring conjugate lemma vs grid oracle", ok,
            "worst finite-point error=" + fmt(worst));
}

// 4. Fenchel-Young at prox points and the Moreau identity, per kind
void criterion_fenchel_moreau() {
  Rng rng(44);
  std::vector<std::pair<std::string, PenaltyPtr>> kinds;
  kinds.emplace_back("quadratic", std::make_shared<QuadraticPenalty>(random_spd(rng, 2)));
  {
    Eigen::VectorXd l(2), u(2), m(2);
    l << -1.5, -0.5;
    u << 0.5, 2.0;
    m << 0.0, 0.8;
    kinds.emplace_back("monitoring", std::make_shared<MonitoringPenalty>(l, u, m));
  }
  kinds.emplace_back("pwl", std::make_shared<PiecewiseLinearPenalty>(
                                std::vector<double>{-2.0, -0.5, 0.0, 1.0, 2.5},
                                std::vector<double>{4.0, 0.7, 0.0, 0.9, 4.5}));
  kinds.emplace_back("zero", std::make_shared<ZeroIndicatorPenalty>(2));

  bool ok = true;
  double worst_fy = 0.0, worst_moreau = 0.0;
  for (const auto& [name, p] : kinds) {
    for (int trial = 0; trial < 1000; ++trial) {
      const double step = std::vector<double>{0.1, 1.0, 10.0}[trial % 3];
      Eigen::VectorXd v(p->dim());
      for (int i = 0; i < p->dim(); ++i) v[i] = rng.uniform(-4.0, 4.0);

      const Eigen::VectorXd w = p->prox(v, step);
      const Eigen::VectorXd y = (v - w) / step;
      const double fy_residual =
          std::abs(p->value(w) + p->conjugate_value(y) - w.dot(y));
      worst_fy = std::max(worst_fy, fy_residual);
      ok = ok && fy_residual <= 1e-8 * (1.0 + std::abs(w.dot(y)));

      const Eigen::VectorXd moreau =
          p->conjugate_prox(v, step) + step * p->prox(v / step, 1.0 / step) - v;
      const double moreau_err = moreau.cwiseAbs().maxCoeff();
      worst_moreau = std::max(worst_moreau, moreau_err);
      ok = ok && moreau_err <= 1e-10;
    }
  }
  criterion(4, "Fenchel-Young and Moreau suites, 1000 trials per kind", ok,
            "worst FY=" + fmt(worst_fy) + " worst Moreau=" + fmt(worst_moreau));
}

// 5. log-concave MLE on a seeded Laplace(0,1) sample of size 100
void criterion_logconcave() {
  Rng rng(2024);
  std::vector<double> sample(100);
  for (double& s : sample) s = rng.laplace(1.0);

  const MLEDensity d = fit_logconcave_mle(sample);
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());

  bool knots_in_sample = d.knots.front() == sorted.front() &&
                         d.knots.back() == sorted.back();
  for (double k : d.knots)
    knots_in_sample =
        knots_in_sample && std::binary_search(sorted.begin(), sorted.end(), k);

  double concavity = kMinusInf;
  for (size_t j = 1; j + 1 < d.knots.size(); ++j) {
    const double left = (d.log_values[j] - d.log_values[j - 1]) /
                        (d.knots[j] - d.knots[j - 1]);
    const double right = (d.log_values[j + 1] - d.log_values[j]) /
                         (d.knots[j + 1] - d.knots[j]);
    concavity = std::max(concavity, right - left);
  }

  const double mass = exp_integral(d.knots, d.log_values);

  const WeightedKnots wk = merge_samples(sample);
  double min_directional = kPlusInf;
  const double eps = 1e-6;
  for (size_t j = 0; j < d.knots.size(); ++j) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> bumped = d.log_values;
      bumped[j] += sign * eps;
      bool feasible = true;
      for (size_t i = 1; i + 1 < d.knots.size() && feasible; ++i) {
        const double left = (bumped[i] - bumped[i - 1]) / (d.knots[i] - d.knots[i - 1]);
        const double right = (bumped[i + 1] - bumped[i]) / (d.knots[i + 1] - d.knots[i]);
        feasible = right - left <= 1e-12;
      }
      if (!feasible) continue;
      const double deriv =
          (mle_objective(wk, bumped) - mle_objective(wk, d.log_values)) / eps;
      min_directional = std::min(min_directional, deriv);
    }
  }

  const bool ok = knots_in_sample && concavity <= 1e-10 &&
                  std::abs(mass - 1.0) <= 1e-6 && min_directional >= -1e-7;
  criterion(5, "log-concave MLE invariants on n=100 Laplace sample", ok,
            "mass=" + fmt(mass) + " concavity=" + fmt(concavity) +
                " min directional=" + fmt(min_directional));
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "dualsmooth_acceptance";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"dualsmooth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

// 6. tracking example end to end through the CLI: estimate vs
// dual-estimate reconstruction with w* = y*
void criterion_tracking_end_to_end() {
  TempDir dir;
  {
    Rng rng(7);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({rng.laplace(1.0)});
    csv::write((dir.path / "noise_samples.csv").string(), {"sample"}, rows);
  }
  const std::string scenario = (dir.path / "scenario.json").string();
  {
    std::ofstream out(scenario);
    out << R"json({
  "system": {
    "horizon": 10,
    "state_dim": 2,
    "meas_dim": 1,
    "dynamics": [[[1, 1], [0, 1]]],
    "measurement": [[[1, 1]]]
  },
  "process_penalty": {"kind": "quadratic", "M": [[1, 0], [0, 1]]},
  "measurement_penalty": {"kind": "mle", "samples": "noise_samples.csv"},
  "measurements": {"simulate": {
    "process_noise": {"kind": "gaussian", "covariance": [[1, 0], [0, 1]]},
    "measurement_noise": {"kind": "laplace", "scale": 1.0},
    "seed": 71
  }},
  "solver": {"tol_gap": 1e-13, "tol_residual": 1e-12, "max_iters": 2000000}
})json";
  }

  const std::string est_dir = (dir.path / "est").string();
  const std::string dual_dir = (dir.path / "dual").string();
  const int est_code = run_cli({"estimate", "--scenario", scenario, "--out", est_dir});
  const int dual_code =
      run_cli({"dual-estimate", "--scenario", scenario, "--out", dual_dir});

  bool ok = est_code == 0 && dual_code == 0;
  double gap_rel = kPlusInf, agreement = kPlusInf, wy = kPlusInf;
  if (ok) {
    const csv::Table values = csv::read(est_dir + "/values.csv");
    const double pv = values.rows[0][values.column("primal_value")];
    const double gap = values.rows[0][values.column("gap")];
    gap_rel = gap / (1.0 + std::abs(pv));
    ok = ok && values.rows[0][values.column("converged")] == 1.0 &&
         std::isfinite(pv) && std::isfinite(gap) &&
         gap <= 1e-6 * (1.0 + std::abs(pv));

    const csv::Table est = csv::read(est_dir + "/estimate.csv");
    const csv::Table rec = csv::read(dual_dir + "/dual_estimate.csv");
    double max_x = 0.0, max_dx = 0.0, max_wy = 0.0;
    for (size_t r = 0; r < est.rows.size(); ++r) {
      for (const char* col : {"x0", "x1"}) {
        const double a = est.rows[r][est.column(col)];
        const double b = rec.rows[r][rec.column(col)];
        max_x = std::max(max_x, std::abs(a));
        max_dx = std::max(max_dx, std::abs(a - b));
      }
      for (const char* col : {"0", "1"}) {
        const double w = rec.rows[r][rec.column(std::string("w") + col)];
        const double y = rec.rows[r][rec.column(std::string("y") + col)];
        max_wy = std::max(max_wy, std::abs(w - y));
      }
    }
    agreement = max_dx;
    wy = max_wy;
    ok = ok && max_dx <= 1e-5 * (1.0 + max_x) && max_wy <= 1e-12;
  }
  criterion(6, "tracking example end-to-end, dual reconstruction w*=y*", ok,
            "gap_rel=" + fmt(gap_rel) + " |x_est-x_rec|=" + fmt(agreement) +
                " |w-y|=" + fmt(wy));
}

// 7. PLQ strong duality with a bounded measurement domain touching the data
void criterion_plq_bounded_domain() {
  auto sys = std::make_shared<LinearSystem>(
      2, 1, 1,
      std::vector<Eigen::MatrixXd>(2, Eigen::MatrixXd::Identity(1, 1)),
      std::vector<Eigen::MatrixXd>(3, Eigen::MatrixXd::Identity(1, 1)));
  std::vector<PenaltyPtr> f(3, unit_quadratic(1));
  // steep kink at 0: the optimum rests strictly inside [-1, 1] while the
  // data sits outside it, so the w-interior witness cannot certify
  std::vector<PenaltyPtr> g(3, std::make_shared<PiecewiseLinearPenalty>(
                                   std::vector<double>{-1.0, 0.0, 1.0},
                                   std::vector<double>{10.0, 0.0, 10.0}));
  Supervector z = Supervector::Zero(3, 1);
  z.block(0)[0] = 1.8;
  z.block(1)[0] = -1.8;
  z.block(2)[0] = 1.8;
  const PrimalProblem p = build_primal(sys, f, g, z);

  const DualityCertificate cert = certify_strong_duality(p);
  SolverOptions opts;
  opts.tol_gap = 1e-6;
  opts.max_iters = 500000;
  const Solution sol = solve_first_order(p, opts);
  const double gap_rel = sol.gap / (1.0 + std::abs(sol.primal_value));
  const bool ok = cert.status == DualityStatus::PlqAutomatic && sol.converged &&
                  is_finite(sol.gap) &&
                  sol.gap <= 1e-5 * (1.0 + std::abs(sol.primal_value));
  criterion(7, "PLQ strong duality with bounded measurement domain", ok,
            std::string("certificate=") + to_string(cert.status) +
                " gap_rel=" + fmt(gap_rel));
}

// 8. Kalman variant: hard measurement constraints vs the KKT oracle
void criterion_kalman() {
  Rng rng(88);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int horizon = 1 + static_cast<int>(rng.next_u64() % 8);
    const int nx = 2 + static_cast<int>(rng.next_u64() % 2);
    const int nz = 1 + static_cast<int>(rng.next_u64() % std::min(2, nx - 1));
    auto sys = random_system(rng, horizon, nx, nz);
    std::vector<PenaltyPtr> f;
    std::vector<PenaltyPtr> g;
    for (int t = 0; t <= horizon; ++t) {
      f.push_back(std::make_shared<QuadraticPenalty>(random_spd(rng, nx)));
      g.push_back(std::make_shared<ZeroIndicatorPenalty>(nz));
    }
    // consistent measurements: z = H x for a reachable x
    Supervector w = Supervector::Zero(horizon + 1, nx);
    for (int t = 0; t <= horizon; ++t)
      for (int i = 0; i < nx; ++i) w.block(t)[i] = rng.uniform(-1.0, 1.0);
    const Supervector z =
        apply_measurement(*sys, states_from_noise(*sys, w));
    const PrimalProblem p = build_primal(sys, f, g, z);

    const Solution direct = solve_quadratic_direct(p);
    SolverOptions opts;
    opts.tol_residual = 1e-11;
    opts.max_iters = 2000000;
    const Solution fo = solve_first_order(p, opts);
    const double err = (fo.x.data - direct.x.data).norm() /
                       (1.0 + direct.x.data.norm());
    worst = std::max(worst, err);
    ok = ok && err <= 1e-6;
  }
  criterion(8, "Kalman variant matches the KKT oracle, 10 instances", ok,
            "worst |dx|=" + fmt(worst));
}

}  // namespace

int main() {
  criterion_scalar();
  criterion_gaussian_oracle();
  criterion_monitoring_conjugate();
  criterion_fenchel_moreau();
  criterion_logconcave();
  criterion_tracking_end_to_end();
  criterion_plq_bounded_domain();
  criterion_kalman();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
