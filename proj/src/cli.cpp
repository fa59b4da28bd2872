#include "dualsmooth/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "dualsmooth/csv_io.hpp"
#include "dualsmooth/extended_real.hpp"
#include "dualsmooth/logconcave.hpp"
#include "dualsmooth/problems.hpp"
#include "dualsmooth/scenario.hpp"
#include "dualsmooth/solver.hpp"

namespace dualsmooth::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string scenario;
  std::string samples;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iters;
  bool trace = false;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

SolverOptions effective_options(const Scenario& s, const Flags& fl) {
  SolverOptions o = s.solver;
  if (fl.tol) o.tol_gap = *fl.tol;
  if (fl.max_iters) o.max_iters = *fl.max_iters;
  if (fl.seed) o.seed = *fl.seed;
  o.record_trace = fl.trace;
  return o;
}

std::string out_path(const Flags& fl, const std::string& name) {
  fs::create_directories(fl.out);
  return (fs::path(fl.out) / name).string();
}

std::vector<std::string> block_header(const std::string& prefix, int dim) {
  std::vector<std::string> h;
  for (int i = 0; i < dim; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

void write_supervectors(const std::string& path,
                        const std::vector<std::pair<std::string, const Supervector*>>& cols) {
  std::vector<std::string> header{"t"};
  for (const auto& [prefix, sv] : cols) {
    const auto bh = block_header(prefix, sv->block_dim);
    header.insert(header.end(), bh.begin(), bh.end());
  }
  const int blocks = cols.front().second->num_blocks();
  std::vector<std::vector<double>> rows;
  for (int t = 0; t < blocks; ++t) {
    std::vector<double> row{static_cast<double>(t)};
    for (const auto& [prefix, sv] : cols) {
      for (int i = 0; i < sv->block_dim; ++i) row.push_back(sv->block(t)[i]);
    }
    rows.push_back(std::move(row));
  }
  csv::write(path, header, rows);
}

void write_values(const std::string& path, const Solution& sol) {
  csv::write(path,
             {"primal_value", "dual_value", "gap", "iterations", "converged"},
             {{sol.primal_value, sol.dual_value, sol.gap,
               static_cast<double>(sol.iterations),
               sol.converged ? 1.0 : 0.0}});
}

void write_trace(const std::string& path, const Solution& sol) {
  std::vector<std::vector<double>> rows;
  for (const auto& tp : sol.trace)
    rows.push_back({static_cast<double>(tp.iteration), tp.primal_value,
                    tp.dual_value, tp.gap, tp.residual});
  csv::write(path, {"iteration", "primal_value", "dual_value", "gap", "residual"},
             rows);
}

PrimalProblem problem_from_scenario(const Scenario& s, const Flags& fl) {
  const Supervector z = resolve_measurements(s, fl.seed);
  return build_primal(s.system, s.process_penalties, s.measurement_penalties, z);
}

int run_simulate(const Flags& fl) {
  const Scenario s = load_scenario(fl.scenario);
  if (s.measurements.kind != MeasurementSource::Kind::Simulate) {
    std::cerr << "simulate: scenario has no 'simulate' measurement source\n";
    return 2;
  }
  const std::uint64_t seed = fl.seed.value_or(s.measurements.seed);
  const SimulationResult sim_out =
      simulate(*s.system, s.measurements.process_noise,
               s.measurements.measurement_noise, seed);
  write_supervectors(out_path(fl, "truth.csv"), {{"x", &sim_out.true_states}});
  write_supervectors(out_path(fl, "process_noise.csv"),
                     {{"w", &sim_out.process_noise}});
  write_supervectors(out_path(fl, "measurement_noise.csv"),
                     {{"v", &sim_out.measurement_noise}});
  write_supervectors(out_path(fl, "measurements.csv"),
                     {{"z", &sim_out.measurements}});
  std::cout << "simulate: wrote truth, noises, measurements to " << fl.out
            << " (seed " << seed << ")\n";
  return 0;
}

int run_fit_density(const Flags& fl) {
  const std::vector<double> samples = csv::read_column(fl.samples);
  const MLEDensity mle = fit_logconcave_mle(samples);
  {
    std::vector<std::vector<double>> rows;
    for (size_t j = 0; j < mle.knots.size(); ++j)
      rows.push_back({mle.knots[j], mle.log_values[j], -mle.log_values[j]});
    csv::write(out_path(fl, "density.csv"), {"knot", "log_density", "penalty"},
               rows);
  }
  {
    // conjugate of g = -log density; finite for all y, sampled past the
    // slope range where it turns affine
    const PenaltyPtr g = penalty_from_mle(mle);
    double smin = kPlusInf, smax = kMinusInf;
    for (size_t j = 0; j + 1 < mle.knots.size(); ++j) {
      const double slope = (-mle.log_values[j + 1] + mle.log_values[j]) /
                           (mle.knots[j + 1] - mle.knots[j]);
      smin = std::min(smin, slope);
      smax = std::max(smax, slope);
    }
    const double lo = smin - 1.0, hi = smax + 1.0;
    std::vector<std::vector<double>> rows;
    Eigen::VectorXd y(1);
    for (int i = 0; i <= 400; ++i) {
      y[0] = lo + (hi - lo) * i / 400.0;
      rows.push_back({y[0], g->conjugate_value(y)});
    }
    csv::write(out_path(fl, "conjugate.csv"), {"y", "value"}, rows);
  }
  std::cout << "fit-density: " << mle.knots.size() << " knots on ["
            << mle.knots.front() << ", " << mle.knots.back() << "], mass "
            << exp_integral(mle.knots, mle.log_values) << "\n";
  return 0;
}

int run_estimate(const Flags& fl) {
  const Scenario s = load_scenario(fl.scenario);
  const PrimalProblem p = problem_from_scenario(s, fl);
  const DualityCertificate cert = certify_strong_duality(p);
  std::cout << "certificate: " << to_string(cert.status) << "\n";
  const Solution sol = solve_first_order(p, effective_options(s, fl));
  write_supervectors(out_path(fl, "estimate.csv"), {{"x", &sol.x}, {"w", &sol.w}});
  write_values(out_path(fl, "values.csv"), sol);
  if (fl.trace) write_trace(out_path(fl, "trace.csv"), sol);
  std::cout << "estimate: primal " << sol.primal_value << " dual "
            << sol.dual_value << " gap " << sol.gap << " after "
            << sol.iterations << " iterations ("
            << (sol.converged ? "converged" : "NOT converged") << ")\n";
  return sol.converged ? 0 : 1;
}

int run_dual_estimate(const Flags& fl) {
  const Scenario s = load_scenario(fl.scenario);
  const PrimalProblem p = problem_from_scenario(s, fl);
  const DualProblem d = build_dual(p);
  const Solution sol = solve_first_order(p, effective_options(s, fl));
  const Reconstruction rec = reconstruct_primal_from_dual(d, sol.u);
  write_supervectors(
      out_path(fl, "dual_estimate.csv"),
      {{"x", &rec.x}, {"w", &rec.w}, {"u", &sol.u}, {"y", &sol.y}});
  Solution reported = sol;
  reported.primal_value = primal_objective(p, rec.x);
  reported.gap = (reported.primal_value != kPlusInf &&
                  reported.dual_value != kMinusInf)
                     ? reported.primal_value - reported.dual_value
                     : sol.gap;
  write_values(out_path(fl, "values.csv"), reported);
  if (fl.trace) write_trace(out_path(fl, "trace.csv"), sol);
  std::cout << "dual-estimate: dual " << sol.dual_value
            << " reconstructed primal " << reported.primal_value << " gap "
            << reported.gap << " ("
            << (sol.converged ? "converged" : "NOT converged") << ")\n";
  return sol.converged ? 0 : 1;
}

bool direct_oracle_applies(const PrimalProblem& p) {
  for (int t = 0; t < p.process_penalties.num_blocks(); ++t) {
    const auto* q =
        dynamic_cast<const QuadraticPenalty*>(&p.process_penalties.block(t));
    if (!q || !q->positive_definite()) return false;
  }
  for (int t = 0; t < p.measurement_penalties.num_blocks(); ++t) {
    const Penalty& b = p.measurement_penalties.block(t);
    if (b.kind() != Penalty::Kind::Quadratic &&
        b.kind() != Penalty::Kind::ZeroIndicator)
      return false;
  }
  return true;
}

int run_verify(const Flags& fl) {
  const Scenario s = load_scenario(fl.scenario);
  const PrimalProblem p = problem_from_scenario(s, fl);
  bool all_pass = true;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << what << "\n";
    all_pass = all_pass && ok;
  };

  const DualityCertificate cert = certify_strong_duality(p);
  std::cout << "certificate: " << to_string(cert.status) << "\n";

  const Solution sol = solve_first_order(p, effective_options(s, fl));
  report(sol.converged && !sol.diverged,
         "first-order solver converged (gap " + num(sol.gap) + ")");
  if (sol.gap != kPlusInf)
    report(sol.gap >= -1e-10 * (1.0 + std::abs(sol.primal_value)),
           "weak duality: gap nonnegative up to roundoff");

  if (direct_oracle_applies(p)) {
    const Solution direct = solve_quadratic_direct(p);
    const double err = (sol.x.data - direct.x.data).norm();
    const double tol = 1e-6 * (1.0 + direct.x.data.norm());
    report(err <= tol, "first-order matches direct oracle (|dx| " + num(err) +
                           " <= " + num(tol) + ")");
  } else {
    std::cout << "SKIP  direct oracle (penalties not all quadratic/zero)\n";
  }

  // closed-form conjugates against the grid oracle on distinct 1-D penalties
  std::vector<const Penalty*> seen;
  int checked = 0;
  bool conj_ok = true;
  auto check_penalty = [&](const Penalty& pen) {
    if (pen.dim() != 1) return;
    for (const Penalty* q : seen)
      if (q == &pen) return;
    seen.push_back(&pen);
    for (int i = 0; i < 9; ++i) {
      Eigen::VectorXd y(1);
      y[0] = -2.0 + 0.5 * i;
      const double closed = pen.conjugate_value(y);
      if (closed == kPlusInf) continue;
      const auto est = numeric_conjugate_oracle(pen, y[0], -50.0, 50.0, 1e-3);
      ++checked;
      if (est.max_at_boundary) continue;  // window did not bracket the maximizer
      conj_ok = conj_ok && std::abs(closed - est.value) <= 2e-3 * (1.0 + std::abs(closed));
    }
  };
  for (int t = 0; t < p.process_penalties.num_blocks(); ++t)
    check_penalty(p.process_penalties.block(t));
  for (int t = 0; t < p.measurement_penalties.num_blocks(); ++t)
    check_penalty(p.measurement_penalties.block(t));
  if (checked > 0)
    report(conj_ok, "closed-form conjugates match grid oracle (" +
                        std::to_string(checked) + " queries)");
  else
    std::cout << "SKIP  conjugate grid oracle (no 1-D penalties)\n";

  return all_pass ? 0 : 1;
}

int run_conjugate_plot(const Flags& fl) {
  const Scenario s = load_scenario(fl.scenario);
  if (s.system->meas_dim() != 1) {
    std::cerr << "conjugate-plot: measurement penalty must be 1-D\n";
    return 2;
  }
  const Penalty& g = *s.measurement_penalties.front();
  double lo = -5.0, hi = 5.0;
  if (const auto* pwl = dynamic_cast<const PiecewiseLinearPenalty*>(&g)) {
    lo = pwl->knots().front();
    hi = pwl->knots().back();
  }
  std::vector<std::vector<double>> vrows, crows;
  Eigen::VectorXd x(1);
  for (int i = 0; i <= 400; ++i) {
    x[0] = lo + (hi - lo) * i / 400.0;
    const double v = g.value(x);
    if (v != kPlusInf) vrows.push_back({x[0], v});
  }
  // conjugate sampled on a window wide enough to show the affine tails
  for (int i = 0; i <= 400; ++i) {
    x[0] = -6.0 + 12.0 * i / 400.0;
    const double c = g.conjugate_value(x);
    if (c != kPlusInf) crows.push_back({x[0], c});
  }
  csv::write(out_path(fl, "penalty_plot.csv"), {"x", "value"}, vrows);
  csv::write(out_path(fl, "conjugate_plot.csv"), {"y", "value"}, crows);
  std::cout << "conjugate-plot: wrote penalty_plot.csv and conjugate_plot.csv\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"MAP state smoothing by convex duality: estimation, dual "
               "optimal control, and log-concave density fitting"};
  app.require_subcommand(1);

  Flags fl;
  auto add_common = [&fl](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("--scenario", fl.scenario, "scenario JSON")->required();
    cmd->add_option("--out", fl.out, "output directory");
    cmd->add_option("--seed", fl.seed, "seed override");
    cmd->add_option("--tol", fl.tol, "duality-gap tolerance override");
    cmd->add_option("--max-iters", fl.max_iters, "iteration cap override");
    cmd->add_flag("--trace", fl.trace, "write the convergence trace CSV");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "generate truth and measurements");
  add_common(sim_cmd, true);
  auto* fit_cmd = app.add_subcommand("fit-density", "fit the log-concave MLE");
  fit_cmd->add_option("--samples", fl.samples, "one-column sample CSV")->required();
  fit_cmd->add_option("--out", fl.out, "output directory");
  auto* est_cmd = app.add_subcommand("estimate", "solve the MAP smoothing problem");
  add_common(est_cmd, true);
  auto* dual_cmd = app.add_subcommand(
      "dual-estimate", "solve the dual control problem and reconstruct");
  add_common(dual_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify", "cross-check solvers and conjugates");
  add_common(verify_cmd, true);
  auto* plot_cmd = app.add_subcommand("conjugate-plot", "emit penalty/conjugate grids");
  add_common(plot_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(fl);
    if (fit_cmd->parsed()) return run_fit_density(fl);
    if (est_cmd->parsed()) return run_estimate(fl);
    if (dual_cmd->parsed()) return run_dual_estimate(fl);
    if (verify_cmd->parsed()) return run_verify(fl);
    if (plot_cmd->parsed()) return run_conjugate_plot(fl);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace dualsmooth::cli
