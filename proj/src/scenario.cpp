#include "dualsmooth/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dualsmooth/csv_io.hpp"
#include "dualsmooth/logconcave.hpp"

namespace dualsmooth {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto& k : allowed) known = known || k == item.key();
    if (!known) fail(where, "unknown field '" + item.key() + "'");
  }
}

const json& get(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

// bound entries: number, null (unbounded), or "inf"/"-inf"
double as_bound(const json& v, bool upper, const std::string& where) {
  if (v.is_null()) return upper ? kPlusInf : kMinusInf;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kPlusInf;
    if (s == "-inf") return kMinusInf;
  }
  fail(where, "expected a number, null, or \"inf\"/\"-inf\"");
}

Eigen::VectorXd as_vector(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out[i] = as_number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a row-major array of arrays");
  const size_t rows = v.size();
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) fail(where, "expected a row-major array of arrays");
  Eigen::MatrixXd out(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols)
      fail(where, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c)
      out(r, c) = as_number(v[r][c], where + "[" + std::to_string(r) + "][" +
                                         std::to_string(c) + "]");
  }
  return out;
}

std::vector<double> as_double_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::shared_ptr<const LinearSystem> parse_system(const json& sys,
                                                 const std::string& where) {
  check_keys(sys, {"horizon", "state_dim", "meas_dim", "dynamics", "measurement"},
             where);
  const int horizon = as_int(get(sys, "horizon", where), where + ".horizon");
  const int nx = as_int(get(sys, "state_dim", where), where + ".state_dim");
  const int nz = as_int(get(sys, "meas_dim", where), where + ".meas_dim");

  std::vector<Eigen::MatrixXd> dynamics;
  if (sys.contains("dynamics")) {
    const json& dj = sys["dynamics"];
    if (!dj.is_array()) fail(where + ".dynamics", "expected an array of matrices");
    for (size_t i = 0; i < dj.size(); ++i)
      dynamics.push_back(
          as_matrix(dj[i], where + ".dynamics[" + std::to_string(i) + "]"));
  }
  if (horizon > 0 && dynamics.size() == 1)
    dynamics.assign(static_cast<size_t>(horizon), dynamics[0]);
  if (static_cast<int>(dynamics.size()) != horizon)
    fail(where + ".dynamics",
         "expected " + std::to_string(horizon) + " matrices (or one to repeat)");

  std::vector<Eigen::MatrixXd> measurement;
  const json& mj = get(sys, "measurement", where);
  if (!mj.is_array()) fail(where + ".measurement", "expected an array of matrices");
  for (size_t i = 0; i < mj.size(); ++i)
    measurement.push_back(
        as_matrix(mj[i], where + ".measurement[" + std::to_string(i) + "]"));
  if (measurement.size() == 1)
    measurement.assign(static_cast<size_t>(horizon) + 1, measurement[0]);
  if (static_cast<int>(measurement.size()) != horizon + 1)
    fail(where + ".measurement",
         "expected " + std::to_string(horizon + 1) + " matrices (or one to repeat)");

  try {
    return std::make_shared<LinearSystem>(horizon, nx, nz, std::move(dynamics),
                                          std::move(measurement));
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

PenaltyPtr parse_penalty(const json& spec, int dim, const std::string& base_dir,
                         const std::string& where) {
  if (!spec.is_object()) fail(where, "expected a penalty object");
  const json& kj = get(spec, "kind", where);
  if (!kj.is_string()) fail(where + ".kind", "expected a string");
  const std::string kind = kj.get<std::string>();
  try {
    if (kind == "quadratic") {
      check_keys(spec, {"kind", "M"}, where);
      return std::make_shared<QuadraticPenalty>(
          as_matrix(get(spec, "M", where), where + ".M"));
    }
    if (kind == "monitoring") {
      check_keys(spec, {"kind", "l", "u", "M_diag"}, where);
      const json& lj = get(spec, "l", where);
      const json& uj = get(spec, "u", where);
      if (!lj.is_array() || !uj.is_array())
        fail(where, "'l' and 'u' must be arrays");
      Eigen::VectorXd lower(lj.size()), upper(uj.size());
      for (size_t i = 0; i < lj.size(); ++i)
        lower[i] = as_bound(lj[i], false, where + ".l[" + std::to_string(i) + "]");
      for (size_t i = 0; i < uj.size(); ++i)
        upper[i] = as_bound(uj[i], true, where + ".u[" + std::to_string(i) + "]");
      return std::make_shared<MonitoringPenalty>(
          std::move(lower), std::move(upper),
          as_vector(get(spec, "M_diag", where), where + ".M_diag"));
    }
    if (kind == "pwl") {
      check_keys(spec, {"kind", "knots", "values"}, where);
      return std::make_shared<PiecewiseLinearPenalty>(
          as_double_list(get(spec, "knots", where), where + ".knots"),
          as_double_list(get(spec, "values", where), where + ".values"));
    }
    if (kind == "zero") {
      check_keys(spec, {"kind"}, where);
      return std::make_shared<ZeroIndicatorPenalty>(dim);
    }
    if (kind == "mle") {
      check_keys(spec, {"kind", "samples"}, where);
      const json& sj = get(spec, "samples", where);
      std::vector<double> samples;
      if (sj.is_string()) {
        const auto path =
            std::filesystem::path(base_dir) / sj.get<std::string>();
        samples = csv::read_column(path.string());
      } else {
        samples = as_double_list(sj, where + ".samples");
      }
      return penalty_from_mle(fit_logconcave_mle(std::move(samples)));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where + ".kind", "unknown penalty kind '" + kind + "'");
}

std::vector<PenaltyPtr> parse_penalty_bank(const json& spec, int blocks, int dim,
                                           const std::string& base_dir,
                                           const std::string& where) {
  std::vector<PenaltyPtr> bank;
  if (spec.is_array()) {
    if (static_cast<int>(spec.size()) != blocks)
      fail(where, "expected " + std::to_string(blocks) + " penalty entries");
    for (int t = 0; t < blocks; ++t)
      bank.push_back(parse_penalty(spec[t], dim, base_dir,
                                   where + "[" + std::to_string(t) + "]"));
  } else {
    bank.assign(static_cast<size_t>(blocks),
                parse_penalty(spec, dim, base_dir, where));
  }
  for (int t = 0; t < blocks; ++t) {
    if (bank[t]->dim() != dim)
      fail(where + "[" + std::to_string(t) + "]",
           "penalty dimension " + std::to_string(bank[t]->dim()) +
               " does not match required " + std::to_string(dim));
  }
  return bank;
}

NoiseSpec parse_noise(const json& spec, int dim, const std::string& where) {
  const json& kj = get(spec, "kind", where);
  if (!kj.is_string()) fail(where + ".kind", "expected a string");
  const std::string kind = kj.get<std::string>();
  try {
    if (kind == "gaussian") {
      check_keys(spec, {"kind", "covariance"}, where);
      NoiseSpec s = NoiseSpec::gaussian(
          as_matrix(get(spec, "covariance", where), where + ".covariance"));
      if (s.dim != dim) fail(where, "covariance dimension mismatch");
      return s;
    }
    if (kind == "laplace") {
      check_keys(spec, {"kind", "scale"}, where);
      return NoiseSpec::laplace(
          as_number(get(spec, "scale", where), where + ".scale"), dim);
    }
    if (kind == "none") {
      check_keys(spec, {"kind"}, where);
      return NoiseSpec::none(dim);
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where + ".kind", "unknown noise kind '" + kind + "'");
}

SolverOptions parse_solver(const json& spec, const std::string& where) {
  check_keys(spec,
             {"max_iters", "tol_gap", "tol_residual", "step_ratio",
              "over_relaxation", "seed"},
             where);
  SolverOptions opts;
  if (spec.contains("max_iters"))
    opts.max_iters = as_int(spec["max_iters"], where + ".max_iters");
  if (spec.contains("tol_gap"))
    opts.tol_gap = as_number(spec["tol_gap"], where + ".tol_gap");
  if (spec.contains("tol_residual"))
    opts.tol_residual = as_number(spec["tol_residual"], where + ".tol_residual");
  if (spec.contains("step_ratio"))
    opts.step_ratio = as_number(spec["step_ratio"], where + ".step_ratio");
  if (spec.contains("over_relaxation"))
    opts.over_relaxation =
        as_number(spec["over_relaxation"], where + ".over_relaxation");
  if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned() && !spec["seed"].is_number_integer())
      fail(where + ".seed", "expected an unsigned integer");
    opts.seed = spec["seed"].get<std::uint64_t>();
  }
  return opts;
}

std::string line_of_byte(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": JSON parse error at " +
                        line_of_byte(text, e.byte) + ": " + e.what());
  }

  check_keys(root,
             {"system", "process_penalty", "measurement_penalty",
              "measurements", "solver"},
             "scenario");

  Scenario s;
  s.base_dir = std::filesystem::path(path).parent_path().string();
  s.system = parse_system(get(root, "system", "scenario"), "system");
  const int blocks = s.system->horizon() + 1;
  s.process_penalties =
      parse_penalty_bank(get(root, "process_penalty", "scenario"), blocks,
                         s.system->state_dim(), s.base_dir, "process_penalty");
  s.measurement_penalties = parse_penalty_bank(
      get(root, "measurement_penalty", "scenario"), blocks,
      s.system->meas_dim(), s.base_dir, "measurement_penalty");

  const json& meas = get(root, "measurements", "scenario");
  check_keys(meas, {"file", "simulate"}, "measurements");
  if (meas.contains("file") == meas.contains("simulate"))
    fail("measurements", "provide exactly one of 'file' or 'simulate'");
  if (meas.contains("file")) {
    s.measurements.kind = MeasurementSource::Kind::File;
    if (!meas["file"].is_string()) fail("measurements.file", "expected a string");
    s.measurements.file = meas["file"].get<std::string>();
  } else {
    const json& sim = meas["simulate"];
    check_keys(sim, {"process_noise", "measurement_noise", "seed"},
               "measurements.simulate");
    s.measurements.kind = MeasurementSource::Kind::Simulate;
    s.measurements.process_noise =
        parse_noise(get(sim, "process_noise", "measurements.simulate"),
                    s.system->state_dim(), "measurements.simulate.process_noise");
    s.measurements.measurement_noise = parse_noise(
        get(sim, "measurement_noise", "measurements.simulate"),
        s.system->meas_dim(), "measurements.simulate.measurement_noise");
    if (sim.contains("seed"))
      s.measurements.seed = sim["seed"].get<std::uint64_t>();
  }

  if (root.contains("solver"))
    s.solver = parse_solver(root["solver"], "solver");
  return s;
}

Supervector resolve_measurements(const Scenario& s,
                                 std::optional<std::uint64_t> seed_override) {
  const int blocks = s.system->horizon() + 1;
  const int nz = s.system->meas_dim();
  if (s.measurements.kind == MeasurementSource::Kind::Simulate) {
    const std::uint64_t seed = seed_override.value_or(s.measurements.seed);
    return simulate(*s.system, s.measurements.process_noise,
                    s.measurements.measurement_noise, seed)
        .measurements;
  }
  const auto path = std::filesystem::path(s.base_dir) / s.measurements.file;
  const csv::Table table = csv::read(path.string());
  if (static_cast<int>(table.rows.size()) != blocks)
    throw ScenarioError(path.string() + ": expected " + std::to_string(blocks) +
                        " measurement rows, found " +
                        std::to_string(table.rows.size()));
  Supervector z = Supervector::Zero(blocks, nz);
  for (int i = 0; i < nz; ++i) {
    const int col = table.column("z" + std::to_string(i));
    if (col < 0)
      throw ScenarioError(path.string() + ": missing column z" + std::to_string(i));
    for (int t = 0; t < blocks; ++t) z.block(t)[i] = table.rows[t][col];
  }
  return z;
}

}  // namespace dualsmooth
