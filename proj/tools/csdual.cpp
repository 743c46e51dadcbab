#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "csdual/io.hpp"
#include "csdual/solver.hpp"

using namespace csdual;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kUncertified = 3;
constexpr int kCertifyFailed = 4;

struct RunConfig {
  std::string model;
  std::string measure;
  double gap_tol = 1e-8;
  double quad_tol = 1e-11;
  double coin_tol = 1e-7;
  double root_tol = 1e-12;
  double fp_tol = 1e-12;
  double fw_tol = 1e-10;
  int grid = 1000;
  std::string beta_range;
  std::string h_range = "0:0:1";
  int jobs = 1;
  std::uint64_t seed = 0;
  int max_iter = SolveOptions{}.max_iterations;
  int starts = SolveOptions{}.n_starts;
  std::string output;
  std::string format;
  bool family = false;
};

std::vector<double> parse_range(const std::string& text, const char* flag) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(':', pos);
    parts.push_back(text.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (parts.size() != 3) throw InputError(std::string(flag) + ": expected a:b:n");
  double a, b;
  long n;
  try {
    std::size_t used;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("a");
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("b");
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw InputError(std::string(flag) + ": expected a:b:n, got " + text);
  }
  if (n < 1) throw InputError(std::string(flag) + ": n must be at least 1");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
  return out;
}

void check_tolerances(const RunConfig& c) {
  for (double t : {c.gap_tol, c.quad_tol, c.coin_tol, c.root_tol, c.fp_tol, c.fw_tol})
    if (!(t > 0.0)) throw InputError("tolerances must be positive");
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.gap_tol = c.gap_tol;
  o.quad_tol = c.quad_tol;
  o.coin_tol = c.coin_tol;
  o.root_tol = c.root_tol;
  o.fp_tol = c.fp_tol;
  o.seed = c.seed;
  o.max_iterations = c.max_iter;
  o.n_starts = c.starts;
  return o;
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw InputError("cannot write " + c.output);
  out << text;
}

void emit(const RunConfig& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

MixedModel load_model(const RunConfig& c) {
  if (c.model.empty()) throw InputError("--model is required");
  return model_from_json(load_json_arg(c.model));
}

int cmd_signs(const RunConfig& c) {
  const MixedModel model = load_model(c);
  const SignPattern pattern = sign_pattern(model, c.root_tol);
  Json j = to_json(pattern);
  if (c.family) j["family"] = to_json(family_from_pattern(pattern));
  emit(c, j);
  return kOk;
}

int cmd_solve(const RunConfig& c) {
  const MixedModel model = load_model(c);
  const SolveReport rep = solve(model, solve_options(c));
  Json j = to_json(rep);
  j["model"] = to_json(model);
  emit(c, j);
  return rep.status == SolveStatus::Certified ? kOk : kUncertified;
}

int cmd_certify(const RunConfig& c) {
  const MixedModel model = load_model(c);
  if (c.measure.empty()) throw InputError("--measure is required");
  const ParisiMeasure mu = measure_from_json(load_json_arg(c.measure), model);
  CertifyOptions o;
  o.gap_tol = c.gap_tol;
  o.quad_tol = c.quad_tol;
  o.coin_tol = c.coin_tol;
  DualCertificate cert;
  try {
    cert = certify(model, mu, o);
  } catch (const InvalidMeasureError& e) {
    throw InputError(e.what());
  }
  emit(c, to_json(cert));
  return cert.within_gap() ? kOk : kCertifyFailed;
}

int cmd_oracle(const RunConfig& c) {
  const MixedModel model = load_model(c);
  if (c.grid < 100) throw InputError("--grid must be at least 100");
  OracleOptions o;
  o.fw_tol = c.fw_tol;
  o.quad_tol = c.quad_tol;
  emit(c, to_json(grid_oracle(model, c.grid, o)));
  return kOk;
}

int cmd_sweep(const RunConfig& c) {
  const MixedModel model = load_model(c);
  if (c.beta_range.empty()) throw InputError("--beta-range is required");
  const auto betas = parse_range(c.beta_range, "--beta-range");
  const auto hs = parse_range(c.h_range, "--h-range");
  const auto rows = sweep(model, betas, hs, solve_options(c), c.jobs);
  if (c.format == "json") {
    Json arr = Json::array();
    for (const SweepRow& r : rows) {
      Json row = {{"beta", r.beta}, {"h", r.h}, {"status", r.status}};
      if (r.status == "error") {
        row["error"] = r.error;
      } else {
        row.update({{"F", r.F}, {"gap", r.gap}, {"phase", r.phase}, {"n_atoms", r.n_atoms},
                    {"n_segments", r.n_segments}});
      }
      arr.push_back(row);
    }
    emit(c, arr);
  } else {
    emit(c, sweep_csv(rows));
  }
  std::size_t failed = 0;
  for (const SweepRow& r : rows) {
    if (r.status == "error") {
      ++failed;
      std::cerr << "cell beta=" << r.beta << " h=" << r.h << ": " << r.error << "\n";
    }
  }
  return !rows.empty() && failed == rows.size() ? kInputError : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crisanti-Sommers variational solver for mixed p-spin models"};
  app.require_subcommand(1);
  RunConfig cfg;
  if (const char* env = std::getenv("CS_SOLVER_JOBS")) {
    try {
      cfg.jobs = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring CS_SOLVER_JOBS=" << env << "\n";
    }
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "Model JSON file or inline JSON");
    sub->add_option("--gap-tol", cfg.gap_tol, "Duality gap tolerance");
    sub->add_option("--quad-tol", cfg.quad_tol, "Quadrature tolerance");
    sub->add_option("--coin-tol", cfg.coin_tol, "Coincidence tolerance");
    sub->add_option("--root-tol", cfg.root_tol, "Root enclosure width");
    sub->add_option("--fp-tol", cfg.fp_tol, "Fixed-point residual tolerance");
    sub->add_option("--seed", cfg.seed, "Seed for multistart");
    sub->add_option("--output", cfg.output, "Write output here instead of stdout");
  };

  CLI::App* signs = app.add_subcommand("signs", "Sign pattern of the structural discriminant");
  common(signs);
  signs->add_flag("--family", cfg.family, "Also print the ansatz family");

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve and certify");
  common(solve_cmd);
  solve_cmd->add_option("--max-iter", cfg.max_iter, "Outer iteration budget (0 = evaluate delta_0 only)");
  solve_cmd->add_option("--starts", cfg.starts, "Number of multistart seeds");

  CLI::App* certify_cmd = app.add_subcommand("certify", "Duality certificate of a given measure");
  common(certify_cmd);
  certify_cmd->add_option("--measure", cfg.measure, "Measure JSON file (or a solve report)");

  CLI::App* oracle = app.add_subcommand("oracle", "Grid brute-force bracket");
  common(oracle);
  oracle->add_option("--grid", cfg.grid, "Grid size N (>= 100)");
  oracle->add_option("--fw-tol", cfg.fw_tol, "Conditional-gradient gap tolerance");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Phase-diagram sweep over (beta, h)");
  common(sweep_cmd);
  sweep_cmd->add_option("--beta-range", cfg.beta_range, "a:b:n");
  sweep_cmd->add_option("--h-range", cfg.h_range, "a:b:n");
  sweep_cmd->add_option("--jobs", cfg.jobs, "Worker threads (default $CS_SOLVER_JOBS or 1)");
  sweep_cmd->add_option("--max-iter", cfg.max_iter, "Outer iteration budget per cell");
  sweep_cmd->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    check_tolerances(cfg);
    if (*signs) return cmd_signs(cfg);
    if (*solve_cmd) return cmd_solve(cfg);
    if (*certify_cmd) return cmd_certify(cfg);
    if (*oracle) return cmd_oracle(cfg);
    if (*sweep_cmd) return cmd_sweep(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
