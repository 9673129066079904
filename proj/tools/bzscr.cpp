// bzscr: synthesize datasets, train, evaluate, and sweep the SCR strength.
//
// Commands:
//   bzscr synth --classes 15 --seen 10 --dim 16 --feat 16 --per-class 60 --seed 7 --out ds/
//   bzscr train --config cfg.json --data ds/ --out run1/
//   bzscr eval  --model run1/model.json --data ds/ --out run1/
//   bzscr sweep --config cfg.json --data ds/ --grid 0,0.1,0.2 --out sweep1/
//
// Every run echoes its merged configuration to <out>/effective_config.json;
// reruns with identical inputs are byte-identical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bzscr/divergence.hpp"
#include "bzscr/io.hpp"
#include "bzscr/scoring.hpp"
#include "bzscr/synthetic.hpp"
#include "bzscr/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

struct RunConfig {
  bzscr::TrainConfig train;
  std::string divergence = "cosine";  // cosine | path | file
  bool boosting_only = false;
};

void reject_unknown(const json& doc, const std::set<std::string>& allowed,
                    const std::string& scope) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key '" + scope + key + "'");
}

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, {"schema_version", "nu_over_n", "beta_over_n", "t_es", "max_iters_outer",
                       "seed", "divergence", "val_fraction", "val_mode", "boosting_only", "pace",
                       "solver"},
                 "");
  if (doc.contains("schema_version") && doc["schema_version"].get<int>() != kSchemaVersion)
    throw std::runtime_error("config: unsupported schema_version");

  RunConfig cfg;
  auto& t = cfg.train;
  if (doc.contains("nu_over_n")) t.nu_over_n = doc["nu_over_n"].get<double>();
  if (doc.contains("beta_over_n")) t.beta_over_n = doc["beta_over_n"].get<double>();
  if (doc.contains("t_es")) t.t_es = doc["t_es"].get<int>();
  if (doc.contains("max_iters_outer")) t.max_iters_outer = doc["max_iters_outer"].get<int>();
  if (doc.contains("seed")) t.seed = doc["seed"].get<uint64_t>();
  if (doc.contains("val_fraction")) t.val_fraction = doc["val_fraction"].get<double>();
  if (doc.contains("val_mode")) {
    const auto mode = doc["val_mode"].get<std::string>();
    if (mode == "samples") t.val_mode = bzscr::ValMode::samples;
    else if (mode == "classes") t.val_mode = bzscr::ValMode::classes;
    else throw std::runtime_error("config: val_mode must be 'samples' or 'classes'");
  }
  if (doc.contains("divergence")) {
    cfg.divergence = doc["divergence"].get<std::string>();
    if (cfg.divergence != "cosine" && cfg.divergence != "path" && cfg.divergence != "file")
      throw std::runtime_error("config: divergence must be 'cosine', 'path' or 'file'");
  }
  if (doc.contains("boosting_only")) cfg.boosting_only = doc["boosting_only"].get<bool>();

  if (doc.contains("pace")) {
    const json& p = doc["pace"];
    reject_unknown(p, {"mode", "lambda0", "zeta0", "lambda_max", "mu", "p0", "p_step"}, "pace.");
    if (p.contains("mode")) {
      const auto mode = p["mode"].get<std::string>();
      if (mode == "geometric") t.pace.mode = bzscr::PaceMode::geometric;
      else if (mode == "quantile") t.pace.mode = bzscr::PaceMode::quantile;
      else throw std::runtime_error("config: pace.mode must be 'geometric' or 'quantile'");
    }
    if (p.contains("lambda0")) t.pace.lambda = p["lambda0"].get<double>();
    if (p.contains("zeta0")) t.pace.zeta = p["zeta0"].get<double>();
    if (p.contains("lambda_max")) t.pace.lambda_max = p["lambda_max"].get<double>();
    if (p.contains("mu")) t.pace.mu = p["mu"].get<double>();
    if (p.contains("p0")) t.pace.p0 = p["p0"].get<double>();
    if (p.contains("p_step")) t.pace.p_step = p["p_step"].get<double>();
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    reject_unknown(s, {"max_iters", "grad_tol", "epsilon", "power_tol"}, "solver.");
    if (s.contains("max_iters")) t.settings.max_iters = s["max_iters"].get<int>();
    if (s.contains("grad_tol")) t.settings.grad_tol = s["grad_tol"].get<double>();
    if (s.contains("epsilon")) t.settings.epsilon = s["epsilon"].get<double>();
    if (s.contains("power_tol")) t.settings.power_tol = s["power_tol"].get<double>();
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const auto& t = cfg.train;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["nu_over_n"] = t.nu_over_n;
  doc["beta_over_n"] = t.beta_over_n;
  doc["t_es"] = t.t_es;
  doc["max_iters_outer"] = t.max_iters_outer;
  doc["seed"] = t.seed;
  doc["val_fraction"] = t.val_fraction;
  doc["val_mode"] = t.val_mode == bzscr::ValMode::samples ? "samples" : "classes";
  doc["divergence"] = cfg.divergence;
  doc["boosting_only"] = cfg.boosting_only;
  doc["pace"] = {{"mode", t.pace.mode == bzscr::PaceMode::quantile ? "quantile" : "geometric"},
                 {"lambda0", t.pace.lambda},
                 {"zeta0", t.pace.zeta},
                 {"lambda_max", t.pace.lambda_max},
                 {"mu", t.pace.mu},
                 {"p0", t.pace.p0},
                 {"p_step", t.pace.p_step}};
  doc["solver"] = {{"max_iters", t.settings.max_iters},
                   {"grad_tol", t.settings.grad_tol},
                   {"epsilon", t.settings.epsilon},
                   {"power_tol", t.settings.power_tol}};
  return doc;
}

RunConfig load_run_config(const std::string& config_path) {
  if (config_path.empty()) return RunConfig{};
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("config: cannot open " + config_path);
  json doc;
  in >> doc;
  return parse_config(doc);
}

bzscr::DivergenceMatrix resolve_divergence(const RunConfig& cfg, const bzscr::ProblemData& data) {
  if (cfg.divergence == "file") {
    if (!data.delta) throw std::runtime_error("divergence 'file' requires delta.csv in the data dir");
    return *data.delta;
  }
  if (cfg.divergence == "path") {
    if (!data.path_lengths)
      throw std::runtime_error("divergence 'path' requires spath.csv in the data dir");
    return bzscr::path_divergence(*data.path_lengths);
  }
  return bzscr::cosine_divergence(data.embeddings);
}

void write_effective_config(const RunConfig& cfg, const std::string& out_dir) {
  std::ofstream out(out_dir + "/effective_config.json");
  if (!out) throw std::runtime_error("cannot write " + out_dir + "/effective_config.json");
  out << config_to_json(cfg).dump(2) << "\n";
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) grid.push_back(std::stod(cell));
  if (grid.empty()) throw std::runtime_error("sweep: empty --grid");
  return grid;
}

// Applies command-line overrides on top of the config file values.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> nu_over_n, beta_over_n;
  std::optional<int> t_es, max_iters_outer;
  std::optional<std::string> divergence;
  std::optional<bool> boosting_only;

  void apply(RunConfig& cfg) const {
    if (seed) cfg.train.seed = *seed;
    if (nu_over_n) cfg.train.nu_over_n = *nu_over_n;
    if (beta_over_n) cfg.train.beta_over_n = *beta_over_n;
    if (t_es) cfg.train.t_es = *t_es;
    if (max_iters_outer) cfg.train.max_iters_outer = *max_iters_outer;
    if (divergence) cfg.divergence = *divergence;
    if (boosting_only) cfg.boosting_only = *boosting_only;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boosted zero-shot classifier with semantic correlation regularization"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic zero-shot dataset");
  bzscr::SyntheticSpec spec;
  uint64_t synth_seed = 0;
  std::string synth_out;
  double synth_val_fraction = 0.2;
  synth->add_option("--classes", spec.classes, "Total class count");
  synth->add_option("--seen", spec.seen, "Seen class count");
  synth->add_option("--dim", spec.embed_dim, "Embedding dimension");
  synth->add_option("--feat", spec.feature_dim, "Feature dimension");
  synth->add_option("--per-class", spec.samples_per_class, "Samples per class");
  synth->add_option("--noise", spec.noise_scale, "Gaussian noise scale");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--val-fraction", synth_val_fraction, "Validation fraction in split.json");
  synth->add_option("--out", synth_out, "Output dataset directory")->required();

  // shared train/eval/sweep flags
  std::string config_path, data_dir, out_dir, model_path, grid_spec;
  Overrides ovr;
  auto add_common = [&](CLI::App* cmd, bool wants_config) {
    cmd->add_option("--data", data_dir, "Dataset directory")->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed", [&ovr](const CLI::results_t& r) {
      ovr.seed = std::stoull(r[0]);
      return true;
    }, "Seed override");
    if (wants_config) {
      cmd->add_option("--config", config_path, "JSON config file");
      cmd->add_option("--nu-over-n", [&ovr](const CLI::results_t& r) {
        ovr.nu_over_n = std::stod(r[0]);
        return true;
      }, "L1 strength per sample");
      cmd->add_option("--beta-over-n", [&ovr](const CLI::results_t& r) {
        ovr.beta_over_n = std::stod(r[0]);
        return true;
      }, "SCR strength per sample");
      cmd->add_option("--t-es", [&ovr](const CLI::results_t& r) {
        ovr.t_es = std::stoi(r[0]);
        return true;
      }, "Early-stop patience");
      cmd->add_option("--max-iters-outer", [&ovr](const CLI::results_t& r) {
        ovr.max_iters_outer = std::stoi(r[0]);
        return true;
      }, "Outer iteration cap");
      cmd->add_option("--divergence", [&ovr](const CLI::results_t& r) {
        ovr.divergence = r[0];
        return true;
      }, "Divergence source: cosine|path|file");
      cmd->add_flag("--boosting-only", [&ovr](int64_t) { ovr.boosting_only = true; },
                    "Pin all sample weights to 1");
    }
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd, true);
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model on the test split");
  add_common(eval_cmd, true);
  eval_cmd->add_option("--model", model_path, "Path to model.json")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the SCR strength beta/N");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--grid", grid_spec, "Comma-separated beta/N grid")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto data = bzscr::generate_synthetic(spec, synth_seed);
      bzscr::ProblemData problem;
      problem.train = data.train;
      problem.test = data.test;
      problem.embeddings = data.embeddings;
      problem.split.split = data.split;
      problem.split.val_fraction = synth_val_fraction;
      bzscr::save_problem(problem, synth_out);
      std::cout << "wrote dataset to " << synth_out << "\n";
      return 0;
    }

    RunConfig cfg = load_run_config(config_path);
    ovr.apply(cfg);
    const bzscr::ProblemData problem = bzscr::load_problem(data_dir);
    cfg.train.val_fraction = problem.split.val_fraction > 0.0 && problem.split.val_fraction < 1.0
                                 ? problem.split.val_fraction
                                 : cfg.train.val_fraction;
    cfg.train.val_mode =
        problem.split.val_mode == "classes" ? bzscr::ValMode::classes : bzscr::ValMode::samples;
    const bzscr::DivergenceMatrix delta = resolve_divergence(cfg, problem);
    fs::create_directories(out_dir);
    write_effective_config(cfg, out_dir);

    if (train_cmd->parsed()) {
      auto [ens, trace] =
          cfg.boosting_only
              ? bzscr::train_boosting_only(problem.train, problem.embeddings, problem.split.split,
                                           delta, cfg.train)
              : bzscr::train(problem.train, problem.embeddings, problem.split.split, delta,
                             cfg.train);
      bzscr::save_model(ens, problem.train.feature_dim(), problem.embeddings.embed_dim(),
                        out_dir + "/model.json");
      bzscr::write_trace_csv(trace, out_dir + "/trace.csv");
      if (problem.test) {
        const auto report = bzscr::evaluate(ens, *problem.test, problem.embeddings, delta,
                                            problem.split.split.unseen);
        bzscr::write_report_json(report, out_dir + "/report.json");
        std::cout << "test error_rate " << report.error_rate << " mean_delta "
                  << report.mean_delta << "\n";
      }
      std::cout << "trained " << ens.size() << " weak models over " << trace.records.size()
                << " iterations\n";
    } else if (eval_cmd->parsed()) {
      if (!problem.test) throw std::runtime_error("eval: dataset has no test split");
      const bzscr::Ensemble ens = bzscr::load_model(model_path);
      const auto report = bzscr::evaluate(ens, *problem.test, problem.embeddings, delta,
                                          problem.split.split.unseen);
      bzscr::write_report_json(report, out_dir + "/report.json");
      std::cout << "error_rate " << report.error_rate << " mean_delta " << report.mean_delta
                << "\n";
    } else if (sweep_cmd->parsed()) {
      if (!problem.test) throw std::runtime_error("sweep: dataset has no test split");
      const auto rows =
          bzscr::sweep_beta(problem.train, *problem.test, problem.embeddings, problem.split.split,
                            delta, cfg.train, parse_grid(grid_spec));
      bzscr::write_sweep_csv(rows, out_dir + "/sweep.csv");
      std::cout << "wrote " << rows.size() << " sweep rows\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
