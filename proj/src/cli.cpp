// Copyright 2026 The fedaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedaudit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedaudit/audit_central.hpp"
#include "fedaudit/bounds.hpp"
#include "fedaudit/dataset.hpp"
#include "fedaudit/error.hpp"
#include "fedaudit/protocol.hpp"
#include "fedaudit/random.hpp"
#include "fedaudit/scenario.hpp"
#include "fedaudit/sweep.hpp"
#include "fedaudit/wire.hpp"
#include "json.hpp"

namespace fedaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t grid_k = 101;
  double trim_eps = 0.0;
  int p = 2;
  std::string out_dir;
  std::string format = "json";
};

struct DataOptions {
  std::string path;
  std::string score_column = "score";
  std::string group_column = "group";
  std::vector<std::string> groups;
  bool jitter = false;
};

fs::path resolve_data_path(const std::string& path) {
  fs::path candidate(path);
  if (candidate.is_relative() && !fs::exists(candidate)) {
    if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
      fs::path alt = fs::path(dir) / candidate;
      if (fs::exists(alt)) return alt;
    }
  }
  return candidate;
}

Dataset load_dataset(const DataOptions& opts, const GlobalOptions& global) {
  if (opts.path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--data is required");
  }
  DatasetSpec spec;
  spec.path = resolve_data_path(opts.path).string();
  spec.score_column = opts.score_column;
  spec.group_column = opts.group_column;
  spec.groups = opts.groups;
  spec.jitter = opts.jitter;
  spec.jitter_seed = global.seed;
  return ingest(spec);
}

void add_data_options(CLI::App* cmd, DataOptions& opts, bool required = true) {
  auto* data = cmd->add_option("--data", opts.path, "Dataset CSV (relative paths also "
                                                    "searched under $FEDAUDIT_DATA_DIR)");
  if (required) data->required();
  cmd->add_option("--score-col", opts.score_column, "Score column")->capture_default_str();
  cmd->add_option("--group-col", opts.group_column, "Group column")->capture_default_str();
  cmd->add_option("--groups", opts.groups, "Group whitelist")->delimiter(',');
  cmd->add_flag("--jitter", opts.jitter, "Replace scores by score - U, U ~ Uniform(0,1)");
}

// Writes `text` to <out>/<name> when an output directory is set, else to out.
void emit(const GlobalOptions& global, const std::string& name, const std::string& text,
          std::ostream& out) {
  if (global.out_dir.empty()) {
    out << text;
    return;
  }
  fs::create_directories(global.out_dir);
  std::ofstream file(fs::path(global.out_dir) / name, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + name);
  file << text;
}

std::string csv_value(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Flat field,value CSV of the scalar members of a JSON object.
std::string scalars_csv(const json& j) {
  std::string text = "field,value\n";
  for (const auto& [key, value] : j.items()) {
    if (value.is_structured()) continue;
    text += key + "," + csv_value(value) + "\n";
  }
  return text;
}

void emit_report(const GlobalOptions& global, const std::string& stem, const json& j,
                 const std::string& csv, std::ostream& out) {
  if (global.format == "csv") {
    emit(global, stem + ".csv", csv, out);
  } else {
    emit(global, stem + ".json", j.dump(2) + "\n", out);
  }
}

GridSpec grid_of(const GlobalOptions& global) {
  return GridSpec(global.grid_k, global.trim_eps);
}

// --- ingest ---------------------------------------------------------------

void cmd_ingest(const DataOptions& data_opts, const GlobalOptions& global,
                std::ostream& out) {
  const Dataset data = load_dataset(data_opts, global);
  const auto counts = data.group_counts();
  json j;
  j["rows"] = data.size();
  j["jitter"] = data_opts.jitter;
  json groups = json::object();
  std::string csv = "group,count\n";
  for (std::size_t g = 0; g < data.labels.size(); ++g) {
    groups[data.labels[g]] = counts[g];
    csv += data.labels[g] + "," + std::to_string(counts[g]) + "\n";
  }
  j["groups"] = groups;
  emit_report(global, "ingest", j, csv, out);
}

// --- audit ----------------------------------------------------------------

json central_report(const Dataset& data, const GlobalOptions& global) {
  const GroupedSample sample = data.grouped();
  const GridSpec grid = grid_of(global);
  json j;
  j["p"] = global.p;
  j["k"] = grid.k();
  j["trim_epsilon"] = grid.trim_epsilon();
  j["n"] = sample.total();
  j["u_hat"] = u_hat(sample, grid, global.p);
  j["h_hat"] = h_hat(sample, grid, global.p);
  if (sample.group_count() == 2) {
    const TwoGroupSummary two = two_group_summary(sample, grid, global.p);
    j["w_p"] = two.wasserstein;
    j["c_p"] = two.cramer;
    j["mean_gap"] = two.mean_gap;
  } else {
    j["w_p"] = nullptr;
    j["c_p"] = nullptr;
    j["mean_gap"] = nullptr;
  }
  json groups = json::object();
  const auto labels = sample.labels();
  for (std::size_t g = 0; g < labels.size(); ++g) {
    groups[labels[g]] = json{{"count", sample.sorted(g).size()}, {"alpha", sample.alpha()[g]}};
  }
  j["groups"] = groups;
  return j;
}

void cmd_audit(const DataOptions& data_opts, const GlobalOptions& global,
               std::ostream& out) {
  const json j = central_report(load_dataset(data_opts, global), global);
  emit_report(global, "audit", j, scalars_csv(j), out);
}

// --- sketch ---------------------------------------------------------------

void cmd_sketch(const DataOptions& data_opts, const std::string& allocation_path,
                bool mirror, const GlobalOptions& global, std::ostream& out) {
  if (global.out_dir.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sketch requires --out");
  }
  const Dataset data = load_dataset(data_opts, global);
  Assignment assignment(data.size(), 1);
  if (!allocation_path.empty()) {
    assignment = read_assignment_csv(read_file(allocation_path), data.size());
  }
  const std::uint32_t d =
      assignment.empty() ? 1 : *std::max_element(assignment.begin(), assignment.end());
  const GridSpec grid = grid_of(global);
  fs::create_directories(global.out_dir);
  std::size_t written = 0;
  for (std::uint32_t silo = 1; silo <= d; ++silo) {
    const auto scores = data.silo_scores(assignment, silo);
    if (scores.empty()) continue;
    const std::string id = "silo-" + std::to_string(silo);
    const SiloMessage msg = client_summarize(id, scores, grid);
    const auto bytes = encode_message(msg);
    std::ofstream file(fs::path(global.out_dir) / (id + ".fqs"), std::ios::binary);
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + id + ".fqs");
    file.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    if (mirror) {
      std::ofstream js(fs::path(global.out_dir) / (id + ".json"), std::ios::binary);
      js << message_to_json(msg).dump(2) << "\n";
    }
    ++written;
  }
  out << "wrote " << written << " message(s) to " << global.out_dir << "\n";
}

// --- federate -------------------------------------------------------------

SiloMessage load_message(const fs::path& path) {
  const std::string raw = read_file(path.string());
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedMessage, path.string() + ": " + e.what());
    }
    return message_from_json(j);
  }
  std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
  try {
    return decode_message(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path path(input);
    if (fs::is_directory(path)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".fqs") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(path);
    }
  }
  if (files.empty()) throw Error(ErrorCode::kNoMessages, "no message files given");
  return files;
}

void cmd_federate(const std::vector<std::string>& inputs, const GlobalOptions& global,
                  std::ostream& out) {
  std::vector<SiloMessage> messages;
  for (const auto& path : expand_inputs(inputs)) messages.push_back(load_message(path));
  const AuditReport report = server_audit(messages, global.p);
  const json j = report_to_json(report);
  emit_report(global, "federate", j, scalars_csv(j), out);
}

// --- bounds ---------------------------------------------------------------

struct BoundsOptions {
  std::uint64_t n = 0;
  std::uint64_t n_min = 0;
  std::uint64_t n_s_min = 0;
  std::uint64_t d = 1;
  std::uint64_t groups = 2;
  double delta = 0.05;
  double m_eps = 1.0;
  double eps = 0.05;
  double c_eps = 1.0;
};

void cmd_bounds(const BoundsOptions& b, const GlobalOptions& global, std::ostream& out) {
  if (b.n_min == 0) throw Error(ErrorCode::kInvalidArgument, "--n-min must be positive");
  const std::uint64_t n = b.n ? b.n : b.n_min * b.groups;
  const std::uint64_t n_s_min = b.n_s_min ? b.n_s_min : b.n_min;
  BoundInputs in{b.n_min, global.grid_k, b.d, b.groups, b.delta, b.m_eps, b.eps};
  const WeightBounds w = weight_bounds(n, n_s_min, b.d, b.groups, b.delta);
  json j;
  j["dkw_bound"] = dkw_bound(b.n_min, b.delta);
  j["hp_quantile_bound"] = hp_quantile_bound(in);
  j["alpha_bound"] = w.alpha;
  j["pi_bound"] = w.pi;
  j["communication_budget"] = communication_budget(b.d, global.grid_k, b.groups);
  j["g_hat_error_scale_non_rigorous"] = g_hat_error_scale(in, b.c_eps);
  j["inputs"] = {{"n", n},         {"n_min", b.n_min},   {"n_s_min", n_s_min},
                 {"k", in.k},      {"d", b.d},           {"groups", b.groups},
                 {"delta", b.delta}, {"m_eps", b.m_eps}, {"trim_epsilon", in.eps},
                 {"c_eps", b.c_eps}};
  emit_report(global, "bounds", j, scalars_csv(j), out);
}

// --- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string regime = "random";
  double rho = 0.0;
  std::uint32_t d = 1;
  std::optional<std::uint64_t> seed;
  std::string margins;  // allocation CSV whose contingency table is reused
};

// Applies key = value lines from the config file to the options that were not
// given on the command line.
void apply_simulate_config(SimulateOptions& opts, const CLI::App& cmd,
                           const CLI::App& root) {
  std::ifstream in(opts.config);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + opts.config);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::kInvalidArgument, opts.config + ": " + e.what());
  }
  for (const auto& item : items) {
    const std::string value = item.inputs.empty() ? "" : item.inputs.front();
    const auto given = [&](const char* flag, const CLI::App& app) {
      return app.get_option(flag)->count() > 0;
    };
    try {
      if (item.name == "regime") {
        if (!given("--regime", cmd)) opts.regime = value;
      } else if (item.name == "rho") {
        if (!given("--rho", cmd)) opts.rho = std::stod(value);
      } else if (item.name == "d") {
        if (!given("--d", cmd)) opts.d = static_cast<std::uint32_t>(std::stoul(value));
      } else if (item.name == "seed") {
        if (!given("--seed", root)) opts.seed = std::stoull(value);
      } else if (item.name == "margins") {
        if (!given("--margins", cmd) && value != "random") opts.margins = value;
      } else if (item.name == "++" || item.name == "--" || item.name.empty()) {
        continue;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + item.name);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "bad value for " + item.name + ": " + value);
    }
  }
}

void cmd_simulate(const DataOptions& data_opts, const SimulateOptions& opts,
                  const GlobalOptions& global, std::ostream& out) {
  const Dataset data = load_dataset(data_opts, global);
  const Regime regime = parse_regime(opts.regime);
  const std::uint64_t seed = opts.seed.value_or(global.seed);
  Assignment assignment;
  std::uint32_t d = opts.d;
  if (opts.margins.empty()) {
    assignment = simulate_allocation(data, d, regime, opts.rho, seed);
  } else {
    const Assignment base = read_assignment_csv(read_file(opts.margins), data.size());
    d = *std::max_element(base.begin(), base.end());
    const ContingencyTable margins =
        contingency_table(base, data.group_index, d, data.labels.size());
    assignment = regime == Regime::kRandom
                     ? base
                     : allocate_copula(data.scores, data.group_index, margins,
                                       opts.rho, regime, derive_seed(seed, "copula"));
  }
  std::ostringstream csv;
  write_assignment_csv(csv, assignment);
  if (global.out_dir.empty()) {
    out << csv.str();
    return;
  }
  emit(global, "allocation.csv", csv.str(), out);
  json j;
  j["rows"] = data.size();
  j["d"] = d;
  j["regime"] = std::string(regime_name(regime));
  j["rho"] = opts.rho;
  j["seed"] = seed;
  const ContingencyTable table =
      contingency_table(assignment, data.group_index, d, data.labels.size());
  json cells = json::array();
  for (std::uint32_t s = 0; s < d; ++s) {
    json row = json::object();
    for (std::size_t g = 0; g < data.labels.size(); ++g) {
      row[data.labels[g]] = table.at(s, g);
    }
    cells.push_back(row);
  }
  j["contingency"] = cells;
  if (d > 1) {
    try {
      const Dependence dep = dependence_diagnostics(data.scores, assignment);
      j["pearson"] = dep.pearson;
      j["spearman"] = dep.spearman;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateCorrelation) throw;
      j["pearson"] = nullptr;
      j["spearman"] = nullptr;
    }
  }
  emit(global, "simulate.json", j.dump(2) + "\n", out);
}

// --- sweep ----------------------------------------------------------------

struct SweepOptions {
  bool synthetic = false;
  std::size_t n_per_group = 5000;
  std::vector<std::size_t> ks{5, 10, 20, 50, 100, 200};
  std::vector<std::uint32_t> ds{1, 5};
  std::vector<std::string> regimes{"random", "positive", "negative"};
  double rho = 0.9;
  std::size_t replications = 50;
  double tau = 0.01;
  std::size_t reference_k = 2001;
  unsigned threads = 0;
};

void cmd_sweep(const DataOptions& data_opts, const SweepOptions& opts,
               const GlobalOptions& global, std::ostream& out) {
  if (global.out_dir.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep requires --out");
  }
  const Dataset data =
      opts.synthetic ? make_beta_dataset(opts.n_per_group, 2.0, 5.0, opts.n_per_group,
                                         5.0, 2.0, derive_seed(global.seed, "synthetic"))
                     : load_dataset(data_opts, global);
  SweepSpec spec;
  spec.ks = opts.ks;
  spec.ds = opts.ds;
  for (const auto& name : opts.regimes) spec.regimes.push_back(parse_regime(name));
  spec.rho = opts.rho;
  spec.replications = opts.replications;
  spec.tau = opts.tau;
  spec.base_seed = global.seed;
  spec.reference_k = opts.reference_k;
  spec.threads = opts.threads;
  for (auto k : spec.ks) {
    if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  }
  const SweepResult result = run_sweep(data, spec);
  write_sweep_csvs(result, global.out_dir);
  out << "reference_u2 " << format_double(result.reference_u2) << "\n";
}

int exit_code_for(const Error& e) {
  return is_malformed_input(e.code()) ? kExitMalformed : kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated demographic-disparity audits from per-silo quantile sketches",
               "fedaudit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base seed")->capture_default_str();
  app.add_option("--grid-k", global.grid_k, "Number of grid levels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--trim-eps", global.trim_eps, "Grid trimming level in [0, 1/2)")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  app.add_option("--p", global.p, "Transport order")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  app.add_option("--out", global.out_dir, "Output directory");
  app.add_option("--format", global.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  DataOptions ingest_data, audit_data, sketch_data, simulate_data, sweep_data;

  auto* ingest_cmd = app.add_subcommand("ingest", "Load a CSV and report group counts");
  add_data_options(ingest_cmd, ingest_data);

  auto* audit_cmd = app.add_subcommand("audit", "Centralized audit of a dataset");
  add_data_options(audit_cmd, audit_data);

  std::string allocation_path;
  bool mirror = false;
  auto* sketch_cmd = app.add_subcommand("sketch", "Write one .fqs message per silo");
  add_data_options(sketch_cmd, sketch_data);
  sketch_cmd->add_option("--allocation", allocation_path,
                         "Allocation CSV (row,silo); default puts every row in silo 1");
  sketch_cmd->add_flag("--json-mirror", mirror, "Also write the JSON mirror of each message");

  std::vector<std::string> inputs;
  auto* federate_cmd = app.add_subcommand("federate", "Server-side audit of silo messages");
  federate_cmd->add_option("inputs", inputs, ".fqs/.json files or directories")->required();

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Concentration-bound calculators");
  bounds_cmd->add_option("--n-min", bounds.n_min, "Smallest group count")->required();
  bounds_cmd->add_option("--n", bounds.n, "Total count (default n-min * groups)");
  bounds_cmd->add_option("--n-s-min", bounds.n_s_min, "Smallest silo count (default n-min)");
  bounds_cmd->add_option("--d", bounds.d, "Number of silos")->capture_default_str();
  bounds_cmd->add_option("--groups", bounds.groups, "Number of groups")->capture_default_str();
  bounds_cmd->add_option("--delta", bounds.delta, "Failure probability")->capture_default_str();
  bounds_cmd->add_option("--m-eps", bounds.m_eps, "Density lower bound on the trimmed region")
      ->capture_default_str();
  bounds_cmd->add_option("--eps", bounds.eps, "Trimming level that m-eps refers to")
      ->capture_default_str();
  bounds_cmd->add_option("--c-eps", bounds.c_eps, "Multiplier of the non-rigorous error scale")
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Allocate dataset rows to silos");
  add_data_options(simulate_cmd, simulate_data);
  simulate_cmd->add_option("--config", sim.config, "key = value scenario file");
  simulate_cmd->add_option("--regime", sim.regime, "random, positive or negative")
      ->capture_default_str();
  simulate_cmd->add_option("--rho", sim.rho, "Copula correlation")->capture_default_str();
  simulate_cmd->add_option("--d", sim.d, "Number of silos")->capture_default_str();
  simulate_cmd->add_option("--margins", sim.margins,
                           "Allocation CSV whose silo-by-group counts are kept");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo accuracy sweep");
  add_data_options(sweep_cmd, sweep_data, false);
  sweep_cmd->add_flag("--synthetic", sweep.synthetic,
                      "Use Beta(2,5) vs Beta(5,2) groups instead of --data");
  sweep_cmd->add_option("--n-per-group", sweep.n_per_group, "Synthetic group size")
      ->capture_default_str();
  sweep_cmd->add_option("--ks", sweep.ks, "Grid sizes")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--ds", sweep.ds, "Silo counts")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--regimes", sweep.regimes, "Allocation regimes")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--rho", sweep.rho, "Copula correlation")->capture_default_str();
  sweep_cmd->add_option("--replications", sweep.replications, "Replications per cell")
      ->capture_default_str();
  sweep_cmd->add_option("--tau", sweep.tau, "Relative error tolerance")->capture_default_str();
  sweep_cmd->add_option("--reference-k", sweep.reference_k, "Reference grid size")
      ->capture_default_str();
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest_cmd) {
      cmd_ingest(ingest_data, global, out);
    } else if (*audit_cmd) {
      cmd_audit(audit_data, global, out);
    } else if (*sketch_cmd) {
      cmd_sketch(sketch_data, allocation_path, mirror, global, out);
    } else if (*federate_cmd) {
      cmd_federate(inputs, global, out);
    } else if (*bounds_cmd) {
      cmd_bounds(bounds, global, out);
    } else if (*simulate_cmd) {
      if (!sim.config.empty()) apply_simulate_config(sim, *simulate_cmd, app);
      cmd_simulate(simulate_data, sim, global, out);
    } else if (*sweep_cmd) {
      if (!sweep.synthetic && sweep_data.path.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "sweep needs --data or --synthetic");
      }
      cmd_sweep(sweep_data, sweep, global, out);
    }
  } catch (const Error& e) {
    err << "error [" << code_name(e.code()) << "]: " << e.detail() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error [io]: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace fedaudit
