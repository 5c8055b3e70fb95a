#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specclust/clustering.hpp"
#include "specclust/config.hpp"
#include "specclust/experiments.hpp"
#include "specclust/graph.hpp"
#include "specclust/metrics.hpp"
#include "specclust/sbm.hpp"

using namespace specclust;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageFailure = 2;

struct Globals {
  std::string seed;
  std::string out;
  std::string config;
};

// Flag values keyed by config key; only flags actually given end up in here.
using FlagValues = std::map<std::string, std::string>;

void add_key_flags(CLI::App* cmd, FlagValues& flags, const std::vector<std::string>& keys) {
  for (const auto& key : keys) {
    cmd->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
                                          "same as `" + key + " = ...` in a config file");
  }
}

KeyValues collect(const Globals& g, const FlagValues& flags) {
  KeyValues kv;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw ConfigError(g.config, 0, "", "cannot open config file");
    kv = parse_key_values(in, g.config);
  }
  const auto& keys = config_keys();
  for (const auto& [key, value] : flags) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("command line", 0, key, "unknown key");
    if (value.empty()) throw ConfigError("command line", 0, key, "missing value");
    kv.set(key, value, "command line", 0);
  }
  if (!g.seed.empty()) kv.set("seed", g.seed, "command line", 0);
  if (!g.out.empty()) kv.set("out", g.out, "command line", 0);
  return kv;
}

// Opens `path` for writing, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

EdgeListLoad read_graph(const std::string& path) { return load_edge_list_file(path); }

NodeLabeling read_labels(const std::string& path, const NodeDictionary& dict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return load_labels(in, dict);
}

int run_generate(const Globals& g, const FlagValues& flags, const std::string& labels_path) {
  const auto model = build_model_config(collect(g, flags));
  const sbm::BlockModelParams params(model.n, model.pi, model.alpha, model.beta, model.gamma);
  const auto drawn = sbm::sample(params, model.seed);
  Output out(g.out);
  out.stream() << "# " << params.describe() << " seed=" << model.seed << '\n';
  save_edge_list(out.stream(), drawn.graph);
  if (!labels_path.empty()) {
    Output labels(labels_path);
    save_labels(labels.stream(), drawn.labels);
  }
  return 0;
}

struct ClusterArgs {
  std::string graph;
  std::string truth;
  int k = 2;
  bool unnormalized = false;
  bool lcc = false;
};

int run_cluster(const Globals& g, const ClusterArgs& a) {
  const auto model = build_model_config(collect(g, {}));
  if (a.k < 1) throw ConfigError("command line", 0, "k", "must be at least 1");
  auto load = read_graph(a.graph);
  Graph graph = load.graph;
  std::vector<NodeId> to_original(graph.node_count());
  for (std::size_t i = 0; i < to_original.size(); ++i) to_original[i] = static_cast<NodeId>(i);
  if (a.lcc) {
    auto sub = largest_connected_component(graph);
    graph = sub.graph;
    to_original = sub.new_to_old;
  }
  if (static_cast<std::size_t>(a.k) > graph.node_count()) {
    throw ConfigError("command line", 0, "k", "exceeds the number of nodes");
  }
  const auto result = cluster::spectral_cluster(graph, a.k, !a.unnormalized, model.seed);

  Output out(g.out);
  for (std::size_t i = 0; i < to_original.size(); ++i) {
    out.stream() << load.nodes.token(to_original[i]) << '\t' << result.assignment.labels[i] << '\n';
  }
  if (!a.truth.empty()) {
    const auto truth = read_labels(a.truth, load.nodes);
    std::vector<int> kept(to_original.size());
    for (std::size_t i = 0; i < to_original.size(); ++i) kept[i] = truth[to_original[i]];
    std::cerr << "misclassification " << metrics::misclassification_rate(result.assignment.labels, NodeLabeling(kept))
              << '\n';
  }
  return 0;
}

int run_metrics(const Globals& g, const std::string& graph_path, const std::string& truth_path) {
  build_model_config(collect(g, {}));
  const auto load = read_graph(graph_path);
  const auto truth = read_labels(truth_path, load.nodes);
  if (truth.node_count() != load.graph.node_count()) throw std::runtime_error("labels do not cover every node");
  const auto m = metrics::measure_pipelines(load.graph, truth);
  Output out(g.out);
  experiments::write_schema_line(out.stream(), "metrics", 1);
  out.stream() << "pipeline,nodes_used,d11_sq,d12_sq,d21_sq,d22_sq,center_gap_sq\n";
  auto row = [&](const char* name, const metrics::QualityMetrics& q) {
    out.stream() << name << ',' << m.nodes_used << ',' << q.d11_sq << ',' << q.d12_sq << ',' << q.d21_sq << ','
                 << q.d22_sq << ',' << q.center_gap_sq << '\n';
  };
  row("unnormalized", m.unnormalized);
  row("normalized", m.normalized);
  return 0;
}

int run_experiment(const Globals& g, const FlagValues& flags, ExperimentKind kind, const std::string& summary_path) {
  const auto cfg = build_config(collect(g, flags), kind);
  Output out(cfg.out);
  switch (cfg.kind) {
    case ExperimentKind::RatioSurface: {
      const auto rows = experiments::run_ratio_surface(cfg);
      experiments::write_ratio_surface(out.stream(), rows, cfg);
      break;
    }
    case ExperimentKind::SweepGammaAlpha:
    case ExperimentKind::SweepN: {
      const auto rows = experiments::run_sweep(cfg);
      experiments::write_sweep(out.stream(), rows, cfg);
      if (!summary_path.empty()) {
        Output summary(summary_path);
        experiments::write_sweep_summary(summary.stream(), experiments::summarize_sweep(rows), cfg);
      }
      break;
    }
    case ExperimentKind::ZeroComm:
      experiments::write_replicate_study(out.stream(), experiments::run_zero_comm(cfg), cfg);
      break;
    case ExperimentKind::AnalyticAccuracy:
      experiments::write_analytic_accuracy(out.stream(), experiments::run_analytic_accuracy(cfg), cfg);
      break;
    case ExperimentKind::LinkPred:
      experiments::write_linkpred(out.stream(), experiments::run_linkpred(cfg), cfg);
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering of two-class blockmodels: sampling, metrics and experiment drivers"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "base seed");
  app.add_option("--out", globals.out, "output file (stdout when omitted)");
  app.add_option("--config", globals.config, "key = value parameter file; flags override it");

  FlagValues flags;
  std::string labels_path, summary_path, graph_path, truth_path;
  ClusterArgs cluster_args;

  auto* generate = app.add_subcommand("generate", "sample a blockmodel graph as an edge list");
  generate->fallthrough();
  add_key_flags(generate, flags, {"n", "pi", "alpha", "beta", "gamma"});
  generate->add_option("--labels", labels_path, "also write planted labels here");

  auto* cluster_cmd = app.add_subcommand("cluster", "spectral clustering of an edge list");
  cluster_cmd->fallthrough();
  cluster_cmd->add_option("--graph", cluster_args.graph, "edge list")->required();
  cluster_cmd->add_option("--k", cluster_args.k, "number of clusters");
  cluster_cmd->add_flag("--unnormalized", cluster_args.unnormalized, "use A instead of D^-1/2 A D^-1/2");
  cluster_cmd->add_flag("--lcc", cluster_args.lcc, "cluster only the largest connected component");
  cluster_cmd->add_option("--truth", cluster_args.truth, "labels file; prints the misclassification rate");

  auto* metrics_cmd = app.add_subcommand("metrics", "within-class spread and centre distances of both embeddings");
  metrics_cmd->fallthrough();
  metrics_cmd->add_option("--graph", graph_path, "edge list")->required();
  metrics_cmd->add_option("--truth", truth_path, "true labels")->required();

  std::vector<std::string> experiment_keys;
  for (const auto& key : config_keys()) {
    if (key != "seed" && key != "out") experiment_keys.push_back(key);
  }
  struct Driver {
    const char* name;
    const char* help;
    ExperimentKind kind;
    CLI::App* cmd = nullptr;
  };
  Driver drivers[] = {
      {"ratio-surface", "normalized / unnormalized spread ratio over (alpha, gamma / alpha)", ExperimentKind::RatioSurface},
      {"sweep", "misclassification sweeps over (gamma, alpha) or n", ExperimentKind::SweepGammaAlpha},
      {"analytic-accuracy", "empirical versus closed-form spreads over a parameter grid",
       ExperimentKind::AnalyticAccuracy},
      {"zero-comm", "replicate study of one model, typically gamma = 0", ExperimentKind::ZeroComm},
      {"linkpred", "link prediction on snapshot streams", ExperimentKind::LinkPred},
  };
  for (auto& d : drivers) {
    d.cmd = app.add_subcommand(d.name, d.help);
    d.cmd->fallthrough();
    add_key_flags(d.cmd, flags, experiment_keys);
    if (d.kind == ExperimentKind::SweepGammaAlpha) {
      d.cmd->add_option("--summary", summary_path, "per-cell mean errors");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageFailure;
  }

  try {
    if (generate->parsed()) return run_generate(globals, flags, labels_path);
    if (cluster_cmd->parsed()) return run_cluster(globals, cluster_args);
    if (metrics_cmd->parsed()) return run_metrics(globals, graph_path, truth_path);
    for (const auto& d : drivers) {
      if (d.cmd->parsed()) return run_experiment(globals, flags, d.kind, summary_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const sbm::DegenerateModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return 0;
}
