#include "specclust/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "specclust/eigensolver.hpp"
#include "specclust/rng.hpp"

namespace specclust::linkpred {

FittedBlockProbabilities fit_phat(const Graph& g_train, const std::vector<int>& labels, int k) {
  if (k < 1) throw std::invalid_argument("fit_phat: k must be positive");
  if (labels.size() != g_train.node_count()) throw std::invalid_argument("fit_phat: labels do not cover the graph");
  FittedBlockProbabilities fit;
  fit.k = k;
  fit.cluster_sizes.assign(static_cast<std::size_t>(k), 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("fit_phat: label out of range");
    ++fit.cluster_sizes[l];
  }
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : g_train.edges()) {
    const int a = labels[e.first], b = labels[e.second];
    counts(a, b) += 1;
    if (a != b) counts(b, a) += 1;
  }
  fit.phat = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double sa = static_cast<double>(fit.cluster_sizes[a]);
      const double sb = static_cast<double>(fit.cluster_sizes[b]);
      const double pairs = a == b ? sa * (sa - 1) / 2 : sa * sb;
      if (pairs > 0) {
        fit.phat(a, b) = counts(a, b) / pairs;
      } else {
        fit.has_empty_cells = true;
      }
    }
  }
  return fit;
}

FittedBlockProbabilities fit_phat(const Graph& g_train, const cluster::ClusterAssignment& assignment) {
  return fit_phat(g_train, assignment.labels, assignment.cluster_count());
}

std::vector<double> score_pairs(const FittedBlockProbabilities& model, const std::vector<int>& labels,
                                std::span<const NodePair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (i >= labels.size() || j >= labels.size()) {
      throw std::out_of_range("score_pairs: node " + std::to_string(std::max(i, j)) + " is not in the assignment");
    }
    out[p] = model.phat(labels[i], labels[j]);
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const char> truth) {
  if (scores.size() != truth.size()) throw std::invalid_argument("auc: scores and truth differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_total = 0, neg_total = 0, wins = 0;
  double neg_below = 0;
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s;
    double pos = 0, neg = 0;
    while (e < order.size() && scores[order[e]] == scores[order[s]]) {
      (truth[order[e]] ? pos : neg) += 1;
      ++e;
    }
    wins += pos * (neg_below + 0.5 * neg);
    neg_below += neg;
    pos_total += pos;
    neg_total += neg;
    s = e;
  }
  if (pos_total == 0 || neg_total == 0) throw std::invalid_argument("auc: need at least one positive and one negative");
  return wins / (pos_total * neg_total);
}

double leading_eigenvalue(const Graph& g) {
  if (g.edge_count() == 0) return 0.0;
  const auto pairs = eig::top_k_eigenpairs(eig::SymmetricOperator::adjacency(g), 1);
  return std::abs(pairs.values(0));
}

double default_katz_theta(const Graph& g) {
  const double l1 = leading_eigenvalue(g);
  return l1 > 0 ? 0.8 / l1 : 0.5;
}

namespace {

// Solves (I - theta A) x = e_row by conjugate gradients.
Eigen::VectorXd katz_solve(const Graph& g, double theta, NodeId row) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  const auto& rp = g.row_ptr();
  const auto& ci = g.col_idx();
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = 0;
      for (auto p = rp[i]; p < rp[i + 1]; ++p) s += x(ci[p]);
      y(i) = x(i) - theta * s;
    }
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r(row) = 1.0;
  Eigen::VectorXd p = r, q(n);
  double rr = 1.0;
  for (Eigen::Index it = 0; it < 10 * n + 100 && rr > 1e-30; ++it) {
    apply(p, q);
    const double step = rr / p.dot(q);
    x += step * p;
    r -= step * q;
    const double next = r.squaredNorm();
    p = r + (next / rr) * p;
    rr = next;
  }
  return x;
}

}  // namespace

std::vector<double> katz_scores(const Graph& g, double theta, std::span<const NodePair> pairs) {
  if (!(theta > 0)) throw std::invalid_argument("katz_scores: theta must be positive");
  const double l1 = leading_eigenvalue(g);
  if (theta * l1 >= 1.0) {
    throw std::invalid_argument("katz_scores: theta * lambda_1 = " + std::to_string(theta * l1) +
                                " >= 1; use theta < " + std::to_string(1.0 / l1));
  }
  std::vector<NodeId> rows;
  for (const auto& [i, j] : pairs) {
    if (i >= g.node_count() || j >= g.node_count()) throw std::out_of_range("katz_scores: node id out of range");
    rows.push_back(i);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<Eigen::VectorXd> solved(rows.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < rows.size(); ++r) solved[r] = katz_solve(g, theta, rows[r]);

  std::vector<double> out(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const auto r = static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), i) - rows.begin());
    out[p] = solved[r](j) - (i == j ? 1.0 : 0.0);
  }
  return out;
}

std::string to_string(EvalMode mode) {
  return mode == EvalMode::LinksIncluded ? "links-included" : "links-excluded";
}

std::vector<NodeId> sample_active_nodes(const Graph& g, std::size_t count, std::uint64_t seed) {
  std::vector<NodeId> active;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) > 0) active.push_back(v);
  }
  if (active.size() > count) {
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(active.size() - i));
      std::swap(active[i], active[j]);
    }
    active.resize(count);
    std::sort(active.begin(), active.end());
  }
  return active;
}

std::vector<NodePair> partner_pairs(std::size_t node_count, std::span<const NodeId> nodes) {
  std::vector<NodePair> pairs;
  pairs.reserve(nodes.size() * (node_count > 0 ? node_count - 1 : 0));
  for (NodeId i : nodes) {
    for (NodeId j = 0; j < node_count; ++j) {
      if (j != i) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

PredictionEval evaluate_scores(std::span<const NodePair> pairs, std::span<const double> scores,
                               const Graph& truth_graph, const Graph& train, EvalMode mode) {
  if (pairs.size() != scores.size()) throw std::invalid_argument("evaluate_scores: length mismatch");
  std::vector<double> kept;
  std::vector<char> truth;
  kept.reserve(scores.size());
  truth.reserve(scores.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (mode == EvalMode::LinksExcluded && train.has_edge(i, j)) continue;
    kept.push_back(scores[p]);
    truth.push_back(truth_graph.has_edge(i, j) ? 1 : 0);
  }
  PredictionEval ev;
  ev.mode = mode;
  ev.positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  ev.negatives = truth.size() - ev.positives;
  ev.auc = (ev.positives > 0 && ev.negatives > 0) ? auc(kept, truth) : 0.5;
  return ev;
}

std::vector<int> default_k_grid(std::size_t node_count) {
  std::vector<int> grid;
  for (int k = 10; k <= 100; k += 10) {
    if (static_cast<std::size_t>(k) <= node_count - 1) grid.push_back(k);
  }
  if (grid.empty() && node_count > 1) grid.push_back(static_cast<int>(node_count - 1));
  return grid;
}

int pick_k(std::span<const int> grid, std::span<const double> aucs) {
  if (grid.empty() || grid.size() != aucs.size()) throw std::invalid_argument("pick_k: empty or mismatched grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (aucs[i] > aucs[best] || (aucs[i] == aucs[best] && grid[i] < grid[best])) best = i;
  }
  return grid[best];
}

namespace {

std::vector<double> blockmodel_scores(const Graph& train, const cluster::SpectralEmbedding& emb, int k,
                                      std::uint64_t seed, const LinkPredOptions& opts, std::span<const NodePair> pairs) {
  const auto assignment = cluster::cluster_embedding(cluster::leading(emb, k), k, seed, opts.spectral);
  return score_pairs(fit_phat(train, assignment), assignment.labels, pairs);
}

std::vector<int> usable_grid(const std::vector<int>& k_grid, std::size_t node_count) {
  std::vector<int> out;
  for (int k : k_grid) {
    if (k >= 1 && static_cast<std::size_t>(k) <= node_count - 1) out.push_back(k);
  }
  return out;
}

CrossValidation cross_validate_with(const Graph& train, const Graph& validate, const cluster::SpectralEmbedding& emb,
                                    std::vector<int> grid, std::uint64_t seed, const LinkPredOptions& opts);

constexpr std::uint64_t kValidationRole = 1;
constexpr std::uint64_t kCvClusterRole = 2;
constexpr std::uint64_t kRunClusterRole = 3;
constexpr std::uint64_t kTestNodeRole = 4;

}  // namespace

CrossValidation cross_validate_k(const Graph& train, const Graph& validate, std::vector<int> k_grid, bool normalized,
                                 std::uint64_t seed, const LinkPredOptions& opts) {
  if (validate.node_count() != train.node_count()) {
    throw std::invalid_argument("cross_validate_k: validation graph has a different node universe");
  }
  if (k_grid.empty()) throw std::invalid_argument("cross_validate_k: empty k grid");
  auto grid = usable_grid(k_grid, train.node_count());
  if (grid.empty()) throw std::invalid_argument("cross_validate_k: no k in the grid fits the graph");
  const int widest = *std::max_element(grid.begin(), grid.end());
  const auto emb = cluster::spectral_embedding(train, widest, normalized, opts.spectral.solver);
  return cross_validate_with(train, validate, emb, std::move(grid), seed, opts);
}

namespace {

CrossValidation cross_validate_with(const Graph& train, const Graph& validate, const cluster::SpectralEmbedding& emb,
                                    std::vector<int> grid, std::uint64_t seed, const LinkPredOptions& opts) {
  if (validate.node_count() != train.node_count()) {
    throw std::invalid_argument("cross_validate_k: validation graph has a different node universe");
  }
  CrossValidation cv;
  cv.grid = std::move(grid);
  const auto nodes = sample_active_nodes(validate, opts.sample_nodes, derive_seed(seed, {kValidationRole}));
  if (nodes.empty()) throw std::invalid_argument("cross_validate_k: validation graph has no edges");
  const auto pairs = partner_pairs(train.node_count(), nodes);
  cv.aucs.assign(cv.grid.size(), 0.0);
  for (std::size_t i = 0; i < cv.grid.size(); ++i) {
    const int k = cv.grid[i];
    const auto scores =
        blockmodel_scores(train, emb, k, derive_seed(seed, {kCvClusterRole, static_cast<std::uint64_t>(k)}), opts, pairs);
    cv.aucs[i] = evaluate_scores(pairs, scores, validate, train, EvalMode::LinksIncluded).auc;
  }
  cv.chosen_k = pick_k(cv.grid, cv.aucs);
  return cv;
}

}  // namespace

ProtocolGraphs prepare_protocol(std::span<const Graph> snapshots) {
  if (snapshots.size() < 3) throw std::invalid_argument("evaluate_protocol: need at least 3 snapshots");
  const std::size_t t = snapshots.size();
  const Graph merged = merge_snapshots(snapshots.first(t - 2));
  for (std::size_t s = t - 2; s < t; ++s) {
    if (snapshots[s].node_count() != merged.node_count()) {
      throw std::invalid_argument("evaluate_protocol: snapshots do not share one node universe");
    }
  }
  const auto pruned = prune_min_degree(merged, 2);
  const auto giant = largest_connected_component(pruned.sub.graph);
  ProtocolGraphs out;
  for (NodeId v : giant.new_to_old) out.original_ids.push_back(pruned.sub.new_to_old[v]);
  out.train = giant.graph;
  out.validate = induced_subgraph(snapshots[t - 2], out.original_ids).graph;
  out.test = induced_subgraph(snapshots[t - 1], out.original_ids).graph;
  return out;
}

ProtocolResult evaluate_protocol(std::span<const Graph> snapshots, bool normalized, std::uint64_t seed,
                                 const LinkPredOptions& opts) {
  return evaluate_protocol(prepare_protocol(snapshots), normalized, seed, opts);
}

namespace {

template <class Scorer>
void average_runs(const ProtocolGraphs& graphs, std::uint64_t seed, const LinkPredOptions& opts, ProtocolResult& out,
                  Scorer&& scorer) {
  const std::size_t runs = std::max<std::size_t>(opts.runs, 1);
  out.nodes = graphs.train.node_count();
  out.included.mode = EvalMode::LinksIncluded;
  out.excluded.mode = EvalMode::LinksExcluded;
  out.included.auc = out.excluded.auc = 0;
  bool any_test_node = false;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto nodes = sample_active_nodes(graphs.test, opts.sample_nodes, derive_seed(seed, {kTestNodeRole, r}));
    if (nodes.empty()) continue;
    any_test_node = true;
    const auto pairs = partner_pairs(graphs.train.node_count(), nodes);
    const auto scores = scorer(r, pairs);
    for (auto* ev : {&out.included, &out.excluded}) {
      const auto one = evaluate_scores(pairs, scores, graphs.test, graphs.train, ev->mode);
      ev->auc += one.auc / static_cast<double>(runs);
      ev->positives += one.positives;
      ev->negatives += one.negatives;
    }
  }
  if (!any_test_node) throw std::invalid_argument("evaluate_protocol: no eligible test nodes");
}

}  // namespace

ProtocolResult evaluate_protocol(const ProtocolGraphs& graphs, bool normalized, std::uint64_t seed,
                                 const LinkPredOptions& opts) {
  ProtocolResult out;
  out.method = normalized ? "normalized" : "unnormalized";
  auto grid = usable_grid(opts.k_grid.empty() ? default_k_grid(graphs.train.node_count()) : opts.k_grid,
                          graphs.train.node_count());
  if (grid.empty()) throw std::invalid_argument("evaluate_protocol: no k in the grid fits the training graph");
  // Leading eigenvectors nest, so one embedding at the widest k serves every k.
  const int widest = *std::max_element(grid.begin(), grid.end());
  const auto emb = cluster::spectral_embedding(graphs.train, widest, normalized, opts.spectral.solver);
  out.k_chosen = cross_validate_with(graphs.train, graphs.validate, emb, std::move(grid), seed, opts).chosen_k;
  average_runs(graphs, seed, opts, out, [&](std::size_t r, const std::vector<NodePair>& pairs) {
    return blockmodel_scores(graphs.train, emb, out.k_chosen, derive_seed(seed, {kRunClusterRole, r}), opts, pairs);
  });
  return out;
}

ProtocolResult evaluate_katz(const ProtocolGraphs& graphs, double theta, std::uint64_t seed,
                             const LinkPredOptions& opts) {
  ProtocolResult out;
  out.method = "katz";
  const double th = theta > 0 ? theta : default_katz_theta(graphs.train);
  average_runs(graphs, seed, opts, out, [&](std::size_t, const std::vector<NodePair>& pairs) {
    return katz_scores(graphs.train, th, pairs);
  });
  return out;
}

std::vector<Graph> sbm_snapshot_stream(const sbm::BlockModelParams& params, std::size_t snapshots,
                                       double persistence, std::uint64_t seed) {
  if (persistence < 0 || persistence > 1) throw std::invalid_argument("sbm_snapshot_stream: persistence not in [0,1]");
  std::vector<Graph> out;
  for (std::size_t t = 0; t < snapshots; ++t) {
    auto fresh = sbm::sample(params, derive_seed(seed, {t, 0})).graph;
    if (t == 0) {
      out.push_back(std::move(fresh));
      continue;
    }
    std::vector<Edge> edges(fresh.edges().begin(), fresh.edges().end());
    Rng rng(derive_seed(seed, {t, 1}));
    for (const auto& e : out.back().edges()) {
      if (rng.uniform() < persistence) edges.push_back(e);
    }
    out.emplace_back(params.n(), std::move(edges));
  }
  return out;
}

std::vector<std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::filesystem::path p = line.substr(b, e - b + 1);
    out.push_back((p.is_absolute() ? p : base / p).string());
  }
  return out;
}

std::vector<Graph> load_snapshots(std::span<const std::string> paths, NodeDictionary& dict) {
  std::vector<Graph> loaded;
  for (const auto& p : paths) {
    auto load = load_edge_list_file(p, dict);
    dict = std::move(load.nodes);
    loaded.push_back(std::move(load.graph));
  }
  std::vector<Graph> out;
  for (const auto& g : loaded) {
    out.emplace_back(dict.size(), std::vector<Edge>(g.edges().begin(), g.edges().end()));
  }
  return out;
}

}  // namespace specclust::linkpred
