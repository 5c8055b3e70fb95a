#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "specclust/clustering.hpp"
#include "specclust/graph.hpp"
#include "specclust/sbm.hpp"

namespace specclust::linkpred {

using NodePair = std::pair<NodeId, NodeId>;

struct FittedBlockProbabilities {
  int k = 0;
  Eigen::MatrixXd phat;  // k x k, symmetric, entries in [0, 1]
  std::vector<std::size_t> cluster_sizes;
  /// Some cell had no node pairs (a singleton cluster's own block); it is 0.
  bool has_empty_cells = false;
};

/// Edge frequency per cluster pair; within-cluster pair count is s(s-1)/2.
FittedBlockProbabilities fit_phat(const Graph& g_train, const std::vector<int>& labels, int k);
FittedBlockProbabilities fit_phat(const Graph& g_train, const cluster::ClusterAssignment& assignment);

std::vector<double> score_pairs(const FittedBlockProbabilities& model, const std::vector<int>& labels,
                                std::span<const NodePair> pairs);

/// P(score+ > score-) + P(score+ == score-)/2. Throws when truth is one-sided.
double auc(std::span<const double> scores, std::span<const char> truth);

/// Largest adjacency eigenvalue (0 for an edgeless graph).
double leading_eigenvalue(const Graph& g);

/// sum_{l >= 1} theta^l (A^l)_ij per pair, by conjugate-gradient solves of
/// (I - theta A) x = e_i, one per distinct row. Throws unless theta * lambda_1 < 1.
std::vector<double> katz_scores(const Graph& g, double theta, std::span<const NodePair> pairs);

/// 0.8 / lambda_1(g), or 0.5 for an edgeless graph.
double default_katz_theta(const Graph& g);

enum class EvalMode { LinksIncluded, LinksExcluded };
std::string to_string(EvalMode mode);

struct PredictionEval {
  double auc = 0.5;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  EvalMode mode = EvalMode::LinksIncluded;
};

/// Nodes with at least one edge in `g`, `count` of them drawn without
/// replacement (all of them if fewer), returned in increasing order.
std::vector<NodeId> sample_active_nodes(const Graph& g, std::size_t count, std::uint64_t seed);

/// Every (i, j), j != i, for each sampled i.
std::vector<NodePair> partner_pairs(std::size_t node_count, std::span<const NodeId> nodes);

/// Evaluates precomputed scores against `truth_graph`. In LinksExcluded mode
/// pairs that are edges of `train` are dropped from both sides. A mode left
/// without positives or negatives reports auc 0.5 with the counts it has.
PredictionEval evaluate_scores(std::span<const NodePair> pairs, std::span<const double> scores,
                               const Graph& truth_graph, const Graph& train, EvalMode mode);

std::vector<int> default_k_grid(std::size_t node_count);

struct LinkPredOptions {
  std::size_t sample_nodes = 100;
  std::vector<int> k_grid;  // empty: default_k_grid
  std::size_t runs = 5;
  cluster::SpectralOptions spectral;
};

struct CrossValidation {
  int chosen_k = 0;
  std::vector<int> grid;
  std::vector<double> aucs;
};

/// For each k: cluster `train`, fit phat, score all partners of sampled
/// validation nodes, AUC. Highest AUC wins, ties go to the smaller k.
CrossValidation cross_validate_k(const Graph& train, const Graph& validate, std::vector<int> k_grid, bool normalized,
                                 std::uint64_t seed, const LinkPredOptions& opts = {});

/// Argmax with ties to the smaller k; exposed for testing.
int pick_k(std::span<const int> grid, std::span<const double> aucs);

/// A1 (merged early snapshots, pruned, giant component), A2, A3 on the
/// surviving nodes.
struct ProtocolGraphs {
  Graph train;
  Graph validate;
  Graph test;
  std::vector<NodeId> original_ids;
};

ProtocolGraphs prepare_protocol(std::span<const Graph> snapshots);

struct ProtocolResult {
  std::string method;  // "normalized", "unnormalized" or "katz"
  int k_chosen = 0;
  PredictionEval included;
  PredictionEval excluded;
  std::size_t nodes = 0;
};

/// Blockmodel link prediction; test AUC is the mean over opts.runs runs.
ProtocolResult evaluate_protocol(std::span<const Graph> snapshots, bool normalized, std::uint64_t seed,
                                 const LinkPredOptions& opts = {});
ProtocolResult evaluate_protocol(const ProtocolGraphs& graphs, bool normalized, std::uint64_t seed,
                                 const LinkPredOptions& opts = {});

/// Katz baseline under the same protocol; theta <= 0 picks default_katz_theta(A1).
ProtocolResult evaluate_katz(const ProtocolGraphs& graphs, double theta, std::uint64_t seed,
                             const LinkPredOptions& opts = {});

/// Snapshot t+1 keeps each edge of snapshot t with probability `persistence`
/// and adds a fresh draw from `params`.
std::vector<Graph> sbm_snapshot_stream(const sbm::BlockModelParams& params, std::size_t snapshots,
                                       double persistence, std::uint64_t seed);

/// One path per line, blank lines and '#' comments skipped; relative paths
/// resolve against the manifest's directory.
std::vector<std::string> read_manifest(const std::string& path);

/// Loads every snapshot into one shared node dictionary.
std::vector<Graph> load_snapshots(std::span<const std::string> paths, NodeDictionary& dict);

}  // namespace specclust::linkpred
