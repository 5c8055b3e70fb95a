#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace specclust {

using NodeId = std::uint32_t;

/// Marks a node that did not survive a subgraph transform.
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Unordered node pair, stored with first < second.
struct Edge {
  NodeId first;
  NodeId second;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/**
 * Simple undirected graph with no self-loops.
 *
 * Edges are kept as a sorted, deduplicated list of unordered pairs and mirrored
 * into compressed sparse rows for neighbor iteration. Immutable after
 * construction.
 */
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on `node_count` nodes. Duplicate pairs (in either
  /// orientation) collapse; a self-loop or out-of-range id throws.
  Graph(std::size_t node_count, std::vector<Edge> edges);

  static Graph empty(std::size_t node_count) { return Graph(node_count, {}); }

  std::size_t node_count() const { return degrees_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const std::vector<std::size_t>& degrees() const { return degrees_; }
  std::size_t degree(NodeId v) const { return degrees_[v]; }

  /// Sorted neighbor ids of `v`.
  std::span<const NodeId> neighbors(NodeId v) const {
    return {col_idx_.data() + row_ptr_[v], col_idx_.data() + row_ptr_[v + 1]};
  }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<NodeId>& col_idx() const { return col_idx_; }

  bool has_edge(NodeId u, NodeId v) const;

  Eigen::MatrixXd dense_adjacency() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> degrees_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<NodeId> col_idx_;
};

/// Result of a node-removing transform: the surviving graph plus the id maps
/// in both directions. Dropped nodes map to kNoNode.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> old_to_new;
  std::vector<NodeId> new_to_old;
};

/// Class assignment of every node; labels are in {0, ..., k-1}.
class NodeLabeling {
 public:
  NodeLabeling() = default;
  /// Throws if a label is negative. class_count defaults to max label + 1.
  explicit NodeLabeling(std::vector<int> labels, int class_count = -1);

  std::size_t node_count() const { return labels_.size(); }
  int class_count() const { return static_cast<int>(class_sizes_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<std::size_t>& class_sizes() const { return class_sizes_; }

  /// Relabels through a subgraph map; dropped nodes disappear.
  NodeLabeling restrict_to(const Subgraph& sub) const;

 private:
  std::vector<int> labels_;
  std::vector<std::size_t> class_sizes_;
};

std::vector<std::size_t> degrees(const Graph& g);

/// Induced subgraph on `keep` (original ids, any order). New ids follow
/// ascending original id.
Subgraph induced_subgraph(const Graph& g, std::vector<NodeId> keep);

/// Node sets of every connected component, each sorted ascending, components
/// ordered by their smallest member.
std::vector<std::vector<NodeId>> connected_components(const Graph& g);

/// Largest component; equal sizes resolve to the one holding the smallest id.
Subgraph largest_connected_component(const Graph& g);

struct PruneResult {
  Subgraph sub;
  std::size_t rounds = 0;  // rounds that removed at least one node
};

/// Peels nodes with degree < min_deg. max_rounds = 0 iterates to a fixed
/// point; max_rounds = 1 is the literal single pass.
PruneResult prune_min_degree(const Graph& g, std::size_t min_deg, std::size_t max_rounds = 0);

/// Edge-set union. All snapshots must have the same node count.
Graph merge_snapshots(std::span<const Graph> snaps);

/// Token <-> id table shared by files that refer to the same node universe.
class NodeDictionary {
 public:
  /// Returns the id of `token`, assigning the next free id on first sight.
  NodeId intern(const std::string& token);
  /// kNoNode if unseen.
  NodeId find(const std::string& token) const;
  const std::string& token(NodeId id) const { return tokens_[id]; }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::pair<std::string, NodeId>> sorted_;  // kept sorted for lookup
};

struct EdgeListLoad {
  Graph graph;
  NodeDictionary nodes;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

/// Parses whitespace-separated pairs; '#' lines and blank lines are skipped.
/// Passing `dict` resolves tokens against an existing universe (new tokens
/// are appended to it).
EdgeListLoad load_edge_list(std::istream& in, NodeDictionary dict = {});
EdgeListLoad load_edge_list_file(const std::string& path, NodeDictionary dict = {});

/// Writes "u v" per edge using numeric ids, or `dict` tokens when given.
void save_edge_list(std::ostream& out, const Graph& g, const NodeDictionary* dict = nullptr);

/// `node_token<TAB>label` per line; labels must be non-negative integers.
NodeLabeling load_labels(std::istream& in, const NodeDictionary& dict);
void save_labels(std::ostream& out, const NodeLabeling& labels, const NodeDictionary* dict = nullptr);

}  // namespace specclust
