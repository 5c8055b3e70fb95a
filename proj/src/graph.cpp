#include "specclust/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace specclust {

Graph::Graph(std::size_t node_count, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.first >= node_count || e.second >= node_count) {
      throw std::out_of_range("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                              ") outside node range " + std::to_string(node_count));
    }
    if (e.first == e.second) {
      throw std::invalid_argument("self-loop at node " + std::to_string(e.first));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  degrees_.assign(node_count, 0);
  for (const auto& e : edges_) {
    ++degrees_[e.first];
    ++degrees_[e.second];
  }
  row_ptr_.assign(node_count + 1, 0);
  for (std::size_t v = 0; v < node_count; ++v) row_ptr_[v + 1] = row_ptr_[v] + degrees_[v];
  col_idx_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  // Lower neighbors first, then higher ones; edges_ is sorted so rows come out sorted.
  for (const auto& e : edges_) col_idx_[fill[e.second]++] = e.first;
  for (const auto& e : edges_) col_idx_[fill[e.first]++] = e.second;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count() || v >= node_count()) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) {
    a(e.first, e.second) = 1.0;
    a(e.second, e.first) = 1.0;
  }
  return a;
}

NodeLabeling::NodeLabeling(std::vector<int> labels, int class_count) : labels_(std::move(labels)) {
  int max_label = -1;
  for (int l : labels_) {
    if (l < 0) throw std::invalid_argument("negative class label");
    max_label = std::max(max_label, l);
  }
  if (class_count < 0) class_count = max_label + 1;
  if (max_label >= class_count) throw std::invalid_argument("label exceeds class count");
  class_sizes_.assign(static_cast<std::size_t>(class_count), 0);
  for (int l : labels_) ++class_sizes_[static_cast<std::size_t>(l)];
}

NodeLabeling NodeLabeling::restrict_to(const Subgraph& sub) const {
  std::vector<int> out;
  out.reserve(sub.new_to_old.size());
  for (NodeId old : sub.new_to_old) out.push_back(labels_.at(old));
  return NodeLabeling(std::move(out), class_count());
}

std::vector<std::size_t> degrees(const Graph& g) { return g.degrees(); }

Subgraph induced_subgraph(const Graph& g, std::vector<NodeId> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  Subgraph sub;
  sub.old_to_new.assign(g.node_count(), kNoNode);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= g.node_count()) throw std::out_of_range("induced_subgraph: node id out of range");
    sub.old_to_new[keep[i]] = static_cast<NodeId>(i);
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    NodeId a = sub.old_to_new[e.first];
    NodeId b = sub.old_to_new[e.second];
    if (a != kNoNode && b != kNoNode) edges.push_back({a, b});
  }
  sub.graph = Graph(keep.size(), std::move(edges));
  sub.new_to_old = std::move(keep);
  return sub;
}

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<NodeId>> comps;
  std::queue<NodeId> frontier;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    seen[s] = 1;
    frontier.push(s);
    while (!frontier.empty()) {
      NodeId v = frontier.front();
      frontier.pop();
      comp.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          frontier.push(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

Subgraph largest_connected_component(const Graph& g) {
  if (g.node_count() == 0) throw std::invalid_argument("largest_connected_component: empty graph");
  auto comps = connected_components(g);
  // Components come out ordered by smallest member, so the first maximum wins ties.
  std::size_t best = 0;
  for (std::size_t c = 1; c < comps.size(); ++c) {
    if (comps[c].size() > comps[best].size()) best = c;
  }
  return induced_subgraph(g, std::move(comps[best]));
}

PruneResult prune_min_degree(const Graph& g, std::size_t min_deg, std::size_t max_rounds) {
  if (min_deg < 1) throw std::invalid_argument("prune_min_degree: min_deg must be >= 1");
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg = g.degrees();
  std::vector<char> alive(n, 1);
  PruneResult result;
  while (max_rounds == 0 || result.rounds < max_rounds) {
    std::vector<NodeId> doomed;
    for (NodeId v = 0; v < n; ++v) {
      if (alive[v] && deg[v] < min_deg) doomed.push_back(v);
    }
    if (doomed.empty()) break;
    for (NodeId v : doomed) alive[v] = 0;
    for (NodeId v : doomed) {
      for (NodeId w : g.neighbors(v)) {
        if (alive[w]) --deg[w];
      }
    }
    ++result.rounds;
  }
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < n; ++v) {
    if (alive[v]) keep.push_back(v);
  }
  result.sub = induced_subgraph(g, std::move(keep));
  return result;
}

Graph merge_snapshots(std::span<const Graph> snaps) {
  if (snaps.empty()) throw std::invalid_argument("merge_snapshots: no snapshots");
  const std::size_t n = snaps.front().node_count();
  std::vector<Edge> edges;
  for (const auto& s : snaps) {
    if (s.node_count() != n) {
      throw std::invalid_argument("merge_snapshots: inconsistent node universes (" + std::to_string(n) +
                                  " vs " + std::to_string(s.node_count()) + " nodes)");
    }
    edges.insert(edges.end(), s.edges().begin(), s.edges().end());
  }
  return Graph(n, std::move(edges));
}

NodeId NodeDictionary::intern(const std::string& token) {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), token,
                             [](const auto& entry, const std::string& t) { return entry.first < t; });
  if (it != sorted_.end() && it->first == token) return it->second;
  auto id = static_cast<NodeId>(tokens_.size());
  tokens_.push_back(token);
  sorted_.insert(it, {token, id});
  return id;
}

NodeId NodeDictionary::find(const std::string& token) const {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), token,
                             [](const auto& entry, const std::string& t) { return entry.first < t; });
  if (it != sorted_.end() && it->first == token) return it->second;
  return kNoNode;
}

EdgeListLoad load_edge_list(std::istream& in, NodeDictionary dict) {
  EdgeListLoad out;
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError(lineno, "expected two node tokens");
    if (fields >> extra) throw ParseError(lineno, "unexpected third field '" + extra + "'");
    NodeId u = dict.intern(a);
    NodeId v = dict.intern(b);
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    edges.push_back({std::min(u, v), std::max(u, v)});
  }
  const std::size_t raw = edges.size();
  out.graph = Graph(dict.size(), std::move(edges));
  out.duplicates_collapsed = raw - out.graph.edge_count();
  out.nodes = std::move(dict);
  return out;
}

EdgeListLoad load_edge_list_file(const std::string& path, NodeDictionary dict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return load_edge_list(in, std::move(dict));
}

void save_edge_list(std::ostream& out, const Graph& g, const NodeDictionary* dict) {
  for (const auto& e : g.edges()) {
    if (dict) {
      out << dict->token(e.first) << ' ' << dict->token(e.second) << '\n';
    } else {
      out << e.first << ' ' << e.second << '\n';
    }
  }
}

NodeLabeling load_labels(std::istream& in, const NodeDictionary& dict) {
  std::vector<int> labels(dict.size(), -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "expected node_token<TAB>label");
    std::string token = line.substr(0, tab);
    std::string value = line.substr(tab + 1);
    NodeId id = dict.find(token);
    if (id == kNoNode) throw ParseError(lineno, "unknown node '" + token + "'");
    std::size_t used = 0;
    int label = -1;
    try {
      label = std::stoi(value, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "label '" + value + "' is not an integer");
    }
    if (used != value.size() || label < 0) throw ParseError(lineno, "label '" + value + "' is not a non-negative integer");
    labels[id] = label;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw std::runtime_error("node '" + dict.token(static_cast<NodeId>(i)) + "' has no label");
  }
  return NodeLabeling(std::move(labels));
}

void save_labels(std::ostream& out, const NodeLabeling& labels, const NodeDictionary* dict) {
  for (std::size_t i = 0; i < labels.node_count(); ++i) {
    if (dict) {
      out << dict->token(static_cast<NodeId>(i));
    } else {
      out << i;
    }
    out << '\t' << labels[i] << '\n';
  }
}

}  // namespace specclust
