#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "specclust/graph.hpp"
#include "specclust/rng.hpp"

namespace testing {

using specclust::Edge;
using specclust::Graph;
using specclust::NodeId;

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  return Graph(n, std::move(edges));
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
  return Graph(n, std::move(edges));
}

/// Disjoint cliques of the given sizes, numbered consecutively.
inline Graph cliques(std::initializer_list<std::size_t> sizes) {
  std::vector<Edge> edges;
  std::size_t base = 0;
  for (auto s : sizes) {
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j) edges.push_back({static_cast<NodeId>(base + i), static_cast<NodeId>(base + j)});
    base += s;
  }
  return Graph(base, std::move(edges));
}

/// Erdos-Renyi draw, for tests that need graphs outside the two-class sampler.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  specclust::Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return Graph(n, std::move(edges));
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  specclust::Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Eigen::VectorXd unit_vector(Eigen::Index n, std::uint64_t seed) {
  Eigen::VectorXd v = gaussian_matrix(n, 1, seed).col(0);
  return v / v.norm();
}

}  // namespace testing
