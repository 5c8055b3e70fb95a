#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specclust/eigensolver.hpp"
#include "specclust/graph.hpp"

namespace specclust::cluster {

/// Rows are node coordinates: the top-k eigenvectors of A, or of
/// D^{-1/2} A D^{-1/2} when `normalized`.
struct SpectralEmbedding {
  Eigen::MatrixXd coords;
  Eigen::VectorXd eigenvalues;
  bool normalized = false;
  bool degenerate = false;  // some adjacent eigenvalues (nearly) coincide
};

struct ClusterAssignment {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // k x dim
  double within_ss = 0.0;
  std::size_t balance = 0;  // size of the smallest cluster
  std::vector<std::size_t> sizes;
  std::size_t iterations = 0;

  int cluster_count() const { return static_cast<int>(centers.rows()); }
};

struct KMeansOptions {
  std::size_t max_iters = 100;
  std::size_t restarts = 5;
};

/// Lloyd iterations from k-means++ seeding. Stops when the assignment no
/// longer changes or after max_iters. An emptied cluster is re-seeded with
/// the point farthest from its own center.
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, std::size_t max_iters = 100);

/// Lloyd iterations from the given centers (one per row).
ClusterAssignment kmeans_from(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_centers,
                              std::size_t max_iters = 100);

/// Most balanced run: largest smallest-cluster, then smaller within_ss, then
/// earlier index.
std::size_t most_balanced(std::span<const ClusterAssignment> runs);

/// `restarts` runs seeded seed ^ run-index; returns the most balanced one.
ClusterAssignment kmeans_balanced_best(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                                       const KMeansOptions& opts = {});

/// Recomputes sum ||point - center[label]||^2.
double within_sum_of_squares(const Eigen::MatrixXd& points, const ClusterAssignment& a);

struct SpectralOptions {
  KMeansOptions kmeans;
  eig::SolverOptions solver;
  /// Scale each embedding row to unit length before kmeans. Off by default.
  bool row_normalize = false;
};

SpectralEmbedding spectral_embedding(const Graph& g, int k, bool normalized, const eig::SolverOptions& solver = {});

/// The first k columns (k leading eigenpairs) of a wider embedding.
SpectralEmbedding leading(const SpectralEmbedding& emb, int k);

struct SpectralResult {
  ClusterAssignment assignment;
  SpectralEmbedding embedding;
};

/// Top-k eigenvectors (by |eigenvalue|) of A or its normalization, rows
/// clustered with kmeans_balanced_best.
SpectralResult spectral_cluster(const Graph& g, int k, bool normalized, std::uint64_t seed,
                                const SpectralOptions& opts = {});

/// Clusters precomputed embedding rows with the same rule as spectral_cluster.
ClusterAssignment cluster_embedding(const SpectralEmbedding& emb, int k, std::uint64_t seed,
                                    const SpectralOptions& opts = {});

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns col[row].
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// Orthogonal R minimizing ||from R - to||_F.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to);

}  // namespace specclust::cluster
