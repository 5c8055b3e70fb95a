#include "specclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specclust/kernels.hpp"
#include "specclust/rng.hpp"

namespace specclust::cluster {

namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const auto n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = points.row(first);
  chosen[first] = 1;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point coincides with a center already; take the next unused index.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = points.row(pick);
    chosen[pick] = 1;
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (points.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

void update_centers(const Eigen::MatrixXd& points, const std::vector<int>& labels, Eigen::MatrixXd& centers,
                    std::vector<std::size_t>& sizes) {
  centers.setZero();
  sizes.assign(static_cast<std::size_t>(centers.rows()), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    centers.row(labels[i]) += points.row(i);
    ++sizes[labels[i]];
  }
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    if (sizes[c] > 0) centers.row(c) /= static_cast<double>(sizes[c]);
  }
}

// Moves the farthest point (from its own center) into each empty cluster.
void fill_empty(const Eigen::MatrixXd& points, std::vector<int>& labels, std::vector<double>& dist_sq,
                Eigen::MatrixXd& centers, std::vector<std::size_t>& sizes) {
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    if (sizes[c] > 0) continue;
    Eigen::Index far = -1;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (sizes[labels[i]] < 2) continue;
      if (far < 0 || dist_sq[i] > dist_sq[far]) far = i;
    }
    if (far < 0) throw std::logic_error("kmeans: cannot re-seed an empty cluster");
    --sizes[labels[far]];
    labels[far] = static_cast<int>(c);
    dist_sq[far] = 0.0;
    sizes[c] = 1;
    centers.row(c) = points.row(far);
  }
  update_centers(points, labels, centers, sizes);
}

ClusterAssignment lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, std::size_t max_iters) {
  ClusterAssignment out;
  std::vector<int> labels;
  std::vector<double> dist_sq;
  std::vector<std::size_t> sizes;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    kernels::assign_nearest(points, centers, labels, dist_sq);
    const bool unchanged = (it > 0 && labels == out.labels);
    out.labels = labels;
    update_centers(points, out.labels, centers, sizes);
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) {
      fill_empty(points, out.labels, dist_sq, centers, sizes);
    }
    out.iterations = it + 1;
    out.centers = centers;
    const double wss = within_sum_of_squares(points, out);
    if (wss > previous * (1 + 1e-9) + 1e-12) {
      throw std::logic_error("kmeans: within-cluster sum of squares increased");
    }
    previous = wss;
    if (unchanged) break;
  }
  out.centers = centers;
  out.sizes = sizes;
  out.within_ss = within_sum_of_squares(points, out);
  out.balance = sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end());
  return out;
}

void check_points(const Eigen::MatrixXd& points, int k) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
  if (points.rows() < k) throw std::invalid_argument("kmeans: fewer points than clusters");
}

}  // namespace

double within_sum_of_squares(const Eigen::MatrixXd& points, const ClusterAssignment& a) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) total += (points.row(i) - a.centers.row(a.labels[i])).squaredNorm();
  return total;
}

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, std::size_t max_iters) {
  check_points(points, k);
  Rng rng(seed);
  return lloyd(points, plus_plus_seeds(points, k, rng), std::max<std::size_t>(max_iters, 1));
}

ClusterAssignment kmeans_from(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_centers,
                              std::size_t max_iters) {
  check_points(points, static_cast<int>(initial_centers.rows()));
  if (initial_centers.cols() != points.cols()) throw std::invalid_argument("kmeans_from: dimension mismatch");
  return lloyd(points, initial_centers, std::max<std::size_t>(max_iters, 1));
}

std::size_t most_balanced(std::span<const ClusterAssignment> runs) {
  if (runs.empty()) throw std::invalid_argument("most_balanced: no runs");
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const auto& a = runs[r];
    const auto& b = runs[best];
    if (a.balance > b.balance || (a.balance == b.balance && a.within_ss < b.within_ss)) best = r;
  }
  return best;
}

ClusterAssignment kmeans_balanced_best(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                                       const KMeansOptions& opts) {
  check_points(points, k);
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<ClusterAssignment> runs(restarts);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < restarts; ++r) {
    runs[r] = kmeans(points, k, xor_seed(seed, r), opts.max_iters);
  }
  return runs[most_balanced(runs)];
}

SpectralEmbedding spectral_embedding(const Graph& g, int k, bool normalized, const eig::SolverOptions& solver) {
  if (k < 1 || static_cast<std::size_t>(k) > g.node_count()) {
    throw std::invalid_argument("spectral_embedding: need 1 <= k <= node count");
  }
  const auto op = normalized ? eig::SymmetricOperator::normalized_adjacency(g) : eig::SymmetricOperator::adjacency(g);
  auto pairs = eig::top_k_eigenpairs(op, static_cast<std::size_t>(k), solver);
  SpectralEmbedding emb;
  emb.coords = std::move(pairs.vectors);
  emb.eigenvalues = std::move(pairs.values);
  emb.normalized = normalized;
  emb.degenerate = pairs.any_degenerate();
  return emb;
}

SpectralEmbedding leading(const SpectralEmbedding& emb, int k) {
  if (k < 1 || k > emb.coords.cols()) throw std::invalid_argument("leading: k outside the embedding width");
  SpectralEmbedding out;
  out.coords = emb.coords.leftCols(k);
  out.eigenvalues = emb.eigenvalues.head(k);
  out.normalized = emb.normalized;
  out.degenerate = emb.degenerate;
  return out;
}

ClusterAssignment cluster_embedding(const SpectralEmbedding& emb, int k, std::uint64_t seed,
                                    const SpectralOptions& opts) {
  if (!opts.row_normalize) return kmeans_balanced_best(emb.coords, k, seed, opts.kmeans);
  Eigen::MatrixXd rows = emb.coords;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0) rows.row(i) /= norm;
  }
  return kmeans_balanced_best(rows, k, seed, opts.kmeans);
}

SpectralResult spectral_cluster(const Graph& g, int k, bool normalized, std::uint64_t seed,
                                const SpectralOptions& opts) {
  SpectralResult out;
  out.embedding = spectral_embedding(g, k, normalized, opts.solver);
  out.assignment = cluster_embedding(out.embedding, k, seed, opts);
  return out;
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("hungarian: cost matrix must be square");
  // Potentials method, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
  }
  return col_of_row;
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to) {
  if (from.rows() != to.rows() || from.cols() != to.cols()) throw std::invalid_argument("procrustes: shape mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(from.transpose() * to, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace specclust::cluster
