#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version and a serial
// reference with the same signature; tests check that the two agree and
// bench/ compares their throughput. Callers use the unqualified names, which
// forward to the parallel versions.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specclust/graph.hpp"

namespace specclust::kernels {

// adjacency_apply: Y = S A S X for the 0/1 adjacency A of `g` (rows of X are
// nodes); `scale` is the diagonal of S, empty for S = I.
// assign_nearest: nearest row of `centers` for each row of `points`, with the
// squared distance. Ties go to the lower center index.
// project_out: X -= B B^T X for the first `cols` (orthonormal) columns of B.

namespace serial {
void adjacency_apply(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x,
                     Eigen::MatrixXd& y);
void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels,
                    std::vector<double>& dist_sq);
void project_out(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::MatrixXd& x);
}  // namespace serial

namespace parallel {
void adjacency_apply(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x,
                     Eigen::MatrixXd& y);
void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels,
                    std::vector<double>& dist_sq);
void project_out(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::MatrixXd& x);
}  // namespace parallel

inline void adjacency_apply(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x,
                            Eigen::MatrixXd& y) {
  parallel::adjacency_apply(g, scale, x, y);
}
inline void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                           std::vector<int>& labels, std::vector<double>& dist_sq) {
  parallel::assign_nearest(points, centers, labels, dist_sq);
}
inline void project_out(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::MatrixXd& x) {
  parallel::project_out(basis, cols, x);
}

}  // namespace specclust::kernels
