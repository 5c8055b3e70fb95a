#include "specclust/kernels.hpp"

#include <limits>
#include <stdexcept>

#include <omp.h>

namespace specclust::kernels {
namespace {

void check_shapes(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.rows()) != g.node_count()) {
    throw std::invalid_argument("adjacency_apply: row count does not match node count");
  }
  if (!scale.empty() && scale.size() != g.node_count()) {
    throw std::invalid_argument("adjacency_apply: scale length does not match node count");
  }
}

}  // namespace

namespace serial {

void adjacency_apply(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x,
                     Eigen::MatrixXd& y) {
  check_shapes(g, scale, x);
  const auto n = x.rows();
  const auto b = x.cols();
  y.setZero(n, b);
  const auto& ptr = g.row_ptr();
  const auto& idx = g.col_idx();
  for (Eigen::Index c = 0; c < b; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t p = ptr[i]; p < ptr[i + 1]; ++p) {
        const auto j = idx[p];
        acc += scale.empty() ? x(j, c) : scale[j] * x(j, c);
      }
      y(i, c) = scale.empty() ? acc : scale[i] * acc;
    }
  }
}

void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels,
                    std::vector<double>& dist_sq) {
  const auto n = points.rows();
  labels.assign(n, 0);
  dist_sq.assign(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist_sq[i] = best;
  }
}

void project_out(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::MatrixXd& x) {
  const auto n = x.rows();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) dot += basis(i, k) * x(i, c);
      for (Eigen::Index i = 0; i < n; ++i) x(i, c) -= dot * basis(i, k);
    }
  }
}

}  // namespace serial

namespace parallel {

void adjacency_apply(const Graph& g, std::span<const double> scale, const Eigen::MatrixXd& x,
                     Eigen::MatrixXd& y) {
  check_shapes(g, scale, x);
  const auto n = x.rows();
  const auto b = x.cols();
  y.resize(n, b);
  const auto* ptr = g.row_ptr().data();
  const auto* idx = g.col_idx().data();
  const double* s = scale.empty() ? nullptr : scale.data();
#pragma omp parallel for schedule(dynamic, 256)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < b; ++c) {
      double acc = 0.0;
      for (std::size_t p = ptr[i]; p < ptr[i + 1]; ++p) {
        const auto j = idx[p];
        acc += s ? s[j] * x(j, c) : x(j, c);
      }
      y(i, c) = s ? s[i] * acc : acc;
    }
  }
}

void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels,
                    std::vector<double>& dist_sq) {
  const auto n = points.rows();
  labels.assign(n, 0);
  dist_sq.assign(n, 0.0);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist_sq[i] = best;
  }
}

void project_out(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::MatrixXd& x) {
  if (cols == 0) return;
  const auto n = x.rows();
  // Classical Gram-Schmidt in block form: all coefficients first, then one update.
  Eigen::MatrixXd coef(cols, x.cols());
#pragma omp parallel for collapse(2) schedule(static)
  for (Eigen::Index k = 0; k < cols; ++k) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) dot += basis(i, k) * x(i, c);
      coef(k, c) = dot;
    }
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < cols; ++k) acc += basis(i, k) * coef(k, c);
      x(i, c) -= acc;
    }
  }
}

}  // namespace parallel
}  // namespace specclust::kernels
