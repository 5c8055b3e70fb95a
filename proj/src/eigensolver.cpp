#include "specclust/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specclust/kernels.hpp"
#include "specclust/rng.hpp"

namespace specclust::eig {

namespace {

// Indices of `values` sorted by |value| descending, positive first on ties.
std::vector<Eigen::Index> order_by_magnitude(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });
  return idx;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index lead = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      lead = i;
    }
  }
  if (v(lead) < 0) v = -v;
}

// Fills everything except values/vectors, which the caller set.
void finish(const SymmetricOperator& op, EigenPairs& out) {
  const auto k = out.values.size();
  for (Eigen::Index c = 0; c < k; ++c) {
    out.vectors.col(c).normalize();
    fix_sign(out.vectors.col(c));
  }
  Eigen::MatrixXd mv;
  op.apply(out.vectors, mv);
  out.residual_norms.resize(k);
  out.converged.assign(static_cast<std::size_t>(k), false);
  for (Eigen::Index c = 0; c < k; ++c) {
    out.residual_norms(c) = (mv.col(c) - out.values(c) * out.vectors.col(c)).norm();
    out.converged[c] = out.residual_norms(c) <= kConvergedTolerance * std::max(1.0, std::abs(out.values(c)));
  }
  out.degenerate_with_next.assign(static_cast<std::size_t>(k), false);
  const double spread = k > 0 ? std::abs(out.values(0)) : 0.0;
  for (Eigen::Index c = 0; c + 1 < k; ++c) {
    const double gap = std::abs(out.values(c)) - std::abs(out.values(c + 1));
    out.degenerate_with_next[c] = gap < 1e-6 * std::max(spread, 1e-300);
  }
}

EigenPairs solve_dense(const SymmetricOperator& op, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense());
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  auto order = order_by_magnitude(es.eigenvalues());
  EigenPairs out;
  const auto kk = static_cast<Eigen::Index>(k);
  out.values.resize(kk);
  out.vectors.resize(es.eigenvectors().rows(), kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    out.values(c) = es.eigenvalues()(order[c]);
    out.vectors.col(c) = es.eigenvectors().col(order[c]);
  }
  finish(op, out);
  return out;
}

// Orthonormalizes the columns of `block` against basis(:, :m) and each other.
// Columns that collapse are replaced by random directions.
void orthonormalize(const Eigen::MatrixXd& basis, Eigen::Index m, Eigen::MatrixXd& block, Rng& rng) {
  const auto n = block.rows();
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      Eigen::MatrixXd col = block.col(j);
      const double before = col.norm();
      for (int pass = 0; pass < 2; ++pass) {
        kernels::project_out(basis, m, col);
        for (Eigen::Index i = 0; i < j; ++i) col -= block.col(i).dot(col.col(0)) * block.col(i);
      }
      const double after = col.norm();
      if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
        block.col(j) = col / after;
        break;
      }
      if (attempt > 8) throw std::runtime_error("Krylov solver: cannot extend basis");
      for (Eigen::Index i = 0; i < n; ++i) block(i, j) = rng.normal();
    }
  }
}

struct RitzState {
  Eigen::VectorXd theta;                  // all Ritz values
  Eigen::MatrixXd s;                      // coefficient vectors (m x m)
  std::vector<Eigen::Index> order;        // by |theta| descending
};

RitzState rayleigh_ritz(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w, Eigen::Index m) {
  Eigen::MatrixXd h = v.leftCols(m).transpose() * w.leftCols(m);
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  RitzState st;
  st.theta = es.eigenvalues();
  st.s = es.eigenvectors();
  st.order = order_by_magnitude(st.theta);
  return st;
}

EigenPairs solve_krylov(const SymmetricOperator& op, std::size_t k, const SolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto kk = static_cast<Eigen::Index>(k);
  const Eigen::Index b = std::min<Eigen::Index>(n, kk + static_cast<Eigen::Index>(opts.block_extra));
  Eigen::Index cap = opts.max_basis ? static_cast<Eigen::Index>(opts.max_basis) : std::max<Eigen::Index>(30 * b, 120);
  cap = std::min(cap, n);
  cap = std::max(cap, std::min(n, 2 * b + kk));

  Rng rng(opts.seed);
  Eigen::MatrixXd v(n, cap), w(n, cap);
  Eigen::Index m = 0;
  Eigen::MatrixXd block(n, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) block(i, j) = rng.normal();
  }

  RitzState ritz;
  std::size_t restarts = 0;
  Eigen::Index next_check = 0;
  for (;;) {
    const Eigen::Index take = std::min<Eigen::Index>(block.cols(), cap - m);
    if (take < block.cols()) block.conservativeResize(Eigen::NoChange, take);
    orthonormalize(v, m, block, rng);
    Eigen::MatrixXd applied;
    op.apply(block, applied);
    v.middleCols(m, take) = block;
    w.middleCols(m, take) = applied;
    m += take;

    const bool full = (m == n);
    const bool at_cap = (m + b > cap);
    if (m < kk || (!full && !at_cap && m < next_check)) {
      block = applied;
      continue;
    }
    next_check = m + std::max<Eigen::Index>(b, m / 4);

    ritz = rayleigh_ritz(v, w, m);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < kk; ++c) {
      const auto idx = ritz.order[c];
      Eigen::VectorXd y = v.leftCols(m) * ritz.s.col(idx);
      Eigen::VectorXd r = w.leftCols(m) * ritz.s.col(idx) - ritz.theta(idx) * y;
      worst = std::max(worst, r.norm() / std::max(1.0, std::abs(ritz.theta(idx))));
    }
    if (full || worst <= opts.target_tolerance) break;
    if (!at_cap) {
      block = applied;
      continue;
    }
    if (restarts++ >= opts.max_restarts) break;

    // Thick restart: keep the leading Ritz vectors, continue from their residuals.
    const Eigen::Index keep = std::min<Eigen::Index>(m - b, std::max<Eigen::Index>(cap / 2, kk + b));
    Eigen::MatrixXd s_keep(m, keep);
    for (Eigen::Index c = 0; c < keep; ++c) s_keep.col(c) = ritz.s.col(ritz.order[c]);
    Eigen::MatrixXd v_new = v.leftCols(m) * s_keep;
    Eigen::MatrixXd w_new = w.leftCols(m) * s_keep;
    block.resize(n, b);
    for (Eigen::Index c = 0; c < b; ++c) {
      block.col(c) = w_new.col(c) - ritz.theta(ritz.order[c]) * v_new.col(c);
    }
    v.leftCols(keep) = v_new;
    w.leftCols(keep) = w_new;
    m = keep;
    next_check = m + b;
  }

  EigenPairs out;
  out.values.resize(kk);
  out.vectors.resize(n, kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    const auto idx = ritz.order[c];
    out.values(c) = ritz.theta(idx);
    out.vectors.col(c) = v.leftCols(m) * ritz.s.col(idx);
  }
  finish(op, out);
  return out;
}

}  // namespace

bool EigenPairs::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

bool EigenPairs::any_degenerate() const {
  return std::any_of(degenerate_with_next.begin(), degenerate_with_next.end(), [](bool c) { return c; });
}

SymmetricOperator SymmetricOperator::dense(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("matrix is not symmetric to 1e-12");
  }
  SymmetricOperator op;
  op.dense_ = std::move(m);
  return op;
}

SymmetricOperator SymmetricOperator::adjacency(const Graph& g) {
  SymmetricOperator op;
  op.graph_ = &g;
  return op;
}

SymmetricOperator SymmetricOperator::normalized_adjacency(const Graph& g) {
  SymmetricOperator op;
  op.graph_ = &g;
  op.scale_ = inverse_sqrt_degrees(g);
  return op;
}

std::size_t SymmetricOperator::size() const {
  return graph_ ? graph_->node_count() : static_cast<std::size_t>(dense_.rows());
}

void SymmetricOperator::apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const {
  if (graph_) {
    kernels::adjacency_apply(*graph_, scale_, x, y);
  } else {
    y.noalias() = dense_ * x;
  }
}

Eigen::MatrixXd SymmetricOperator::to_dense() const {
  if (!graph_) return dense_;
  Eigen::MatrixXd a = graph_->dense_adjacency();
  if (!scale_.empty()) {
    Eigen::Map<const Eigen::VectorXd> s(scale_.data(), static_cast<Eigen::Index>(scale_.size()));
    a = s.asDiagonal() * a * s.asDiagonal();
  }
  return a;
}

std::vector<double> inverse_sqrt_degrees(const Graph& g) {
  std::vector<double> s(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) throw ZeroDegreeError(v);
    s[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
  }
  return s;
}

Eigen::MatrixXd normalize_adjacency(const Graph& g) {
  return SymmetricOperator::normalized_adjacency(g).to_dense();
}

EigenPairs top_k_eigenpairs(const Eigen::MatrixXd& m, std::size_t k, const SolverOptions& opts) {
  return top_k_eigenpairs(SymmetricOperator::dense(m), k, opts);
}

EigenPairs top_k_eigenpairs(const SymmetricOperator& op, std::size_t k, const SolverOptions& opts) {
  const std::size_t n = op.size();
  if (k < 1 || k > n) throw std::invalid_argument("top_k_eigenpairs: need 1 <= k <= n");
  bool dense = false;
  switch (opts.backend) {
    case Backend::Dense: dense = true; break;
    case Backend::Krylov: dense = false; break;
    case Backend::Automatic:
      dense = n <= opts.dense_threshold || 8 * (k + opts.block_extra) > n;
      break;
  }
  return dense ? solve_dense(op, k) : solve_krylov(op, k, opts);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  // sin of the largest angle is the norm of the part of span(b) outside span(a).
  Eigen::MatrixXd outside = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(outside);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::clamp(s, 0.0, 1.0));
}

}  // namespace specclust::eig
