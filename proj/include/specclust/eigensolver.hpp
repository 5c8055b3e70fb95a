#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "specclust/graph.hpp"

namespace specclust::eig {

class ZeroDegreeError : public std::invalid_argument {
 public:
  explicit ZeroDegreeError(NodeId node)
      : std::invalid_argument("node " + std::to_string(node) +
                              " has degree 0; prune isolated nodes before normalizing"),
        node_(node) {}
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

/// Top-k eigenpairs ordered by descending |eigenvalue| (positive first on
/// ties). Each column is unit norm with its largest-magnitude entry positive.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<bool> converged;
  Eigen::VectorXd residual_norms;
  /// degenerate_with_next[i]: |values[i]| and |values[i+1]| closer than
  /// 1e-6 of the spectral spread. Compare subspaces, not vectors, there.
  std::vector<bool> degenerate_with_next;

  bool all_converged() const;
  bool any_degenerate() const;
};

enum class Backend { Automatic, Dense, Krylov };

struct SolverOptions {
  Backend backend = Backend::Automatic;
  /// Automatic picks the dense solver up to this order.
  std::size_t dense_threshold = 400;
  /// Extra block columns beyond k for the Krylov solver.
  std::size_t block_extra = 2;
  /// Krylov basis size before a thick restart; 0 picks a size from k and n.
  std::size_t max_basis = 0;
  std::size_t max_restarts = 60;
  /// Relative residual the Krylov iteration aims for.
  double target_tolerance = 1e-11;
  std::uint64_t seed = 0x5bd1e995ULL;
};

/// Relative residual below which a pair is reported as converged.
inline constexpr double kConvergedTolerance = 1e-8;

/// A symmetric linear operator: a dense matrix or S A S for a graph
/// adjacency A and diagonal S. The graph must outlive the operator.
class SymmetricOperator {
 public:
  static SymmetricOperator dense(Eigen::MatrixXd m);
  static SymmetricOperator adjacency(const Graph& g);
  /// D^{-1/2} A D^{-1/2}; throws ZeroDegreeError.
  static SymmetricOperator normalized_adjacency(const Graph& g);

  std::size_t size() const;
  void apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const;
  Eigen::MatrixXd to_dense() const;

 private:
  SymmetricOperator() = default;
  const Graph* graph_ = nullptr;
  std::vector<double> scale_;
  Eigen::MatrixXd dense_;
};

/// Dense D^{-1/2} A D^{-1/2}; throws ZeroDegreeError naming the first isolated node.
Eigen::MatrixXd normalize_adjacency(const Graph& g);

/// Diagonal of D^{-1/2}.
std::vector<double> inverse_sqrt_degrees(const Graph& g);

EigenPairs top_k_eigenpairs(const Eigen::MatrixXd& m, std::size_t k, const SolverOptions& opts = {});
EigenPairs top_k_eigenpairs(const SymmetricOperator& op, std::size_t k, const SolverOptions& opts = {});

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace specclust::eig
