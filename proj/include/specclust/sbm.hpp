#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "specclust/graph.hpp"

namespace specclust::sbm {

class DegenerateModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two-class blockmodel (n, pi, alpha, beta, gamma). Nodes 0..n1-1 form class
/// 1 (label 0), the rest class 2 (label 1). n1 = round(n * pi) and every
/// downstream formula uses the realized fraction n1 / n.
class BlockModelParams {
 public:
  BlockModelParams(std::size_t n, double pi, double alpha, double beta, double gamma);

  std::size_t n() const { return n_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n_ - n1_; }
  /// Realized class-1 fraction n1 / n.
  double pi() const { return static_cast<double>(n1_) / static_cast<double>(n_); }
  double requested_pi() const { return requested_pi_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  double rho() const;
  /// alpha * beta == gamma^2: rank-one expectation.
  bool degenerate() const;
  /// log n / (n rho); small values mean the semi-sparse regime.
  double sparsity_diagnostic() const;

  /// Parameters with the class roles exchanged (pi -> 1 - pi, alpha <-> beta).
  BlockModelParams swapped() const;

  std::string describe() const;

 private:
  std::size_t n_;
  std::size_t n1_;
  double requested_pi_;
  double alpha_;
  double beta_;
  double gamma_;
};

/// Expected degree over n for each class and overall.
struct PopulationDensities {
  double mu1;
  double mu2;
  double mu;
};

PopulationDensities densities(const BlockModelParams& p);

/// Closed-form leading spectra of P and of D^{-1/2} P D^{-1/2} (expected
/// degrees). Eigenvectors are blockwise constant: entry x_k on class 1,
/// y_k on class 2.
struct PopulationSpectrum {
  double lambda1, lambda2;
  double x1, x2, y1, y2;
  double nu1, nu2;
  double xt1, xt2, yt1, yt2;

  /// Length-n vector of eigenvector `index` (0 or 1) of P or of the normalized matrix.
  Eigen::VectorXd vector(const BlockModelParams& p, int index, bool normalized) const;
};

struct SampledGraph {
  Graph graph;
  NodeLabeling labels;
};

/// Draws one graph. Pairs are visited in row-major order of the upper
/// triangle, one uniform per pair, so output is a pure function of (params, seed).
SampledGraph sample(const BlockModelParams& p, std::uint64_t seed);

/// Class labels alone (0 for the first n1 nodes, 1 after).
NodeLabeling planted_labels(const BlockModelParams& p);

/// Dense P with zero diagonal. Throws for n > 10^4.
Eigen::MatrixXd population_matrix(const BlockModelParams& p);
/// D^{-1/2} P D^{-1/2} with D the expected degrees n mu1 / n mu2.
Eigen::MatrixXd population_matrix_normalized(const BlockModelParams& p);

/// Two leading eigenvalues of the 2x2 reduced form of P (largest magnitude
/// first). Defined for every parameter set, degenerate ones included.
std::pair<double, double> reduced_eigenvalues(const BlockModelParams& p);

/// Throws DegenerateModelError when alpha beta = gamma^2, except for the
/// block-diagonal gamma = 0 case (canonical class-indicator eigenvectors).
PopulationSpectrum population_spectrum(const BlockModelParams& p);

/// Asymptotic within-class spread (d11) and centre distance (d12) for both
/// pipelines. Class-2 quantities come from the same formulas with class
/// roles swapped.
struct AnalyticDistances {
  double d11_sq_unnorm;
  double d12_sq_unnorm;
  double d11_sq_norm;
  double d12_sq_norm;
  double ratio_d11;  // d11_sq_norm / d11_sq_unnorm
  double d22_sq_unnorm;
  double d21_sq_unnorm;
  double d22_sq_norm;
  double d21_sq_norm;
  double ratio_d22;
  bool zero_communication;  // gamma == 0 route
};

AnalyticDistances analytic_distances(const BlockModelParams& p);

/// Limit of the normalized / unnormalized within-class spread ratio for
/// pi = 1/2, alpha = beta, gamma = x alpha as the density goes to zero.
double sparse_limit_ratio(double x);

/// Guess for the second eigenvector of the normalized adjacency: sqrt(d_i)/E1
/// on class 1 and -sqrt(d_i)/E2 on class 2, E_c the total degree of class c.
Eigen::VectorXd guess_vector_ug0(const Graph& g, const NodeLabeling& labels);

}  // namespace specclust::sbm
