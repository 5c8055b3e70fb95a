#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specclust/clustering.hpp"
#include "specclust/eigensolver.hpp"
#include "specclust/graph.hpp"
#include "specclust/sbm.hpp"

namespace specclust::metrics {

/// Oracle-centre distances of a two-class embedding. K1, K2 are the true
/// class means of the embedding rows; d_cl_sq is the mean squared distance
/// of class-c rows to K_l.
struct QualityMetrics {
  double d11_sq = 0;
  double d12_sq = 0;
  double d21_sq = 0;
  double d22_sq = 0;
  Eigen::VectorXd K1;
  Eigen::VectorXd K2;
  double center_gap_sq = 0;
};

QualityMetrics quality_metrics(const Eigen::MatrixXd& coords, const NodeLabeling& truth);
QualityMetrics quality_metrics(const cluster::SpectralEmbedding& embedding, const NodeLabeling& truth);

/// v = c v_hat + r with the sign of v_hat chosen so that c >= 0.
struct ResidualDecomposition {
  double c = 0;
  Eigen::VectorXd r;
  double r_norm_sq = 0;
  std::vector<double> r_class_means;
};

ResidualDecomposition residual_decomposition(const Eigen::VectorXd& population_vec,
                                             const Eigen::VectorXd& empirical_vec, const NodeLabeling& truth);

/// Smallest disagreement fraction over all matchings of predicted clusters
/// to true classes.
double misclassification_rate(const NodeLabeling& predicted, const NodeLabeling& truth);
double misclassification_rate(const std::vector<int>& predicted, const NodeLabeling& truth);

struct EigDeviationReport {
  double empirical[2] = {0, 0};
  double population[2] = {0, 0};
  double deviation[2] = {0, 0};
  double deviation_over_sqrt_nrho[2] = {0, 0};
  double sqrt_nrho = 0;
  bool degenerate_model = false;
  std::string warning;
};

/// Leading two eigenvalues of A against the reduced-form population values.
EigDeviationReport eigenvalue_deviation(const Graph& g, const sbm::BlockModelParams& params,
                                        const eig::SolverOptions& solver = {});

/// Normalized vs unnormalized distances measured on one sampled graph.
struct ReplicateComparison {
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  std::size_t nodes_used = 0;
  double emp_d11_unnorm = 0, emp_d11_norm = 0, emp_d12_unnorm = 0, emp_d12_norm = 0;
  double emp_ratio_d11 = 0;  // normalized / unnormalized
  double emp_ratio_d12 = 0;
  double an_ratio_d11 = 0;
  double an_ratio_d12 = 0;
  double rel_err_d11 = 0;
  double rel_err_d12 = 0;
};

struct ErrorSummary {
  double mean = 0;
  double median = 0;
  double max = 0;
};

ErrorSummary summarize(std::vector<double> values);

struct ComparisonTable {
  sbm::BlockModelParams params;
  std::vector<ReplicateComparison> rows;

  ErrorSummary d11_error() const;
  ErrorSummary d12_error() const;
  static void write_csv_header(std::ostream& out);
  void write_csv_rows(std::ostream& out) const;
};

/// Both pipelines on one graph, after dropping isolated nodes (the
/// normalized operator is undefined there).
struct PipelineMetrics {
  QualityMetrics unnormalized;
  QualityMetrics normalized;
  std::size_t nodes_used = 0;
};
PipelineMetrics measure_pipelines(const Graph& g, const NodeLabeling& truth, const eig::SolverOptions& solver = {});

/// Replicate r samples with seed ^ r and compares empirical ratios against
/// the analytic ones.
ComparisonTable empirical_vs_analytic(const sbm::BlockModelParams& params, std::uint64_t seed,
                                      std::size_t replicates, const eig::SolverOptions& solver = {});

}  // namespace specclust::metrics
