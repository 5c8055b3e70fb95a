#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "specclust/clustering.hpp"
#include "specclust/config.hpp"
#include "specclust/linkpred.hpp"
#include "specclust/metrics.hpp"
#include "specclust/sbm.hpp"

namespace specclust::experiments {

/// First line of every CSV we write: "# specclust <table> v<version>".
void write_schema_line(std::ostream& out, const std::string& table, int version);

// ---- ratio surface -------------------------------------------------------

struct RatioSurfaceRow {
  double alpha = 0;
  double x = 0;  // gamma / alpha
  double sparse_limit = 0;
  double dense_ratio = 0;  // from the finite-density formulas at n
  bool skipped = false;
  std::string note;
};

std::vector<RatioSurfaceRow> run_ratio_surface(const ExperimentConfig& cfg);
void write_ratio_surface(std::ostream& out, const std::vector<RatioSurfaceRow>& rows, const ExperimentConfig& cfg);
/// Largest dense_ratio over rows that were not skipped.
double max_dense_ratio(const std::vector<RatioSurfaceRow>& rows);

// ---- misclassification sweeps -------------------------------------------

/// How a model fitted on the training graph labels the test graph.
/// Procrustes: embed the test graph, rotate it onto the training embedding
/// over shared nodes, run kmeans from the training centers.
/// Refit: cluster the test graph from scratch.
enum class Transfer { Procrustes, Refit };
Transfer parse_transfer(const std::string& text);

struct TransferOutcome {
  double error = 0.5;
  bool skipped = false;
  double train_lcc_fraction = 0;
  double test_lcc_fraction = 0;
};

TransferOutcome train_test_error(const sbm::SampledGraph& train, const sbm::SampledGraph& test, bool normalized,
                                 std::uint64_t seed, Transfer rule, double lcc_fraction = 0.95,
                                 const cluster::SpectralOptions& opts = {});

struct SweepRow {
  std::size_t cell = 0;
  std::size_t n = 0;
  double pi = 0, alpha = 0, beta = 0, gamma = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;  // replicate seed; train/test/kmeans seeds derive from it
  std::string method;
  double error = 0;
  bool skipped = false;
  double train_lcc_fraction = 0;
  double test_lcc_fraction = 0;
};

struct SweepSummary {
  std::size_t cell = 0;
  std::size_t n = 0;
  double alpha = 0, gamma = 0;
  std::string method;
  double mean_error = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Cells of a sweep config in output order.
std::vector<sbm::BlockModelParams> sweep_cells(const ExperimentConfig& cfg);
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const cluster::SpectralOptions& opts = {});
std::vector<SweepSummary> summarize_sweep(const std::vector<SweepRow>& rows);
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows, const ExperimentConfig& cfg);
void write_sweep_summary(std::ostream& out, const std::vector<SweepSummary>& summary, const ExperimentConfig& cfg);

// ---- analytic accuracy ---------------------------------------------------

struct AccuracyCell {
  sbm::BlockModelParams params;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string note;
  /// |lambda_2| over the noise edge 2 sqrt(n rho (1 - rho)).
  double separation = 0;
  metrics::ComparisonTable table;
};

struct AccuracyReport {
  std::vector<AccuracyCell> cells;
  metrics::ErrorSummary d11;
  metrics::ErrorSummary d12;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

std::vector<sbm::BlockModelParams> accuracy_cells(const ExperimentConfig& cfg);
AccuracyReport run_analytic_accuracy(const ExperimentConfig& cfg);
void write_analytic_accuracy(std::ostream& out, const AccuracyReport& report, const ExperimentConfig& cfg);

// ---- single-model replicate study (zero-comm) -----------------------------

struct ReplicateStudy {
  metrics::ComparisonTable table;
  double median_unnorm_over_norm_d11 = 0;
  double median_norm_over_unnorm_d11 = 0;
  double median_unnorm_over_norm_d12 = 0;
  double median_norm_over_unnorm_d12 = 0;
};

ReplicateStudy run_replicate_study(const sbm::BlockModelParams& params, std::uint64_t seed, std::size_t replicates);
ReplicateStudy run_zero_comm(const ExperimentConfig& cfg);
void write_replicate_study(std::ostream& out, const ReplicateStudy& study, const ExperimentConfig& cfg);

// ---- link prediction -----------------------------------------------------

struct LinkPredRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string mode;
  int k_chosen = 0;
  double auc = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t nodes = 0;
};

/// Normalized, unnormalized and Katz on each replicate. With a manifest the
/// same snapshots are reused under replicate seeds; otherwise each replicate
/// draws its own synthetic stream.
std::vector<LinkPredRow> run_linkpred(const ExperimentConfig& cfg);
void write_linkpred(std::ostream& out, const std::vector<LinkPredRow>& rows, const ExperimentConfig& cfg);

}  // namespace specclust::experiments
