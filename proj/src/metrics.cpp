#include "specclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "specclust/rng.hpp"

namespace specclust::metrics {

QualityMetrics quality_metrics(const Eigen::MatrixXd& coords, const NodeLabeling& truth) {
  if (truth.class_count() != 2) throw std::invalid_argument("quality_metrics: truth must have exactly two classes");
  if (static_cast<std::size_t>(coords.rows()) != truth.node_count()) {
    throw std::invalid_argument("quality_metrics: embedding rows do not match labeling");
  }
  const auto& sizes = truth.class_sizes();
  if (sizes[0] == 0 || sizes[1] == 0) throw std::invalid_argument("quality_metrics: empty class");

  const auto dim = coords.cols();
  Eigen::VectorXd center[2] = {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  for (Eigen::Index i = 0; i < coords.rows(); ++i) center[truth[i]] += coords.row(i).transpose();
  for (int c = 0; c < 2; ++c) center[c] /= static_cast<double>(sizes[c]);

  double sum[2][2] = {{0, 0}, {0, 0}};
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const int c = truth[i];
    for (int l = 0; l < 2; ++l) sum[c][l] += (coords.row(i).transpose() - center[l]).squaredNorm();
  }
  QualityMetrics q;
  q.d11_sq = sum[0][0] / static_cast<double>(sizes[0]);
  q.d12_sq = sum[0][1] / static_cast<double>(sizes[0]);
  q.d21_sq = sum[1][0] / static_cast<double>(sizes[1]);
  q.d22_sq = sum[1][1] / static_cast<double>(sizes[1]);
  q.K1 = center[0];
  q.K2 = center[1];
  q.center_gap_sq = (center[0] - center[1]).squaredNorm();
  return q;
}

QualityMetrics quality_metrics(const cluster::SpectralEmbedding& embedding, const NodeLabeling& truth) {
  return quality_metrics(embedding.coords, truth);
}

ResidualDecomposition residual_decomposition(const Eigen::VectorXd& population_vec,
                                             const Eigen::VectorXd& empirical_vec, const NodeLabeling& truth) {
  if (population_vec.size() != empirical_vec.size() ||
      static_cast<std::size_t>(population_vec.size()) != truth.node_count()) {
    throw std::invalid_argument("residual_decomposition: length mismatch");
  }
  if (std::abs(population_vec.norm() - 1) > 1e-8 || std::abs(empirical_vec.norm() - 1) > 1e-8) {
    throw std::invalid_argument("residual_decomposition: inputs must be unit vectors");
  }
  ResidualDecomposition out;
  Eigen::VectorXd vhat = empirical_vec;
  out.c = population_vec.dot(vhat);
  if (out.c < 0) {
    vhat = -vhat;
    out.c = -out.c;
  }
  out.r = population_vec - out.c * vhat;
  out.r_norm_sq = out.r.squaredNorm();
  out.r_class_means.assign(static_cast<std::size_t>(truth.class_count()), 0.0);
  for (Eigen::Index i = 0; i < out.r.size(); ++i) out.r_class_means[truth[i]] += out.r(i);
  for (std::size_t c = 0; c < out.r_class_means.size(); ++c) {
    if (truth.class_sizes()[c] > 0) out.r_class_means[c] /= static_cast<double>(truth.class_sizes()[c]);
  }
  return out;
}

double misclassification_rate(const std::vector<int>& predicted, const NodeLabeling& truth) {
  if (predicted.size() != truth.node_count()) {
    throw std::invalid_argument("misclassification_rate: labelings cover different node counts");
  }
  if (predicted.empty()) return 0.0;
  const int kp = *std::max_element(predicted.begin(), predicted.end()) + 1;
  const int k = std::max(kp, truth.class_count());
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0) throw std::invalid_argument("misclassification_rate: negative label");
    cost(predicted[i], truth[i]) -= 1.0;
  }
  const auto match = cluster::hungarian(cost);
  double agree = 0;
  for (int r = 0; r < k; ++r) agree -= cost(r, match[r]);
  return 1.0 - agree / static_cast<double>(predicted.size());
}

double misclassification_rate(const NodeLabeling& predicted, const NodeLabeling& truth) {
  return misclassification_rate(predicted.labels(), truth);
}

EigDeviationReport eigenvalue_deviation(const Graph& g, const sbm::BlockModelParams& params,
                                        const eig::SolverOptions& solver) {
  if (g.node_count() != params.n()) throw std::invalid_argument("eigenvalue_deviation: graph size differs from n");
  EigDeviationReport rep;
  rep.degenerate_model = params.degenerate();
  if (rep.degenerate_model) {
    rep.warning = "alpha*beta == gamma^2: second population eigenvalue is zero and the deviation is not sharp";
  }
  const auto [l1, l2] = sbm::reduced_eigenvalues(params);
  auto pairs = eig::top_k_eigenpairs(eig::SymmetricOperator::adjacency(g), 2, solver);
  rep.sqrt_nrho = std::sqrt(static_cast<double>(params.n()) * params.rho());
  rep.population[0] = l1;
  rep.population[1] = l2;
  for (int i = 0; i < 2; ++i) {
    rep.empirical[i] = pairs.values(i);
    rep.deviation[i] = rep.empirical[i] - rep.population[i];
    rep.deviation_over_sqrt_nrho[i] = rep.sqrt_nrho > 0 ? rep.deviation[i] / rep.sqrt_nrho : 0.0;
  }
  return rep;
}

ErrorSummary summarize(std::vector<double> values) {
  ErrorSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double total = 0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.max = values.back();
  return s;
}

ErrorSummary ComparisonTable::d11_error() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.rel_err_d11);
  return summarize(std::move(v));
}

ErrorSummary ComparisonTable::d12_error() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.rel_err_d12);
  return summarize(std::move(v));
}

void ComparisonTable::write_csv_header(std::ostream& out) {
  out << "n,pi,alpha,beta,gamma,replicate,seed,nodes_used,d11_unnorm,d11_norm,d12_unnorm,d12_norm,"
         "emp_ratio_d11,an_ratio_d11,rel_err_d11,emp_ratio_d12,an_ratio_d12,rel_err_d12\n";
}

void ComparisonTable::write_csv_rows(std::ostream& out) const {
  const auto old = out.precision(17);
  for (const auto& r : rows) {
    out << params.n() << ',' << params.pi() << ',' << params.alpha() << ',' << params.beta() << ','
        << params.gamma() << ',' << r.replicate << ',' << r.seed << ',' << r.nodes_used << ',' << r.emp_d11_unnorm
        << ',' << r.emp_d11_norm << ',' << r.emp_d12_unnorm << ',' << r.emp_d12_norm << ',' << r.emp_ratio_d11 << ','
        << r.an_ratio_d11 << ',' << r.rel_err_d11 << ',' << r.emp_ratio_d12 << ',' << r.an_ratio_d12 << ','
        << r.rel_err_d12 << '\n';
  }
  out.precision(old);
}

PipelineMetrics measure_pipelines(const Graph& g, const NodeLabeling& truth, const eig::SolverOptions& solver) {
  const auto deg = g.degrees();
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (deg[v] > 0) keep.push_back(v);
  }
  auto sub = induced_subgraph(g, keep);
  auto labels = truth.restrict_to(sub);
  PipelineMetrics out;
  out.nodes_used = sub.graph.node_count();
  auto unnorm = cluster::spectral_embedding(sub.graph, 2, false, solver);
  auto norm = cluster::spectral_embedding(sub.graph, 2, true, solver);
  out.unnormalized = quality_metrics(unnorm, labels);
  out.normalized = quality_metrics(norm, labels);
  return out;
}

ComparisonTable empirical_vs_analytic(const sbm::BlockModelParams& params, std::uint64_t seed,
                                      std::size_t replicates, const eig::SolverOptions& solver) {
  const auto analytic = sbm::analytic_distances(params);
  const double an_d12 = analytic.d12_sq_norm / analytic.d12_sq_unnorm;
  ComparisonTable table{params, std::vector<ReplicateComparison>(replicates)};
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < replicates; ++r) {
    auto& row = table.rows[r];
    row.replicate = r;
    row.seed = xor_seed(seed, r);
    const auto drawn = sbm::sample(params, row.seed);
    const auto m = measure_pipelines(drawn.graph, drawn.labels, solver);
    row.nodes_used = m.nodes_used;
    row.emp_d11_unnorm = m.unnormalized.d11_sq;
    row.emp_d11_norm = m.normalized.d11_sq;
    row.emp_d12_unnorm = m.unnormalized.d12_sq;
    row.emp_d12_norm = m.normalized.d12_sq;
    row.emp_ratio_d11 = row.emp_d11_norm / row.emp_d11_unnorm;
    row.emp_ratio_d12 = row.emp_d12_norm / row.emp_d12_unnorm;
    row.an_ratio_d11 = analytic.ratio_d11;
    row.an_ratio_d12 = an_d12;
    row.rel_err_d11 = std::abs(row.emp_ratio_d11 - row.an_ratio_d11) / std::abs(row.an_ratio_d11);
    row.rel_err_d12 = std::abs(row.emp_ratio_d12 - row.an_ratio_d12) / std::abs(row.an_ratio_d12);
  }
  return table;
}

}  // namespace specclust::metrics
