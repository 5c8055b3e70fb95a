#include "specclust/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "specclust/rng.hpp"

namespace specclust::experiments {

void write_schema_line(std::ostream& out, const std::string& table, int version) {
  out << "# specclust " << table << " v" << version << '\n';
}

namespace {

double median(std::vector<double> v) { return metrics::summarize(std::move(v)).median; }

struct PrecisionGuard {
  std::ostream& out;
  std::streamsize old;
  explicit PrecisionGuard(std::ostream& o) : out(o), old(o.precision(17)) {}
  ~PrecisionGuard() { out.precision(old); }
};

}  // namespace

// ---- ratio surface -------------------------------------------------------

std::vector<RatioSurfaceRow> run_ratio_surface(const ExperimentConfig& cfg) {
  std::vector<RatioSurfaceRow> rows;
  for (double a : cfg.alpha_grid) {
    for (double x : cfg.ratio_grid) {
      RatioSurfaceRow row;
      row.alpha = a;
      row.x = x;
      row.sparse_limit = sbm::sparse_limit_ratio(x);
      const double g = x * a;
      if (a <= 0) {
        row.skipped = true;
        row.note = "alpha=0";
      } else if (g > 1) {
        row.skipped = true;
        row.note = "gamma>1";
      } else {
        const sbm::BlockModelParams p(cfg.n, cfg.pi, a, a, g);
        if (p.degenerate()) {
          row.skipped = true;
          row.note = "degenerate";
        } else {
          row.dense_ratio = sbm::analytic_distances(p).ratio_d11;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_ratio_surface(std::ostream& out, const std::vector<RatioSurfaceRow>& rows, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "ratio-surface", 1);
  out << "seed,n,pi,alpha,x,sparse_limit_ratio,dense_ratio,skipped,note\n";
  for (const auto& r : rows) {
    out << cfg.seed << ',' << cfg.n << ',' << cfg.pi << ',' << r.alpha << ',' << r.x << ',' << r.sparse_limit << ',';
    if (r.skipped) {
      out << "nan";
    } else {
      out << r.dense_ratio;
    }
    out << ',' << (r.skipped ? 1 : 0) << ',' << r.note << '\n';
  }
}

double max_dense_ratio(const std::vector<RatioSurfaceRow>& rows) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (!r.skipped) best = std::max(best, r.dense_ratio);
  }
  return best;
}

// ---- misclassification sweeps -------------------------------------------

Transfer parse_transfer(const std::string& text) {
  if (text == "procrustes") return Transfer::Procrustes;
  if (text == "refit") return Transfer::Refit;
  throw std::invalid_argument("unknown transfer rule '" + text + "'");
}

TransferOutcome train_test_error(const sbm::SampledGraph& train, const sbm::SampledGraph& test, bool normalized,
                                 std::uint64_t seed, Transfer rule, double lcc_fraction,
                                 const cluster::SpectralOptions& opts) {
  TransferOutcome out;
  const auto train_lcc = largest_connected_component(train.graph);
  const auto test_lcc = largest_connected_component(test.graph);
  out.train_lcc_fraction =
      static_cast<double>(train_lcc.graph.node_count()) / static_cast<double>(train.graph.node_count());
  out.test_lcc_fraction =
      static_cast<double>(test_lcc.graph.node_count()) / static_cast<double>(test.graph.node_count());
  if (out.train_lcc_fraction < lcc_fraction || out.test_lcc_fraction < lcc_fraction) {
    out.skipped = true;
    return out;
  }
  const auto truth = test.labels.restrict_to(test_lcc);

  if (rule == Transfer::Refit) {
    const auto fit = cluster::spectral_cluster(test_lcc.graph, 2, normalized, seed, opts);
    out.error = metrics::misclassification_rate(fit.assignment.labels, truth);
    return out;
  }

  const auto fit = cluster::spectral_cluster(train_lcc.graph, 2, normalized, seed, opts);
  const auto emb = cluster::spectral_embedding(test_lcc.graph, 2, normalized, opts.solver);
  std::vector<Eigen::Index> from_rows, to_rows;
  for (std::size_t t = 0; t < test_lcc.new_to_old.size(); ++t) {
    const NodeId r = train_lcc.old_to_new[test_lcc.new_to_old[t]];
    if (r == kNoNode) continue;
    from_rows.push_back(static_cast<Eigen::Index>(t));
    to_rows.push_back(static_cast<Eigen::Index>(r));
  }
  const Eigen::MatrixXd from = emb.coords(from_rows, Eigen::all);
  const Eigen::MatrixXd to = fit.embedding.coords(to_rows, Eigen::all);
  const Eigen::MatrixXd aligned = emb.coords * cluster::procrustes_rotation(from, to);
  const auto assigned = cluster::kmeans_from(aligned, fit.assignment.centers, opts.kmeans.max_iters);
  out.error = metrics::misclassification_rate(assigned.labels, truth);
  return out;
}

std::vector<sbm::BlockModelParams> sweep_cells(const ExperimentConfig& cfg) {
  std::vector<sbm::BlockModelParams> cells;
  if (cfg.kind == ExperimentKind::SweepN) {
    for (auto n : cfg.n_grid) cells.emplace_back(n, cfg.pi, cfg.alpha, cfg.beta, cfg.gamma);
    return cells;
  }
  for (double x : cfg.ratio_grid) {
    if (x == 1.0) continue;  // Erdos-Renyi, nothing to recover
    for (double a : cfg.alpha_grid) cells.emplace_back(cfg.n, cfg.pi, a, a, x * a);
  }
  return cells;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const cluster::SpectralOptions& opts) {
  const auto cells = sweep_cells(cfg);
  const auto rule = parse_transfer(cfg.transfer);
  const std::size_t tasks = cells.size() * cfg.replicates;
  std::vector<SweepRow> rows(2 * tasks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < tasks; ++t) {
    const std::size_t c = t / cfg.replicates, r = t % cfg.replicates;
    const auto& p = cells[c];
    const std::uint64_t seed = derive_seed(cfg.seed, {c, r});
    const auto train = sbm::sample(p, derive_seed(seed, {0}));
    const auto test = sbm::sample(p, derive_seed(seed, {1}));
    for (int m = 0; m < 2; ++m) {
      const bool normalized = m == 0;
      const auto o = train_test_error(train, test, normalized, derive_seed(seed, {2}), rule, cfg.lcc_fraction, opts);
      auto& row = rows[2 * t + m];
      row = SweepRow{c, p.n(), p.pi(), p.alpha(), p.beta(), p.gamma(), r, seed,
                     normalized ? "normalized" : "unnormalized", o.error, o.skipped, o.train_lcc_fraction,
                     o.test_lcc_fraction};
    }
  }
  return rows;
}

std::vector<SweepSummary> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::size_t, std::string>, SweepSummary> acc;
  for (const auto& r : rows) {
    auto& s = acc[{r.cell, r.method}];
    s.cell = r.cell;
    s.n = r.n;
    s.alpha = r.alpha;
    s.gamma = r.gamma;
    s.method = r.method;
    if (r.skipped) {
      ++s.skipped;
    } else {
      s.mean_error += r.error;
      ++s.used;
    }
  }
  std::vector<SweepSummary> out;
  for (auto& [key, s] : acc) {
    if (s.used > 0) s.mean_error /= static_cast<double>(s.used);
    out.push_back(s);
  }
  return out;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "sweep", 1);
  out << "base_seed,cell,n,pi,alpha,beta,gamma,replicate,seed,method,transfer,error,skipped,train_lcc,test_lcc\n";
  for (const auto& r : rows) {
    out << cfg.seed << ',' << r.cell << ',' << r.n << ',' << r.pi << ',' << r.alpha << ',' << r.beta << ',' << r.gamma
        << ',' << r.replicate << ',' << r.seed << ',' << r.method << ',' << cfg.transfer << ',';
    if (r.skipped) {
      out << "nan";
    } else {
      out << r.error;
    }
    out << ',' << (r.skipped ? 1 : 0) << ',' << r.train_lcc_fraction << ',' << r.test_lcc_fraction << '\n';
  }
}

void write_sweep_summary(std::ostream& out, const std::vector<SweepSummary>& summary, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "sweep-summary", 1);
  out << "base_seed,cell,n,alpha,gamma,method,mean_error,used,skipped\n";
  for (const auto& s : summary) {
    out << cfg.seed << ',' << s.cell << ',' << s.n << ',' << s.alpha << ',' << s.gamma << ',' << s.method << ','
        << s.mean_error << ',' << s.used << ',' << s.skipped << '\n';
  }
}

// ---- analytic accuracy ---------------------------------------------------

std::vector<sbm::BlockModelParams> accuracy_cells(const ExperimentConfig& cfg) {
  std::vector<sbm::BlockModelParams> cells;
  for (double a : cfg.alpha_grid) {
    for (double b : cfg.beta_grid) {
      for (double x : cfg.ratio_grid) {
        if (x * a > 1) continue;
        cells.emplace_back(cfg.n, cfg.pi, a, b, x * a);
      }
    }
  }
  return cells;
}

AccuracyReport run_analytic_accuracy(const ExperimentConfig& cfg) {
  AccuracyReport report;
  const auto params = accuracy_cells(cfg);
  for (std::size_t c = 0; c < params.size(); ++c) {
    const auto& p = params[c];
    AccuracyCell cell{p, derive_seed(cfg.seed, {c}), false, "", 0.0, metrics::ComparisonTable{p, {}}};
    const double rho = p.rho();
    const double edge = 2.0 * std::sqrt(static_cast<double>(p.n()) * rho * (1 - rho));
    cell.separation = edge > 0 ? std::abs(sbm::reduced_eigenvalues(p).second) / edge : 0.0;
    if (std::abs(p.alpha() * p.beta() - p.gamma() * p.gamma()) < 1e-6) {
      cell.skipped = true;
      cell.note = "degenerate";
    } else if (cell.separation < cfg.min_separation) {
      cell.skipped = true;
      cell.note = "weak-separation";
    }
    report.cells.push_back(std::move(cell));
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    auto& cell = report.cells[c];
    if (!cell.skipped) cell.table = metrics::empirical_vs_analytic(cell.params, cell.seed, cfg.replicates);
  }
  std::vector<double> e11, e12;
  for (const auto& cell : report.cells) {
    if (cell.skipped) {
      ++report.skipped;
      continue;
    }
    ++report.used;
    for (const auto& r : cell.table.rows) {
      e11.push_back(r.rel_err_d11);
      e12.push_back(r.rel_err_d12);
    }
  }
  report.d11 = metrics::summarize(std::move(e11));
  report.d12 = metrics::summarize(std::move(e12));
  return report;
}

void write_analytic_accuracy(std::ostream& out, const AccuracyReport& report, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "analytic-accuracy", 1);
  out << "kind,base_seed,cell,cell_seed,n,pi,alpha,beta,gamma,separation,replicate,seed,emp_ratio_d11,an_ratio_d11,"
         "rel_err_d11,emp_ratio_d12,an_ratio_d12,rel_err_d12,note\n";
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const auto& cell = report.cells[c];
    const auto& p = cell.params;
    auto prefix = [&](const char* kind) {
      out << kind << ',' << cfg.seed << ',' << c << ',' << cell.seed << ',' << p.n() << ',' << p.pi() << ','
          << p.alpha() << ',' << p.beta() << ',' << p.gamma() << ',' << cell.separation << ',';
    };
    if (cell.skipped) {
      prefix("skip");
      out << ",,,,,,,," << cell.note << '\n';
      continue;
    }
    for (const auto& r : cell.table.rows) {
      prefix("row");
      out << r.replicate << ',' << r.seed << ',' << r.emp_ratio_d11 << ',' << r.an_ratio_d11 << ',' << r.rel_err_d11
          << ',' << r.emp_ratio_d12 << ',' << r.an_ratio_d12 << ',' << r.rel_err_d12 << ",\n";
    }
  }
  out << "# summary: used_cells,skipped_cells,mean_d11,median_d11,max_d11,mean_d12,median_d12,max_d12\n";
  out << "summary," << cfg.seed << ',' << report.used << ',' << report.skipped << ',' << report.d11.mean << ','
      << report.d11.median << ',' << report.d11.max << ',' << report.d12.mean << ',' << report.d12.median << ','
      << report.d12.max << '\n';
}

// ---- replicate study -----------------------------------------------------

ReplicateStudy run_replicate_study(const sbm::BlockModelParams& params, std::uint64_t seed, std::size_t replicates) {
  ReplicateStudy s{metrics::empirical_vs_analytic(params, seed, replicates)};
  std::vector<double> a, b, c, d;
  for (const auto& r : s.table.rows) {
    a.push_back(r.emp_d11_unnorm / r.emp_d11_norm);
    b.push_back(r.emp_d11_norm / r.emp_d11_unnorm);
    c.push_back(r.emp_d12_unnorm / r.emp_d12_norm);
    d.push_back(r.emp_d12_norm / r.emp_d12_unnorm);
  }
  s.median_unnorm_over_norm_d11 = median(a);
  s.median_norm_over_unnorm_d11 = median(b);
  s.median_unnorm_over_norm_d12 = median(c);
  s.median_norm_over_unnorm_d12 = median(d);
  return s;
}

ReplicateStudy run_zero_comm(const ExperimentConfig& cfg) {
  return run_replicate_study(sbm::BlockModelParams(cfg.n, cfg.pi, cfg.alpha, cfg.beta, cfg.gamma), cfg.seed,
                             cfg.replicates);
}

void write_replicate_study(std::ostream& out, const ReplicateStudy& study, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "replicates", 1);
  metrics::ComparisonTable::write_csv_header(out);
  study.table.write_csv_rows(out);
  out << "# median over replicates (base seed " << cfg.seed
      << "): unnorm/norm d11, norm/unnorm d11, unnorm/norm d12, norm/unnorm d12\n";
  out << "# " << study.median_unnorm_over_norm_d11 << ',' << study.median_norm_over_unnorm_d11 << ','
      << study.median_unnorm_over_norm_d12 << ',' << study.median_norm_over_unnorm_d12 << '\n';
}

// ---- link prediction -----------------------------------------------------

std::vector<LinkPredRow> run_linkpred(const ExperimentConfig& cfg) {
  linkpred::LinkPredOptions opts;
  opts.sample_nodes = cfg.sample_nodes;
  opts.runs = cfg.runs;
  opts.k_grid = cfg.k_grid;

  std::vector<Graph> loaded;
  if (!cfg.snapshots.empty()) {
    NodeDictionary dict;
    const auto paths = linkpred::read_manifest(cfg.snapshots);
    loaded = linkpred::load_snapshots(paths, dict);
  }
  const std::optional<sbm::BlockModelParams> params =
      cfg.snapshots.empty() ? std::optional(sbm::BlockModelParams(cfg.n, cfg.pi, cfg.alpha, cfg.beta, cfg.gamma))
                            : std::nullopt;

  std::vector<LinkPredRow> rows(cfg.replicates * 6);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = xor_seed(cfg.seed, r);
    const auto snaps = params ? linkpred::sbm_snapshot_stream(*params, cfg.snapshot_count, cfg.persistence,
                                                              derive_seed(seed, {0}))
                              : loaded;
    const auto graphs = linkpred::prepare_protocol(snaps);
    const linkpred::ProtocolResult results[3] = {
        linkpred::evaluate_protocol(graphs, true, seed, opts),
        linkpred::evaluate_protocol(graphs, false, seed, opts),
        linkpred::evaluate_katz(graphs, cfg.katz_theta, seed, opts),
    };
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& res = results[m];
      for (std::size_t e = 0; e < 2; ++e) {
        const auto& ev = e == 0 ? res.included : res.excluded;
        rows[r * 6 + m * 2 + e] = LinkPredRow{r,         seed,         res.method,   linkpred::to_string(ev.mode),
                                              res.k_chosen, ev.auc,     ev.positives, ev.negatives,
                                              res.nodes};
      }
    }
  }
  return rows;
}

void write_linkpred(std::ostream& out, const std::vector<LinkPredRow>& rows, const ExperimentConfig& cfg) {
  PrecisionGuard guard(out);
  write_schema_line(out, "linkpred", 1);
  out << "method,mode,k_chosen,auc,seed,base_seed,replicate,positives,negatives,nodes\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.mode << ',' << r.k_chosen << ',' << r.auc << ',' << r.seed << ',' << cfg.seed << ','
        << r.replicate << ',' << r.positives << ',' << r.negatives << ',' << r.nodes << '\n';
  }
}

}  // namespace specclust::experiments
