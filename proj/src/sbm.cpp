#include "specclust/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specclust/rng.hpp"

namespace specclust::sbm {

namespace {

constexpr std::size_t kDenseLimit = 10000;

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
  }
}

// Unit eigenvector (p, q) of [[a, c], [c, b]] for eigenvalue lambda.
std::pair<double, double> eigvec2(double a, double b, double c, double lambda) {
  double p1 = c, q1 = lambda - a;
  double p2 = lambda - b, q2 = c;
  double n1 = std::hypot(p1, q1), n2 = std::hypot(p2, q2);
  if (n1 >= n2) return {p1 / n1, q1 / n1};
  return {p2 / n2, q2 / n2};
}

// Sign so that the per-node entry of largest magnitude is positive (x wins ties).
void orient(double& x, double& y) {
  const double lead = std::abs(x) >= std::abs(y) ? x : y;
  if (lead < 0) {
    x = -x;
    y = -y;
  }
}

double unnormalized_d11(const BlockModelParams& p, const PopulationSpectrum& s) {
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  const double a = p.alpha(), g = p.gamma();
  const double l1sq = s.lambda1 * s.lambda1, l2sq = s.lambda2 * s.lambda2;
  return (s.x1 * s.x1 / l1sq + s.x2 * s.x2 / l2sq) * n * pi * a * (1 - a) +
         (s.y1 * s.y1 / l1sq + s.y2 * s.y2 / l2sq) * n * (1 - pi) * g * (1 - g);
}

double normalized_d11(const BlockModelParams& p) {
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  const double a = p.alpha(), g = p.gamma();
  const auto d = densities(p);
  const double nu2 = 1.0 - g * d.mu / (d.mu1 * d.mu2);
  const double n3 = n * n * n;
  const double own = n * pi * a * (1 - a) / (n3 * pi * d.mu1 * d.mu1) * (0.25 + (1 - pi) * g / (d.mu1 * nu2 * nu2));
  const double cross = n * (1 - pi) * g * (1 - g) / (n3 * d.mu1 * d.mu1) *
                       (1.0 / (4 * pi) + pi * a / ((1 - pi) * d.mu2 * nu2 * nu2));
  return own + cross;
}

// Zero-communication route: class 1 is an Erdos-Renyi (m, q) graph with
// m = n1, q = alpha, and the squared residual norms are evaluated with
// sum_i dbar_i^2 at its expectation m (m - 1) q (1 - q).
std::pair<double, double> zero_comm_d11(std::size_t m, double q) {
  const double md = static_cast<double>(m);
  const double sum_dbar_sq = md * (md - 1) * q * (1 - q);
  const double r_unnorm = (sum_dbar_sq / md) / std::pow((md - 1) * q, 2);
  const double r_norm = (sum_dbar_sq / md) / (4 * md * (md - 1) * q * q);
  return {r_unnorm / md, r_norm / md};
}

}  // namespace

BlockModelParams::BlockModelParams(std::size_t n, double pi, double alpha, double beta, double gamma)
    : n_(n), requested_pi_(pi), alpha_(alpha), beta_(beta), gamma_(gamma) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(pi > 0.0 && pi < 1.0)) throw std::invalid_argument("pi must lie in (0,1)");
  check_probability(alpha, "alpha");
  check_probability(beta, "beta");
  check_probability(gamma, "gamma");
  const double n1 = std::round(static_cast<double>(n) * pi);
  if (n1 < 1 || n1 > static_cast<double>(n - 1)) {
    throw std::invalid_argument("n*pi rounds to an empty class");
  }
  n1_ = static_cast<std::size_t>(n1);
}

double BlockModelParams::rho() const { return std::max({alpha_, beta_, gamma_}); }

bool BlockModelParams::degenerate() const {
  return std::abs(alpha_ * beta_ - gamma_ * gamma_) <= 1e-14;
}

double BlockModelParams::sparsity_diagnostic() const {
  const double r = rho();
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(n_)) / (static_cast<double>(n_) * r);
}

BlockModelParams BlockModelParams::swapped() const {
  BlockModelParams out(*this);
  out.n1_ = n_ - n1_;
  out.requested_pi_ = 1.0 - requested_pi_;
  std::swap(out.alpha_, out.beta_);
  return out;
}

std::string BlockModelParams::describe() const {
  std::ostringstream os;
  os << "n=" << n_ << " n1=" << n1_ << " pi=" << pi() << " alpha=" << alpha_ << " beta=" << beta_
     << " gamma=" << gamma_;
  return os.str();
}

PopulationDensities densities(const BlockModelParams& p) {
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  PopulationDensities d{};
  d.mu1 = pi * p.alpha() + (1 - pi) * p.gamma() - p.alpha() / n;
  d.mu2 = pi * p.gamma() + (1 - pi) * p.beta() - p.beta() / n;
  d.mu = pi * d.mu1 + (1 - pi) * d.mu2;
  return d;
}

Eigen::VectorXd PopulationSpectrum::vector(const BlockModelParams& p, int index, bool normalized) const {
  double a = 0, b = 0;
  if (index == 0) {
    a = normalized ? xt1 : x1;
    b = normalized ? yt1 : y1;
  } else if (index == 1) {
    a = normalized ? xt2 : x2;
    b = normalized ? yt2 : y2;
  } else {
    throw std::out_of_range("population eigenvector index must be 0 or 1");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(p.n()));
  v.head(static_cast<Eigen::Index>(p.n1())).setConstant(a);
  v.tail(static_cast<Eigen::Index>(p.n2())).setConstant(b);
  return v;
}

NodeLabeling planted_labels(const BlockModelParams& p) {
  std::vector<int> labels(p.n(), 1);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(p.n1()), 0);
  return NodeLabeling(std::move(labels), 2);
}

SampledGraph sample(const BlockModelParams& p, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = p.n();
  const std::size_t n1 = p.n1();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = (j < n1) ? p.alpha() : (i >= n1 ? p.beta() : p.gamma());
      if (rng.uniform() < prob) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  return {Graph(n, std::move(edges)), planted_labels(p)};
}

Eigen::MatrixXd population_matrix(const BlockModelParams& p) {
  if (p.n() > kDenseLimit) throw std::invalid_argument("population_matrix: n exceeds dense limit of 10^4");
  const auto n = static_cast<Eigen::Index>(p.n());
  const auto n1 = static_cast<Eigen::Index>(p.n1());
  Eigen::MatrixXd m(n, n);
  m.topLeftCorner(n1, n1).setConstant(p.alpha());
  m.bottomRightCorner(n - n1, n - n1).setConstant(p.beta());
  m.topRightCorner(n1, n - n1).setConstant(p.gamma());
  m.bottomLeftCorner(n - n1, n1).setConstant(p.gamma());
  m.diagonal().setZero();
  return m;
}

Eigen::MatrixXd population_matrix_normalized(const BlockModelParams& p) {
  const auto d = densities(p);
  if (d.mu1 <= 0 || d.mu2 <= 0) {
    throw std::invalid_argument("population_matrix_normalized: a class has zero expected degree");
  }
  Eigen::MatrixXd m = population_matrix(p);
  const double n = static_cast<double>(p.n());
  Eigen::VectorXd s(m.rows());
  const auto n1 = static_cast<Eigen::Index>(p.n1());
  s.head(n1).setConstant(1.0 / std::sqrt(n * d.mu1));
  s.tail(m.rows() - n1).setConstant(1.0 / std::sqrt(n * d.mu2));
  return s.asDiagonal() * m * s.asDiagonal();
}

std::pair<double, double> reduced_eigenvalues(const BlockModelParams& p) {
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  const double a = n * pi * p.alpha();
  const double b = n * (1 - pi) * p.beta();
  const double c = n * std::sqrt(pi * (1 - pi)) * p.gamma();
  const double mid = 0.5 * (a + b);
  const double rad = std::hypot(0.5 * (a - b), c);
  double hi = mid + rad, lo = mid - rad;
  if (std::abs(lo) > std::abs(hi)) std::swap(hi, lo);
  return {hi, lo};
}

PopulationSpectrum population_spectrum(const BlockModelParams& p) {
  if (p.degenerate()) {
    throw DegenerateModelError("population_spectrum: alpha*beta == gamma^2 (rank-one expectation): " +
                               p.describe());
  }
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  const double a = n * pi * p.alpha();
  const double b = n * (1 - pi) * p.beta();
  const double c = n * std::sqrt(pi * (1 - pi)) * p.gamma();
  const double sx = std::sqrt(n * pi), sy = std::sqrt(n * (1 - pi));

  PopulationSpectrum s{};
  if (c == 0.0) {
    // Block diagonal: class indicators, larger |eigenvalue| first, class 1 on ties.
    if (std::abs(a) >= std::abs(b)) {
      s.lambda1 = a, s.x1 = 1 / sx, s.y1 = 0;
      s.lambda2 = b, s.x2 = 0, s.y2 = 1 / sy;
    } else {
      s.lambda1 = b, s.x1 = 0, s.y1 = 1 / sy;
      s.lambda2 = a, s.x2 = 1 / sx, s.y2 = 0;
    }
  } else {
    const auto [hi, lo] = reduced_eigenvalues(p);
    s.lambda1 = hi;
    s.lambda2 = lo;
    auto [p1, q1] = eigvec2(a, b, c, hi);
    auto [p2, q2] = eigvec2(a, b, c, lo);
    s.x1 = p1 / sx, s.y1 = q1 / sy;
    s.x2 = p2 / sx, s.y2 = q2 / sy;
    orient(s.x1, s.y1);
    orient(s.x2, s.y2);
  }

  const auto d = densities(p);
  if (d.mu1 <= 0 || d.mu2 <= 0) {
    throw std::invalid_argument("population_spectrum: a class has zero expected degree");
  }
  s.nu1 = 1.0;
  s.xt1 = std::sqrt(d.mu1 / (n * d.mu));
  s.yt1 = std::sqrt(d.mu2 / (n * d.mu));
  s.nu2 = 1.0 - p.gamma() * d.mu / (d.mu1 * d.mu2);
  s.xt2 = std::sqrt((1 - pi) * d.mu2 / (n * pi * d.mu));
  s.yt2 = -std::sqrt(pi * d.mu1 / (n * (1 - pi) * d.mu));
  return s;
}

AnalyticDistances analytic_distances(const BlockModelParams& p) {
  AnalyticDistances out{};
  const double n = static_cast<double>(p.n());
  const double pi = p.pi();
  const double center_gap = 1.0 / (n * pi * (1 - pi));
  out.d12_sq_unnorm = out.d12_sq_norm = center_gap;
  out.d21_sq_unnorm = out.d21_sq_norm = center_gap;

  if (p.gamma() == 0.0) {
    if (p.alpha() == 0.0 || p.beta() == 0.0) {
      throw DegenerateModelError("analytic_distances: gamma = 0 needs alpha, beta > 0: " + p.describe());
    }
    out.zero_communication = true;
    std::tie(out.d11_sq_unnorm, out.d11_sq_norm) = zero_comm_d11(p.n1(), p.alpha());
    std::tie(out.d22_sq_unnorm, out.d22_sq_norm) = zero_comm_d11(p.n2(), p.beta());
  } else {
    if (p.degenerate()) {
      throw DegenerateModelError("analytic_distances: alpha*beta == gamma^2: " + p.describe());
    }
    const auto q = p.swapped();
    out.d11_sq_unnorm = unnormalized_d11(p, population_spectrum(p));
    out.d11_sq_norm = normalized_d11(p);
    out.d22_sq_unnorm = unnormalized_d11(q, population_spectrum(q));
    out.d22_sq_norm = normalized_d11(q);
  }
  out.ratio_d11 = out.d11_sq_norm / out.d11_sq_unnorm;
  out.ratio_d22 = out.d22_sq_norm / out.d22_sq_unnorm;
  return out;
}

double sparse_limit_ratio(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("sparse_limit_ratio: x must be non-negative");
  return 0.25 + 1.5 * x / (1 + x * x);
}

Eigen::VectorXd guess_vector_ug0(const Graph& g, const NodeLabeling& labels) {
  if (labels.node_count() != g.node_count()) throw std::invalid_argument("guess_vector_ug0: labeling size mismatch");
  if (labels.class_count() != 2) throw std::invalid_argument("guess_vector_ug0: needs exactly two classes");
  double e1 = 0, e2 = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    (labels[i] == 0 ? e1 : e2) += static_cast<double>(g.degree(static_cast<NodeId>(i)));
  }
  if (e1 == 0 || e2 == 0) throw std::invalid_argument("guess_vector_ug0: a class has zero total degree");
  Eigen::VectorXd u(static_cast<Eigen::Index>(g.node_count()));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double root = std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(i))));
    u(static_cast<Eigen::Index>(i)) = labels[i] == 0 ? root / e1 : -root / e2;
  }
  return u;
}

}  // namespace specclust::sbm
