#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "specclust/eigensolver.hpp"
#include "specclust/sbm.hpp"
#include "support.hpp"

using namespace specclust;
using eig::Backend;

namespace {

void check_pair_invariants(const eig::EigenPairs& p) {
  const auto k = p.values.size();
  for (Eigen::Index i = 0; i + 1 < k; ++i) CHECK(std::abs(p.values(i)) >= std::abs(p.values(i + 1)) - 1e-12);
  const Eigen::MatrixXd gram = p.vectors.transpose() * p.vectors;
  for (Eigen::Index i = 0; i < k; ++i) {
    CHECK(std::abs(gram(i, i) - 1) <= 1e-10);
    for (Eigen::Index j = 0; j < i; ++j) CHECK(std::abs(gram(i, j)) <= 1e-8);
    Eigen::Index arg = 0;
    p.vectors.col(i).cwiseAbs().maxCoeff(&arg);
    CHECK(p.vectors(arg, i) > 0);
  }
}

Graph connected_sbm(std::size_t n, double a, double b, double g, std::uint64_t seed) {
  return largest_connected_component(sbm::sample(sbm::BlockModelParams(n, 0.5, a, b, g), seed).graph).graph;
}

}  // namespace

TEST_CASE("normalize_adjacency") {
  SUBCASE("single edge") {
    const auto m = eig::normalize_adjacency(testing::make_graph(2, {{0, 1}}));
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(0, 0) == 0.0);
  }
  SUBCASE("triangle") {
    const auto m = eig::normalize_adjacency(testing::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(m(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
  }
  SUBCASE("star") {
    const auto m = eig::normalize_adjacency(testing::make_graph(4, {{0, 1}, {0, 2}, {0, 3}}));
    for (int leaf = 1; leaf < 4; ++leaf) CHECK(m(0, leaf) == doctest::Approx(1 / std::sqrt(3.0)));
  }
  SUBCASE("an isolated node is named in the error") {
    try {
      eig::normalize_adjacency(testing::make_graph(3, {{0, 2}}));
      FAIL("expected ZeroDegreeError");
    } catch (const eig::ZeroDegreeError& e) {
      CHECK(e.node() == 1);
    }
  }
}

TEST_CASE("top_k_eigenpairs on small matrices") {
  for (auto backend : {Backend::Dense, Backend::Krylov}) {
    CAPTURE(static_cast<int>(backend));
    SUBCASE("2x2 swap matrix") {
      Eigen::MatrixXd m(2, 2);
      m << 0, 1, 1, 0;
      const auto p = eig::top_k_eigenpairs(m, 2, {.backend = backend});
      CHECK(p.values(0) == doctest::Approx(1.0));
      CHECK(p.values(1) == doctest::Approx(-1.0));
      const double r = 1 / std::sqrt(2.0);
      CHECK(p.vectors(0, 0) == doctest::Approx(r));
      CHECK(p.vectors(1, 0) == doctest::Approx(r));
      CHECK(std::abs(p.vectors(0, 1)) == doctest::Approx(r));
      CHECK(p.vectors(0, 1) == doctest::Approx(-p.vectors(1, 1)));
      check_pair_invariants(p);
    }
    SUBCASE("diagonal") {
      const Eigen::MatrixXd m = Eigen::Vector3d(3, 2, 1).asDiagonal();
      const auto p = eig::top_k_eigenpairs(m, 2, {.backend = backend});
      CHECK(p.values(0) == doctest::Approx(3.0));
      CHECK(p.values(1) == doctest::Approx(2.0));
      CHECK(p.all_converged());
    }
    SUBCASE("negative eigenvalue of larger magnitude comes first") {
      const Eigen::MatrixXd m = Eigen::Vector4d(1, -5, 2, 0.5).asDiagonal();
      const auto p = eig::top_k_eigenpairs(m, 2, {.backend = backend});
      CHECK(p.values(0) == doctest::Approx(-5.0));
      CHECK(p.values(1) == doctest::Approx(2.0));
    }
  }
}

TEST_CASE("leading pair of the normalized adjacency") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = connected_sbm(300, 0.05, 0.04, 0.01, seed);
    double total = 0;
    for (auto d : g.degrees()) total += static_cast<double>(d);
    Eigen::VectorXd expected(static_cast<Eigen::Index>(g.node_count()));
    for (NodeId i = 0; i < g.node_count(); ++i) expected(i) = std::sqrt(static_cast<double>(g.degree(i)) / total);
    for (auto backend : {Backend::Dense, Backend::Krylov}) {
      const auto p = eig::top_k_eigenpairs(eig::SymmetricOperator::normalized_adjacency(g), 4, {.backend = backend});
      CHECK(std::abs(p.values(0) - 1) <= 1e-8);
      CHECK((p.vectors.col(0) - expected).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(p.values.cwiseAbs().maxCoeff() <= 1 + 1e-8);
    }
  }
}

TEST_CASE("converged pairs meet the residual tolerance on sampled graphs") {
  Rng rng(5);
  for (int draw = 0; draw < 200; ++draw) {
    const double a = 0.02 + 0.1 * rng.uniform(), b = 0.02 + 0.1 * rng.uniform(), g = 0.1 * rng.uniform();
    const auto graph = connected_sbm(150 + rng.below(100), a, b, g, rng.next());
    const auto backend = draw % 2 == 0 ? Backend::Dense : Backend::Krylov;
    for (bool normalized : {false, true}) {
      const auto op = normalized ? eig::SymmetricOperator::normalized_adjacency(graph)
                                 : eig::SymmetricOperator::adjacency(graph);
      const auto p = eig::top_k_eigenpairs(op, 3, {.backend = backend});
      check_pair_invariants(p);
      const double scale = p.values.cwiseAbs().maxCoeff();
      Eigen::MatrixXd av;
      op.apply(p.vectors, av);
      for (Eigen::Index i = 0; i < 3; ++i) {
        if (!p.converged[static_cast<std::size_t>(i)]) continue;
        const double res = (av.col(i) - p.values(i) * p.vectors.col(i)).norm();
        CHECK(res <= eig::kConvergedTolerance * scale);
      }
    }
  }
}

TEST_CASE("both backends match a full dense decomposition") {
  Rng rng(17);
  for (int draw = 0; draw < 20; ++draw) {
    const auto graph = connected_sbm(120 + rng.below(80), 0.08, 0.06, 0.02 + 0.02 * rng.uniform(), rng.next());
    for (bool normalized : {false, true}) {
      const Eigen::MatrixXd m = normalized ? eig::normalize_adjacency(graph) : graph.dense_adjacency();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
        return std::abs(full.eigenvalues()(x)) > std::abs(full.eigenvalues()(y));
      });
      for (std::size_t k : {2, 4}) {
        // Compare only where the k-th magnitude is separated from the next.
        const double kth = std::abs(full.eigenvalues()(order[k - 1]));
        const double next = std::abs(full.eigenvalues()(order[k]));
        if (kth - next < 1e-6 * kth) continue;
        Eigen::MatrixXd oracle(m.rows(), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) oracle.col(static_cast<Eigen::Index>(i)) = full.eigenvectors().col(order[i]);
        for (auto backend : {Backend::Dense, Backend::Krylov}) {
          const auto p = eig::top_k_eigenpairs(m, k, {.backend = backend});
          for (std::size_t i = 0; i < k; ++i)
            CHECK(std::abs(p.values(static_cast<Eigen::Index>(i)) - full.eigenvalues()(order[i])) <= 1e-8);
          CHECK(eig::max_principal_angle(p.vectors, oracle) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("zero communication marks the repeated unit eigenvalue") {
  const auto g = testing::cliques({30, 30});
  const auto p = eig::top_k_eigenpairs(eig::SymmetricOperator::normalized_adjacency(g), 2);
  CHECK(p.values(0) == doctest::Approx(1.0));
  CHECK(p.values(1) == doctest::Approx(1.0));
  CHECK(p.degenerate_with_next[0]);
  CHECK(p.any_degenerate());
}

TEST_CASE("solver output is reproducible") {
  const auto g = connected_sbm(600, 0.03, 0.03, 0.005, 9);
  const auto op = eig::SymmetricOperator::adjacency(g);
  const auto a = eig::top_k_eigenpairs(op, 3, {.backend = Backend::Krylov});
  const auto b = eig::top_k_eigenpairs(op, 3, {.backend = Backend::Krylov});
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("principal angle") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 1), b = Eigen::MatrixXd::Zero(3, 1);
  a(0, 0) = 1;
  b(1, 0) = 1;
  CHECK(eig::max_principal_angle(a, a) == doctest::Approx(0.0));
  CHECK(eig::max_principal_angle(a, b) == doctest::Approx(std::acos(0.0)));
}
