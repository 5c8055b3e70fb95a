#include <map>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "specclust/kernels.hpp"
#include "specclust/sbm.hpp"

using namespace specclust;

namespace {

const Graph& bench_graph(std::size_t n) {
  static std::map<std::size_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const double p = 20.0 / static_cast<double>(n);
    it = cache.emplace(n, sbm::sample(sbm::BlockModelParams(n, 0.5, p, p, p / 4), 7).graph).first;
  }
  return it->second;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
  return m;
}

template <auto Apply>
void BM_adjacency_apply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& g = bench_graph(n);
  std::vector<double> scale(n, 0.5);
  const Eigen::MatrixXd x = random_matrix(static_cast<Eigen::Index>(n), 12, 1);
  Eigen::MatrixXd y;
  for (auto _ : state) {
    Apply(g, scale, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.edge_count()));
}

template <auto Assign>
void BM_assign_nearest(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd points = random_matrix(n, 10, 2);
  const Eigen::MatrixXd centers = random_matrix(50, 10, 3);
  std::vector<int> labels;
  std::vector<double> dist;
  for (auto _ : state) {
    Assign(points, centers, labels, dist);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <auto Project>
void BM_project_out(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(n, 24, 4))
                                    .householderQ() * Eigen::MatrixXd::Identity(n, 24);
  const Eigen::MatrixXd x0 = random_matrix(n, 12, 5);
  Eigen::MatrixXd x;
  for (auto _ : state) {
    x = x0;
    Project(basis, 24, x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(BM_adjacency_apply<kernels::serial::adjacency_apply>)->Name("adjacency_apply/serial")->Arg(5000)->Arg(20000);
BENCHMARK(BM_adjacency_apply<kernels::parallel::adjacency_apply>)->Name("adjacency_apply/parallel")->Arg(5000)->Arg(20000);
BENCHMARK(BM_assign_nearest<kernels::serial::assign_nearest>)->Name("assign_nearest/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_assign_nearest<kernels::parallel::assign_nearest>)->Name("assign_nearest/parallel")->Arg(10000)->Arg(100000);
BENCHMARK(BM_project_out<kernels::serial::project_out>)->Name("project_out/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_project_out<kernels::parallel::project_out>)->Name("project_out/parallel")->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
