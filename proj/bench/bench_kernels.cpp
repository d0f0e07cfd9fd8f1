// Serial reference against OpenMP for each data-parallel kernel.

#include "obs/kernels.hpp"
#include "obs/shapes.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace obs;

namespace {

const mesh::SimplicialMesh& mesh_2d() {
  static const auto m = mesh::uniform_mesh(shapes::random_simplex(2, 1), 8);
  return m;
}

const mesh::SimplicialMesh& mesh_3d() {
  static const auto m = mesh::uniform_mesh(shapes::random_simplex(3, 1), 5);
  return m;
}

Eigen::MatrixXd gaussian(int rows, int cols) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = g(rng);
  return out;
}

kernels::Exec policy(const benchmark::State& state) {
  return state.range(0) == 0 ? kernels::Exec::serial : kernels::Exec::parallel;
}

void element_matrices(benchmark::State& state, const mesh::SimplicialMesh& m) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_matrices(m, Eigen::MatrixXd(), 1.0, policy(state)));
  state.SetItemsProcessed(state.iterations() * m.cell_count());
}

void facet_traces(benchmark::State& state) {
  const auto& m = mesh_2d();
  const Eigen::MatrixXd values = gaussian(m.vertex_count(), 64);
  std::vector<int> facets;
  for (const auto& f : mesh::facets_of_face(m, 0)) facets.push_back(f.facet);
  const Eigen::VectorXd normal = geometry::face(m.domain(), 0).normal;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::facet_traces(m, facets, normal, values, policy(state)));
}

void weighted_gram(benchmark::State& state) {
  const Eigen::MatrixXd traces = gaussian(2048, 64);
  const Eigen::VectorXd weights = gaussian(2048, 1).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_gram(traces, weights, policy(state)));
}

void pair_sum(benchmark::State& state) {
  const int k = 256;
  const Eigen::MatrixXd G = gaussian(k, k);
  const Eigen::MatrixXd re = gaussian(k, 2);
  Eigen::VectorXcd c(k);
  Eigen::VectorXd lambda(k);
  for (int i = 0; i < k; ++i) {
    c(i) = {re(i, 0), re(i, 1)};
    lambda(i) = 5.0 + i;
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pair_sum(c, G, lambda, 100.0, policy(state)));
}

void radial_derivative(benchmark::State& state) {
  const auto& m = mesh_2d();
  const Eigen::MatrixXd values = gaussian(m.vertex_count(), 16);
  const Eigen::VectorXd origin = m.domain().vertex(0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::radial_derivative(m, values, origin, policy(state)));
}

}  // namespace

// Argument 0 selects the serial reference, 1 the OpenMP version.
BENCHMARK_CAPTURE(element_matrices, tri_level8, mesh_2d())->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(element_matrices, tet_level5, mesh_3d())->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(facet_traces)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(weighted_gram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(pair_sum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(radial_derivative)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
