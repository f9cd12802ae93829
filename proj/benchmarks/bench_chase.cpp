#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "epikit/consequence.hpp"
#include "epikit/parser.hpp"

namespace {

using namespace epikit;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Theory& dl() {
  static Theory t = parse_theory(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/dl.ua"));
  return t;
}

void BM_complement_uniqueness(benchmark::State& state) {
  auto sigma = parse_atom_list(
      "meet(x, z) = bot()\njoin(x, z) = top()\nmeet(x, w) = bot()\njoin(x, w) = top()",
      dl().signature());
  for (auto _ : state) {
    ChaseState st = chase_run(dl(), {"w", "x", "z"}, sigma, 2, 10000);
    benchmark::DoNotOptimize(st.class_count());
  }
}
BENCHMARK(BM_complement_uniqueness)->Unit(benchmark::kMillisecond);

void BM_entail_with_certificate(benchmark::State& state) {
  auto sigma = parse_atom_list(
      "meet(x, z) = bot()\njoin(x, z) = top()\nmeet(x, w) = bot()\njoin(x, w) = top()",
      dl().signature());
  AtomicFormula goal = parse_atom("z = w", dl().signature());
  for (auto _ : state) {
    auto res = entails_theory(dl(), sigma, goal, 2, 10000);
    benchmark::DoNotOptimize(res.certificate->steps.size());
  }
}
BENCHMARK(BM_entail_with_certificate)->Unit(benchmark::kMillisecond);

void BM_chase_depth(benchmark::State& state) {
  int depth = static_cast<int>(state.range(0));
  auto sigma = parse_atom_list("meet(x, z) = bot()", dl().signature());
  for (auto _ : state) {
    ChaseState st = chase_run(dl(), {"x", "z"}, sigma, depth, 100000);
    benchmark::DoNotOptimize(st.universe_size());
  }
}
BENCHMARK(BM_chase_depth)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
