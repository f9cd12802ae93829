#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "epikit/epi.hpp"
#include "epikit/models.hpp"
#include "epikit/parser.hpp"

namespace {

using namespace epikit;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Theory& lat() {
  static Theory t = parse_theory(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/lat.ua"));
  return t;
}

void BM_enumerate_lattices(benchmark::State& state) {
  int size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto models = enumerate_models(lat(), size);
    benchmark::DoNotOptimize(models.size());
  }
}
BENCHMARK(BM_enumerate_lattices)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_scan_es(benchmark::State& state) {
  Theory dl = parse_theory(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/dl.ua"));
  for (auto _ : state) {
    auto pairs = scan_es(dl, 4, {});
    benchmark::DoNotOptimize(pairs.size());
  }
}
BENCHMARK(BM_scan_es)->Unit(benchmark::kMillisecond);

void BM_homomorphisms(benchmark::State& state) {
  Structure sq =
      parse_structure(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/two_sq.fs"));
  Structure dia = parse_structure(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/m3.fs"));
  for (auto _ : state) {
    auto homs = homomorphisms(sq, dia);
    benchmark::DoNotOptimize(homs.size());
  }
}
BENCHMARK(BM_homomorphisms);

}  // namespace
