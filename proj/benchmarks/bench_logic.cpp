#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "epikit/logic.hpp"
#include "epikit/parser.hpp"

namespace {

using namespace epikit;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_check_equivalential(benchmark::State& state) {
  DeductiveSystem impl =
      parse_deductive_system(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/impl.ds"));
  auto delta =
      parse_term_list(slurp(std::string(EPIKIT_FIXTURE_DIR) + "/impl.delta"),
                      impl.signature());
  for (auto _ : state) {
    auto check = check_equivalential(impl, delta, 50000, 2);
    benchmark::DoNotOptimize(check.status);
  }
}
BENCHMARK(BM_check_equivalential)->Unit(benchmark::kMillisecond);

void BM_leibniz(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Signature sig = Signature({{"f", 2}}, {}).with_unary_rel("r");
  std::mt19937 gen(7);
  Structure m(sig, n);
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (auto& v : table) v = static_cast<int>(gen() % static_cast<unsigned>(n));
  m.set_op_table("f", table);
  m.add_rel_tuple("r", {0});
  for (auto _ : state) {
    Congruence omega = leibniz(m);
    benchmark::DoNotOptimize(omega.class_count());
  }
}
BENCHMARK(BM_leibniz)->Arg(4)->Arg(5)->Arg(6);

}  // namespace
