// Shared fixtures and helpers for the test suites.
#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "epikit/parser.hpp"
#include "epikit/structure.hpp"

#ifndef EPIKIT_FIXTURE_DIR
#define EPIKIT_FIXTURE_DIR "fixtures"
#endif

namespace epikit::testing {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(EPIKIT_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture(const std::string& name) {
  return slurp(fixture_path(name));
}

inline Theory dl_theory() { return parse_theory(fixture("dl.ua")); }
inline Theory lat_theory() { return parse_theory(fixture("lat.ua")); }
inline Theory ba_theory() { return parse_theory(fixture("ba.ua")); }
inline Theory pure_theory() { return parse_theory(fixture("pure.ua")); }

inline Structure two_sq() { return parse_structure(fixture("two_sq.fs")); }
inline Structure m3() { return parse_structure(fixture("m3.fs")); }
inline Structure two_chain() { return parse_structure(fixture("c2.fs")); }

// Deterministic RNG for property tests.
inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}

inline int rand_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng());
}

// Random term over the given variables and a lattice-style signature.
inline Term random_term(const Signature& sig, const std::vector<std::string>& vars,
                        int depth) {
  if (depth == 0 || rand_int(0, 2) == 0)
    return Term::var(vars[static_cast<std::size_t>(rand_int(0, static_cast<int>(vars.size()) - 1))]);
  const auto& ops = sig.ops();
  const OpSymbol& op = ops[static_cast<std::size_t>(rand_int(0, static_cast<int>(ops.size()) - 1))];
  std::vector<Term> args;
  for (int i = 0; i < op.arity; ++i) args.push_back(random_term(sig, vars, depth - 1));
  return Term::app(op.name, std::move(args));
}

}  // namespace epikit::testing
