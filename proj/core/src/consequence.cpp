#include "epikit/consequence.hpp"

#include <algorithm>

namespace epikit {

FiniteEntailment entails_finite_class(const std::vector<Structure>& k,
                                      const std::vector<AtomicFormula>& sigma,
                                      const AtomicFormula& p) {
  std::set<std::string> var_set = vars(sigma);
  collect_vars(p, var_set);
  std::vector<std::string> names(var_set.begin(), var_set.end());

  for (std::size_t idx = 0; idx < k.size(); ++idx) {
    const Structure& a = k[idx];
    if (!(a.signature() == k[0].signature())) throw Error("signature mismatch in class");
    for (const auto& s : sigma) check_well_formed(s, a.signature());
    check_well_formed(p, a.signature());

    std::vector<int> tuple(names.size(), 0);
    while (true) {
      Assignment v;
      for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = tuple[i];
      bool premises_hold = true;
      for (const auto& s : sigma) {
        if (!satisfies(a, s, v)) {
          premises_hold = false;
          break;
        }
      }
      if (premises_hold && !satisfies(a, p, v))
        return FiniteEntailment{false, Counterexample{idx, std::move(v)}};
      std::size_t j = tuple.size();
      while (j > 0 && ++tuple[j - 1] == a.size()) tuple[--j] = 0;
      if (j == 0 || names.empty()) break;
    }
  }
  return FiniteEntailment{true, std::nullopt};
}

TheoryEntailment entails_theory(const Theory& t, const std::vector<AtomicFormula>& sigma,
                                const AtomicFormula& p, int depth, std::int64_t fuel,
                                const ChaseLimits& limits) {
  for (const auto& s : sigma) check_well_formed(s, t.signature());
  check_well_formed(p, t.signature());

  std::set<std::string> var_set = vars(sigma);
  collect_vars(p, var_set);
  std::vector<std::string> generators(var_set.begin(), var_set.end());

  TheoryEntailment out;
  try {
    ChaseState state = chase_run(t, generators, sigma, depth, fuel, limits);
    out.complete = state.complete();
    out.universe_size = state.universe_size();
    state.materialize(p);
    if (state.proves(p)) {
      out.proved = true;
      out.certificate =
          minimize_certificate(state.certificate(p), t, generators, sigma, limits);
    }
  } catch (const UniverseLimitError&) {
    out.proved = false;
    out.complete = false;
  }
  return out;
}

std::vector<AtomicFormula> shrink_premises(const EntailmentDecider& decider,
                                           const std::vector<AtomicFormula>& sigma,
                                           const AtomicFormula& p) {
  std::vector<AtomicFormula> kept;
  for (const auto& s : sigma)
    if (std::find(kept.begin(), kept.end(), s) == kept.end()) kept.push_back(s);
  if (!decider(kept, p)) throw Error("shrink_premises: decider rejects the full set");

  for (std::size_t i = 0; i < kept.size();) {
    std::vector<AtomicFormula> without;
    without.reserve(kept.size() - 1);
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (j != i) without.push_back(kept[j]);
    if (decider(without, p))
      kept = std::move(without);
    else
      ++i;
  }
  return kept;
}

}  // namespace epikit
