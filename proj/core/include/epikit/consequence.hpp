// Atomic consequence: exact over a finite class of structures, sound and
// fuel-bounded over a theory via the chase, plus greedy premise shrinking.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "epikit/chase.hpp"
#include "epikit/structure.hpp"
#include "epikit/syntax.hpp"

namespace epikit {

struct Counterexample {
  std::size_t structure_index;
  Assignment assignment;
};

struct FiniteEntailment {
  bool holds;
  std::optional<Counterexample> counterexample;
};

/// Exact: true iff every assignment into every member of k satisfying all of
/// sigma satisfies p. On failure the first witnessing (structure, assignment)
/// in enumeration order is reported.
FiniteEntailment entails_finite_class(const std::vector<Structure>& k,
                                      const std::vector<AtomicFormula>& sigma,
                                      const AtomicFormula& p);

struct TheoryEntailment {
  bool proved = false;
  std::optional<Certificate> certificate;
  bool complete = false;   // saturation reached a fixpoint within fuel
  int universe_size = 0;
};

/// Sound semi-decision via the chase: Proved only if sigma entails p over all
/// models of the theory; anything else is Unknown, never a refutation.
TheoryEntailment entails_theory(const Theory& t, const std::vector<AtomicFormula>& sigma,
                                const AtomicFormula& p, int depth, std::int64_t fuel,
                                const ChaseLimits& limits = {});

using EntailmentDecider =
    std::function<bool(const std::vector<AtomicFormula>&, const AtomicFormula&)>;

/// Greedy deletion: returns a subset sigma' of sigma (original order kept,
/// duplicates removed) with decider(sigma', p) positive and no single premise
/// removable (1-minimal). Requires decider(sigma, p) to be positive.
std::vector<AtomicFormula> shrink_premises(const EntailmentDecider& decider,
                                           const std::vector<AtomicFormula>& sigma,
                                           const AtomicFormula& p);

}  // namespace epikit
