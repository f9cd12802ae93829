// Dominions, epic substructures, witness extraction and ES scanning.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "epikit/chase.hpp"
#include "epikit/structure.hpp"
#include "epikit/syntax.hpp"

namespace epikit {

/// Exact semantics: the class is the finite list of structures itself.
struct FiniteClassSemantics {
  std::vector<Structure> models;
};

/// Sound under-approximation: membership is certified by a bounded chase
/// over the two-copy presentation of the ambient structure.
struct TheoryBoundedSemantics {
  Theory theory;
  int depth = 2;
  std::int64_t fuel = 100000;
};

using DominionSemantics = std::variant<FiniteClassSemantics, TheoryBoundedSemantics>;

struct HomPairEvidence {
  std::size_t model_index;
  std::vector<int> f;
  std::vector<int> g;
  int disagrees_at;
};

struct DominionReport {
  Structure ambient;
  std::vector<int> base;     // sorted subuniverse
  std::vector<int> members;  // sorted; always a subuniverse containing base
  bool exact;                // true for finite-class semantics
  std::map<int, Certificate> member_certificates;    // theory-bounded evidence
  std::map<int, HomPairEvidence> excluded_evidence;  // finite-class evidence
};

/// Elements of b at which every homomorphism pair into the class agreeing on
/// `base` must agree. `base` must be a subuniverse.
DominionReport dominion(const Structure& b, const std::vector<int>& base,
                        const DominionSemantics& semantics);

/// True iff the dominion of `base` is the whole universe. Exact under
/// finite-class semantics; under theory-bounded semantics true is sound and
/// false only means "not shown".
bool is_epic(const Structure& b, const std::vector<int>& base,
             const DominionSemantics& semantics);

/// Syntactic witness that `b` lies in the dominion: a finite atom set over
/// variables x<a> (base elements), z<c> (other elements) and v (for b), true
/// of the structure, whose doubled copies force v1 = v2.
struct EpiWitness {
  int b;
  std::vector<AtomicFormula> sigma;  // 1-minimal
  std::vector<int> a_vec;            // base elements referenced by sigma
  std::vector<int> c_vec;            // non-base elements referenced by sigma
  Assignment var_to_element;         // x<a>/z<c>/v -> elements
  std::optional<Certificate> entailment_certificate;  // theory-bounded runs
};

EpiWitness extract_witness(const Structure& b, const std::vector<int>& base,
                           int element, const DominionSemantics& semantics);

/// Doubled premise set of a witness: copy one keeps z-variables and maps v to
/// v1, copy two renames z<c> to y<c> and v to v2.
std::vector<AtomicFormula> doubled_sigma(const std::vector<AtomicFormula>& sigma);

struct EsPair {
  Structure model;
  std::vector<int> base;
  DominionReport report;
};

struct ScanOptions {
  int depth = 2;
  std::int64_t fuel = 100000;
  /// When set, use exact finite-class semantics over all models of the
  /// theory up to this size instead of the bounded chase.
  std::optional<int> finite_class_max;
  bool parallel = true;
};

/// Enumerates models of the theory up to max_size (up to isomorphism) and
/// reports every proper epic subuniverse found under the configured
/// semantics.
std::vector<EsPair> scan_es(const Theory& t, int max_size, const ScanOptions& opts = {});

struct ShrinkAlmostTotalResult {
  Structure b_prime;
  std::vector<int> b_prime_embedding;  // b_prime index -> ambient element
  std::vector<int> a_prime;            // in b_prime coordinates
  std::vector<int> generators_y;       // ambient elements
  bool finitely_generated;
  bool proper;
  bool epic;
};

/// Given witnesses for each element of a finite set z with b = Sg(base + z),
/// contracts the pair to a finitely generated one: y collects the witnesses'
/// base elements, a' = Sg(y), b' = Sg(y + z). The three postconditions are
/// re-verified under the same semantics.
ShrinkAlmostTotalResult shrink_almost_total(const Structure& b,
                                            const std::vector<int>& base,
                                            const std::vector<int>& z,
                                            const std::vector<EpiWitness>& witnesses,
                                            const DominionSemantics& semantics);

}  // namespace epikit
