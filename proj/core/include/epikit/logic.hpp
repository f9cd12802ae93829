// Deductive systems over finite variable sets: bounded derivability,
// equivalential and algebraizability checks, Leibniz congruences, matrix
// reduction, and Beth definability.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epikit/chase.hpp"
#include "epikit/parser.hpp"
#include "epikit/structure.hpp"
#include "epikit/syntax.hpp"

namespace epikit {

struct DeriveStep {
  int rule_index;
  Substitution subst;
  std::vector<Term> premises;
  Term conclusion;
};

struct DeriveResult {
  bool proved = false;
  std::vector<DeriveStep> trace;  // backward slice ending at the goal
  bool complete = false;          // chaining reached a fixpoint within fuel
};

/// Forward chaining over substitution instances of the system's rules.
/// Substitution images are drawn from the depth-bounded subterm closure of
/// the premises and the goal. Proved is sound for the generated logic; a
/// miss is only Unknown.
DeriveResult derives(const DeductiveSystem& s, const std::vector<Term>& gamma,
                     const Term& goal, std::int64_t fuel, int depth);

/// Theory whose models are exactly the matrix models of the system: each rule
/// becomes the implication {r(premise), ...} / r(conclusion) over the
/// signature extended by the unary truth relation r.
Theory matrix_model_theory(const DeductiveSystem& s);

struct MatrixCountermodel {
  Structure matrix;
  Assignment assignment;
};

/// Searches matrix models of the system up to max_size for one refuting
/// gamma |- phi (premises in the filter, conclusion outside).
std::optional<MatrixCountermodel> refute_rule(const DeductiveSystem& s,
                                              const std::vector<Term>& gamma,
                                              const Term& phi, int max_size);

enum class EquivCondition { Reflexivity, Detachment, Congruence };

std::string to_string(EquivCondition c);

struct EquivalentialCheck {
  enum class Status { Verified, Failed, Unknown } status;
  std::optional<EquivCondition> failed_at;
  std::string detail;  // e.g. the connective whose congruence rule failed
  std::optional<MatrixCountermodel> countermodel;
  std::map<std::string, DeriveResult> derivations;  // keyed by condition label
};

/// Checks that delta behaves as a definable equivalence: each delta(x,x) is
/// a theorem, {x} + delta(x,y) derives y, and each connective's congruence
/// rule is derivable. Every delta element must use only the variables x, y.
EquivalentialCheck check_equivalential(const DeductiveSystem& s,
                                       const std::vector<Term>& delta,
                                       std::int64_t fuel, int depth,
                                       int refute_size = 3);

/// Largest congruence of the matrix's algebra for which the filter (the
/// unary relation's table) is a union of classes, computed via the unary
/// polynomial clone. The matrix must have exactly one relation, of arity 1.
Congruence leibniz(const Structure& matrix);

/// Quotient by the Leibniz congruence; the result satisfies
/// leibniz(result) = identity.
Quotient reduce_matrix(const Structure& matrix);

/// Matrix-model theory plus the postulate {r(d(x,y)) : d in delta} / x = y.
Theory mod_star_theory(const DeductiveSystem& s, const std::vector<Term>& delta);

struct AlgebraizerData {
  std::vector<std::pair<Term, Term>> defining_pairs;  // unary terms over x
  std::vector<Term> delta;                            // binary terms over x, y
};

struct AlgebraizerReport {
  enum class Status { Pass, Fail, Unknown };
  struct RuleCheck {
    std::string label;
    Status derivable;   // Pass for presented rules; via derives() for extras
    Status translated;  // translated entailment over the model sample
  };
  std::vector<RuleCheck> rule_checks;  // condition one, per sampled rule
  bool cond2_forward = false;          // translated delta premises force x = y
  bool cond2_backward = false;         // x = y forces every translated pair
  bool passed = false;
};

/// Desk-scale check of the two algebraizability conditions against a finite
/// sample of rules and a finite list of algebras.
AlgebraizerReport check_algebraizer(const DeductiveSystem& s, const AlgebraizerData& d,
                                    const std::vector<Structure>& k_models,
                                    const std::vector<Rule>& extra_sample,
                                    std::int64_t fuel, int depth);

enum class BethVerdict { ExplicitlyDefined, ImplicitNotExplicit, NotImplicit, Unknown };

std::string to_string(BethVerdict v);

struct BethCounterexample {
  Structure model;
  Assignment v1, v2;  // agree on x-variables, satisfy gamma, differ on some z
};

struct BethReport {
  BethVerdict verdict = BethVerdict::Unknown;
  std::map<std::string, Term> definitions;
  std::map<std::string, Certificate> definition_certificates;
  std::map<std::string, Certificate> implicit_certificates;
  std::optional<BethCounterexample> counterexample;
  bool implicit_proved = false;
  bool explicit_established = false;
  std::string note;
};

/// Definability check over a theory: (1) searches for explicit defining
/// terms over x up to term_depth (candidates deduplicated by their behaviour
/// on all models up to counter_size, refuted ones discarded); (2) tests
/// implicit definability by the two-copy chase; (3) searches models up to
/// counter_size for two gamma-satisfying assignments agreeing on x but not
/// on z.
BethReport beth_check(const Theory& t, const std::vector<AtomicFormula>& gamma,
                      const std::vector<std::string>& x_vars,
                      const std::vector<std::string>& z_vars, int depth,
                      std::int64_t fuel, int term_depth, int counter_size = 4);

}  // namespace epikit
