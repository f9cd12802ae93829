// Text front end: theory files, structure files, deductive systems, queries.
#pragma once

#include <string>
#include <vector>

#include "epikit/structure.hpp"
#include "epikit/syntax.hpp"

namespace epikit {

struct Rule {
  std::vector<Term> premises;
  Term conclusion;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Deductive system: algebraic signature, ordered variable set, finite rules.
/// Variables are collected from the rules in order of first occurrence.
class DeductiveSystem {
 public:
  DeductiveSystem() = default;
  DeductiveSystem(Signature sig, std::vector<Rule> rules);

  const Signature& signature() const { return sig_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  Signature sig_;
  std::vector<std::string> variables_;
  std::vector<Rule> rules_;
};

/// Theory text:
///   sig
///     op NAME ARITY
///     rel NAME ARITY
///   end
///   axioms
///     CONCLUSION <= PREM1, PREM2, ...
///     CONCLUSION
///   end
/// Atoms are `t1 = t2` or `r(t1,...,tn)`; terms are prefix applications;
/// an identifier declared as a nullary operation may be written with or
/// without `()`. Comments run from `#` to end of line.
Theory parse_theory(const std::string& text);

Term parse_term(const std::string& text, const Signature& sig);
AtomicFormula parse_atom(const std::string& text, const Signature& sig);

/// Query form "CONCL <= P1, P2, ..." (or a bare atom).
Implication parse_implication(const std::string& text, const Signature& sig);

/// One atom per line; `#` comments and blank lines ignored.
std::vector<AtomicFormula> parse_atom_list(const std::string& text, const Signature& sig);

/// One term per line; `#` comments and blank lines ignored.
std::vector<Term> parse_term_list(const std::string& text, const Signature& sig);

/// Deductive system text: a `sig` block (operations only) followed by a
/// `rules` block of lines `CONCL <- P1, P2` (premises optional).
DeductiveSystem parse_deductive_system(const std::string& text);

/// Structure text:
///   structure size N
///   op NAME [ARITY]
///     ... N^ARITY table entries in row-major order ...
///   rel NAME [ARITY]
///     ... one tuple per line ...
///   end
/// With `expected`, symbols and arities are checked against that signature;
/// otherwise arities must be given explicitly or be inferable from the table.
Structure parse_structure(const std::string& text,
                          const Signature* expected = nullptr);

}  // namespace epikit
