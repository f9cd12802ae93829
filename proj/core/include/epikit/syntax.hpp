// Term language: signatures, terms, atomic formulas, implications, theories.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace epikit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_);
};

/// Thrown when a chase universe would exceed the configured node cap.
struct UniverseLimitError : Error {
  using Error::Error;
};

struct OpSymbol {
  std::string name;
  int arity = 0;
  friend bool operator==(const OpSymbol&, const OpSymbol&) = default;
};

struct RelSymbol {
  std::string name;
  int arity = 1;
  friend bool operator==(const RelSymbol&, const RelSymbol&) = default;
};

/// Finite first-order signature. Operation arities may be zero (constants);
/// relation arities must be positive. Names are unique across both lists.
class Signature {
 public:
  Signature() = default;
  Signature(std::vector<OpSymbol> ops, std::vector<RelSymbol> rels);

  const std::vector<OpSymbol>& ops() const { return ops_; }
  const std::vector<RelSymbol>& rels() const { return rels_; }

  int op_index(const std::string& name) const;   // -1 if absent
  int rel_index(const std::string& name) const;  // -1 if absent
  std::optional<int> op_arity(const std::string& name) const;
  std::optional<int> rel_arity(const std::string& name) const;

  std::size_t size() const { return ops_.size() + rels_.size(); }
  bool algebraic() const { return rels_.empty(); }
  Signature algebra_reduct() const { return Signature(ops_, {}); }

  /// Same ops plus a single unary relation (used for matrix signatures).
  Signature with_unary_rel(const std::string& name) const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<OpSymbol> ops_;
  std::vector<RelSymbol> rels_;
  std::map<std::string, int> op_idx_;
  std::map<std::string, int> rel_idx_;
};

/// Immutable first-order term: a variable or an operation applied to terms.
/// Depth counts application nesting; variables have depth 0 and constants
/// (nullary applications) have depth 1.
class Term {
 public:
  Term();  // the placeholder variable "_"
  static Term var(std::string name);
  static Term app(std::string op, std::vector<Term> args = {});

  bool is_var() const { return node_->is_var; }
  const std::string& head() const { return node_->head; }
  const std::vector<Term>& args() const { return node_->args; }
  int depth() const { return node_->depth; }

  bool operator==(const Term& other) const { return compare(other) == 0; }
  bool operator!=(const Term& other) const { return compare(other) != 0; }
  bool operator<(const Term& other) const { return compare(other) < 0; }
  int compare(const Term& other) const;

 private:
  struct Node {
    bool is_var;
    std::string head;
    std::vector<Term> args;
    int depth;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(const Term& t);

/// An equation between two terms or a relational atom.
class AtomicFormula {
 public:
  AtomicFormula();  // the placeholder equation "_ = _"
  static AtomicFormula equation(Term lhs, Term rhs);
  static AtomicFormula relation(std::string rel, std::vector<Term> args);

  bool is_equation() const { return is_eq_; }
  const Term& lhs() const;
  const Term& rhs() const;
  const std::string& rel() const;
  const std::vector<Term>& args() const { return terms_; }

  bool operator==(const AtomicFormula& other) const { return compare(other) == 0; }
  bool operator!=(const AtomicFormula& other) const { return compare(other) != 0; }
  bool operator<(const AtomicFormula& other) const { return compare(other) < 0; }
  int compare(const AtomicFormula& other) const;

 private:
  AtomicFormula(bool is_eq, std::string rel, std::vector<Term> terms);
  bool is_eq_;
  std::string rel_;
  std::vector<Term> terms_;
};

std::string to_string(const AtomicFormula& a);

/// Implication with a finite premise set and an atomic conclusion.
/// Premises are kept sorted and deduplicated, so two implications with the
/// same premise set compare equal regardless of the order they were given in.
class Implication {
 public:
  Implication(std::vector<AtomicFormula> premises, AtomicFormula conclusion);

  const std::vector<AtomicFormula>& premises() const { return premises_; }
  const AtomicFormula& conclusion() const { return conclusion_; }

  bool operator==(const Implication& other) const { return compare(other) == 0; }
  bool operator<(const Implication& other) const { return compare(other) < 0; }
  int compare(const Implication& other) const;

 private:
  std::vector<AtomicFormula> premises_;
  AtomicFormula conclusion_;
};

std::string to_string(const Implication& imp);

/// A signature together with finitely many axioms (implications).
/// var_budget records the largest number of distinct variables used by any
/// single axiom; sig_size is the symbol count of the signature.
class Theory {
 public:
  Theory() = default;
  Theory(Signature sig, std::vector<Implication> axioms);

  const Signature& signature() const { return sig_; }
  const std::vector<Implication>& axioms() const { return axioms_; }
  int var_budget() const { return var_budget_; }
  std::size_t sig_size() const { return sig_.size(); }

  friend bool operator==(const Theory& a, const Theory& b) {
    return a.sig_ == b.sig_ && a.axioms_size_equal(b);
  }

 private:
  bool axioms_size_equal(const Theory& b) const;
  Signature sig_;
  std::vector<Implication> axioms_;
  int var_budget_ = 0;
};

// --- variable collection ---

void collect_vars(const Term& t, std::set<std::string>& out);
void collect_vars(const AtomicFormula& a, std::set<std::string>& out);
std::set<std::string> vars(const Term& t);
std::set<std::string> vars(const AtomicFormula& a);
std::set<std::string> vars(const std::vector<AtomicFormula>& atoms);
std::set<std::string> vars(const Implication& imp);
std::set<std::string> vars(const std::vector<Term>& terms);

// --- substitution ---

using Substitution = std::map<std::string, Term>;

/// Homomorphic extension of h; variables outside the domain map to themselves.
Term substitute(const Term& t, const Substitution& h);
AtomicFormula substitute(const AtomicFormula& a, const Substitution& h);
std::vector<AtomicFormula> substitute(const std::vector<AtomicFormula>& atoms,
                                      const Substitution& h);

// --- well-formedness ---

/// Throws Error if some application does not resolve in sig with the right
/// argument count, or a relational atom misuses a relation symbol.
void check_well_formed(const Term& t, const Signature& sig);
void check_well_formed(const AtomicFormula& a, const Signature& sig);
void check_well_formed(const Implication& imp, const Signature& sig);

// --- rendering (inverse of the parser) ---

std::string render_theory(const Theory& t);

}  // namespace epikit
