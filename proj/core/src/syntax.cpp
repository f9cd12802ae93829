#include "epikit/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace epikit {

ParseError::ParseError(const std::string& msg, int line_, int column_)
    : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(column_) +
            ": " + msg),
      line(line_),
      column(column_) {}

Signature::Signature(std::vector<OpSymbol> ops, std::vector<RelSymbol> rels)
    : ops_(std::move(ops)), rels_(std::move(rels)) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const auto& s = ops_[i];
    if (s.arity < 0) throw Error("operation arity must be >= 0: " + s.name);
    if (op_idx_.count(s.name)) throw Error("duplicate symbol: " + s.name);
    op_idx_[s.name] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < rels_.size(); ++i) {
    const auto& s = rels_[i];
    if (s.arity < 1) throw Error("relation arity must be >= 1: " + s.name);
    if (op_idx_.count(s.name) || rel_idx_.count(s.name))
      throw Error("duplicate symbol: " + s.name);
    rel_idx_[s.name] = static_cast<int>(i);
  }
}

int Signature::op_index(const std::string& name) const {
  auto it = op_idx_.find(name);
  return it == op_idx_.end() ? -1 : it->second;
}

int Signature::rel_index(const std::string& name) const {
  auto it = rel_idx_.find(name);
  return it == rel_idx_.end() ? -1 : it->second;
}

std::optional<int> Signature::op_arity(const std::string& name) const {
  int i = op_index(name);
  if (i < 0) return std::nullopt;
  return ops_[i].arity;
}

std::optional<int> Signature::rel_arity(const std::string& name) const {
  int i = rel_index(name);
  if (i < 0) return std::nullopt;
  return rels_[i].arity;
}

Signature Signature::with_unary_rel(const std::string& name) const {
  std::vector<RelSymbol> rels = rels_;
  rels.push_back(RelSymbol{name, 1});
  return Signature(ops_, std::move(rels));
}

Term::Term() : node_(nullptr) {
  static const Term placeholder = Term::var("_");
  node_ = placeholder.node_;
}

Term Term::var(std::string name) {
  auto node = std::make_shared<Node>();
  node->is_var = true;
  node->head = std::move(name);
  node->depth = 0;
  return Term(std::move(node));
}

Term Term::app(std::string op, std::vector<Term> args) {
  auto node = std::make_shared<Node>();
  node->is_var = false;
  node->head = std::move(op);
  int d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  node->depth = d + 1;
  node->args = std::move(args);
  return Term(std::move(node));
}

int Term::compare(const Term& other) const {
  if (node_ == other.node_) return 0;
  if (node_->is_var != other.node_->is_var) return node_->is_var ? -1 : 1;
  if (int c = node_->head.compare(other.node_->head); c != 0) return c < 0 ? -1 : 1;
  const auto& a = node_->args;
  const auto& b = other.node_->args;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = a[i].compare(b[i]); c != 0) return c;
  return 0;
}

std::string to_string(const Term& t) {
  if (t.is_var()) return t.head();
  std::string out = t.head();
  out += '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) out += ", ";
    out += to_string(t.args()[i]);
  }
  out += ')';
  return out;
}

AtomicFormula::AtomicFormula(bool is_eq, std::string rel, std::vector<Term> terms)
    : is_eq_(is_eq), rel_(std::move(rel)), terms_(std::move(terms)) {}

AtomicFormula::AtomicFormula() : is_eq_(true), terms_{Term(), Term()} {}

AtomicFormula AtomicFormula::equation(Term lhs, Term rhs) {
  std::vector<Term> ts;
  ts.push_back(std::move(lhs));
  ts.push_back(std::move(rhs));
  return AtomicFormula(true, "", std::move(ts));
}

AtomicFormula AtomicFormula::relation(std::string rel, std::vector<Term> args) {
  return AtomicFormula(false, std::move(rel), std::move(args));
}

const Term& AtomicFormula::lhs() const {
  if (!is_eq_) throw Error("lhs() on relational atom");
  return terms_[0];
}

const Term& AtomicFormula::rhs() const {
  if (!is_eq_) throw Error("rhs() on relational atom");
  return terms_[1];
}

const std::string& AtomicFormula::rel() const {
  if (is_eq_) throw Error("rel() on equation");
  return rel_;
}

int AtomicFormula::compare(const AtomicFormula& other) const {
  if (is_eq_ != other.is_eq_) return is_eq_ ? -1 : 1;
  if (int c = rel_.compare(other.rel_); c != 0) return c < 0 ? -1 : 1;
  if (terms_.size() != other.terms_.size())
    return terms_.size() < other.terms_.size() ? -1 : 1;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (int c = terms_[i].compare(other.terms_[i]); c != 0) return c;
  return 0;
}

std::string to_string(const AtomicFormula& a) {
  if (a.is_equation()) return to_string(a.lhs()) + " = " + to_string(a.rhs());
  std::string out = a.rel();
  out += '(';
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (i) out += ", ";
    out += to_string(a.args()[i]);
  }
  out += ')';
  return out;
}

Implication::Implication(std::vector<AtomicFormula> premises, AtomicFormula conclusion)
    : premises_(std::move(premises)), conclusion_(std::move(conclusion)) {
  std::sort(premises_.begin(), premises_.end());
  premises_.erase(std::unique(premises_.begin(), premises_.end()), premises_.end());
}

int Implication::compare(const Implication& other) const {
  if (int c = conclusion_.compare(other.conclusion_); c != 0) return c;
  if (premises_.size() != other.premises_.size())
    return premises_.size() < other.premises_.size() ? -1 : 1;
  for (std::size_t i = 0; i < premises_.size(); ++i)
    if (int c = premises_[i].compare(other.premises_[i]); c != 0) return c;
  return 0;
}

std::string to_string(const Implication& imp) {
  std::string out = to_string(imp.conclusion());
  if (!imp.premises().empty()) {
    out += " <= ";
    for (std::size_t i = 0; i < imp.premises().size(); ++i) {
      if (i) out += ", ";
      out += to_string(imp.premises()[i]);
    }
  }
  return out;
}

Theory::Theory(Signature sig, std::vector<Implication> axioms)
    : sig_(std::move(sig)), axioms_(std::move(axioms)) {
  for (const auto& ax : axioms_) {
    check_well_formed(ax, sig_);
    var_budget_ = std::max(var_budget_, static_cast<int>(vars(ax).size()));
  }
}

bool Theory::axioms_size_equal(const Theory& b) const {
  return axioms_ == b.axioms_;
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    out.insert(t.head());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

void collect_vars(const AtomicFormula& a, std::set<std::string>& out) {
  for (const auto& t : a.args()) collect_vars(t, out);
}

std::set<std::string> vars(const Term& t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

std::set<std::string> vars(const AtomicFormula& a) {
  std::set<std::string> out;
  collect_vars(a, out);
  return out;
}

std::set<std::string> vars(const std::vector<AtomicFormula>& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms) collect_vars(a, out);
  return out;
}

std::set<std::string> vars(const Implication& imp) {
  std::set<std::string> out;
  for (const auto& p : imp.premises()) collect_vars(p, out);
  collect_vars(imp.conclusion(), out);
  return out;
}

std::set<std::string> vars(const std::vector<Term>& terms) {
  std::set<std::string> out;
  for (const auto& t : terms) collect_vars(t, out);
  return out;
}

Term substitute(const Term& t, const Substitution& h) {
  if (t.is_var()) {
    auto it = h.find(t.head());
    return it == h.end() ? t : it->second;
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(substitute(a, h));
  return Term::app(t.head(), std::move(args));
}

AtomicFormula substitute(const AtomicFormula& a, const Substitution& h) {
  if (a.is_equation())
    return AtomicFormula::equation(substitute(a.lhs(), h), substitute(a.rhs(), h));
  std::vector<Term> args;
  args.reserve(a.args().size());
  for (const auto& t : a.args()) args.push_back(substitute(t, h));
  return AtomicFormula::relation(a.rel(), std::move(args));
}

std::vector<AtomicFormula> substitute(const std::vector<AtomicFormula>& atoms,
                                      const Substitution& h) {
  std::vector<AtomicFormula> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(substitute(a, h));
  return out;
}

void check_well_formed(const Term& t, const Signature& sig) {
  if (t.is_var()) return;
  auto arity = sig.op_arity(t.head());
  if (!arity)
    throw Error("unknown operation symbol: " + t.head());
  if (static_cast<std::size_t>(*arity) != t.args().size())
    throw Error("arity mismatch for " + t.head() + ": expected " +
                std::to_string(*arity) + " arguments, got " +
                std::to_string(t.args().size()));
  for (const auto& a : t.args()) check_well_formed(a, sig);
}

void check_well_formed(const AtomicFormula& a, const Signature& sig) {
  if (a.is_equation()) {
    check_well_formed(a.lhs(), sig);
    check_well_formed(a.rhs(), sig);
    return;
  }
  auto arity = sig.rel_arity(a.rel());
  if (!arity) throw Error("unknown relation symbol: " + a.rel());
  if (static_cast<std::size_t>(*arity) != a.args().size())
    throw Error("arity mismatch for " + a.rel() + ": expected " +
                std::to_string(*arity) + " arguments, got " +
                std::to_string(a.args().size()));
  for (const auto& t : a.args()) check_well_formed(t, sig);
}

void check_well_formed(const Implication& imp, const Signature& sig) {
  for (const auto& p : imp.premises()) check_well_formed(p, sig);
  check_well_formed(imp.conclusion(), sig);
}

std::string render_theory(const Theory& t) {
  std::ostringstream out;
  out << "sig\n";
  for (const auto& op : t.signature().ops())
    out << "  op " << op.name << " " << op.arity << "\n";
  for (const auto& rel : t.signature().rels())
    out << "  rel " << rel.name << " " << rel.arity << "\n";
  out << "end\n";
  out << "axioms\n";
  for (const auto& ax : t.axioms()) out << "  " << to_string(ax) << "\n";
  out << "end\n";
  return out.str();
}

}  // namespace epikit
