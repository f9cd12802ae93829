// Finite first-order structures: evaluation, satisfaction, substructures,
// homomorphism enumeration, products, reduced products, congruences, quotients.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "epikit/syntax.hpp"

namespace epikit {

using Assignment = std::map<std::string, int>;

class Structure;

/// Partition of {0..n-1}, stored as the smallest element of each class.
class Congruence {
 public:
  explicit Congruence(int n);  // identity partition
  static Congruence from_pairs(int n, const std::vector<std::pair<int, int>>& pairs);

  int size() const { return static_cast<int>(rep_.size()); }
  int rep(int a) const { return rep_.at(a); }
  bool same(int a, int b) const { return rep_.at(a) == rep_.at(b); }
  int class_count() const;
  std::vector<std::vector<int>> classes() const;
  bool finer_or_equal(const Congruence& other) const;
  bool compatible_with(const Structure& a) const;

  friend bool operator==(const Congruence&, const Congruence&) = default;

 private:
  std::vector<int> rep_;
};

/// Finite structure over a signature: universe {0..n-1}, total operation
/// tables in row-major order, relation tables as tuple sets.
class Structure {
 public:
  Structure() = default;
  Structure(Signature sig, int size);

  const Signature& signature() const { return sig_; }
  int size() const { return size_; }

  void set_op_table(const std::string& op, std::vector<int> table);
  void add_rel_tuple(const std::string& rel, const std::vector<int>& tuple);
  void set_rel_table(const std::string& rel, std::set<std::vector<int>> table);

  /// Checks totality and range of every table; throws Error on violation.
  void validate() const;

  int op_value(int op_idx, const std::vector<int>& args) const;
  bool rel_holds(int rel_idx, const std::vector<int>& tuple) const;
  const std::vector<int>& op_table(int op_idx) const { return op_tables_.at(op_idx); }
  const std::set<std::vector<int>>& rel_table(int rel_idx) const {
    return rel_tables_.at(rel_idx);
  }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  Signature sig_;
  int size_ = 0;
  std::vector<std::vector<int>> op_tables_;
  std::vector<std::set<std::vector<int>>> rel_tables_;
};

// --- evaluation and satisfaction ---

int evaluate(const Structure& a, const Term& t, const Assignment& v);
bool satisfies(const Structure& a, const AtomicFormula& s, const Assignment& v);

/// True iff every assignment satisfying all premises satisfies the conclusion
/// (exhaustive over size^|vars| assignments).
bool validates(const Structure& a, const Implication& imp);
bool validates_all(const Structure& a, const Theory& t);

// --- substructures ---

/// Least subset of the universe containing seed and closed under operations.
std::vector<int> subuniverse_closure(const Structure& a, std::vector<int> seed);

/// True iff the sorted subset is nonempty and closed under all operations.
bool is_subuniverse(const Structure& a, const std::vector<int>& subset);

struct Substructure {
  Structure structure;
  std::vector<int> embedding;  // new index -> element of the ambient structure
};

/// Substructure generated by seed; throws Error if the closure is empty
/// (no seed elements and no constants).
Substructure generated_substructure(const Structure& a, const std::vector<int>& seed);

/// Greedy generating set: repeatedly adds the smallest element outside the
/// closure of what was picked so far.
std::vector<int> generating_set(const Structure& a);

// --- homomorphisms ---

/// Enumerates total maps h: B -> C preserving operations and relations and
/// extending `fixed`, in lexicographic order of generator images. The visitor
/// returns false to stop early.
void for_each_homomorphism(const Structure& b, const Structure& c,
                           const std::map<int, int>& fixed,
                           const std::function<bool(const std::vector<int>&)>& visit);

std::vector<std::vector<int>> homomorphisms(const Structure& b, const Structure& c,
                                            const std::map<int, int>& fixed = {});

bool isomorphic(const Structure& a, const Structure& b);

// --- products ---

Structure direct_product(const std::vector<Structure>& factors);

/// Filter over the index set {0..m-1}; member sets are bitmasks. Construction
/// checks nonemptiness, upward closure and closure under binary intersection.
/// The empty set may or may not belong; is_proper() tells which.
class FilterSpec {
 public:
  FilterSpec(int index_count, std::set<std::uint32_t> member_sets);
  static FilterSpec principal(int index_count, std::uint32_t base);
  static FilterSpec trivial(int index_count);  // { full index set }

  int index_count() const { return index_count_; }
  bool contains(std::uint32_t s) const { return members_.count(s) != 0; }
  bool is_proper() const { return members_.count(0) == 0; }
  const std::set<std::uint32_t>& members() const { return members_; }

 private:
  int index_count_;
  std::set<std::uint32_t> members_;
};

/// Product modulo "agree on a set in d"; throws Error if d is improper.
Structure reduced_product(const std::vector<Structure>& factors, const FilterSpec& d);

// --- quotients and congruences ---

struct Quotient {
  Structure structure;
  std::vector<int> projection;  // element of a -> class index
};

/// Quotient by a compatible congruence; relation tables lift existentially.
/// Throws Error if theta is not compatible with some operation table.
Quotient quotient(const Structure& a, const Congruence& theta);

/// Least congruence of a containing the given pairs.
Congruence congruence_closure_of_pairs(const Structure& a,
                                       const std::vector<std::pair<int, int>>& pairs);

/// All congruences of a (partition enumeration; intended for small sizes).
std::vector<Congruence> all_congruences(const Structure& a);

// --- structure files ---

std::string render_structure(const Structure& a);

}  // namespace epikit
