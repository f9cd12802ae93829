#include "epikit/structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace epikit {

namespace {

// Row-major index of a tuple in a table over a universe of n elements.
std::size_t table_index(int n, const std::vector<int>& args) {
  std::size_t idx = 0;
  for (int a : args) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
  return idx;
}

std::size_t table_size(int n, int arity) {
  std::size_t s = 1;
  for (int i = 0; i < arity; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

// Advances a mixed-radix odometer; returns false after the last tuple.
bool next_tuple(std::vector<int>& tuple, int base) {
  for (std::size_t i = tuple.size(); i-- > 0;) {
    if (++tuple[i] < base) return true;
    tuple[i] = 0;
  }
  return false;
}

}  // namespace

Congruence::Congruence(int n) : rep_(n) {
  std::iota(rep_.begin(), rep_.end(), 0);
}

Congruence Congruence::from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : pairs) {
    int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  Congruence c(n);
  for (int i = 0; i < n; ++i) c.rep_[i] = find(i);
  return c;
}

int Congruence::class_count() const {
  int count = 0;
  for (int i = 0; i < size(); ++i)
    if (rep_[i] == i) ++count;
  return count;
}

std::vector<std::vector<int>> Congruence::classes() const {
  std::map<int, std::vector<int>> buckets;
  for (int i = 0; i < size(); ++i) buckets[rep_[i]].push_back(i);
  std::vector<std::vector<int>> out;
  out.reserve(buckets.size());
  for (auto& [_, cls] : buckets) out.push_back(std::move(cls));
  return out;
}

bool Congruence::finer_or_equal(const Congruence& other) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i)
    if (!other.same(i, rep_[i])) return false;
  return true;
}

bool Congruence::compatible_with(const Structure& a) const {
  if (size() != a.size()) return false;
  const auto& ops = a.signature().ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    if (arity == 0) continue;
    std::size_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= static_cast<std::size_t>(a.size());
    for (std::size_t t1 = 0; t1 < entries; ++t1) {
      for (std::size_t t2 = 0; t2 < entries; ++t2) {
        std::size_t r1 = t1, r2 = t2;
        bool equiv = true;
        for (int i = 0; i < arity; ++i) {
          if (!same(static_cast<int>(r1 % a.size()), static_cast<int>(r2 % a.size()))) {
            equiv = false;
            break;
          }
          r1 /= a.size();
          r2 /= a.size();
        }
        if (equiv &&
            !same(a.op_table(static_cast<int>(f))[t1], a.op_table(static_cast<int>(f))[t2]))
          return false;
      }
    }
  }
  return true;
}

Structure::Structure(Signature sig, int size) : sig_(std::move(sig)), size_(size) {
  if (size_ < 1) throw Error("structure universe must be nonempty");
  op_tables_.resize(sig_.ops().size());
  rel_tables_.resize(sig_.rels().size());
}

void Structure::set_op_table(const std::string& op, std::vector<int> table) {
  int idx = sig_.op_index(op);
  if (idx < 0) throw Error("unknown operation symbol: " + op);
  std::size_t expected = table_size(size_, sig_.ops()[idx].arity);
  if (table.size() != expected)
    throw Error("operation table for " + op + " has " + std::to_string(table.size()) +
                " entries, expected " + std::to_string(expected));
  for (int v : table)
    if (v < 0 || v >= size_) throw Error("operation table entry out of range for " + op);
  op_tables_[idx] = std::move(table);
}

void Structure::add_rel_tuple(const std::string& rel, const std::vector<int>& tuple) {
  int idx = sig_.rel_index(rel);
  if (idx < 0) throw Error("unknown relation symbol: " + rel);
  if (tuple.size() != static_cast<std::size_t>(sig_.rels()[idx].arity))
    throw Error("relation tuple arity mismatch for " + rel);
  for (int v : tuple)
    if (v < 0 || v >= size_) throw Error("relation tuple entry out of range for " + rel);
  rel_tables_[idx].insert(tuple);
}

void Structure::set_rel_table(const std::string& rel, std::set<std::vector<int>> table) {
  int idx = sig_.rel_index(rel);
  if (idx < 0) throw Error("unknown relation symbol: " + rel);
  rel_tables_[idx].clear();
  for (const auto& t : table) add_rel_tuple(rel, t);
}

void Structure::validate() const {
  for (std::size_t i = 0; i < sig_.ops().size(); ++i) {
    std::size_t expected = table_size(size_, sig_.ops()[i].arity);
    if (op_tables_[i].size() != expected)
      throw Error("operation table missing or incomplete for " + sig_.ops()[i].name);
  }
}

int Structure::op_value(int op_idx, const std::vector<int>& args) const {
  return op_tables_[op_idx][table_index(size_, args)];
}

bool Structure::rel_holds(int rel_idx, const std::vector<int>& tuple) const {
  return rel_tables_[rel_idx].count(tuple) != 0;
}

int evaluate(const Structure& a, const Term& t, const Assignment& v) {
  if (t.is_var()) {
    auto it = v.find(t.head());
    if (it == v.end()) throw Error("unbound variable: " + t.head());
    return it->second;
  }
  int idx = a.signature().op_index(t.head());
  if (idx < 0) throw Error("unknown operation symbol: " + t.head());
  std::vector<int> args;
  args.reserve(t.args().size());
  for (const auto& arg : t.args()) args.push_back(evaluate(a, arg, v));
  return a.op_value(idx, args);
}

bool satisfies(const Structure& a, const AtomicFormula& s, const Assignment& v) {
  if (s.is_equation()) return evaluate(a, s.lhs(), v) == evaluate(a, s.rhs(), v);
  int idx = a.signature().rel_index(s.rel());
  if (idx < 0) throw Error("unknown relation symbol: " + s.rel());
  std::vector<int> tuple;
  tuple.reserve(s.args().size());
  for (const auto& arg : s.args()) tuple.push_back(evaluate(a, arg, v));
  return a.rel_holds(idx, tuple);
}

bool validates(const Structure& a, const Implication& imp) {
  check_well_formed(imp, a.signature());
  std::set<std::string> imp_vars = vars(imp);
  std::vector<std::string> names(imp_vars.begin(), imp_vars.end());
  std::vector<int> tuple(names.size(), 0);
  if (names.empty()) {
    Assignment v;
    for (const auto& p : imp.premises())
      if (!satisfies(a, p, v)) return true;
    return satisfies(a, imp.conclusion(), v);
  }
  do {
    Assignment v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = tuple[i];
    bool premises_hold = true;
    for (const auto& p : imp.premises()) {
      if (!satisfies(a, p, v)) {
        premises_hold = false;
        break;
      }
    }
    if (premises_hold && !satisfies(a, imp.conclusion(), v)) return false;
  } while (next_tuple(tuple, a.size()));
  return true;
}

bool validates_all(const Structure& a, const Theory& t) {
  for (const auto& ax : t.axioms())
    if (!validates(a, ax)) return false;
  return true;
}

std::vector<int> subuniverse_closure(const Structure& a, std::vector<int> seed) {
  std::vector<bool> in(a.size(), false);
  for (int e : seed) {
    if (e < 0 || e >= a.size()) throw Error("seed element out of range");
    in[e] = true;
  }
  const auto& ops = a.signature().ops();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      std::vector<int> tuple(arity, 0);
      // iterate over tuples of elements already inside
      bool more = true;
      while (more) {
        bool inside = true;
        for (int x : tuple)
          if (!in[x]) {
            inside = false;
            break;
          }
        if (inside) {
          int val = a.op_value(static_cast<int>(f), tuple);
          if (!in[val]) {
            in[val] = true;
            changed = true;
          }
        }
        more = arity > 0 && next_tuple(tuple, a.size());
        if (arity == 0) more = false;
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < a.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

bool is_subuniverse(const Structure& a, const std::vector<int>& subset) {
  if (subset.empty()) return false;
  auto closed = subuniverse_closure(a, subset);
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return closed == sorted;
}

Substructure generated_substructure(const Structure& a, const std::vector<int>& seed) {
  std::vector<int> universe = subuniverse_closure(a, seed);
  if (universe.empty())
    throw Error("generated substructure is empty: no seed elements and no constants");
  std::vector<int> old_to_new(a.size(), -1);
  for (std::size_t i = 0; i < universe.size(); ++i) old_to_new[universe[i]] = static_cast<int>(i);

  Structure sub(a.signature(), static_cast<int>(universe.size()));
  const auto& ops = a.signature().ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::size_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= universe.size();
    std::vector<int> table(entries);
    std::vector<int> tuple(arity, 0);
    std::size_t flat = 0;
    do {
      std::vector<int> old_tuple(arity);
      for (int i = 0; i < arity; ++i) old_tuple[i] = universe[tuple[i]];
      table[flat++] = old_to_new[a.op_value(static_cast<int>(f), old_tuple)];
    } while (arity > 0 && next_tuple(tuple, static_cast<int>(universe.size())));
    sub.set_op_table(ops[f].name, std::move(table));
  }
  const auto& rels = a.signature().rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    for (const auto& tuple : a.rel_table(static_cast<int>(r))) {
      bool inside = true;
      std::vector<int> mapped(tuple.size());
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (old_to_new[tuple[i]] < 0) {
          inside = false;
          break;
        }
        mapped[i] = old_to_new[tuple[i]];
      }
      if (inside) sub.add_rel_tuple(rels[r].name, mapped);
    }
  }
  return Substructure{std::move(sub), std::move(universe)};
}

std::vector<int> generating_set(const Structure& a) {
  std::vector<int> gens;
  std::vector<int> closure = subuniverse_closure(a, {});
  while (static_cast<int>(closure.size()) < a.size()) {
    int next = -1;
    for (int i = 0; i < a.size(); ++i) {
      if (!std::binary_search(closure.begin(), closure.end(), i)) {
        next = i;
        break;
      }
    }
    gens.push_back(next);
    closure = subuniverse_closure(a, gens);
  }
  return gens;
}

namespace {

// Extends a partial map along operation tables. Returns false on conflict
// with op tables or with `fixed`.
bool close_map(const Structure& b, const Structure& c, const std::map<int, int>& fixed,
               std::vector<int>& image) {
  const auto& ops = b.signature().ops();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      std::vector<int> tuple(arity, 0);
      bool more = true;
      while (more) {
        bool defined = true;
        std::vector<int> mapped(arity);
        for (int i = 0; i < arity; ++i) {
          if (image[tuple[i]] < 0) {
            defined = false;
            break;
          }
          mapped[i] = image[tuple[i]];
        }
        if (defined) {
          int src = b.op_value(static_cast<int>(f), tuple);
          int dst = c.op_value(static_cast<int>(f), mapped);
          if (image[src] < 0) {
            auto it = fixed.find(src);
            if (it != fixed.end() && it->second != dst) return false;
            image[src] = dst;
            changed = true;
          } else if (image[src] != dst) {
            return false;
          }
        }
        more = arity > 0 && next_tuple(tuple, b.size());
        if (arity == 0) more = false;
      }
    }
  }
  return true;
}

bool preserves_relations(const Structure& b, const Structure& c,
                         const std::vector<int>& image) {
  for (std::size_t r = 0; r < b.signature().rels().size(); ++r) {
    for (const auto& tuple : b.rel_table(static_cast<int>(r))) {
      std::vector<int> mapped(tuple.size());
      for (std::size_t i = 0; i < tuple.size(); ++i) mapped[i] = image[tuple[i]];
      if (!c.rel_holds(static_cast<int>(r), mapped)) return false;
    }
  }
  return true;
}

struct HomSearch {
  const Structure& b;
  const Structure& c;
  const std::map<int, int>& fixed;
  const std::function<bool(const std::vector<int>&)>& visit;
  std::vector<int> gens;
  bool stopped = false;

  bool extend(std::size_t gi, const std::vector<int>& image) {
    if (gi == gens.size()) {
      // image is total by construction (generators determine everything)
      for (int x : image)
        if (x < 0) return true;  // should not happen; skip defensively
      if (!preserves_relations(b, c, image)) return true;
      if (!visit(image)) {
        stopped = true;
        return false;
      }
      return true;
    }
    int g = gens[gi];
    if (image[g] >= 0) return extend(gi + 1, image);
    auto it = fixed.find(g);
    if (it != fixed.end()) {
      std::vector<int> next = image;
      next[g] = it->second;
      if (close_map(b, c, fixed, next))
        if (!extend(gi + 1, next)) return false;
      return true;
    }
    for (int target = 0; target < c.size(); ++target) {
      std::vector<int> next = image;
      next[g] = target;
      if (!close_map(b, c, fixed, next)) continue;
      if (!extend(gi + 1, next)) return false;
    }
    return true;
  }
};

}  // namespace

void for_each_homomorphism(const Structure& b, const Structure& c,
                           const std::map<int, int>& fixed,
                           const std::function<bool(const std::vector<int>&)>& visit) {
  if (!(b.signature() == c.signature())) throw Error("signature mismatch");
  for (auto [k, v] : fixed) {
    if (k < 0 || k >= b.size()) throw Error("fixed map domain out of range");
    if (v < 0 || v >= c.size()) throw Error("fixed map image out of range");
  }

  std::vector<int> image(b.size(), -1);
  for (auto [k, v] : fixed) image[k] = v;
  if (!close_map(b, c, fixed, image)) return;

  HomSearch search{b, c, fixed, visit, generating_set(b)};
  // Elements pinned by `fixed` act as additional generators so the
  // backtracking never needs to guess them.
  search.extend(0, image);
}

std::vector<std::vector<int>> homomorphisms(const Structure& b, const Structure& c,
                                            const std::map<int, int>& fixed) {
  std::vector<std::vector<int>> out;
  for_each_homomorphism(b, c, fixed, [&](const std::vector<int>& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

namespace {

// Cheap per-element invariant used to prune isomorphism search.
std::vector<std::vector<int>> element_fingerprints(const Structure& a) {
  std::vector<std::vector<int>> fp(a.size());
  const auto& ops = a.signature().ops();
  for (int e = 0; e < a.size(); ++e) {
    std::vector<int>& v = fp[e];
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int occurrences = 0;
      for (int val : a.op_table(static_cast<int>(f)))
        if (val == e) ++occurrences;
      v.push_back(occurrences);
      // diagonal value for binary ops distinguishes idempotents
      if (ops[f].arity == 2) v.push_back(a.op_value(static_cast<int>(f), {e, e}) == e);
    }
    for (std::size_t r = 0; r < a.signature().rels().size(); ++r) {
      int member = 0;
      for (const auto& tuple : a.rel_table(static_cast<int>(r)))
        for (int x : tuple)
          if (x == e) ++member;
      v.push_back(member);
    }
  }
  return fp;
}

}  // namespace

bool isomorphic(const Structure& a, const Structure& b) {
  if (!(a.signature() == b.signature())) return false;
  if (a.size() != b.size()) return false;
  auto fa = element_fingerprints(a);
  auto fb = element_fingerprints(b);
  {
    auto sa = fa;
    auto sb = fb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  bool found = false;
  for_each_homomorphism(a, b, {}, [&](const std::vector<int>& h) {
    std::vector<bool> hit(b.size(), false);
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (fa[i] != fb[h[i]]) return true;  // keep searching
      hit[h[i]] = true;
    }
    for (bool x : hit)
      if (!x) return true;
    // bijective homomorphism; relations must be reflected too
    for (std::size_t r = 0; r < b.signature().rels().size(); ++r) {
      if (a.rel_table(static_cast<int>(r)).size() !=
          b.rel_table(static_cast<int>(r)).size())
        return true;
    }
    found = true;
    return false;
  });
  return found;
}

Structure direct_product(const std::vector<Structure>& factors) {
  if (factors.empty()) throw Error("direct product needs at least one factor");
  const Signature& sig = factors[0].signature();
  for (const auto& f : factors)
    if (!(f.signature() == sig)) throw Error("signature mismatch in product");

  std::size_t total = 1;
  for (const auto& f : factors) total *= static_cast<std::size_t>(f.size());
  if (total > 1u << 20) throw Error("product universe too large");

  auto decode = [&](std::size_t idx) {
    std::vector<int> coords(factors.size());
    for (std::size_t i = factors.size(); i-- > 0;) {
      coords[i] = static_cast<int>(idx % factors[i].size());
      idx /= factors[i].size();
    }
    return coords;
  };
  auto encode = [&](const std::vector<int>& coords) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors.size(); ++i)
      idx = idx * factors[i].size() + static_cast<std::size_t>(coords[i]);
    return static_cast<int>(idx);
  };

  Structure prod(sig, static_cast<int>(total));
  const auto& ops = sig.ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::size_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= total;
    std::vector<int> table(entries);
    std::vector<int> tuple(arity, 0);
    std::size_t flat = 0;
    do {
      std::vector<std::vector<int>> coords(arity);
      for (int i = 0; i < arity; ++i) coords[i] = decode(tuple[i]);
      std::vector<int> result(factors.size());
      for (std::size_t k = 0; k < factors.size(); ++k) {
        std::vector<int> args(arity);
        for (int i = 0; i < arity; ++i) args[i] = coords[i][k];
        result[k] = factors[k].op_value(static_cast<int>(f), args);
      }
      table[flat++] = encode(result);
    } while (arity > 0 && next_tuple(tuple, static_cast<int>(total)));
    prod.set_op_table(ops[f].name, std::move(table));
  }
  const auto& rels = sig.rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    int arity = rels[r].arity;
    std::vector<int> tuple(arity, 0);
    do {
      bool holds = true;
      for (std::size_t k = 0; k < factors.size() && holds; ++k) {
        std::vector<int> args(arity);
        for (int i = 0; i < arity; ++i) args[i] = decode(tuple[i])[k];
        holds = factors[k].rel_holds(static_cast<int>(r), args);
      }
      if (holds) prod.add_rel_tuple(rels[r].name, tuple);
    } while (next_tuple(tuple, static_cast<int>(total)));
  }
  return prod;
}

FilterSpec::FilterSpec(int index_count, std::set<std::uint32_t> member_sets)
    : index_count_(index_count), members_(std::move(member_sets)) {
  if (index_count_ < 1 || index_count_ > 20) throw Error("filter index count out of range");
  std::uint32_t full = (index_count_ >= 32) ? ~0u : ((1u << index_count_) - 1);
  if (members_.empty()) throw Error("filter must be nonempty");
  for (std::uint32_t s : members_) {
    if (s & ~full) throw Error("filter member outside index set");
    for (std::uint32_t t = s;; t = (t + 1) | s) {  // supersets of s within full
      if ((t & full) == t && !members_.count(t))
        throw Error("filter not upward closed");
      if (t == full) break;
    }
  }
  for (std::uint32_t s : members_)
    for (std::uint32_t t : members_)
      if (!members_.count(s & t)) throw Error("filter not closed under intersection");
}

FilterSpec FilterSpec::principal(int index_count, std::uint32_t base) {
  std::uint32_t full = (1u << index_count) - 1;
  std::set<std::uint32_t> members;
  for (std::uint32_t t = base;; t = (t + 1) | base) {
    members.insert(t);
    if (t == full) break;
  }
  return FilterSpec(index_count, std::move(members));
}

FilterSpec FilterSpec::trivial(int index_count) {
  return FilterSpec(index_count, {(1u << index_count) - 1});
}

Structure reduced_product(const std::vector<Structure>& factors, const FilterSpec& d) {
  if (static_cast<int>(factors.size()) != d.index_count())
    throw Error("filter index count does not match factor count");
  if (!d.is_proper()) throw Error("reduced product requires a proper filter");

  Structure prod = direct_product(factors);

  auto decode = [&](int idx) {
    std::vector<int> coords(factors.size());
    std::size_t v = static_cast<std::size_t>(idx);
    for (std::size_t i = factors.size(); i-- > 0;) {
      coords[i] = static_cast<int>(v % factors[i].size());
      v /= factors[i].size();
    }
    return coords;
  };

  // equivalence: tuples agreeing on a member of d
  std::vector<std::pair<int, int>> pairs;
  for (int x = 0; x < prod.size(); ++x) {
    auto cx = decode(x);
    for (int y = x + 1; y < prod.size(); ++y) {
      auto cy = decode(y);
      std::uint32_t agree = 0;
      for (std::size_t i = 0; i < factors.size(); ++i)
        if (cx[i] == cy[i]) agree |= 1u << i;
      if (d.contains(agree)) pairs.emplace_back(x, y);
    }
  }
  Congruence eq = Congruence::from_pairs(prod.size(), pairs);

  // class indices in representative order
  std::vector<int> reps;
  for (int i = 0; i < prod.size(); ++i)
    if (eq.rep(i) == i) reps.push_back(i);
  std::vector<int> class_of(prod.size());
  for (int i = 0; i < prod.size(); ++i)
    class_of[i] = static_cast<int>(
        std::lower_bound(reps.begin(), reps.end(), eq.rep(i)) - reps.begin());

  Structure out(prod.signature(), static_cast<int>(reps.size()));
  const auto& ops = prod.signature().ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::size_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= reps.size();
    std::vector<int> table(entries);
    std::vector<int> tuple(arity, 0);
    std::size_t flat = 0;
    do {
      std::vector<int> args(arity);
      for (int i = 0; i < arity; ++i) args[i] = reps[tuple[i]];
      table[flat++] = class_of[prod.op_value(static_cast<int>(f), args)];
    } while (arity > 0 && next_tuple(tuple, static_cast<int>(reps.size())));
    out.set_op_table(ops[f].name, std::move(table));
  }
  const auto& rels = prod.signature().rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    int arity = rels[r].arity;
    std::vector<int> tuple(arity, 0);
    do {
      // membership holds iff the agreement set of componentwise membership
      // belongs to the filter (evaluated on class representatives)
      std::uint32_t holds_at = 0;
      for (std::size_t k = 0; k < factors.size(); ++k) {
        std::vector<int> args(arity);
        for (int i = 0; i < arity; ++i) args[i] = decode(reps[tuple[i]])[k];
        if (factors[k].rel_holds(static_cast<int>(r), args)) holds_at |= 1u << k;
      }
      if (d.contains(holds_at)) out.add_rel_tuple(rels[r].name, tuple);
    } while (next_tuple(tuple, static_cast<int>(reps.size())));
  }
  return out;
}

Quotient quotient(const Structure& a, const Congruence& theta) {
  if (theta.size() != a.size()) throw Error("congruence size mismatch");

  std::vector<int> reps;
  for (int i = 0; i < a.size(); ++i)
    if (theta.rep(i) == i) reps.push_back(i);
  std::vector<int> class_of(a.size());
  for (int i = 0; i < a.size(); ++i)
    class_of[i] = static_cast<int>(
        std::lower_bound(reps.begin(), reps.end(), theta.rep(i)) - reps.begin());

  const auto& ops = a.signature().ops();
  // compatibility check: equal argument classes must give equal value classes
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::vector<int> t1(arity, 0);
    do {
      std::vector<int> t2(arity, 0);
      do {
        bool equiv = true;
        for (int i = 0; i < arity; ++i)
          if (!theta.same(t1[i], t2[i])) {
            equiv = false;
            break;
          }
        if (equiv && !theta.same(a.op_value(static_cast<int>(f), t1),
                                 a.op_value(static_cast<int>(f), t2)))
          throw Error("partition not compatible with operation " + ops[f].name);
      } while (arity > 0 && next_tuple(t2, a.size()));
      if (arity == 0) break;
    } while (next_tuple(t1, a.size()));
  }

  Structure out(a.signature(), static_cast<int>(reps.size()));
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::size_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= reps.size();
    std::vector<int> table(entries);
    std::vector<int> tuple(arity, 0);
    std::size_t flat = 0;
    do {
      std::vector<int> args(arity);
      for (int i = 0; i < arity; ++i) args[i] = reps[tuple[i]];
      table[flat++] = class_of[a.op_value(static_cast<int>(f), args)];
    } while (arity > 0 && next_tuple(tuple, static_cast<int>(reps.size())));
    out.set_op_table(ops[f].name, std::move(table));
  }
  const auto& rels = a.signature().rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    for (const auto& tuple : a.rel_table(static_cast<int>(r))) {
      std::vector<int> mapped(tuple.size());
      for (std::size_t i = 0; i < tuple.size(); ++i) mapped[i] = class_of[tuple[i]];
      out.add_rel_tuple(rels[r].name, mapped);
    }
  }
  return Quotient{std::move(out), std::move(class_of)};
}

Congruence congruence_closure_of_pairs(const Structure& a,
                                       const std::vector<std::pair<int, int>>& pairs) {
  for (auto [x, y] : pairs)
    if (x < 0 || x >= a.size() || y < 0 || y >= a.size())
      throw Error("pair element out of range");
  Congruence c = Congruence::from_pairs(a.size(), pairs);
  const auto& ops = a.signature().ops();
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<int, int>> extra;
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      if (arity == 0) continue;
      std::vector<int> t1(arity, 0);
      do {
        std::vector<int> t2(arity, 0);
        do {
          bool equiv = true;
          for (int i = 0; i < arity; ++i)
            if (!c.same(t1[i], t2[i])) {
              equiv = false;
              break;
            }
          if (equiv) {
            int v1 = a.op_value(static_cast<int>(f), t1);
            int v2 = a.op_value(static_cast<int>(f), t2);
            if (!c.same(v1, v2)) extra.emplace_back(v1, v2);
          }
        } while (next_tuple(t2, a.size()));
      } while (next_tuple(t1, a.size()));
    }
    if (!extra.empty()) {
      for (int i = 0; i < a.size(); ++i) extra.emplace_back(i, c.rep(i));
      c = Congruence::from_pairs(a.size(), extra);
      changed = true;
    }
  }
  return c;
}

namespace {

// Enumerates partitions of {0..n-1} via restricted growth strings.
void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> block(n, 0);
  std::function<void(int, int)> rec = [&](int i, int max_used) {
    if (i == n) {
      fn(block);
      return;
    }
    for (int b = 0; b <= max_used + 1 && b <= i; ++b) {
      block[i] = b;
      rec(i + 1, std::max(max_used, b));
    }
  };
  rec(0, -1);
}

}  // namespace

std::vector<Congruence> all_congruences(const Structure& a) {
  std::vector<Congruence> out;
  for_each_partition(a.size(), [&](const std::vector<int>& block) {
    // convert to representative form: smallest element with the same block id
    std::map<int, int> first;
    std::vector<int> rep(a.size());
    for (int i = 0; i < a.size(); ++i) {
      auto it = first.find(block[i]);
      if (it == first.end()) {
        first[block[i]] = i;
        rep[i] = i;
      } else {
        rep[i] = it->second;
      }
    }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < a.size(); ++i) pairs.emplace_back(i, rep[i]);
    Congruence c = Congruence::from_pairs(a.size(), pairs);
    // compatibility with every operation table
    const auto& ops = a.signature().ops();
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      if (arity == 0) continue;
      std::vector<int> t1(arity, 0);
      do {
        std::vector<int> t2(arity, 0);
        do {
          bool equiv = true;
          for (int i = 0; i < arity; ++i)
            if (!c.same(t1[i], t2[i])) {
              equiv = false;
              break;
            }
          if (equiv && !c.same(a.op_value(static_cast<int>(f), t1),
                               a.op_value(static_cast<int>(f), t2)))
            return;
        } while (next_tuple(t2, a.size()));
      } while (next_tuple(t1, a.size()));
    }
    out.push_back(std::move(c));
  });
  return out;
}

std::string render_structure(const Structure& a) {
  std::ostringstream out;
  out << "structure size " << a.size() << "\n";
  const auto& ops = a.signature().ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    out << "op " << ops[f].name << " " << ops[f].arity << "\n";
    const auto& table = a.op_table(static_cast<int>(f));
    if (ops[f].arity == 0) {
      out << table[0] << "\n";
    } else {
      // one row per leading coordinate block
      std::size_t row = static_cast<std::size_t>(a.size());
      for (std::size_t i = 0; i < table.size(); ++i) {
        out << table[i];
        out << (((i + 1) % row == 0) ? "\n" : " ");
      }
    }
  }
  const auto& rels = a.signature().rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    out << "rel " << rels[r].name << " " << rels[r].arity << "\n";
    for (const auto& tuple : a.rel_table(static_cast<int>(r))) {
      for (std::size_t i = 0; i < tuple.size(); ++i)
        out << tuple[i] << (i + 1 == tuple.size() ? "" : " ");
      out << "\n";
    }
  }
  out << "end\n";
  return out.str();
}

}  // namespace epikit
