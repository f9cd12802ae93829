// Backtracking table search with axiom-driven propagation and canonicity
// pruning under universe permutations.
#include "epikit/models.hpp"

#include <algorithm>
#include <numeric>

namespace epikit {

namespace {

constexpr int kUnknown = -1;

struct Cell {
  bool is_rel;
  int symbol;     // op or rel index
  std::size_t flat;
};

struct Finder {
  const Theory& theory;
  const Signature& sig;
  int n;
  ModelEnumOptions opts;
  const std::function<bool(const Structure&)>& visit;

  std::vector<Cell> cells;
  std::vector<std::vector<int>> op_tab;    // -1 unknown
  std::vector<std::vector<int>> rel_tab;   // -1 unknown, 0 absent, 1 present
  std::vector<std::pair<int, std::size_t>> trail;  // (encoded table, flat)
  std::vector<std::vector<int>> perms;
  std::uint64_t nodes = 0;
  bool stopped = false;

  // axiom instantiation scratch
  struct AxiomVars {
    std::vector<std::string> names;
  };
  std::vector<AxiomVars> axiom_vars;

  Finder(const Theory& t, int size, const ModelEnumOptions& o,
         const std::function<bool(const Structure&)>& v)
      : theory(t), sig(t.signature()), n(size), opts(o), visit(v) {
    std::size_t max_table = 0;
    op_tab.resize(sig.ops().size());
    for (std::size_t f = 0; f < sig.ops().size(); ++f) {
      op_tab[f].assign(pow_n(sig.ops()[f].arity), kUnknown);
      if (sig.ops()[f].arity > 0) max_table = std::max(max_table, op_tab[f].size());
    }
    rel_tab.resize(sig.rels().size());
    for (std::size_t r = 0; r < sig.rels().size(); ++r)
      rel_tab[r].assign(pow_n(sig.rels()[r].arity), kUnknown);

    for (std::size_t f = 0; f < sig.ops().size(); ++f)
      if (sig.ops()[f].arity == 0) cells.push_back({false, static_cast<int>(f), 0});
    for (std::size_t flat = 0; flat < max_table; ++flat)
      for (std::size_t f = 0; f < sig.ops().size(); ++f)
        if (sig.ops()[f].arity > 0 && flat < op_tab[f].size())
          cells.push_back({false, static_cast<int>(f), flat});
    for (std::size_t r = 0; r < sig.rels().size(); ++r)
      for (std::size_t flat = 0; flat < rel_tab[r].size(); ++flat)
        cells.push_back({true, static_cast<int>(r), flat});

    for (const auto& ax : theory.axioms()) {
      auto vs = vars(ax);
      axiom_vars.push_back({std::vector<std::string>(vs.begin(), vs.end())});
    }

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) perms.push_back(perm);
  }

  std::size_t pow_n(int arity) const {
    std::size_t s = 1;
    for (int i = 0; i < arity; ++i) s *= static_cast<std::size_t>(n);
    return s;
  }

  int get(const Cell& c) const {
    return c.is_rel ? rel_tab[c.symbol][c.flat] : op_tab[c.symbol][c.flat];
  }

  void set(bool is_rel, int symbol, std::size_t flat, int value) {
    int encoded = (is_rel ? 1 : 0) | (symbol << 1);
    trail.emplace_back(encoded, flat);
    (is_rel ? rel_tab[symbol] : op_tab[symbol])[flat] = value;
  }

  void undo_to(std::size_t mark) {
    while (trail.size() > mark) {
      auto [encoded, flat] = trail.back();
      trail.pop_back();
      ((encoded & 1) ? rel_tab[encoded >> 1] : op_tab[encoded >> 1])[flat] = kUnknown;
    }
  }

  // --- partial term evaluation over an assignment of axiom variables ---

  int eval(const Term& t, const std::map<std::string, int>& v) const {
    if (t.is_var()) return v.at(t.head());
    std::size_t idx = 0;
    for (const auto& arg : t.args()) {
      int a = eval(arg, v);
      if (a == kUnknown) return kUnknown;
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    }
    return op_tab[sig.op_index(t.head())][idx];
  }

  // tri-state: 1 true, 0 false, -1 unknown
  int atom_status(const AtomicFormula& a, const std::map<std::string, int>& v) const {
    if (a.is_equation()) {
      int l = eval(a.lhs(), v), r = eval(a.rhs(), v);
      if (l == kUnknown || r == kUnknown) return -1;
      return l == r ? 1 : 0;
    }
    std::size_t idx = 0;
    for (const auto& arg : a.args()) {
      int x = eval(arg, v);
      if (x == kUnknown) return -1;
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(x);
    }
    return rel_tab[sig.rel_index(a.rel())][idx];
  }

  // Forces t to evaluate to `value` when possible. Returns false on conflict.
  bool force_term(const Term& t, int value, const std::map<std::string, int>& v,
                  bool& progressed) {
    if (t.is_var()) return v.at(t.head()) == value;
    std::size_t idx = 0;
    for (const auto& arg : t.args()) {
      int a = eval(arg, v);
      if (a == kUnknown) return true;  // cannot force yet
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    }
    int f = sig.op_index(t.head());
    int cur = op_tab[f][idx];
    if (cur == kUnknown) {
      set(false, f, idx, value);
      progressed = true;
      return true;
    }
    return cur == value;
  }

  // Applies one axiom under one assignment. Returns false on conflict.
  bool apply_instance(const Implication& ax, const std::map<std::string, int>& v,
                      bool& progressed) {
    for (const auto& p : ax.premises()) {
      int s = atom_status(p, v);
      if (s == 0) return true;   // premise false: instance satisfied
      if (s == -1) return true;  // undecided: revisit later
    }
    const auto& c = ax.conclusion();
    if (c.is_equation()) {
      int l = eval(c.lhs(), v), r = eval(c.rhs(), v);
      if (l != kUnknown && r != kUnknown) return l == r;
      if (l != kUnknown) return force_term(c.rhs(), l, v, progressed);
      if (r != kUnknown) return force_term(c.lhs(), r, v, progressed);
      return true;
    }
    std::size_t idx = 0;
    for (const auto& arg : c.args()) {
      int x = eval(arg, v);
      if (x == kUnknown) return true;
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(x);
    }
    int r = sig.rel_index(c.rel());
    int cur = rel_tab[r][idx];
    if (cur == kUnknown) {
      set(true, r, idx, 1);
      progressed = true;
      return true;
    }
    return cur == 1;
  }

  bool propagate() {
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (std::size_t i = 0; i < theory.axioms().size(); ++i) {
        const auto& names = axiom_vars[i].names;
        std::map<std::string, int> v;
        std::vector<int> tuple(names.size(), 0);
        bool more = true;
        while (more) {
          for (std::size_t k = 0; k < names.size(); ++k) v[names[k]] = tuple[k];
          if (!apply_instance(theory.axioms()[i], v, progressed)) return false;
          more = false;
          for (std::size_t k = tuple.size(); k-- > 0;) {
            if (++tuple[k] < n) {
              more = true;
              break;
            }
            tuple[k] = 0;
          }
        }
      }
    }
    return true;
  }

  // Lexicographic comparison against permuted tables over decided prefixes.
  // Returns true if some permutation yields a strictly smaller table vector,
  // in which case the current branch cannot contain a canonical model.
  bool dominated() const {
    for (const auto& p : perms) {
      int verdict = 0;  // 0 undecided-equal so far
      for (const auto& c : cells) {
        int orig = get(c);
        if (orig == kUnknown) break;
        int image;
        if (!c.is_rel) {
          // permuted table entry at this position comes from the preimage tuple
          int arity = sig.ops()[c.symbol].arity;
          std::size_t pre = preimage_flat(c.flat, arity, p);
          int source = op_tab[c.symbol][pre];
          if (source == kUnknown) break;
          image = p[source];
        } else {
          int arity = sig.rels()[c.symbol].arity;
          std::size_t pre = preimage_flat(c.flat, arity, p);
          image = rel_tab[c.symbol][pre];
          if (image == kUnknown) break;
        }
        if (image != orig) {
          verdict = image < orig ? -1 : 1;
          break;
        }
      }
      if (verdict < 0) return true;
    }
    return false;
  }

  // flat index of the tuple obtained by applying p^{-1} componentwise
  std::size_t preimage_flat(std::size_t flat, int arity, const std::vector<int>& p) const {
    std::vector<int> tuple(arity);
    for (int i = arity - 1; i >= 0; --i) {
      tuple[i] = static_cast<int>(flat % n);
      flat /= n;
    }
    std::size_t idx = 0;
    for (int i = 0; i < arity; ++i) {
      // position tuple maps through p; we need the source tuple q with p(q)=tuple
      idx = idx * n + inverse_of(p, tuple[i]);
    }
    return idx;
  }

  static int inverse_of(const std::vector<int>& p, int v) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] == v) return static_cast<int>(i);
    return -1;
  }

  void emit() {
    Structure s(sig, n);
    for (std::size_t f = 0; f < sig.ops().size(); ++f)
      s.set_op_table(sig.ops()[f].name, op_tab[f]);
    for (std::size_t r = 0; r < sig.rels().size(); ++r) {
      int arity = sig.rels()[r].arity;
      for (std::size_t flat = 0; flat < rel_tab[r].size(); ++flat) {
        if (rel_tab[r][flat] != 1) continue;
        std::vector<int> tuple(arity);
        std::size_t rest = flat;
        for (int i = arity - 1; i >= 0; --i) {
          tuple[i] = static_cast<int>(rest % n);
          rest /= n;
        }
        s.add_rel_tuple(sig.rels()[r].name, tuple);
      }
    }
    if (!visit(s)) stopped = true;
  }

  void search(std::size_t cell_idx) {
    if (stopped) return;
    if (++nodes > opts.node_limit) throw Error("model search node limit exceeded");
    while (cell_idx < cells.size() && get(cells[cell_idx]) != kUnknown) ++cell_idx;
    if (cell_idx == cells.size()) {
      emit();
      return;
    }
    const Cell& c = cells[cell_idx];
    int domain = c.is_rel ? 2 : n;
    for (int value = 0; value < domain && !stopped; ++value) {
      std::size_t mark = trail.size();
      set(c.is_rel, c.symbol, c.flat, value);
      if (propagate() && !(opts.up_to_iso && dominated())) search(cell_idx + 1);
      undo_to(mark);
    }
  }

  void run() {
    if (!propagate()) return;
    if (opts.up_to_iso && dominated()) return;
    search(0);
  }
};

}  // namespace

void for_each_model(const Theory& t, int size, const ModelEnumOptions& opts,
                    const std::function<bool(const Structure&)>& visit) {
  if (size < 1) throw Error("model size must be >= 1");
  Finder finder(t, size, opts, visit);
  finder.run();
}

std::vector<Structure> enumerate_models(const Theory& t, int size,
                                        const ModelEnumOptions& opts) {
  std::vector<Structure> out;
  for_each_model(t, size, opts, [&](const Structure& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

std::vector<Structure> enumerate_models_up_to(const Theory& t, int max_size,
                                              const ModelEnumOptions& opts) {
  std::vector<Structure> out;
  for (int size = 1; size <= max_size; ++size) {
    auto models = enumerate_models(t, size, opts);
    out.insert(out.end(), models.begin(), models.end());
  }
  return out;
}

}  // namespace epikit
