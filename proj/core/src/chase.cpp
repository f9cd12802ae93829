#include "epikit/chase.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

namespace epikit {

int default_universe_cap() {
  static int cap = [] {
    if (const char* env = std::getenv("EPIKIT_MAX_UNIVERSE")) {
      int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 20000;
  }();
  return cap;
}

std::string format_certificate(const Certificate& cert) {
  std::ostringstream out;
  int k = 1;
  for (const auto& step : cert.steps) {
    out << "[" << k++ << "] RULE axiom#" << step.axiom_index << " WITH {";
    bool first = true;
    for (const auto& [var, term] : step.subst) {
      if (!first) out << ", ";
      first = false;
      out << var << " ↦ " << to_string(term);
    }
    out << "} ⇒ " << to_string(step.conclusion) << "\n";
  }
  out << "goal: " << to_string(cert.goal) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// union-find with proof forest
// ---------------------------------------------------------------------------

int ChaseState::find(int x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void ChaseState::link_proof(int a, int b, Reason reason) {
  // re-root a's proof tree at a, then hang it under b
  int cur = a;
  int prev = -1;
  Reason carried;
  while (cur != -1) {
    int next = proof_parent_[cur];
    Reason r = proof_reason_[cur];
    proof_parent_[cur] = prev;
    proof_reason_[cur] = carried;
    prev = cur;
    carried = r;
    cur = next;
  }
  proof_parent_[a] = b;
  proof_reason_[a] = reason;
}

int ChaseState::merge(int a, int b, Reason reason) {
  int ra = find(a), rb = find(b);
  if (ra == rb) return -1;
  link_proof(a, b, reason);
  int root = std::min(ra, rb);
  int other = std::max(ra, rb);
  parent_[other] = root;
  class_depth_[root] = std::min(class_depth_[root], class_depth_[other]);
  for (int p : parents_[other]) {
    pending_.push_back(p);
    parents_[root].push_back(p);
  }
  parents_[other].clear();
  facts_dirty_ = true;
  return root;
}

void ChaseState::rebuild() {
  while (!pending_.empty()) {
    int n = pending_.back();
    pending_.pop_back();
    std::vector<int> key_children;
    key_children.reserve(nodes_[n].children.size());
    for (int c : nodes_[n].children) key_children.push_back(find(c));
    auto key = std::make_pair(nodes_[n].op, std::move(key_children));
    auto it = hashcons_.find(key);
    if (it == hashcons_.end()) {
      hashcons_.emplace(std::move(key), n);
    } else if (find(it->second) != find(n)) {
      TraceEntry e;
      e.kind = Reason::Kind::Cong;
      e.is_merge = true;
      e.a = n;
      e.b = it->second;
      trace_.push_back(std::move(e));
      merge(n, it->second, Reason{Reason::Kind::Cong, static_cast<int>(trace_.size()) - 1});
    }
  }
  if (facts_dirty_) recanonicalize_facts();
}

void ChaseState::recanonicalize_facts() {
  std::map<std::pair<int, std::vector<int>>, int> fresh;
  for (const auto& [key, step] : fact_index_) {
    std::vector<int> canon;
    canon.reserve(key.second.size());
    for (int x : key.second) canon.push_back(find(x));
    auto fresh_key = std::make_pair(key.first, std::move(canon));
    auto it = fresh.find(fresh_key);
    if (it == fresh.end())
      fresh.emplace(std::move(fresh_key), step);
    else
      it->second = std::min(it->second, step);
  }
  fact_index_ = std::move(fresh);
  facts_dirty_ = false;
}

// ---------------------------------------------------------------------------
// universe construction
// ---------------------------------------------------------------------------

int ChaseState::create_generator(const std::string& name) {
  if (static_cast<int>(nodes_.size()) >= limits_.max_nodes)
    throw UniverseLimitError("chase universe exceeds " +
                             std::to_string(limits_.max_nodes) + " terms");
  int id = static_cast<int>(nodes_.size());
  Node node;
  node.generator = static_cast<int>(generators_.size());
  node.depth = 0;
  nodes_.push_back(std::move(node));
  parent_.push_back(id);
  class_depth_.push_back(0);
  parents_.emplace_back();
  proof_parent_.push_back(-1);
  proof_reason_.emplace_back();
  generator_index_[name] = id;
  generators_.push_back(name);
  return id;
}

int ChaseState::get_or_create(int op, const std::vector<int>& children) {
  std::vector<int> key_children;
  key_children.reserve(children.size());
  for (int c : children) key_children.push_back(find(c));
  auto key = std::make_pair(op, key_children);
  auto it = hashcons_.find(key);
  if (it != hashcons_.end()) return it->second;

  if (static_cast<int>(nodes_.size()) >= limits_.max_nodes)
    throw UniverseLimitError("chase universe exceeds " +
                             std::to_string(limits_.max_nodes) + " terms");
  int id = static_cast<int>(nodes_.size());
  Node node;
  node.op = op;
  node.children = children;
  int d = 0;
  for (int c : key_children) d = std::max(d, class_depth_[c]);
  node.depth = d + 1;
  nodes_.push_back(std::move(node));
  parent_.push_back(id);
  class_depth_.push_back(d + 1);
  parents_.emplace_back();
  proof_parent_.push_back(-1);
  proof_reason_.emplace_back();
  for (int c : key_children) parents_[c].push_back(id);
  hashcons_.emplace(std::move(key), id);
  return id;
}

std::optional<int> ChaseState::eval_term(const Term& t) const {
  if (t.is_var()) {
    auto it = generator_index_.find(t.head());
    if (it == generator_index_.end()) return std::nullopt;
    return it->second;
  }
  int op = sig_.op_index(t.head());
  if (op < 0) return std::nullopt;
  std::vector<int> children;
  children.reserve(t.args().size());
  for (const auto& a : t.args()) {
    auto c = eval_term(a);
    if (!c) return std::nullopt;
    children.push_back(find(*c));
  }
  auto it = hashcons_.find(std::make_pair(op, children));
  if (it == hashcons_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> ChaseState::resolve_term(const Term& t,
                                            std::vector<std::pair<int, int>>& eqs) const {
  if (t.is_var()) {
    auto it = generator_index_.find(t.head());
    if (it == generator_index_.end()) return std::nullopt;
    return it->second;
  }
  int op = sig_.op_index(t.head());
  if (op < 0) return std::nullopt;
  std::vector<int> resolved;
  resolved.reserve(t.args().size());
  for (const auto& a : t.args()) {
    auto c = resolve_term(a, eqs);
    if (!c) return std::nullopt;
    resolved.push_back(*c);
  }
  std::vector<int> key_children;
  key_children.reserve(resolved.size());
  for (int c : resolved) key_children.push_back(find(c));
  auto it = hashcons_.find(std::make_pair(op, std::move(key_children)));
  if (it == hashcons_.end()) return std::nullopt;
  int n = it->second;
  const auto& stored = nodes_[n].children;
  for (std::size_t i = 0; i < stored.size(); ++i)
    if (stored[i] != resolved[i]) eqs.emplace_back(resolved[i], stored[i]);
  return n;
}

int ChaseState::materialize_term(const Term& t) {
  if (t.is_var()) {
    auto it = generator_index_.find(t.head());
    if (it == generator_index_.end())
      throw Error("variable is not a chase generator: " + t.head());
    return it->second;
  }
  int op = sig_.op_index(t.head());
  if (op < 0) throw Error("unknown operation symbol: " + t.head());
  std::vector<int> children;
  children.reserve(t.args().size());
  for (const auto& a : t.args()) children.push_back(materialize_term(a));
  return get_or_create(op, children);
}

Term ChaseState::term_of_node(int node) const {
  const Node& n = nodes_[node];
  if (n.generator >= 0) return Term::var(generators_[n.generator]);
  std::vector<Term> args;
  args.reserve(n.children.size());
  for (int c : n.children) args.push_back(term_of_node(c));
  return Term::app(sig_.ops()[n.op].name, std::move(args));
}

bool ChaseState::add_fact(int rel, const std::vector<int>& tuple, Reason reason,
                          const TraceEntry* proto) {
  std::vector<int> canon;
  canon.reserve(tuple.size());
  for (int x : tuple) canon.push_back(find(x));
  auto key = std::make_pair(rel, std::move(canon));
  if (fact_index_.count(key)) return false;
  TraceEntry e;
  if (proto) e = *proto;
  e.kind = reason.kind;
  e.is_merge = false;
  e.rel = rel;
  e.tuple = tuple;
  trace_.push_back(std::move(e));
  fact_index_.emplace(std::move(key), static_cast<int>(trace_.size()) - 1);
  return true;
}

std::optional<int> ChaseState::fact_step(int rel, const std::vector<int>& tuple) const {
  std::vector<int> canon;
  canon.reserve(tuple.size());
  for (int x : tuple) canon.push_back(find(x));
  auto it = fact_index_.find(std::make_pair(rel, std::move(canon)));
  if (it == fact_index_.end()) return std::nullopt;
  return it->second;
}

void ChaseState::expand_layer(int layer) {
  std::vector<int> snapshot;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (find(i) == i && class_depth_[i] <= layer - 1) snapshot.push_back(i);
  if (snapshot.empty()) return;
  for (std::size_t f = 0; f < sig_.ops().size(); ++f) {
    int arity = sig_.ops()[f].arity;
    if (arity == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
      std::vector<int> children(arity);
      for (int i = 0; i < arity; ++i) children[i] = snapshot[idx[i]];
      get_or_create(static_cast<int>(f), children);
      std::size_t k = idx.size();
      while (k > 0 && ++idx[k - 1] == snapshot.size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  rebuild();
}

ChaseState ChaseState::init(const Signature& sig,
                            const std::vector<std::string>& generators,
                            const std::vector<AtomicFormula>& facts, int depth,
                            const ChaseLimits& limits) {
  if (depth < 0) throw Error("chase depth must be >= 0");
  ChaseState st;
  st.sig_ = sig;
  st.depth_ = depth;
  st.limits_ = limits;
  st.facts_given_ = facts;

  std::set<std::string> seen;
  for (const auto& g : generators) {
    if (!seen.insert(g).second) throw Error("duplicate generator: " + g);
    if (sig.op_index(g) >= 0 || sig.rel_index(g) >= 0)
      throw Error("generator name clashes with a signature symbol: " + g);
    st.create_generator(g);
  }
  for (std::size_t f = 0; f < sig.ops().size(); ++f)
    if (sig.ops()[f].arity == 0) st.get_or_create(static_cast<int>(f), {});

  for (const auto& fact : facts) {
    check_well_formed(fact, sig);
    for (const auto& v : vars(fact))
      if (!st.generator_index_.count(v))
        throw Error("initial fact mentions a non-generator variable: " + v);
    if (fact.is_equation()) {
      int a = st.materialize_term(fact.lhs());
      int b = st.materialize_term(fact.rhs());
      if (st.find(a) != st.find(b)) {
        TraceEntry e;
        e.kind = Reason::Kind::Init;
        e.is_merge = true;
        e.a = a;
        e.b = b;
        e.init_atom = fact;
        st.trace_.push_back(std::move(e));
        st.merge(a, b, Reason{Reason::Kind::Init, static_cast<int>(st.trace_.size()) - 1});
      }
    } else {
      int rel = sig.rel_index(fact.rel());
      std::vector<int> tuple;
      for (const auto& arg : fact.args()) tuple.push_back(st.materialize_term(arg));
      TraceEntry proto;
      proto.init_atom = fact;
      st.add_fact(rel, tuple, Reason{Reason::Kind::Init, -1}, &proto);
    }
    st.rebuild();
  }
  for (int layer = 1; layer <= depth; ++layer) st.expand_layer(layer);
  return st;
}

int ChaseState::class_count() const {
  int count = 0;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (find(i) == i) ++count;
  return count;
}

bool ChaseState::proves_equal(const Term& a, const Term& b) const {
  auto na = eval_term(a);
  if (!na) throw Error("term outside the chase universe: " + to_string(a));
  auto nb = eval_term(b);
  if (!nb) throw Error("term outside the chase universe: " + to_string(b));
  return find(*na) == find(*nb);
}

bool ChaseState::proves(const AtomicFormula& ground_atom) const {
  if (ground_atom.is_equation())
    return proves_equal(ground_atom.lhs(), ground_atom.rhs());
  int rel = sig_.rel_index(ground_atom.rel());
  if (rel < 0) throw Error("unknown relation symbol: " + ground_atom.rel());
  std::vector<int> tuple;
  for (const auto& arg : ground_atom.args()) {
    auto n = eval_term(arg);
    if (!n) throw Error("term outside the chase universe: " + to_string(arg));
    tuple.push_back(*n);
  }
  return fact_step(rel, tuple).has_value();
}

// ---------------------------------------------------------------------------
// e-matching and saturation
// ---------------------------------------------------------------------------

struct ChaseState::MatchContext {
  const ChaseState& st;
  std::vector<int> roots;
  std::vector<std::vector<int>> nodes_by_op;
  std::vector<std::vector<int>> members;  // indexed by root id

  explicit MatchContext(const ChaseState& s) : st(s) {
    nodes_by_op.resize(s.sig_.ops().size());
    members.resize(s.nodes_.size());
    for (int i = 0; i < static_cast<int>(s.nodes_.size()); ++i) {
      if (s.find(i) == i) roots.push_back(i);
      if (s.nodes_[i].op >= 0) nodes_by_op[s.nodes_[i].op].push_back(i);
      members[s.find(i)].push_back(i);
    }
  }
};

namespace {

using Sigma = std::map<std::string, int>;  // variable -> node (class witness)

}  // namespace

namespace detail {

struct Matcher {
  const ChaseState::MatchContext& ctx;
  const ChaseState& st;
  const Signature& sig;

  std::optional<int> eval_pattern(const Term& t, const Sigma& sigma) const;

  void match_in_class(const Term& pat, int root, Sigma& sigma,
                      const std::function<void()>& k) const;
  void match_args(const std::vector<int>& children, const std::vector<Term>& pats,
                  std::size_t i, Sigma& sigma, const std::function<void()>& k) const;
  void match_anywhere(const Term& pat, Sigma& sigma,
                      const std::function<void(int)>& k) const;
};

std::optional<int> Matcher::eval_pattern(const Term& t, const Sigma& sigma) const {
  if (t.is_var()) {
    auto it = sigma.find(t.head());
    if (it == sigma.end()) return std::nullopt;
    return it->second;
  }
  int op = sig.op_index(t.head());
  std::vector<int> children;
  children.reserve(t.args().size());
  for (const auto& a : t.args()) {
    auto c = eval_pattern(a, sigma);
    if (!c) return std::nullopt;
    children.push_back(st.find(*c));
  }
  auto it = st.hashcons_.find(std::make_pair(op, std::move(children)));
  if (it == st.hashcons_.end()) return std::nullopt;
  return it->second;
}

void Matcher::match_in_class(const Term& pat, int root, Sigma& sigma,
                             const std::function<void()>& k) const {
  if (pat.is_var()) {
    auto it = sigma.find(pat.head());
    if (it != sigma.end()) {
      if (st.find(it->second) == root) k();
      return;
    }
    sigma[pat.head()] = root;
    k();
    sigma.erase(pat.head());
    return;
  }
  int op = sig.op_index(pat.head());
  for (int n : ctx.members[root]) {
    if (st.nodes_[n].op != op) continue;
    match_args(st.nodes_[n].children, pat.args(), 0, sigma, k);
  }
}

void Matcher::match_args(const std::vector<int>& children, const std::vector<Term>& pats,
                         std::size_t i, Sigma& sigma,
                         const std::function<void()>& k) const {
  if (i == pats.size()) {
    k();
    return;
  }
  match_in_class(pats[i], st.find(children[i]), sigma,
                 [&] { match_args(children, pats, i + 1, sigma, k); });
}

void Matcher::match_anywhere(const Term& pat, Sigma& sigma,
                             const std::function<void(int)>& k) const {
  if (pat.is_var()) {
    auto it = sigma.find(pat.head());
    if (it != sigma.end()) {
      k(st.find(it->second));
      return;
    }
    for (int root : ctx.roots) {
      sigma[pat.head()] = root;
      k(root);
      sigma.erase(pat.head());
    }
    return;
  }
  bool all_bound = true;
  for (const auto& v : vars(pat))
    if (!sigma.count(v)) {
      all_bound = false;
      break;
    }
  if (all_bound) {
    auto n = eval_pattern(pat, sigma);
    if (n) k(st.find(*n));
    return;
  }
  int op = sig.op_index(pat.head());
  for (int n : ctx.nodes_by_op[op])
    match_args(st.nodes_[n].children, pat.args(), 0, sigma,
               [&] { k(st.find(n)); });
}

}  // namespace detail

void ChaseState::saturation_round(const Theory& theory, std::int64_t& fuel,
                                  bool& changed) {
  MatchContext ctx(*this);
  detail::Matcher m{ctx, *this, sig_};

  struct Candidate {
    int axiom;
    std::vector<std::pair<std::string, int>> sigma;
  };
  std::vector<Candidate> candidates;

  for (std::size_t ax = 0; ax < theory.axioms().size(); ++ax) {
    const Implication& imp = theory.axioms()[ax];
    std::set<std::vector<int>> seen;
    std::set<std::string> imp_vars = vars(imp);
    std::vector<std::string> var_names(imp_vars.begin(), imp_vars.end());

    Sigma sigma;
    auto record = [&] {
      std::vector<int> key;
      key.reserve(var_names.size());
      for (const auto& v : var_names) key.push_back(find(sigma.at(v)));
      if (!seen.insert(key).second) return;
      Candidate c;
      c.axiom = static_cast<int>(ax);
      for (const auto& v : var_names) c.sigma.emplace_back(v, sigma.at(v));
      candidates.push_back(std::move(c));
    };

    // after premises, bind any remaining variables by matching the
    // conclusion's terms against the universe
    std::function<void()> match_conclusion = [&] {
      const AtomicFormula& c = imp.conclusion();
      if (c.is_equation()) {
        m.match_anywhere(c.lhs(), sigma, [&](int) {
          m.match_anywhere(c.rhs(), sigma, [&](int) { record(); });
        });
      } else {
        std::function<void(std::size_t)> go = [&](std::size_t i) {
          if (i == c.args().size()) {
            record();
            return;
          }
          m.match_anywhere(c.args()[i], sigma, [&](int) { go(i + 1); });
        };
        go(0);
      }
    };

    std::function<void(std::size_t)> solve = [&](std::size_t k) {
      if (k == imp.premises().size()) {
        match_conclusion();
        return;
      }
      const AtomicFormula& p = imp.premises()[k];
      if (p.is_equation()) {
        m.match_anywhere(p.lhs(), sigma, [&](int root) {
          m.match_in_class(p.rhs(), root, sigma, [&] { solve(k + 1); });
        });
      } else {
        int rel = sig_.rel_index(p.rel());
        for (const auto& [key, step] : fact_index_) {
          (void)step;
          if (key.first != rel) continue;
          std::function<void(std::size_t)> go = [&](std::size_t i) {
            if (i == p.args().size()) {
              solve(k + 1);
              return;
            }
            m.match_in_class(p.args()[i], find(key.second[i]), sigma,
                             [&] { go(i + 1); });
          };
          go(0);
        }
      }
    };
    solve(0);
  }

  // apply phase: premises are monotone, so matches collected against the
  // round-start state stay valid as merges land
  for (const auto& cand : candidates) {
    if (fuel <= 0) {
      complete_ = false;
      return;
    }
    const Implication& imp = theory.axioms()[cand.axiom];

    Substitution subst_terms;
    for (const auto& [v, n] : cand.sigma) subst_terms[v] = term_of_node(n);

    TraceEntry e;
    e.kind = Reason::Kind::Axiom;
    e.axiom = cand.axiom;
    e.subst = cand.sigma;
    bool premises_ok = true;
    std::vector<AtomicFormula> ground_premises;
    for (const auto& p : imp.premises()) {
      AtomicFormula ground = substitute(p, subst_terms);
      if (ground.is_equation()) {
        auto u = resolve_term(ground.lhs(), e.resolution_eqs);
        auto w = resolve_term(ground.rhs(), e.resolution_eqs);
        if (!u || !w || find(*u) != find(*w)) {
          premises_ok = false;
          break;
        }
        e.premise_eqs.emplace_back(*u, *w);
      } else {
        int rel = sig_.rel_index(ground.rel());
        std::vector<int> args;
        bool ok = true;
        for (const auto& t : ground.args()) {
          auto n = resolve_term(t, e.resolution_eqs);
          if (!n) {
            ok = false;
            break;
          }
          args.push_back(*n);
        }
        auto step = ok ? fact_step(rel, args) : std::nullopt;
        if (!step) {
          premises_ok = false;
          break;
        }
        TraceEntry::PremFact pf;
        pf.rel = rel;
        pf.args = args;
        pf.step = *step;
        pf.step_args = trace_[*step].tuple;
        e.premise_facts.push_back(std::move(pf));
      }
      ground_premises.push_back(std::move(ground));
    }
    if (!premises_ok) continue;

    const AtomicFormula& c = imp.conclusion();
    AtomicFormula ground_c = substitute(c, subst_terms);
    if (c.is_equation()) {
      auto u = resolve_term(ground_c.lhs(), e.resolution_eqs);
      auto w = resolve_term(ground_c.rhs(), e.resolution_eqs);
      if (!u || !w) continue;
      if (find(*u) == find(*w)) continue;
      e.is_merge = true;
      e.a = *u;
      e.b = *w;
      e.init_atom = std::move(ground_c);
      e.ground_premises = std::move(ground_premises);
      trace_.push_back(std::move(e));
      merge(*u, *w, Reason{Reason::Kind::Axiom, static_cast<int>(trace_.size()) - 1});
      rebuild();
      --fuel;
      changed = true;
    } else {
      int rel = sig_.rel_index(ground_c.rel());
      std::vector<int> args;
      bool ok = true;
      for (const auto& t : ground_c.args()) {
        auto n = resolve_term(t, e.resolution_eqs);
        if (!n) {
          ok = false;
          break;
        }
        args.push_back(*n);
      }
      if (!ok) continue;
      e.init_atom = std::move(ground_c);
      e.ground_premises = std::move(ground_premises);
      if (add_fact(rel, args, Reason{Reason::Kind::Axiom, -1}, &e)) {
        --fuel;
        changed = true;
      }
    }
  }
}

std::int64_t ChaseState::saturate(const Theory& theory, std::int64_t fuel) {
  if (!(theory.signature() == sig_)) throw Error("theory signature mismatch");
  complete_ = true;
  std::int64_t initial = fuel;
  bool changed = true;
  while (changed && complete_) {
    changed = false;
    saturation_round(theory, fuel, changed);
  }
  return initial - fuel;
}

ChaseState chase_run(const Theory& theory, const std::vector<std::string>& generators,
                     const std::vector<AtomicFormula>& facts, int depth,
                     std::int64_t fuel, const ChaseLimits& limits) {
  ChaseState st = ChaseState::init(theory.signature(), generators, facts, 0, limits);
  st.depth_ = depth;
  fuel -= st.saturate(theory, fuel);
  for (int layer = 1; layer <= depth && st.complete(); ++layer) {
    st.expand_layer(layer);
    fuel -= st.saturate(theory, fuel);
  }
  return st;
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

struct ChaseState::SliceBuilder {
  const ChaseState& st;
  std::set<int> steps;                      // axiom-firing trace indices
  std::set<std::pair<int, int>> explained;  // memoized node pairs

  void explain(int u, int v) {
    if (st.find(u) != st.find(v))
      throw Error("internal: explain on unequal nodes");
    if (u == v) return;
    auto key = std::minmax(u, v);
    if (!explained.insert(key).second) return;

    // unique tree path u..v in the proof forest
    std::map<int, int> up_of;  // ancestor -> child along u's chain
    {
      int cur = u;
      while (cur != -1) {
        up_of[cur] = cur;
        cur = st.proof_parent_[cur];
      }
    }
    int junction = v;
    while (!up_of.count(junction)) junction = st.proof_parent_[junction];

    auto walk = [&](int from) {
      int cur = from;
      while (cur != junction) {
        handle_edge(cur);
        cur = st.proof_parent_[cur];
      }
    };
    walk(u);
    walk(v);
  }

  void handle_edge(int child) {
    const Reason& r = st.proof_reason_[child];
    switch (r.kind) {
      case Reason::Kind::Init:
        break;
      case Reason::Kind::Axiom:
        include_step(r.trace);
        break;
      case Reason::Kind::Cong: {
        const TraceEntry& e = st.trace_[r.trace];
        const auto& ca = st.nodes_[e.a].children;
        const auto& cb = st.nodes_[e.b].children;
        for (std::size_t i = 0; i < ca.size(); ++i) explain(ca[i], cb[i]);
        break;
      }
      case Reason::Kind::None:
        throw Error("internal: edge without a reason");
    }
  }

  void include_step(int t) {
    if (steps.count(t)) return;
    steps.insert(t);
    const TraceEntry& e = st.trace_[t];
    for (auto [x, y] : e.resolution_eqs) explain(x, y);
    for (auto [x, y] : e.premise_eqs) explain(x, y);
    for (const auto& pf : e.premise_facts) {
      const TraceEntry& src = st.trace_[pf.step];
      if (src.kind == Reason::Kind::Axiom) include_step(pf.step);
      for (std::size_t i = 0; i < pf.args.size(); ++i)
        explain(pf.args[i], pf.step_args[i]);
    }
  }
};

Certificate ChaseState::certificate(const AtomicFormula& goal) const {
  SliceBuilder builder{*this, {}, {}};
  std::vector<std::pair<int, int>> goal_eqs;
  if (goal.is_equation()) {
    auto u = resolve_term(goal.lhs(), goal_eqs);
    auto w = resolve_term(goal.rhs(), goal_eqs);
    if (!u || !w) throw Error("goal term outside the chase universe");
    if (find(*u) != find(*w)) throw Error("goal not proved: " + to_string(goal));
    builder.explain(*u, *w);
  } else {
    int rel = sig_.rel_index(goal.rel());
    if (rel < 0) throw Error("unknown relation symbol: " + goal.rel());
    std::vector<int> args;
    for (const auto& t : goal.args()) {
      auto n = resolve_term(t, goal_eqs);
      if (!n) throw Error("goal term outside the chase universe");
      args.push_back(*n);
    }
    auto step = fact_step(rel, args);
    if (!step) throw Error("goal not proved: " + to_string(goal));
    const TraceEntry& src = trace_[*step];
    if (src.kind == Reason::Kind::Axiom) builder.include_step(*step);
    for (std::size_t i = 0; i < args.size(); ++i)
      builder.explain(args[i], src.tuple[i]);
  }
  for (auto [x, y] : goal_eqs) builder.explain(x, y);

  Certificate cert{goal, {}};
  for (int t : builder.steps) {  // std::set iterates ascending = trace order
    const TraceEntry& e = trace_[t];
    CertStep step{e.axiom, {}, e.ground_premises, *e.init_atom};
    for (const auto& [v, n] : e.subst) step.subst.emplace_back(v, term_of_node(n));
    cert.steps.push_back(std::move(step));
  }
  return cert;
}

bool ChaseState::apply_step(const CertStep& step, const Theory& theory) {
  if (step.axiom_index < 0 ||
      step.axiom_index >= static_cast<int>(theory.axioms().size()))
    return false;
  const Implication& axiom = theory.axioms()[step.axiom_index];
  Substitution subst(step.subst.begin(), step.subst.end());

  // the step must be an honest instance of the named axiom
  std::vector<AtomicFormula> expected;
  for (const auto& p : axiom.premises()) expected.push_back(substitute(p, subst));
  std::vector<AtomicFormula> recorded = step.premises;
  std::sort(expected.begin(), expected.end());
  std::sort(recorded.begin(), recorded.end());
  expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
  recorded.erase(std::unique(recorded.begin(), recorded.end()), recorded.end());
  if (expected != recorded) return false;
  if (substitute(axiom.conclusion(), subst) != step.conclusion) return false;

  for (const auto& p : step.premises) {
    if (p.is_equation()) {
      int u = materialize_term(p.lhs());
      int w = materialize_term(p.rhs());
      rebuild();
      if (find(u) != find(w)) return false;
    } else {
      int rel = sig_.rel_index(p.rel());
      if (rel < 0) return false;
      std::vector<int> args;
      for (const auto& t : p.args()) args.push_back(materialize_term(t));
      rebuild();
      if (!fact_step(rel, args)) return false;
    }
  }

  const AtomicFormula& c = step.conclusion;
  if (c.is_equation()) {
    int u = materialize_term(c.lhs());
    int w = materialize_term(c.rhs());
    if (find(u) != find(w)) {
      TraceEntry e;
      e.kind = Reason::Kind::Axiom;
      e.is_merge = true;
      e.a = u;
      e.b = w;
      e.axiom = step.axiom_index;
      e.init_atom = c;
      trace_.push_back(std::move(e));
      merge(u, w, Reason{Reason::Kind::Axiom, static_cast<int>(trace_.size()) - 1});
      rebuild();
    }
  } else {
    int rel = sig_.rel_index(c.rel());
    if (rel < 0) return false;
    std::vector<int> args;
    for (const auto& t : c.args()) args.push_back(materialize_term(t));
    rebuild();
    TraceEntry proto;
    proto.axiom = step.axiom_index;
    proto.init_atom = c;
    add_fact(rel, args, Reason{Reason::Kind::Axiom, -1}, &proto);
  }
  return true;
}

void ChaseState::materialize(const AtomicFormula& ground_atom) {
  if (ground_atom.is_equation()) {
    materialize_term(ground_atom.lhs());
    materialize_term(ground_atom.rhs());
  } else {
    for (const auto& t : ground_atom.args()) materialize_term(t);
  }
  rebuild();
}

bool replay(const Certificate& cert, const Theory& theory,
            const std::vector<std::string>& generators,
            const std::vector<AtomicFormula>& facts, const ChaseLimits& limits) {
  try {
    ChaseState st = ChaseState::init(theory.signature(), generators, facts, 0, limits);
    for (const auto& step : cert.steps)
      if (!st.apply_step(step, theory)) return false;
    st.materialize(cert.goal);
    return st.proves(cert.goal);
  } catch (const Error&) {
    return false;
  }
}

Certificate minimize_certificate(const Certificate& cert, const Theory& theory,
                                 const std::vector<std::string>& generators,
                                 const std::vector<AtomicFormula>& facts,
                                 const ChaseLimits& limits) {
  if (!replay(cert, theory, generators, facts, limits))
    throw Error("certificate does not replay");
  Certificate out = cert;
  for (std::size_t i = 0; i < out.steps.size();) {
    Certificate trial = out;
    trial.steps.erase(trial.steps.begin() + static_cast<std::ptrdiff_t>(i));
    if (replay(trial, theory, generators, facts, limits))
      out = std::move(trial);
    else
      ++i;
  }
  return out;
}

}  // namespace epikit
