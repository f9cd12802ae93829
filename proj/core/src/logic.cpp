#include "epikit/logic.hpp"

#include <algorithm>
#include <functional>

#include "epikit/consequence.hpp"
#include "epikit/models.hpp"

namespace epikit {

// ---------------------------------------------------------------------------
// bounded derivability
// ---------------------------------------------------------------------------

namespace {

void collect_subterms(const Term& t, std::set<Term>& out) {
  out.insert(t);
  for (const auto& a : t.args()) collect_subterms(a, out);
}

bool match_term(const Term& pattern, const Term& term, Substitution& sigma) {
  if (pattern.is_var()) {
    auto it = sigma.find(pattern.head());
    if (it != sigma.end()) return it->second == term;
    sigma[pattern.head()] = term;
    return true;
  }
  if (term.is_var() || term.head() != pattern.head() ||
      term.args().size() != pattern.args().size())
    return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_term(pattern.args()[i], term.args()[i], sigma)) return false;
  return true;
}

}  // namespace

DeriveResult derives(const DeductiveSystem& s, const std::vector<Term>& gamma,
                     const Term& goal, std::int64_t fuel, int depth) {
  for (const auto& t : gamma) check_well_formed(t, s.signature());
  check_well_formed(goal, s.signature());

  struct Provenance {
    int rule_index = -1;
    Substitution subst;
    std::vector<Term> premises;
  };

  std::vector<Term> derived;
  std::map<Term, Provenance> origin;

  // substitution images come from the subterm closure of the query; this
  // keeps blind rule instantiation from feeding on its own output
  std::set<Term> image_pool;
  for (const auto& t : gamma) collect_subterms(t, image_pool);
  collect_subterms(goal, image_pool);

  auto push = [&](const Term& t, Provenance p) {
    if (origin.count(t)) return false;
    origin.emplace(t, std::move(p));
    derived.push_back(t);
    return true;
  };

  for (const auto& t : gamma) push(t, Provenance{});

  DeriveResult result;
  auto finish_proved = [&](const Term& phi) {
    result.proved = true;
    // backward slice through the provenance map
    std::set<Term> visited;
    std::function<void(const Term&)> emit = [&](const Term& t) {
      if (visited.count(t)) return;
      visited.insert(t);
      const Provenance& p = origin.at(t);
      if (p.rule_index < 0) return;  // premise from gamma
      for (const auto& q : p.premises) emit(q);
      result.trace.push_back(DeriveStep{p.rule_index, p.subst, p.premises, t});
    };
    emit(phi);
  };

  if (origin.count(goal)) {
    finish_proved(goal);
    result.complete = true;
    return result;
  }

  std::int64_t budget = fuel;
  bool saturated = false;
  while (!saturated && budget > 0 && !result.proved) {
    saturated = true;
    for (std::size_t r = 0; r < s.rules().size() && !result.proved; ++r) {
      const Rule& rule = s.rules()[r];

      // order premises so that structured patterns bind variables first
      std::vector<const Term*> prems;
      for (const auto& p : rule.premises)
        if (!p.is_var()) prems.push_back(&p);
      for (const auto& p : rule.premises)
        if (p.is_var()) prems.push_back(&p);

      std::vector<Term> images;
      for (const auto& t : image_pool)
        if (t.depth() <= depth) images.push_back(t);

      std::size_t derived_at_start = derived.size();
      std::function<void(std::size_t, Substitution&)> instantiate =
          [&](std::size_t k, Substitution& sigma) {
            if (result.proved || budget <= 0) return;
            if (k == prems.size()) {
              // bind any conclusion-only variables from the image list
              std::vector<std::string> free;
              for (const auto& v : vars(rule.conclusion))
                if (!sigma.count(v)) free.push_back(v);
              std::function<void(std::size_t)> bind = [&](std::size_t i) {
                if (result.proved || budget <= 0) return;
                if (i == free.size()) {
                  std::vector<Term> premise_terms;
                  premise_terms.reserve(rule.premises.size());
                  for (const auto& p : rule.premises)
                    premise_terms.push_back(substitute(p, sigma));
                  Term conclusion = substitute(rule.conclusion, sigma);
                  if (push(conclusion,
                           Provenance{static_cast<int>(r), sigma, premise_terms})) {
                    --budget;
                    saturated = false;
                    if (conclusion == goal) finish_proved(goal);
                  }
                  return;
                }
                for (const auto& img : images) {
                  sigma[free[i]] = img;
                  bind(i + 1);
                  sigma.erase(free[i]);
                  if (result.proved || budget <= 0) return;
                }
              };
              bind(0);
              return;
            }
            const Term& pattern = *prems[k];
            // match against terms derived before this round's additions to
            // keep each round's work bounded; new matches surface next round
            for (std::size_t d = 0; d < derived_at_start; ++d) {
              Substitution trial = sigma;
              if (match_term(pattern, derived[d], trial)) instantiate(k + 1, trial);
              if (result.proved || budget <= 0) return;
            }
          };
      Substitution sigma;
      instantiate(0, sigma);
    }
  }
  result.complete = result.proved || saturated;
  return result;
}

// ---------------------------------------------------------------------------
// matrix semantics
// ---------------------------------------------------------------------------

Theory matrix_model_theory(const DeductiveSystem& s) {
  Signature sig = s.signature().with_unary_rel("r");
  std::vector<Implication> axioms;
  for (const auto& rule : s.rules()) {
    std::vector<AtomicFormula> premises;
    for (const auto& p : rule.premises)
      premises.push_back(AtomicFormula::relation("r", {p}));
    axioms.emplace_back(std::move(premises),
                        AtomicFormula::relation("r", {rule.conclusion}));
  }
  return Theory(std::move(sig), std::move(axioms));
}

std::optional<MatrixCountermodel> refute_rule(const DeductiveSystem& s,
                                              const std::vector<Term>& gamma,
                                              const Term& phi, int max_size) {
  Theory theory = matrix_model_theory(s);
  std::vector<AtomicFormula> premises;
  for (const auto& g : gamma) premises.push_back(AtomicFormula::relation("r", {g}));
  AtomicFormula conclusion = AtomicFormula::relation("r", {phi});
  for (int size = 1; size <= max_size; ++size) {
    auto models = enumerate_models(theory, size);
    auto res = entails_finite_class(models, premises, conclusion);
    if (!res.holds)
      return MatrixCountermodel{models[res.counterexample->structure_index],
                                res.counterexample->assignment};
  }
  return std::nullopt;
}

std::string to_string(EquivCondition c) {
  switch (c) {
    case EquivCondition::Reflexivity:
      return "reflexivity";
    case EquivCondition::Detachment:
      return "detachment";
    case EquivCondition::Congruence:
      return "congruence";
  }
  return "?";
}

EquivalentialCheck check_equivalential(const DeductiveSystem& s,
                                       const std::vector<Term>& delta,
                                       std::int64_t fuel, int depth, int refute_size) {
  for (const auto& d : delta) {
    check_well_formed(d, s.signature());
    for (const auto& v : vars(d))
      if (v != "x" && v != "y")
        throw Error("delta terms must use only the variables x and y");
  }

  struct Goal {
    EquivCondition condition;
    std::string label;
    std::vector<Term> gamma;
    Term goal;
  };
  std::vector<Goal> goals;

  Substitution xx{{"x", Term::var("x")}, {"y", Term::var("x")}};
  for (std::size_t i = 0; i < delta.size(); ++i)
    goals.push_back({EquivCondition::Reflexivity,
                     "reflexivity#" + std::to_string(i),
                     {},
                     substitute(delta[i], xx)});

  {
    std::vector<Term> gamma{Term::var("x")};
    for (const auto& d : delta) gamma.push_back(d);
    goals.push_back(
        {EquivCondition::Detachment, "detachment", std::move(gamma), Term::var("y")});
  }

  for (const auto& op : s.signature().ops()) {
    std::vector<Term> gamma;
    std::vector<Term> xs, ys;
    for (int i = 1; i <= op.arity; ++i) {
      xs.push_back(Term::var("x" + std::to_string(i)));
      ys.push_back(Term::var("y" + std::to_string(i)));
    }
    for (int i = 0; i < op.arity; ++i) {
      Substitution sub{{"x", xs[i]}, {"y", ys[i]}};
      for (const auto& d : delta) gamma.push_back(substitute(d, sub));
    }
    Substitution head{{"x", Term::app(op.name, xs)}, {"y", Term::app(op.name, ys)}};
    for (std::size_t i = 0; i < delta.size(); ++i)
      goals.push_back({EquivCondition::Congruence,
                       "congruence(" + op.name + ")#" + std::to_string(i), gamma,
                       substitute(delta[i], head)});
  }

  EquivalentialCheck out;
  bool all_proved = true;
  for (const auto& g : goals) {
    DeriveResult dr = derives(s, g.gamma, g.goal, fuel, depth);
    out.derivations[g.label] = dr;
    if (dr.proved) continue;
    all_proved = false;
    auto counter = refute_rule(s, g.gamma, g.goal, refute_size);
    if (counter) {
      out.status = EquivalentialCheck::Status::Failed;
      out.failed_at = g.condition;
      out.detail = g.label;
      out.countermodel = std::move(counter);
      return out;
    }
  }
  out.status = all_proved ? EquivalentialCheck::Status::Verified
                          : EquivalentialCheck::Status::Unknown;
  return out;
}

// ---------------------------------------------------------------------------
// Leibniz congruence and matrix reduction
// ---------------------------------------------------------------------------

Congruence leibniz(const Structure& matrix) {
  if (matrix.signature().rels().size() != 1 || matrix.signature().rels()[0].arity != 1)
    throw Error("a matrix needs exactly one unary relation");
  int n = matrix.size();
  std::vector<bool> filter(n, false);
  for (const auto& tuple : matrix.rel_table(0)) filter[tuple[0]] = true;

  // unary polynomial clone as a set of functions, generated from the identity
  // and the constants by composing the operation tables
  std::set<std::vector<int>> clone;
  std::vector<std::vector<int>> worklist;
  auto add = [&](std::vector<int> f) {
    if (clone.insert(f).second) worklist.push_back(std::move(f));
  };
  {
    std::vector<int> id(n);
    for (int i = 0; i < n; ++i) id[i] = i;
    add(std::move(id));
    for (int c = 0; c < n; ++c) add(std::vector<int>(n, c));
  }
  const auto& ops = matrix.signature().ops();
  while (!worklist.empty()) {
    // closure pass: combine everything currently known
    worklist.clear();
    std::vector<std::vector<int>> snapshot(clone.begin(), clone.end());
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      if (arity == 0) continue;
      std::vector<std::size_t> idx(arity, 0);
      while (true) {
        std::vector<int> composed(n);
        for (int v = 0; v < n; ++v) {
          std::vector<int> args(arity);
          for (int i = 0; i < arity; ++i) args[i] = snapshot[idx[i]][v];
          composed[v] = matrix.op_value(static_cast<int>(f), args);
        }
        add(std::move(composed));
        std::size_t k = idx.size();
        while (k > 0 && ++idx[k - 1] == snapshot.size()) idx[--k] = 0;
        if (k == 0) break;
      }
    }
  }

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      bool indiscernible = true;
      for (const auto& p : clone) {
        if (filter[p[a]] != filter[p[b]]) {
          indiscernible = false;
          break;
        }
      }
      if (indiscernible) pairs.emplace_back(a, b);
    }
  }
  Congruence omega = Congruence::from_pairs(n, pairs);

  // sanity: congruence, and the filter is a union of classes
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (omega.same(a, b) && filter[a] != filter[b])
        throw Error("internal: filter is not a union of classes");
  return omega;
}

Quotient reduce_matrix(const Structure& matrix) {
  Congruence omega = leibniz(matrix);
  return quotient(matrix, omega);
}

Theory mod_star_theory(const DeductiveSystem& s, const std::vector<Term>& delta) {
  Theory base = matrix_model_theory(s);
  std::vector<Implication> axioms = base.axioms();
  std::vector<AtomicFormula> premises;
  for (const auto& d : delta) premises.push_back(AtomicFormula::relation("r", {d}));
  axioms.emplace_back(std::move(premises),
                      AtomicFormula::equation(Term::var("x"), Term::var("y")));
  return Theory(base.signature(), std::move(axioms));
}

// ---------------------------------------------------------------------------
// algebraizability
// ---------------------------------------------------------------------------

namespace {

std::vector<AtomicFormula> translate_term(const AlgebraizerData& d, const Term& t) {
  std::vector<AtomicFormula> out;
  for (const auto& [delta_i, eps_i] : d.defining_pairs) {
    Substitution sub{{"x", t}};
    out.push_back(
        AtomicFormula::equation(substitute(delta_i, sub), substitute(eps_i, sub)));
  }
  return out;
}

}  // namespace

AlgebraizerReport check_algebraizer(const DeductiveSystem& s, const AlgebraizerData& d,
                                    const std::vector<Structure>& k_models,
                                    const std::vector<Rule>& extra_sample,
                                    std::int64_t fuel, int depth) {
  AlgebraizerReport report;
  using Status = AlgebraizerReport::Status;

  auto check_rule = [&](const Rule& rule, const std::string& label, Status derivable) {
    std::vector<AtomicFormula> premises;
    for (const auto& g : rule.premises) {
      auto tr = translate_term(d, g);
      premises.insert(premises.end(), tr.begin(), tr.end());
    }
    Status translated = Status::Pass;
    for (const auto& conclusion : translate_term(d, rule.conclusion)) {
      if (!entails_finite_class(k_models, premises, conclusion).holds) {
        translated = Status::Fail;
        break;
      }
    }
    report.rule_checks.push_back({label, derivable, translated});
  };

  for (std::size_t i = 0; i < s.rules().size(); ++i)
    check_rule(s.rules()[i], "rule#" + std::to_string(i), Status::Pass);
  for (std::size_t i = 0; i < extra_sample.size(); ++i) {
    const Rule& rule = extra_sample[i];
    DeriveResult dr = derives(s, rule.premises, rule.conclusion, fuel, depth);
    check_rule(rule, "sample#" + std::to_string(i),
               dr.proved ? Status::Pass : Status::Unknown);
  }

  // second condition: the translated delta equations and x = y entail each
  // other over the sample class
  std::vector<AtomicFormula> delta_eqs;
  for (const auto& rho : d.delta) {
    auto tr = translate_term(d, rho);
    delta_eqs.insert(delta_eqs.end(), tr.begin(), tr.end());
  }
  AtomicFormula xy = AtomicFormula::equation(Term::var("x"), Term::var("y"));
  report.cond2_forward = entails_finite_class(k_models, delta_eqs, xy).holds;
  report.cond2_backward = true;
  for (const auto& eq : delta_eqs)
    if (!entails_finite_class(k_models, {xy}, eq).holds) {
      report.cond2_backward = false;
      break;
    }

  report.passed = report.cond2_forward && report.cond2_backward;
  for (const auto& rc : report.rule_checks)
    if (rc.derivable == Status::Pass && rc.translated != Status::Pass)
      report.passed = false;
  return report;
}

// ---------------------------------------------------------------------------
// Beth definability
// ---------------------------------------------------------------------------

std::string to_string(BethVerdict v) {
  switch (v) {
    case BethVerdict::ExplicitlyDefined:
      return "ExplicitlyDefined";
    case BethVerdict::ImplicitNotExplicit:
      return "ImplicitNotExplicit";
    case BethVerdict::NotImplicit:
      return "NotImplicit";
    case BethVerdict::Unknown:
      return "Unknown";
  }
  return "?";
}

BethReport beth_check(const Theory& t, const std::vector<AtomicFormula>& gamma,
                      const std::vector<std::string>& x_vars,
                      const std::vector<std::string>& z_vars, int depth,
                      std::int64_t fuel, int term_depth, int counter_size) {
  if (z_vars.empty()) throw Error("z variable set must be nonempty");
  for (const auto& x : x_vars)
    for (const auto& z : z_vars)
      if (x == z) throw Error("x and z variable sets must be disjoint");
  bool has_constant = false;
  for (const auto& op : t.signature().ops())
    if (op.arity == 0) has_constant = true;
  if (x_vars.empty() && !has_constant)
    throw Error("no terms over x exist: x is empty and there are no constants");
  {
    std::set<std::string> allowed(x_vars.begin(), x_vars.end());
    allowed.insert(z_vars.begin(), z_vars.end());
    for (const auto& a : gamma) {
      check_well_formed(a, t.signature());
      for (const auto& v : vars(a))
        if (!allowed.count(v))
          throw Error("gamma mentions a variable outside x and z: " + v);
    }
  }

  BethReport report;
  std::vector<Structure> models = enumerate_models_up_to(t, counter_size);

  // gamma-satisfying assignments per model
  std::vector<std::string> all_vars = x_vars;
  all_vars.insert(all_vars.end(), z_vars.begin(), z_vars.end());
  std::vector<std::vector<Assignment>> sat(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    int n = models[m].size();
    std::vector<int> tuple(all_vars.size(), 0);
    while (true) {
      Assignment v;
      for (std::size_t i = 0; i < all_vars.size(); ++i) v[all_vars[i]] = tuple[i];
      bool ok = true;
      for (const auto& a : gamma)
        if (!satisfies(models[m], a, v)) {
          ok = false;
          break;
        }
      if (ok) sat[m].push_back(std::move(v));
      std::size_t j = tuple.size();
      while (j > 0 && ++tuple[j - 1] == n) tuple[--j] = 0;
      if (j == 0 || all_vars.empty()) break;
    }
  }

  // --- candidate terms over x, deduplicated by behaviour on the models ---
  struct Candidate {
    Term term;
    std::vector<int> fingerprint;  // value per (model, x-assignment) pair
  };
  // probe points: every assignment of the x variables into every model
  struct Probe {
    std::size_t model;
    Assignment assign;
  };
  std::vector<Probe> probes;
  for (std::size_t m = 0; m < models.size(); ++m) {
    int n = models[m].size();
    std::vector<int> tuple(x_vars.size(), 0);
    while (true) {
      Assignment v;
      for (std::size_t i = 0; i < x_vars.size(); ++i) v[x_vars[i]] = tuple[i];
      probes.push_back({m, std::move(v)});
      std::size_t j = tuple.size();
      while (j > 0 && ++tuple[j - 1] == n) tuple[--j] = 0;
      if (j == 0 || x_vars.empty()) break;
    }
  }

  std::vector<Candidate> candidates;
  std::set<std::vector<int>> seen_fp;
  auto fingerprint_of = [&](const Term& term) {
    std::vector<int> fp;
    fp.reserve(probes.size());
    for (const auto& p : probes) fp.push_back(evaluate(models[p.model], term, p.assign));
    return fp;
  };
  auto offer = [&](const Term& term) {
    auto fp = fingerprint_of(term);
    if (!seen_fp.insert(fp).second) return;
    candidates.push_back({term, std::move(fp)});
  };
  for (const auto& x : x_vars) offer(Term::var(x));
  std::size_t level_start = 0;
  for (int level = 1; level <= term_depth; ++level) {
    std::size_t level_end = candidates.size();
    for (const auto& op : t.signature().ops()) {
      if (op.arity == 0) {
        if (level == 1) offer(Term::app(op.name, {}));
        continue;
      }
      if (level_end == 0) continue;
      // tuples over candidates[0..level_end) with at least one child from the
      // previous level [level_start, level_end)
      std::vector<std::size_t> idx(op.arity, 0);
      while (true) {
        bool fresh = false;
        for (int i = 0; i < op.arity; ++i)
          if (idx[i] >= level_start) fresh = true;
        if (fresh || level == 1) {
          std::vector<Term> args;
          for (int i = 0; i < op.arity; ++i) args.push_back(candidates[idx[i]].term);
          offer(Term::app(op.name, std::move(args)));
        }
        std::size_t k = idx.size();
        while (k > 0 && ++idx[k - 1] == level_end) idx[--k] = 0;
        if (k == 0) break;
      }
    }
    level_start = level_end;
    if (candidates.size() == level_end && level > 1) break;  // fixpoint
  }

  // explicit search: for each z find a candidate that is never refuted and
  // whose defining equation the chase proves
  bool explicit_ok = !z_vars.empty();
  bool any_inconclusive = false;
  for (const auto& z : z_vars) {
    bool found = false;
    for (const auto& cand : candidates) {
      // refutation: a gamma-satisfying assignment where z differs from the
      // candidate's value
      bool refuted = false;
      for (std::size_t m = 0; m < models.size() && !refuted; ++m)
        for (const auto& v : sat[m]) {
          Assignment xpart;
          for (const auto& x : x_vars) xpart[x] = v.at(x);
          if (evaluate(models[m], cand.term, xpart) != v.at(z)) {
            refuted = true;
            break;
          }
        }
      if (refuted) continue;
      auto ent = entails_theory(t, gamma, AtomicFormula::equation(Term::var(z), cand.term),
                                depth, fuel);
      if (ent.proved) {
        report.definitions[z] = cand.term;
        report.definition_certificates[z] = *ent.certificate;
        found = true;
        break;
      }
      any_inconclusive = true;
    }
    if (!found) {
      explicit_ok = false;
      break;
    }
  }
  if (explicit_ok && !z_vars.empty()) {
    report.explicit_established = true;
    report.verdict = BethVerdict::ExplicitlyDefined;
    return report;
  }

  // counter-search: two gamma-satisfying assignments agreeing on x
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t i = 0; i < sat[m].size(); ++i) {
      for (std::size_t j = i + 1; j < sat[m].size(); ++j) {
        const Assignment& v1 = sat[m][i];
        const Assignment& v2 = sat[m][j];
        bool same_x = true;
        for (const auto& x : x_vars)
          if (v1.at(x) != v2.at(x)) {
            same_x = false;
            break;
          }
        if (!same_x) continue;
        for (const auto& z : z_vars) {
          if (v1.at(z) != v2.at(z)) {
            report.verdict = BethVerdict::NotImplicit;
            report.counterexample = BethCounterexample{models[m], v1, v2};
            return report;
          }
        }
      }
    }
  }

  // implicit test via the two-copy chase sharing the x generators
  {
    std::vector<std::string> generators = x_vars;
    Substitution one, two;
    for (const auto& z : z_vars) {
      generators.push_back(z + "_1");
      generators.push_back(z + "_2");
      one[z] = Term::var(z + "_1");
      two[z] = Term::var(z + "_2");
    }
    std::vector<AtomicFormula> facts = substitute(gamma, one);
    auto facts2 = substitute(gamma, two);
    facts.insert(facts.end(), facts2.begin(), facts2.end());
    try {
      ChaseState state = chase_run(t, generators, facts, depth, fuel);
      bool all = true;
      for (const auto& z : z_vars) {
        AtomicFormula goal = AtomicFormula::equation(Term::var(z + "_1"),
                                                     Term::var(z + "_2"));
        if (state.proves(goal)) {
          report.implicit_certificates[z] = state.certificate(goal);
        } else {
          all = false;
          break;
        }
      }
      report.implicit_proved = all && !z_vars.empty();
    } catch (const UniverseLimitError&) {
      report.implicit_proved = false;
    }
  }

  if (report.implicit_proved) {
    report.verdict = BethVerdict::ImplicitNotExplicit;
    report.note = any_inconclusive
                      ? "explicit search exhausted the candidate space at this bound "
                        "with some candidates neither proved nor refuted"
                      : "every candidate definition is refuted by a finite model";
    return report;
  }
  report.verdict = BethVerdict::Unknown;
  return report;
}

}  // namespace epikit
