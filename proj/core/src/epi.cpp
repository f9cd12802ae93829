#include "epikit/epi.hpp"

#include <algorithm>
#include <future>

#include "epikit/consequence.hpp"
#include "epikit/models.hpp"

namespace epikit {

namespace {

std::string copy_name(int element, int copy) {
  return "e" + std::to_string(element) + "_" + std::to_string(copy);
}

// Ground positive diagram of b in the given copy: one equation per operation
// table entry and one atom per relation tuple.
std::vector<AtomicFormula> copy_diagram(const Structure& b, int copy) {
  std::vector<AtomicFormula> out;
  const auto& ops = b.signature().ops();
  for (std::size_t f = 0; f < ops.size(); ++f) {
    int arity = ops[f].arity;
    std::vector<int> tuple(arity, 0);
    while (true) {
      std::vector<Term> args;
      args.reserve(arity);
      for (int x : tuple) args.push_back(Term::var(copy_name(x, copy)));
      Term lhs = Term::app(ops[f].name, std::move(args));
      Term rhs = Term::var(copy_name(b.op_value(static_cast<int>(f), tuple), copy));
      out.push_back(AtomicFormula::equation(std::move(lhs), std::move(rhs)));
      std::size_t j = tuple.size();
      while (j > 0 && ++tuple[j - 1] == b.size()) tuple[--j] = 0;
      if (j == 0 || arity == 0) break;
    }
  }
  const auto& rels = b.signature().rels();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    for (const auto& tuple : b.rel_table(static_cast<int>(r))) {
      std::vector<Term> args;
      for (int x : tuple) args.push_back(Term::var(copy_name(x, copy)));
      out.push_back(AtomicFormula::relation(rels[r].name, std::move(args)));
    }
  }
  return out;
}

std::vector<int> sorted_subuniverse(const Structure& b, const std::vector<int>& base) {
  std::vector<int> sorted = base;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!is_subuniverse(b, sorted))
    throw Error("base is not the universe of a substructure");
  return sorted;
}

DominionReport dominion_finite_class(const Structure& b, const std::vector<int>& base,
                                     const FiniteClassSemantics& sem) {
  DominionReport report{b, base, {}, true, {}, {}};
  std::vector<bool> excluded(b.size(), false);
  for (std::size_t idx = 0; idx < sem.models.size(); ++idx) {
    auto homs = homomorphisms(b, sem.models[idx]);
    // group homomorphisms by their restriction to the base
    std::map<std::vector<int>, std::vector<std::size_t>> groups;
    for (std::size_t h = 0; h < homs.size(); ++h) {
      std::vector<int> key;
      key.reserve(base.size());
      for (int a : base) key.push_back(homs[h][a]);
      groups[std::move(key)].push_back(h);
    }
    for (const auto& [key, members] : groups) {
      (void)key;
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          const auto& f = homs[members[i]];
          const auto& g = homs[members[j]];
          for (int e = 0; e < b.size(); ++e) {
            if (f[e] != g[e] && !excluded[e]) {
              excluded[e] = true;
              report.excluded_evidence.emplace(e, HomPairEvidence{idx, f, g, e});
            }
          }
        }
      }
    }
  }
  for (int e = 0; e < b.size(); ++e)
    if (!excluded[e]) report.members.push_back(e);
  return report;
}

DominionReport dominion_theory_bounded(const Structure& b, const std::vector<int>& base,
                                       const TheoryBoundedSemantics& sem) {
  if (!(sem.theory.signature() == b.signature()))
    throw Error("theory signature does not match the structure");
  DominionReport report{b, base, {}, false, {}, {}};

  std::vector<std::string> generators;
  for (int e = 0; e < b.size(); ++e) {
    generators.push_back(copy_name(e, 1));
    generators.push_back(copy_name(e, 2));
  }
  std::vector<AtomicFormula> facts = copy_diagram(b, 1);
  auto second = copy_diagram(b, 2);
  facts.insert(facts.end(), second.begin(), second.end());
  for (int a : base)
    facts.push_back(AtomicFormula::equation(Term::var(copy_name(a, 1)),
                                            Term::var(copy_name(a, 2))));

  ChaseState state = chase_run(sem.theory, generators, facts, sem.depth, sem.fuel);
  for (int e = 0; e < b.size(); ++e) {
    Term t1 = Term::var(copy_name(e, 1));
    Term t2 = Term::var(copy_name(e, 2));
    if (state.proves_equal(t1, t2)) {
      report.members.push_back(e);
      report.member_certificates.emplace(
          e, state.certificate(AtomicFormula::equation(t1, t2)));
    }
  }
  return report;
}

}  // namespace

DominionReport dominion(const Structure& b, const std::vector<int>& base,
                        const DominionSemantics& semantics) {
  std::vector<int> sorted = sorted_subuniverse(b, base);
  DominionReport report =
      std::holds_alternative<FiniteClassSemantics>(semantics)
          ? dominion_finite_class(b, sorted, std::get<FiniteClassSemantics>(semantics))
          : dominion_theory_bounded(b, sorted,
                                    std::get<TheoryBoundedSemantics>(semantics));
  // dominions are closed under the operations and contain the base
  for (int a : sorted)
    if (!std::binary_search(report.members.begin(), report.members.end(), a))
      throw Error("internal: dominion lost a base element");
  if (!is_subuniverse(b, report.members))
    throw Error("internal: dominion members are not a subuniverse");
  return report;
}

bool is_epic(const Structure& b, const std::vector<int>& base,
             const DominionSemantics& semantics) {
  return static_cast<int>(dominion(b, base, semantics).members.size()) == b.size();
}

namespace {

std::string diagram_var(int element, int witness_element, const std::vector<int>& base) {
  if (element == witness_element) return "v";
  if (std::binary_search(base.begin(), base.end(), element))
    return "x" + std::to_string(element);
  return "z" + std::to_string(element);
}

}  // namespace

std::vector<AtomicFormula> doubled_sigma(const std::vector<AtomicFormula>& sigma) {
  Substitution first, second;
  first["v"] = Term::var("v1");
  second["v"] = Term::var("v2");
  for (const auto& name : vars(sigma)) {
    if (!name.empty() && name[0] == 'z')
      second[name] = Term::var("y" + name.substr(1));
  }
  std::vector<AtomicFormula> out = substitute(sigma, first);
  auto twin = substitute(sigma, second);
  out.insert(out.end(), twin.begin(), twin.end());
  return out;
}

EpiWitness extract_witness(const Structure& b, const std::vector<int>& base,
                           int element, const DominionSemantics& semantics) {
  std::vector<int> sorted = sorted_subuniverse(b, base);
  if (element < 0 || element >= b.size()) throw Error("element out of range");

  EpiWitness witness;
  witness.b = element;

  if (std::binary_search(sorted.begin(), sorted.end(), element)) {
    witness.sigma = {AtomicFormula::equation(
        Term::var("v"), Term::var("x" + std::to_string(element)))};
    witness.a_vec = {element};
    witness.var_to_element["v"] = element;
    witness.var_to_element["x" + std::to_string(element)] = element;
  } else {
    // full positive diagram over variables, then greedy shrinking against the
    // doubled entailment
    std::vector<AtomicFormula> sigma_full;
    const auto& ops = b.signature().ops();
    for (std::size_t f = 0; f < ops.size(); ++f) {
      int arity = ops[f].arity;
      std::vector<int> tuple(arity, 0);
      while (true) {
        std::vector<Term> args;
        for (int x : tuple) args.push_back(Term::var(diagram_var(x, element, sorted)));
        sigma_full.push_back(AtomicFormula::equation(
            Term::app(ops[f].name, std::move(args)),
            Term::var(diagram_var(b.op_value(static_cast<int>(f), tuple), element,
                                  sorted))));
        std::size_t j = tuple.size();
        while (j > 0 && ++tuple[j - 1] == b.size()) tuple[--j] = 0;
        if (j == 0 || arity == 0) break;
      }
    }
    const auto& rels = b.signature().rels();
    for (std::size_t r = 0; r < rels.size(); ++r) {
      for (const auto& tuple : b.rel_table(static_cast<int>(r))) {
        std::vector<Term> args;
        for (int x : tuple) args.push_back(Term::var(diagram_var(x, element, sorted)));
        sigma_full.push_back(AtomicFormula::relation(rels[r].name, std::move(args)));
      }
    }

    AtomicFormula goal = AtomicFormula::equation(Term::var("v1"), Term::var("v2"));
    EntailmentDecider decider = [&](const std::vector<AtomicFormula>& subset,
                                    const AtomicFormula& p) {
      auto doubled = doubled_sigma(subset);
      if (std::holds_alternative<TheoryBoundedSemantics>(semantics)) {
        const auto& sem = std::get<TheoryBoundedSemantics>(semantics);
        return entails_theory(sem.theory, doubled, p, sem.depth, sem.fuel).proved;
      }
      const auto& sem = std::get<FiniteClassSemantics>(semantics);
      return entails_finite_class(sem.models, doubled, p).holds;
    };
    if (!decider(sigma_full, goal))
      throw Error("element is not in the dominion under the given semantics");
    witness.sigma = shrink_premises(decider, sigma_full, goal);

    if (std::holds_alternative<TheoryBoundedSemantics>(semantics)) {
      const auto& sem = std::get<TheoryBoundedSemantics>(semantics);
      auto result = entails_theory(sem.theory, doubled_sigma(witness.sigma), goal,
                                   sem.depth, sem.fuel);
      witness.entailment_certificate = result.certificate;
    }

    witness.var_to_element["v"] = element;
    std::set<int> a_used, c_used;
    for (const auto& name : vars(witness.sigma)) {
      if (name == "v") continue;
      int e = std::stoi(name.substr(1));
      witness.var_to_element[name] = e;
      if (name[0] == 'x')
        a_used.insert(e);
      else
        c_used.insert(e);
    }
    witness.a_vec.assign(a_used.begin(), a_used.end());
    witness.c_vec.assign(c_used.begin(), c_used.end());
  }

  // the structure satisfies the witness at its own elements
  for (const auto& atom : witness.sigma)
    if (!satisfies(b, atom, witness.var_to_element))
      throw Error("internal: witness is not satisfied by the structure");
  return witness;
}

std::vector<EsPair> scan_es(const Theory& t, int max_size, const ScanOptions& opts) {
  std::vector<Structure> models = enumerate_models_up_to(t, max_size);

  DominionSemantics semantics =
      opts.finite_class_max
          ? DominionSemantics(FiniteClassSemantics{
                enumerate_models_up_to(t, *opts.finite_class_max)})
          : DominionSemantics(TheoryBoundedSemantics{t, opts.depth, opts.fuel});

  auto pipeline = [&](const Structure& model) {
    std::vector<EsPair> found;
    if (model.size() < 2) return found;
    // proper nonempty subuniverses, in mask order
    for (std::uint32_t mask = 1; mask + 1 < (1u << model.size()); ++mask) {
      std::vector<int> subset;
      for (int e = 0; e < model.size(); ++e)
        if (mask & (1u << e)) subset.push_back(e);
      if (!is_subuniverse(model, subset)) continue;
      DominionReport report = dominion(model, subset, semantics);
      if (static_cast<int>(report.members.size()) == model.size())
        found.push_back(EsPair{model, subset, std::move(report)});
    }
    return found;
  };

  std::vector<EsPair> out;
  if (opts.parallel && models.size() > 1) {
    std::vector<std::future<std::vector<EsPair>>> futures;
    futures.reserve(models.size());
    for (const auto& model : models)
      futures.push_back(std::async(std::launch::async, pipeline, std::cref(model)));
    for (auto& f : futures) {
      auto found = f.get();
      out.insert(out.end(), std::make_move_iterator(found.begin()),
                 std::make_move_iterator(found.end()));
    }
  } else {
    for (const auto& model : models) {
      auto found = pipeline(model);
      out.insert(out.end(), std::make_move_iterator(found.begin()),
                 std::make_move_iterator(found.end()));
    }
  }
  return out;
}

ShrinkAlmostTotalResult shrink_almost_total(const Structure& b,
                                            const std::vector<int>& base,
                                            const std::vector<int>& z,
                                            const std::vector<EpiWitness>& witnesses,
                                            const DominionSemantics& semantics) {
  std::vector<int> sorted = sorted_subuniverse(b, base);
  if (z.empty()) throw Error("z must be nonempty (the base must be proper)");
  std::vector<int> zs = z;
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  for (int e : zs) {
    if (e < 0 || e >= b.size()) throw Error("z element out of range");
    if (std::binary_search(sorted.begin(), sorted.end(), e))
      throw Error("z must be disjoint from the base");
  }
  {
    std::vector<int> seed = sorted;
    seed.insert(seed.end(), zs.begin(), zs.end());
    if (static_cast<int>(subuniverse_closure(b, seed).size()) != b.size())
      throw Error("base and z do not generate the structure");
  }
  if (witnesses.size() != zs.size())
    throw Error("one witness per element of z is required");
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const EpiWitness& w = witnesses[i];
    if (w.b != zs[i]) throw Error("witness order must match z");
    for (int a : w.a_vec)
      if (!std::binary_search(sorted.begin(), sorted.end(), a))
        throw Error("witness a-elements must lie in the base");
    for (int c : w.c_vec)
      if (!std::binary_search(zs.begin(), zs.end(), c))
        throw Error("witness c-elements must lie in z");
  }

  std::set<int> y_set;
  for (const auto& w : witnesses) y_set.insert(w.a_vec.begin(), w.a_vec.end());
  std::vector<int> y(y_set.begin(), y_set.end());

  std::vector<int> a_prime_ambient = subuniverse_closure(b, y);
  std::vector<int> seed = y;
  seed.insert(seed.end(), zs.begin(), zs.end());
  Substructure bp = generated_substructure(b, seed);

  std::vector<int> a_prime;
  for (std::size_t i = 0; i < bp.embedding.size(); ++i)
    if (std::binary_search(a_prime_ambient.begin(), a_prime_ambient.end(),
                           bp.embedding[i]))
      a_prime.push_back(static_cast<int>(i));
  if (a_prime.empty())
    throw Error("shrunken base is empty: witnesses use no base elements and the "
                "signature has no constants");

  ShrinkAlmostTotalResult result{bp.structure, bp.embedding, a_prime, y,
                                 true,         false,        false};
  result.proper = a_prime.size() < static_cast<std::size_t>(bp.structure.size());
  result.epic = is_epic(bp.structure, a_prime, semantics);
  return result;
}

}  // namespace epikit
