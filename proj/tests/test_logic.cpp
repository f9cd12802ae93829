#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "epikit/consequence.hpp"
#include "epikit/logic.hpp"
#include "epikit/models.hpp"
#include "helpers.hpp"

using namespace epikit;
using namespace epikit::testing;

namespace {

DeductiveSystem impl_system() {
  return parse_deductive_system(fixture("impl.ds"));
}

std::vector<Term> impl_delta() {
  return parse_term_list(fixture("impl.delta"), impl_system().signature());
}

Structure implication_matrix(const std::vector<int>& table, const std::set<int>& filter) {
  Signature sig = Signature({{"imp", 2}}, {}).with_unary_rel("r");
  int n = 0;
  while (n * n < static_cast<int>(table.size())) ++n;
  Structure m(sig, n);
  m.set_op_table("imp", table);
  for (int f : filter) m.add_rel_tuple("r", {f});
  return m;
}

}  // namespace

TEST_CASE("members of gamma derive immediately") {
  DeductiveSystem s = impl_system();
  Term x = Term::var("x");
  auto res = derives(s, {x}, x, 10, 1);
  CHECK(res.proved);
  CHECK(res.trace.empty());
}

TEST_CASE("the identity implication is a theorem") {
  DeductiveSystem s = impl_system();
  Term goal = parse_term("imp(x, x)", s.signature());
  auto res = derives(s, {}, goal, 50000, 2);
  REQUIRE(res.proved);
  CHECK(res.trace.size() == 5);  // two axiom instances and three detachment-style steps
  CHECK(res.trace.back().conclusion == goal);
  // every step's premises are either from gamma (none here) or earlier steps
  std::set<Term> seen;
  for (const auto& step : res.trace) {
    for (const auto& p : step.premises) CHECK(seen.count(p));
    seen.insert(step.conclusion);
  }
}

TEST_CASE("underivable rules stay unknown and admit countermodels") {
  DeductiveSystem s = impl_system();
  auto res = derives(s, {Term::var("x")}, Term::var("y"), 2000, 2);
  CHECK_FALSE(res.proved);
  auto counter = refute_rule(s, {Term::var("x")}, Term::var("y"), 2);
  REQUIRE(counter.has_value());
  CHECK(counter->assignment.at("x") != counter->assignment.at("y"));
  // the countermodel is a genuine matrix model separating the premise from
  // the conclusion
  int r_idx = counter->matrix.signature().rel_index("r");
  CHECK(counter->matrix.rel_holds(r_idx, {counter->assignment.at("x")}));
  CHECK_FALSE(counter->matrix.rel_holds(r_idx, {counter->assignment.at("y")}));
}

TEST_CASE("derives is sound for small matrix models") {
  DeductiveSystem s = impl_system();
  Theory mt = matrix_model_theory(s);
  auto models = enumerate_models_up_to(mt, 3);
  std::vector<std::pair<std::vector<Term>, Term>> queries = {
      {{}, parse_term("imp(x, x)", s.signature())},
      {{Term::var("x"), parse_term("imp(x, y)", s.signature())}, Term::var("y")},
      {{parse_term("imp(x, y)", s.signature()),
        parse_term("imp(y, z)", s.signature())},
       parse_term("imp(x, z)", s.signature())}};
  for (const auto& [gamma, goal] : queries) {
    auto res = derives(s, gamma, goal, 50000, 2);
    REQUIRE(res.proved);
    std::vector<AtomicFormula> premises;
    for (const auto& g : gamma) premises.push_back(AtomicFormula::relation("r", {g}));
    CHECK(entails_finite_class(models, premises, AtomicFormula::relation("r", {goal}))
              .holds);
  }
}

TEST_CASE("the equivalence set of the implication fixture verifies") {
  DeductiveSystem s = impl_system();
  auto check = check_equivalential(s, impl_delta(), 50000, 2);
  CHECK(check.status == EquivalentialCheck::Status::Verified);
}

TEST_CASE("broken equivalence sets fail with countermodels") {
  DeductiveSystem s = impl_system();
  SUBCASE("delta = {x} fails reflexivity") {
    auto check = check_equivalential(s, {Term::var("x")}, 5000, 2);
    REQUIRE(check.status == EquivalentialCheck::Status::Failed);
    CHECK(*check.failed_at == EquivCondition::Reflexivity);
    REQUIRE(check.countermodel.has_value());
    // refuted by a matrix whose filter is a proper subset
    int r_idx = check.countermodel->matrix.signature().rel_index("r");
    CHECK(check.countermodel->matrix.rel_table(r_idx).size() <
          static_cast<std::size_t>(check.countermodel->matrix.size()));
  }
  SUBCASE("an empty delta in a bare system fails detachment") {
    DeductiveSystem bare(Signature({}, {}), {});
    auto check = check_equivalential(bare, {}, 100, 1);
    REQUIRE(check.status == EquivalentialCheck::Status::Failed);
    CHECK(*check.failed_at == EquivCondition::Detachment);
    CHECK(check.countermodel.has_value());
  }
  SUBCASE("delta terms outside x, y are rejected") {
    CHECK_THROWS_AS(check_equivalential(s, {Term::var("z")}, 100, 1), Error);
  }
}

TEST_CASE("leibniz congruence basics") {
  SUBCASE("full filter collapses everything") {
    Structure m = implication_matrix({1, 1, 0, 1}, {0, 1});
    CHECK(leibniz(m).class_count() == 1);
  }
  SUBCASE("empty filter collapses everything") {
    Structure m = implication_matrix({1, 1, 0, 1}, {});
    CHECK(leibniz(m).class_count() == 1);
  }
  SUBCASE("the two-element implication matrix is reduced") {
    Structure m = implication_matrix({1, 1, 0, 1}, {1});
    CHECK(leibniz(m) == Congruence(2));
  }
  SUBCASE("matrices need exactly one unary relation") {
    Structure plain(Signature({{"imp", 2}}, {}), 2);
    plain.set_op_table("imp", {1, 1, 0, 1});
    CHECK_THROWS_AS(leibniz(plain), Error);
  }
}

namespace {

// Brute-force oracle: the largest congruence for which the filter is a union
// of classes, found by enumerating all congruences.
Congruence leibniz_oracle(const Structure& m) {
  std::vector<bool> filter(m.size(), false);
  for (const auto& t : m.rel_table(0)) filter[t[0]] = true;
  Structure algebra(m.signature().algebra_reduct(), m.size());
  for (std::size_t f = 0; f < m.signature().ops().size(); ++f)
    algebra.set_op_table(m.signature().ops()[f].name, m.op_table(static_cast<int>(f)));
  std::vector<Congruence> candidates;
  for (const auto& c : all_congruences(algebra)) {
    bool compat = true;
    for (int a = 0; a < m.size() && compat; ++a)
      for (int b = 0; b < m.size(); ++b)
        if (c.same(a, b) && filter[a] != filter[b]) {
          compat = false;
          break;
        }
    if (compat) candidates.push_back(c);
  }
  for (const auto& c : candidates) {
    bool top = true;
    for (const auto& d : candidates)
      if (!d.finer_or_equal(c)) {
        top = false;
        break;
      }
    if (top) return c;
  }
  throw Error("oracle: no largest compatible congruence");
}

}  // namespace

TEST_CASE("leibniz equals the brute-force maximum on random matrices") {
  for (int trial = 0; trial < 200; ++trial) {
    int n = rand_int(1, 4);
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    for (auto& v : table) v = rand_int(0, n - 1);
    std::set<int> filter;
    for (int e = 0; e < n; ++e)
      if (rand_int(0, 1)) filter.insert(e);
    Structure m = implication_matrix(table, filter);
    Congruence omega = leibniz(m);
    CHECK(omega == leibniz_oracle(m));
    // the filter is a union of omega-classes
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (omega.same(a, b)) CHECK(filter.count(a) == filter.count(b));
    // reduction leaves a reduced matrix
    auto reduced = reduce_matrix(m);
    CHECK(leibniz(reduced.structure) == Congruence(reduced.structure.size()));
  }
}

TEST_CASE("reducing an already reduced matrix is an isomorphism") {
  Structure m = implication_matrix({1, 1, 0, 1}, {1});
  auto q = reduce_matrix(m);
  CHECK(isomorphic(q.structure, m));
}

TEST_CASE("a totally true matrix reduces to a point") {
  Structure m = implication_matrix({1, 1, 0, 1}, {0, 1});
  auto q = reduce_matrix(m);
  CHECK(q.structure.size() == 1);
  CHECK(q.structure.rel_table(0).size() == 1);
}

TEST_CASE("a four-element matrix with indiscernibles loses one element") {
  // elements 2 and 3 behave identically towards the filter
  Signature sig = Signature({{"imp", 2}}, {}).with_unary_rel("r");
  Structure m(sig, 4);
  // imp(x, y) = 1 unless x = 1 and y in {2, 3}, where it is y itself;
  // elements 2 and 3 are then separated by nothing: p(2) in F iff p(3) in F
  std::vector<int> table(16, 1);
  table[1 * 4 + 2] = 2;
  table[1 * 4 + 3] = 3;
  m.set_op_table("imp", table);
  m.add_rel_tuple("r", {1});
  auto omega = leibniz(m);
  CHECK(omega.same(2, 3));
  CHECK_FALSE(omega.same(0, 1));
  auto q = reduce_matrix(m);
  CHECK(q.structure.size() == 3);
  CHECK(leibniz(q.structure) == Congruence(3));
}

TEST_CASE("isotone on the implication-algebra fixture filters") {
  // sampled comparable filters on a fixed small algebra: growing the filter
  // grows the Leibniz congruence
  std::vector<int> table = {1, 1, 0, 1};
  std::vector<std::set<int>> filters = {{}, {1}, {0, 1}};
  for (std::size_t i = 0; i < filters.size(); ++i) {
    for (std::size_t j = i; j < filters.size(); ++j) {
      if (!std::includes(filters[j].begin(), filters[j].end(), filters[i].begin(),
                         filters[i].end()))
        continue;
      if (filters[i].empty() != filters[j].empty()) continue;  // incomparable regime
      Congruence small = leibniz(implication_matrix(table, filters[i]));
      Congruence large = leibniz(implication_matrix(table, filters[j]));
      CHECK(small.finer_or_equal(large));
    }
  }
}

TEST_CASE("the matrix-model translation of the rules") {
  DeductiveSystem s = impl_system();
  Theory mt = matrix_model_theory(s);
  CHECK(mt.axioms().size() == s.rules().size());
  CHECK(mt.signature().rels().size() == 1);
  Theory star = mod_star_theory(s, impl_delta());
  CHECK(star.axioms().size() == s.rules().size() + 1);
  // the added postulate concludes an equation from the delta facts
  const Implication& postulate = star.axioms().back();
  CHECK(postulate.conclusion().is_equation());
  CHECK(postulate.premises().size() == 2);

  SUBCASE("a ruleless system keeps only the postulate") {
    DeductiveSystem bare(Signature({{"imp", 2}}, {}), {});
    Theory only = mod_star_theory(bare, impl_delta());
    CHECK(only.axioms().size() == 1);
  }
  SUBCASE("reduced matrix models validate the postulate") {
    auto models = enumerate_models_up_to(mt, 3);
    for (const auto& m : models) {
      auto reduced = reduce_matrix(m).structure;
      for (const auto& ax : star.axioms()) CHECK(validates(reduced, ax));
    }
  }
}

TEST_CASE("algebraizer check on the implication-algebra fixture") {
  DeductiveSystem s = impl_system();
  Theory ia = parse_theory(
      "sig op imp 2 op top 0 end axioms "
      "imp(imp(x, y), x) = x\n"
      "imp(imp(x, y), y) = imp(imp(y, x), x)\n"
      "imp(x, imp(y, z)) = imp(y, imp(x, z))\n"
      "imp(x, x) = top() end");
  auto k_models = enumerate_models_up_to(ia, 4);
  REQUIRE(!k_models.empty());

  AlgebraizerData data;
  data.defining_pairs = {{Term::var("x"), parse_term("top()", ia.signature())}};
  data.delta = impl_delta();

  SUBCASE("the standard translation passes both conditions") {
    auto report = check_algebraizer(s, data, k_models, {}, 50000, 2);
    CHECK(report.passed);
    CHECK(report.cond2_forward);
    CHECK(report.cond2_backward);
    for (const auto& rc : report.rule_checks)
      CHECK(rc.translated == AlgebraizerReport::Status::Pass);
  }
  SUBCASE("an identity translation fails the second condition") {
    AlgebraizerData broken;
    broken.defining_pairs = {{Term::var("x"), Term::var("x")}};
    broken.delta = impl_delta();
    auto report = check_algebraizer(s, broken, k_models, {}, 1000, 2);
    CHECK_FALSE(report.cond2_forward);
    CHECK_FALSE(report.passed);
  }
  SUBCASE("extra sampled rules are checked after derivation") {
    std::vector<Rule> extra{{{}, parse_term("imp(x, imp(y, y))", s.signature())}};
    auto report = check_algebraizer(s, data, k_models, extra, 50000, 2);
    REQUIRE(report.rule_checks.size() == s.rules().size() + 1);
    CHECK(report.rule_checks.back().derivable == AlgebraizerReport::Status::Pass);
    CHECK(report.rule_checks.back().translated == AlgebraizerReport::Status::Pass);
  }
}

TEST_CASE("beth checks") {
  Theory dl = dl_theory();
  Theory ba = ba_theory();
  auto gamma_dl = parse_atom_list(fixture("gamma_compl.atoms"), dl.signature());
  auto gamma_ba = parse_atom_list(fixture("gamma_compl.atoms"), ba.signature());

  SUBCASE("complements in distributive lattices: implicit but not explicit") {
    auto report = beth_check(dl, gamma_dl, {"x"}, {"z"}, 2, 100000, 3);
    CHECK(report.verdict == BethVerdict::ImplicitNotExplicit);
    CHECK(report.implicit_proved);
    CHECK_FALSE(report.explicit_established);
    REQUIRE(report.implicit_certificates.count("z"));
    auto facts = substitute(gamma_dl, {{"z", Term::var("z_1")}});
    auto twin = substitute(gamma_dl, {{"z", Term::var("z_2")}});
    facts.insert(facts.end(), twin.begin(), twin.end());
    CHECK(replay(report.implicit_certificates.at("z"), dl, {"x", "z_1", "z_2"}, facts));
  }
  SUBCASE("complements in boolean algebras: explicitly defined") {
    auto report = beth_check(ba, gamma_ba, {"x"}, {"z"}, 3, 200000, 3);
    REQUIRE(report.verdict == BethVerdict::ExplicitlyDefined);
    CHECK(report.definitions.at("z") == parse_term("not(x)", ba.signature()));
    // explicit implies implicit: the certificate's goal replays
    REQUIRE(report.definition_certificates.count("z"));
    CHECK(replay(report.definition_certificates.at("z"), ba, {"x", "z"}, gamma_ba));
  }
  SUBCASE("a direct definition is found at once") {
    auto gamma = parse_atom_list("z = x", dl.signature());
    auto report = beth_check(dl, gamma, {"x"}, {"z"}, 2, 10000, 2);
    REQUIRE(report.verdict == BethVerdict::ExplicitlyDefined);
    CHECK(report.definitions.at("z") == Term::var("x"));
  }
  SUBCASE("an unconstrained variable is not implicitly defined") {
    auto gamma = parse_atom_list("x = x", dl.signature());
    auto report = beth_check(dl, gamma, {"x"}, {"z"}, 2, 10000, 2);
    CHECK(report.verdict == BethVerdict::NotImplicit);
    REQUIRE(report.counterexample.has_value());
    CHECK(report.counterexample->v1.at("x") == report.counterexample->v2.at("x"));
    CHECK(report.counterexample->v1.at("z") != report.counterexample->v2.at("z"));
  }
  SUBCASE("overlapping variable sets are rejected") {
    CHECK_THROWS_AS(beth_check(dl, gamma_dl, {"x"}, {"x"}, 2, 1000, 2), Error);
  }
  SUBCASE("explicit implies implicit whenever both are computed") {
    // coherence: rerun the boolean case forcing the implicit test too
    auto report = beth_check(ba, gamma_ba, {"x"}, {"z"}, 3, 200000, 3);
    if (report.verdict == BethVerdict::ExplicitlyDefined) {
      auto facts = substitute(gamma_ba, {{"z", Term::var("z_1")}});
      auto twin = substitute(gamma_ba, {{"z", Term::var("z_2")}});
      facts.insert(facts.end(), twin.begin(), twin.end());
      ChaseState st = chase_run(ba, {"x", "z_1", "z_2"}, facts, 3, 200000);
      CHECK(st.proves_equal(Term::var("z_1"), Term::var("z_2")));
    }
  }
}
