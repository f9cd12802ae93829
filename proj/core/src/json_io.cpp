#include "epikit/json_io.hpp"

#include <json.hpp>

#include "epikit/parser.hpp"

namespace epikit {

using nlohmann::json;

namespace {

json term_j(const Term& t) { return to_string(t); }
json atom_j(const AtomicFormula& a) { return to_string(a); }

json structure_j(const Structure& s) {
  json j;
  j["size"] = s.size();
  json ops = json::object();
  for (std::size_t f = 0; f < s.signature().ops().size(); ++f) {
    const auto& op = s.signature().ops()[f];
    ops[op.name] = {{"arity", op.arity}, {"table", s.op_table(static_cast<int>(f))}};
  }
  j["ops"] = std::move(ops);
  json rels = json::object();
  for (std::size_t r = 0; r < s.signature().rels().size(); ++r) {
    const auto& rel = s.signature().rels()[r];
    json tuples = json::array();
    for (const auto& tuple : s.rel_table(static_cast<int>(r))) tuples.push_back(tuple);
    rels[rel.name] = {{"arity", rel.arity}, {"tuples", std::move(tuples)}};
  }
  j["rels"] = std::move(rels);
  return j;
}

json certificate_j(const Certificate& cert) {
  json steps = json::array();
  for (const auto& step : cert.steps) {
    json subst = json::object();
    for (const auto& [var, term] : step.subst) subst[var] = term_j(term);
    json premises = json::array();
    for (const auto& p : step.premises) premises.push_back(atom_j(p));
    steps.push_back({{"axiom", step.axiom_index},
                     {"subst", std::move(subst)},
                     {"premises", std::move(premises)},
                     {"conclusion", atom_j(step.conclusion)}});
  }
  return json{{"goal", atom_j(cert.goal)}, {"steps", std::move(steps)}};
}

json assignment_j(const Assignment& v) {
  json j = json::object();
  for (const auto& [name, value] : v) j[name] = value;
  return j;
}

std::string dump(const json& j, int indent) { return j.dump(indent) + "\n"; }

}  // namespace

std::string structure_to_json(const Structure& s, int indent) {
  return dump(structure_j(s), indent);
}

std::string certificate_to_json(const Certificate& cert, int indent) {
  return dump(certificate_j(cert), indent);
}

Certificate certificate_from_json(const std::string& json_text, const Signature& sig) {
  json j = json::parse(json_text);
  Certificate cert{parse_atom(j.at("goal").get<std::string>(), sig), {}};
  for (const auto& sj : j.at("steps")) {
    CertStep step{sj.at("axiom").get<int>(),
                  {},
                  {},
                  parse_atom(sj.at("conclusion").get<std::string>(), sig)};
    for (const auto& [var, term] : sj.at("subst").items())
      step.subst.emplace_back(var, parse_term(term.get<std::string>(), sig));
    for (const auto& pj : sj.at("premises"))
      step.premises.push_back(parse_atom(pj.get<std::string>(), sig));
    cert.steps.push_back(std::move(step));
  }
  return cert;
}

std::string entail_report_json(const TheoryEntailment& r, int indent) {
  json j;
  j["verdict"] = r.proved ? "proved" : "unknown";
  j["complete"] = r.complete;
  j["universe_size"] = r.universe_size;
  if (r.certificate) j["certificate"] = certificate_j(*r.certificate);
  return dump(j, indent);
}

std::string entail_report_json(const FiniteEntailment& r, const std::vector<Structure>& k,
                               int indent) {
  json j;
  j["verdict"] = r.holds ? "true" : "refuted";
  if (r.counterexample) {
    j["counterexample"] = {
        {"structure_index", r.counterexample->structure_index},
        {"structure", structure_j(k[r.counterexample->structure_index])},
        {"assignment", assignment_j(r.counterexample->assignment)}};
  }
  return dump(j, indent);
}

std::string dominion_report_json(const DominionReport& r, int indent) {
  json j;
  j["ambient"] = structure_j(r.ambient);
  j["base"] = r.base;
  j["members"] = r.members;
  j["exact"] = r.exact;
  json certs = json::object();
  for (const auto& [element, cert] : r.member_certificates)
    certs[std::to_string(element)] = certificate_j(cert);
  j["member_certificates"] = std::move(certs);
  json excluded = json::object();
  for (const auto& [element, ev] : r.excluded_evidence)
    excluded[std::to_string(element)] = {{"model_index", ev.model_index},
                                         {"f", ev.f},
                                         {"g", ev.g},
                                         {"disagrees_at", ev.disagrees_at}};
  j["excluded_evidence"] = std::move(excluded);
  return dump(j, indent);
}

std::string es_pairs_json(const std::vector<EsPair>& pairs, int indent) {
  json arr = json::array();
  for (const auto& p : pairs) {
    arr.push_back({{"model", structure_j(p.model)},
                   {"base", p.base},
                   {"members", p.report.members},
                   {"exact", p.report.exact}});
  }
  return dump(json{{"pairs", std::move(arr)}}, indent);
}

std::string congruence_json(const Congruence& c, int indent) {
  json classes = json::array();
  for (const auto& cls : c.classes()) classes.push_back(cls);
  return dump(json{{"classes", std::move(classes)}}, indent);
}

std::string equivalential_json(const EquivalentialCheck& c, int indent) {
  json j;
  switch (c.status) {
    case EquivalentialCheck::Status::Verified:
      j["status"] = "verified";
      break;
    case EquivalentialCheck::Status::Failed:
      j["status"] = "failed";
      break;
    case EquivalentialCheck::Status::Unknown:
      j["status"] = "unknown";
      break;
  }
  if (c.failed_at) {
    j["failed_at"] = to_string(*c.failed_at);
    j["detail"] = c.detail;
  }
  if (c.countermodel) {
    j["countermodel"] = {{"matrix", structure_j(c.countermodel->matrix)},
                         {"assignment", assignment_j(c.countermodel->assignment)}};
  }
  return dump(j, indent);
}

std::string beth_report_json(const BethReport& r, int indent) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["implicit_proved"] = r.implicit_proved;
  j["explicit_established"] = r.explicit_established;
  if (!r.note.empty()) j["note"] = r.note;
  json defs = json::object();
  for (const auto& [z, term] : r.definitions) defs[z] = term_j(term);
  j["definitions"] = std::move(defs);
  json dcerts = json::object();
  for (const auto& [z, cert] : r.definition_certificates)
    dcerts[z] = certificate_j(cert);
  j["definition_certificates"] = std::move(dcerts);
  json icerts = json::object();
  for (const auto& [z, cert] : r.implicit_certificates) icerts[z] = certificate_j(cert);
  j["implicit_certificates"] = std::move(icerts);
  if (r.counterexample) {
    j["counterexample"] = {{"model", structure_j(r.counterexample->model)},
                           {"v1", assignment_j(r.counterexample->v1)},
                           {"v2", assignment_j(r.counterexample->v2)}};
  }
  return dump(j, indent);
}

std::string witness_json(const EpiWitness& w, int indent) {
  json j;
  j["element"] = w.b;
  json sigma = json::array();
  for (const auto& a : w.sigma) sigma.push_back(atom_j(a));
  j["sigma"] = std::move(sigma);
  j["a_vec"] = w.a_vec;
  j["c_vec"] = w.c_vec;
  j["assignment"] = assignment_j(w.var_to_element);
  if (w.entailment_certificate)
    j["entailment_certificate"] = certificate_j(*w.entailment_certificate);
  return dump(j, indent);
}

std::string shrink_result_json(const ShrinkAlmostTotalResult& r, int indent) {
  json j;
  j["b_prime"] = structure_j(r.b_prime);
  j["b_prime_embedding"] = r.b_prime_embedding;
  j["a_prime"] = r.a_prime;
  j["generators_y"] = r.generators_y;
  j["finitely_generated"] = r.finitely_generated;
  j["proper"] = r.proper;
  j["epic"] = r.epic;
  return dump(j, indent);
}

}  // namespace epikit
