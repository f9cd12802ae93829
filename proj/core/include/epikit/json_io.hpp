// JSON emission for reports and certificates (machine-readable CLI output).
#pragma once

#include <string>

#include "epikit/consequence.hpp"
#include "epikit/epi.hpp"
#include "epikit/logic.hpp"

namespace epikit {

std::string structure_to_json(const Structure& s, int indent = -1);

std::string certificate_to_json(const Certificate& cert, int indent = -1);
Certificate certificate_from_json(const std::string& json_text, const Signature& sig);

std::string entail_report_json(const TheoryEntailment& r, int indent = 2);
std::string entail_report_json(const FiniteEntailment& r, const std::vector<Structure>& k,
                               int indent = 2);
std::string dominion_report_json(const DominionReport& r, int indent = 2);
std::string es_pairs_json(const std::vector<EsPair>& pairs, int indent = 2);
std::string congruence_json(const Congruence& c, int indent = 2);
std::string equivalential_json(const EquivalentialCheck& c, int indent = 2);
std::string beth_report_json(const BethReport& r, int indent = 2);
std::string witness_json(const EpiWitness& w, int indent = 2);
std::string shrink_result_json(const ShrinkAlmostTotalResult& r, int indent = 2);

}  // namespace epikit
