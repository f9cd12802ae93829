// Finite model enumeration for theories, up to isomorphism.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "epikit/structure.hpp"
#include "epikit/syntax.hpp"

namespace epikit {

struct ModelEnumOptions {
  bool up_to_iso = true;            // keep only lexicographically canonical tables
  std::uint64_t node_limit = 50'000'000;  // search-node safety valve
};

/// Enumerates models of the theory with exactly `size` elements, in
/// lexicographic table order. With up_to_iso, only canonical representatives
/// (least table vector under universe permutations) are emitted.
/// The visitor returns false to stop early.
void for_each_model(const Theory& t, int size, const ModelEnumOptions& opts,
                    const std::function<bool(const Structure&)>& visit);

std::vector<Structure> enumerate_models(const Theory& t, int size,
                                        const ModelEnumOptions& opts = {});

/// Models of sizes 1..max_size, smaller sizes first.
std::vector<Structure> enumerate_models_up_to(const Theory& t, int max_size,
                                              const ModelEnumOptions& opts = {});

}  // namespace epikit
