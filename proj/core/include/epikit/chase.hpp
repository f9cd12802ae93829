// Bounded saturation over ground facts modulo equality: a congruence-closed
// term universe plus Horn-rule firing, with replayable derivation
// certificates.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epikit/syntax.hpp"

namespace epikit {

/// Node cap for chase universes; EPIKIT_MAX_UNIVERSE overrides the default.
int default_universe_cap();

struct ChaseLimits {
  int max_nodes = default_universe_cap();
};

/// One rule firing in a derivation: axiom #axiom_index instantiated by
/// `subst`, whose ground premises must already hold and whose ground
/// conclusion is asserted (an equation merges classes, a relational atom adds
/// a fact).
struct CertStep {
  int axiom_index;
  std::vector<std::pair<std::string, Term>> subst;  // sorted by variable name
  std::vector<AtomicFormula> premises;
  AtomicFormula conclusion;
};

struct Certificate {
  AtomicFormula goal;
  std::vector<CertStep> steps;  // in dependency order
};

std::string format_certificate(const Certificate& cert);

namespace detail {
struct Matcher;
}

class ChaseState {
 public:
  /// Universe of all ground terms of depth <= depth over the generators
  /// (depth 0) and the signature (constants count as depth 1 and are always
  /// included), with the initial facts asserted and congruence-closed.
  /// Terms mentioned by the facts are materialized regardless of depth.
  static ChaseState init(const Signature& sig,
                         const std::vector<std::string>& generators,
                         const std::vector<AtomicFormula>& facts, int depth,
                         const ChaseLimits& limits = {});

  /// Fires the theory's axioms over the existing universe until fixpoint or
  /// until `fuel` state-changing firings have been applied. Returns the
  /// number of firings applied. No new terms are created.
  std::int64_t saturate(const Theory& theory, std::int64_t fuel);

  bool complete() const { return complete_; }
  int universe_size() const { return static_cast<int>(nodes_.size()); }
  int class_count() const;
  int depth() const { return depth_; }
  const Signature& signature() const { return sig_; }
  const std::vector<std::string>& generators() const { return generators_; }
  const std::vector<AtomicFormula>& initial_facts() const { return facts_given_; }

  /// Both terms must lie inside the universe; otherwise Error is thrown
  /// (distinct from a false answer).
  bool proves_equal(const Term& a, const Term& b) const;

  /// Ground atom: equation -> proves_equal, relational -> fact lookup.
  bool proves(const AtomicFormula& ground_atom) const;

  /// Minimal backward slice of axiom firings establishing a proved goal.
  /// Initial facts and congruence steps are implicit: replaying the slice
  /// from init() re-proves the goal. Throws Error if the goal is not proved.
  Certificate certificate(const AtomicFormula& goal) const;

  /// Replay helper: verifies the step against the theory, checks its
  /// premises in the current state (materializing the terms involved), and
  /// applies its conclusion. Returns false if verification fails.
  bool apply_step(const CertStep& step, const Theory& theory);

  /// Creates nodes for a ground atom's terms so that proves() can see them.
  void materialize(const AtomicFormula& ground_atom);

 private:
  ChaseState() = default;

  struct Node {
    int op = -1;         // -1 for generator nodes
    int generator = -1;  // index into generators_
    std::vector<int> children;
    int depth = 0;
  };

  struct Reason {
    enum class Kind { None, Init, Axiom, Cong } kind = Kind::None;
    int trace = -1;
  };

  struct TraceEntry {
    Reason::Kind kind;
    bool is_merge = false;
    int a = -1, b = -1;         // merged nodes
    int rel = -1;               // asserted fact
    std::vector<int> tuple;
    // axiom firings
    int axiom = -1;
    std::vector<std::pair<std::string, int>> subst;  // var -> node
    std::vector<std::pair<int, int>> premise_eqs;    // node pairs
    struct PremFact {
      int rel;
      std::vector<int> args;
      int step;                    // trace index of the asserting entry
      std::vector<int> step_args;  // nodes the fact was asserted with
    };
    std::vector<PremFact> premise_facts;
    std::vector<AtomicFormula> ground_premises;
    std::optional<AtomicFormula> init_atom;  // asserted atom in ground form
    // equalities consumed while resolving the step's ground terms against
    // the hashcons (subterm node vs. the stored child it landed on)
    std::vector<std::pair<int, int>> resolution_eqs;
  };

  int find(int x) const;
  int merge(int a, int b, Reason reason);  // returns surviving root or -1 if equal
  void link_proof(int a, int b, Reason reason);
  void rebuild();
  void recanonicalize_facts();

  int get_or_create(int op, const std::vector<int>& children);
  int create_generator(const std::string& name);
  std::optional<int> eval_term(const Term& t) const;
  // eval_term that also records which stored-child equalities the hashcons
  // lookups relied on; those must be explained in certificates
  std::optional<int> resolve_term(const Term& t,
                                  std::vector<std::pair<int, int>>& eqs) const;
  int materialize_term(const Term& t);
  Term term_of_node(int node) const;

  bool add_fact(int rel, const std::vector<int>& tuple, Reason reason,
                const TraceEntry* proto);
  std::optional<int> fact_step(int rel, const std::vector<int>& tuple) const;

  void expand_layer(int layer);
  void saturation_round(const Theory& theory, std::int64_t& fuel, bool& changed);

  // e-matching
  struct MatchContext;
  friend struct detail::Matcher;
  friend ChaseState chase_run(const Theory&, const std::vector<std::string>&,
                              const std::vector<AtomicFormula>&, int, std::int64_t,
                              const ChaseLimits&);

  // certificate assembly
  struct SliceBuilder;

  Signature sig_;
  std::vector<std::string> generators_;
  std::map<std::string, int> generator_index_;
  std::vector<AtomicFormula> facts_given_;
  int depth_ = 0;
  ChaseLimits limits_;
  bool complete_ = true;

  std::vector<Node> nodes_;
  mutable std::vector<int> parent_;
  std::vector<int> class_depth_;
  std::map<std::pair<int, std::vector<int>>, int> hashcons_;
  std::vector<std::vector<int>> parents_;  // by root id at last rebuild
  std::vector<int> pending_;

  std::map<std::pair<int, std::vector<int>>, int> fact_index_;  // canonical -> trace
  bool facts_dirty_ = false;

  std::vector<TraceEntry> trace_;
  std::vector<int> proof_parent_;
  std::vector<Reason> proof_reason_;
};

/// Builds the universe layer by layer, saturating between layers, which keeps
/// the materialized node count small while proving exactly the goals that
/// init(depth) + saturate would prove. The workhorse behind theory-backed
/// entailment, dominions and definability checks.
ChaseState chase_run(const Theory& theory, const std::vector<std::string>& generators,
                     const std::vector<AtomicFormula>& facts, int depth,
                     std::int64_t fuel, const ChaseLimits& limits = {});

/// Re-proves the certificate's goal from scratch: initializes a state with
/// the given presentation, verifies and applies every step, and checks the
/// goal. Any mismatch (wrong instantiation, unsupported premise, unproved
/// goal) yields false.
bool replay(const Certificate& cert, const Theory& theory,
            const std::vector<std::string>& generators,
            const std::vector<AtomicFormula>& facts,
            const ChaseLimits& limits = {});

/// Greedy shrink: drops steps whose removal keeps the certificate replaying.
/// The input must replay; the result is 1-minimal under step deletion.
Certificate minimize_certificate(const Certificate& cert, const Theory& theory,
                                 const std::vector<std::string>& generators,
                                 const std::vector<AtomicFormula>& facts,
                                 const ChaseLimits& limits = {});

}  // namespace epikit
