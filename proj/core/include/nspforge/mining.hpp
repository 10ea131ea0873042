#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nspforge/io.hpp"
#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::mining {

// Itemset members are kept in universe order so output is deterministic.
struct FrequentItemset {
  std::vector<std::string> items;
  long long support = 0;  // absolute transaction count
};

struct AssociationRule {
  std::vector<std::string> antecedent;  // non-empty, universe order
  std::vector<std::string> consequent;  // non-empty, disjoint from antecedent
  long long support = 0;                // of antecedent ∪ consequent
  Rat confidence;                       // support / support(antecedent)
};

struct UtilityItemset {
  std::vector<std::string> items;
  Rat twu;          // sum of transaction utilities over covering rows
  Rat utility;      // exact utility from the rescan
  int occurrences = 0;
};

// Smallest absolute count that a fraction-of-rows threshold implies.
long long ratio_to_count(const Rat& min_support_ratio, int transaction_count);

// Level-wise frequent-itemset search: L1 from item counts, candidate join on
// shared (k-2)-prefix, candidates with any infrequent (k-1)-subset dropped
// before counting. Output sorted by (size, universe rank). min_support_count
// must be >= 1.
std::vector<FrequentItemset> apriori(const io::TransactionDb& db, long long min_support_count);

// All rules A => C with A ∪ C frequent, A and C non-empty disjoint, and
// confidence >= min_confidence (exact rational test). When single_consequent
// is set, only |C| == 1 rules are emitted; when min_antecedent > 1, smaller
// antecedents are skipped. Output sorted by confidence desc, support desc,
// antecedent, consequent — the same order the simulator fires rules in.
std::vector<AssociationRule> generate_rules(const std::vector<FrequentItemset>& frequent,
                                            const Rat& min_confidence,
                                            bool single_consequent = false,
                                            int min_antecedent = 1);

// Sum over items of quantity * utility for one row.
Rat transaction_utility(const io::QuantityDb& db, const io::UtilityTable& util, int row);

// Sum of transaction utilities over rows containing every item (indices
// into the universe).
Rat twu(const io::QuantityDb& db, const io::UtilityTable& util,
        const std::vector<int>& item_indices);

struct TwoPhaseResult {
  std::vector<UtilityItemset> phase1;  // TWU >= threshold (candidate closure)
  std::vector<UtilityItemset> phase2;  // exact utility >= threshold
};

// Phase I prunes level-wise on the transaction-weighted utilization bound
// (anti-monotone, same threshold); Phase II rescans candidates for exact
// utility. Every phase-2 itemset also appears in phase 1.
TwoPhaseResult two_phase(const io::QuantityDb& db, const io::UtilityTable& util,
                         const Rat& min_utility);

// ---------------------------------------------------------------------------
// Rule/itemset-driven roster generation.
// ---------------------------------------------------------------------------

struct SimulationEvent {
  int day = 0;    // 0-based
  int shift = 0;  // 0-based
  bool fired = false;                // true: rule firing; false: weighted seed draw
  int source_index = -1;             // index into the sorted rule / itemset list
  std::vector<std::string> added;    // items newly placed on the slot
};

struct SimulationResult {
  Schedule schedule;
  std::vector<std::string> warnings;  // structured "code: detail" lines
  std::vector<SimulationEvent> events;
};

// Walks slots day-major. For each slot it fires the first rule (in the
// deterministic order above) whose antecedent is already on the slot and
// whose consequent adds someone new, falling back to a confidence-weighted
// rule draw when nothing fires, until the slot reaches its minimum coverage,
// the ceiling would be breached, or max_iterations draws are spent. Items
// map to nurse rows through item_universe. No rules => all-zero roster and
// an `empty-model` warning. Deterministic for a fixed seed.
SimulationResult simulate_schedule(const std::vector<AssociationRule>& rules,
                                   const std::vector<std::string>& item_universe,
                                   const NspInstance& instance,
                                   std::uint64_t seed,
                                   int max_iterations = 64);

// Same walk driven by high-utility itemsets: each step draws an itemset
// with probability proportional to its utility and merges its members.
SimulationResult simulate_schedule(const std::vector<UtilityItemset>& itemsets,
                                   const std::vector<std::string>& item_universe,
                                   const NspInstance& instance,
                                   std::uint64_t seed,
                                   int max_iterations = 64);

}  // namespace nsp::mining
