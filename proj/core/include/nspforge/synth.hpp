#pragma once

#include <cstdint>
#include <vector>

#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::synth {

// Independent cells at the given density. Deterministic per seed.
Schedule random_schedule(int nurses, int days, int shifts_per_day, double density,
                         std::uint64_t seed);

struct CorpusBounds {
  int max_total = 5;   // per-nurse week ceiling
  int max_nights = 3;  // per-nurse night ceiling
  int coverage_lo = 1; // per-slot coverage target range
  int coverage_hi = 4;
  bool forbid_night_morning = true;
};

// Generator-side bookkeeping: the extremes actually realized while
// sampling, the oracle a learner's output is compared against.
struct CorpusStats {
  int observed_min_coverage = 0;
  int observed_max_coverage = 0;
  int observed_max_daily = 0;
  int observed_min_daily_worked = 0;
  int observed_max_total = 0;
  int observed_min_total = 0;
  bool night_morning_free = true;
};

struct BoundedCorpus {
  std::vector<Schedule> schedules;
  CorpusStats stats;
};

// Samples rosters that honor the bounds by construction (slot by slot:
// draw a coverage target, staff it with nurses still under their
// ceilings), tracking realized extremes.
BoundedCorpus bounded_corpus(int count, int nurses, int days, int shifts_per_day,
                             const CorpusBounds& bounds, std::uint64_t seed);

// Integer weights uniform in [lo, hi].
std::vector<std::vector<Rat>> random_costs(int nurses, int patterns, int lo, int hi,
                                           std::uint64_t seed);

struct InstanceParams {
  int nurses = 5, days = 7, shifts_per_day = 4;
  int q = 1, p = 4, h = 5, y = 2, b = 3;
  int domain_size = 10;
  int cost_lo = 1, cost_hi = 9;
};

// Instance with uniform bounds, a de-duplicated random pattern domain
// (unary-feasible patterns preferred), and random integer costs.
WcspInstance random_wcsp(const InstanceParams& params, std::uint64_t seed);

}  // namespace nsp::synth
