#include "nspforge/synth.hpp"

#include <algorithm>
#include <cstdint>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"

namespace nsp::synth {

Schedule random_schedule(int nurses, int days, int shifts_per_day, double density,
                         std::uint64_t seed) {
  if (nurses <= 0 || days <= 0 || shifts_per_day <= 0)
    throw RangeError("schedule dimensions must be positive");
  if (density < 0.0 || density > 1.0) throw RangeError("density must lie in [0, 1]");
  rng::Engine eng(seed);
  Schedule out(nurses, days, shifts_per_day);
  for (int i = 0; i < nurses; ++i)
    for (int z = 0; z < out.columns(); ++z)
      out.set(i, z, rng::bernoulli(eng, density));
  return out;
}

BoundedCorpus bounded_corpus(int count, int nurses, int days, int shifts_per_day,
                             const CorpusBounds& bounds, std::uint64_t seed) {
  if (count <= 0) throw RangeError("corpus size must be positive");
  if (nurses <= 0 || days <= 0 || shifts_per_day <= 0)
    throw RangeError("schedule dimensions must be positive");
  if (bounds.coverage_lo < 0 || bounds.coverage_hi < bounds.coverage_lo ||
      bounds.coverage_hi > nurses)
    throw RangeError("coverage range must satisfy 0 <= lo <= hi <= nurses");
  if (bounds.max_total < 0 || bounds.max_nights < 0)
    throw RangeError("per-nurse ceilings must be non-negative");

  rng::Engine eng(seed);
  BoundedCorpus out;
  CorpusStats& st = out.stats;
  st.observed_min_coverage = nurses + 1;
  st.observed_min_daily_worked = shifts_per_day + 1;
  st.observed_min_total = days * shifts_per_day + 1;

  const int last_shift = shifts_per_day;  // night slot of a day (1-based)
  for (int c = 0; c < count; ++c) {
    Schedule s(nurses, days, shifts_per_day);
    std::vector<int> total(static_cast<std::size_t>(nurses), 0);
    std::vector<int> nights(static_cast<std::size_t>(nurses), 0);
    for (int d = 1; d <= days; ++d) {
      for (int sh = 1; sh <= shifts_per_day; ++sh) {
        const int span = bounds.coverage_hi - bounds.coverage_lo + 1;
        const int target =
            bounds.coverage_lo + static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(span)));
        // Nurses still under every ceiling that this slot could breach.
        std::vector<int> eligible;
        for (int i = 0; i < nurses; ++i) {
          if (total[static_cast<std::size_t>(i)] >= bounds.max_total) continue;
          if (sh == last_shift && nights[static_cast<std::size_t>(i)] >= bounds.max_nights)
            continue;
          if (bounds.forbid_night_morning && sh == 1 && d > 1 &&
              s.at(i, (d - 2) * shifts_per_day + (shifts_per_day - 1)))
            continue;
          eligible.push_back(i);
        }
        const int staff = std::min<int>(target, static_cast<int>(eligible.size()));
        // Partial Fisher-Yates: draw `staff` distinct nurses.
        for (int pick = 0; pick < staff; ++pick) {
          const auto j = pick + static_cast<std::size_t>(
                                    rng::below(eng, eligible.size() - static_cast<std::size_t>(pick)));
          std::swap(eligible[static_cast<std::size_t>(pick)], eligible[j]);
          const int nurse = eligible[static_cast<std::size_t>(pick)];
          s.set(nurse, (d - 1) * shifts_per_day + (sh - 1), true);
          ++total[static_cast<std::size_t>(nurse)];
          if (sh == last_shift) ++nights[static_cast<std::size_t>(nurse)];
        }
      }
    }

    for (int z = 0; z < s.columns(); ++z) {
      const int cov = s.column_sum(z);
      st.observed_min_coverage = std::min(st.observed_min_coverage, cov);
      st.observed_max_coverage = std::max(st.observed_max_coverage, cov);
    }
    for (int i = 0; i < nurses; ++i) {
      const ShiftPattern row = s.row(i);
      for (int d = 1; d <= days; ++d) {
        const int dc = row.day_count(d);
        st.observed_max_daily = std::max(st.observed_max_daily, dc);
        if (dc > 0) st.observed_min_daily_worked = std::min(st.observed_min_daily_worked, dc);
      }
      st.observed_max_total = std::max(st.observed_max_total, row.popcount());
      st.observed_min_total = std::min(st.observed_min_total, row.popcount());
      st.night_morning_free = st.night_morning_free && row.night_morning_pairs() == 0;
    }
    out.schedules.push_back(std::move(s));
  }
  if (st.observed_min_coverage > nurses) st.observed_min_coverage = 0;
  if (st.observed_min_daily_worked > shifts_per_day) st.observed_min_daily_worked = 0;
  if (st.observed_min_total > days * shifts_per_day) st.observed_min_total = 0;
  return out;
}

std::vector<std::vector<Rat>> random_costs(int nurses, int patterns, int lo, int hi,
                                           std::uint64_t seed) {
  if (nurses <= 0 || patterns <= 0) throw RangeError("cost matrix dimensions must be positive");
  if (hi < lo) throw RangeError("cost range must satisfy lo <= hi");
  rng::Engine eng(seed);
  std::vector<std::vector<Rat>> cost(static_cast<std::size_t>(nurses));
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  for (auto& row : cost) {
    row.reserve(static_cast<std::size_t>(patterns));
    for (int j = 0; j < patterns; ++j)
      row.emplace_back(lo + static_cast<long long>(rng::below(eng, span)));
  }
  return cost;
}

namespace {

// Deterministic repair: trims a random pattern until it satisfies the unary
// bounds (total <= h, nights <= b, night->morning pairs <= y).
ShiftPattern repair(ShiftPattern pattern, const InstanceParams& params) {
  const int days = params.days, s = params.shifts_per_day;
  // Break surplus night->morning pairs: clear the morning after the night.
  int pairs = pattern.night_morning_pairs();
  for (int d = 1; d < days && pairs > params.y; ++d)
    if (pattern.assigned(d, s) && pattern.assigned(d + 1, 1)) {
      pattern.set_bit(d * s, false);  // first shift of day d+1
      --pairs;
    }
  // Trim surplus nights from the back.
  int nights = pattern.night_count();
  for (int d = days; d >= 1 && nights > params.b; --d)
    if (pattern.assigned(d, s)) {
      pattern.set_bit((d - 1) * s + (s - 1), false);
      --nights;
    }
  // Trim surplus total shifts from the back.
  int total = pattern.popcount();
  for (int z = days * s - 1; z >= 0 && total > params.h; --z)
    if (pattern.bit(z)) {
      pattern.set_bit(z, false);
      --total;
    }
  return pattern;
}

}  // namespace

WcspInstance random_wcsp(const InstanceParams& params, std::uint64_t seed) {
  if (params.nurses <= 0 || params.days <= 0 || params.shifts_per_day <= 0)
    throw RangeError("instance dimensions must be positive");
  if (params.domain_size < 1) throw RangeError("need at least one pattern");
  const int slots = params.days * params.shifts_per_day;
  if (slots > 63) throw CapacityError("pattern grids beyond 63 slots are not supported here");

  rng::Engine eng(seed);
  std::vector<ShiftPattern> domain;
  auto push_unique = [&](const ShiftPattern& p) {
    if (std::find(domain.begin(), domain.end(), p) == domain.end()) domain.push_back(p);
  };

  // Stride family: pattern r works slot z iff z % nurses == r. Assigning
  // nurse i the i-th stride pattern staffs every slot exactly once, never
  // puts consecutive slots on one nurse, and keeps per-pattern loads near
  // slots / nurses — a feasibility anchor for the default bound ranges.
  for (int r = 0; r < params.nurses && static_cast<int>(domain.size()) < params.domain_size;
       ++r) {
    ShiftPattern p(params.days, params.shifts_per_day);
    for (int z = r; z < slots; z += params.nurses) p.set_bit(z, true);
    push_unique(repair(p, params));
  }

  // Random fill, repaired to the unary bounds.
  const double density =
      std::min(0.5, static_cast<double>(params.h) / static_cast<double>(slots));
  int attempts = 0;
  while (static_cast<int>(domain.size()) < params.domain_size && attempts < 64 * params.domain_size) {
    ShiftPattern p(params.days, params.shifts_per_day);
    for (int z = 0; z < slots; ++z)
      if (rng::bernoulli(eng, density)) p.set_bit(z, true);
    push_unique(repair(p, params));
    ++attempts;
  }

  NspInstance instance;
  instance.nurses = params.nurses;
  instance.days = params.days;
  instance.shifts_per_day = params.shifts_per_day;
  instance.min_coverage.assign(static_cast<std::size_t>(params.shifts_per_day),
                               std::vector<int>(static_cast<std::size_t>(params.days), params.q));
  instance.max_coverage.assign(static_cast<std::size_t>(params.shifts_per_day),
                               std::vector<int>(static_cast<std::size_t>(params.days), params.p));
  instance.max_total_shifts.assign(static_cast<std::size_t>(params.nurses), params.h);
  instance.min_total_shifts.assign(static_cast<std::size_t>(params.nurses), 0);
  instance.max_night_morning = params.y;
  instance.max_nights.assign(static_cast<std::size_t>(params.nurses), params.b);
  instance.cost = random_costs(params.nurses, static_cast<int>(domain.size()), params.cost_lo,
                               params.cost_hi, seed ^ 0x9e3779b97f4a7c15ULL);
  return make_wcsp(std::move(instance), std::move(domain));
}

}  // namespace nsp::synth
