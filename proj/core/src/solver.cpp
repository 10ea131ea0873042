#include "nspforge/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"

namespace nsp::solver {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string nurse_tag(int nurse) { return "nurse " + std::to_string(nurse + 1); }

}  // namespace

const char* constraint_name(ConstraintId id) {
  switch (id) {
    case ConstraintId::coverage: return "coverage";
    case ConstraintId::total_shifts: return "total_shifts";
    case ConstraintId::night_morning: return "night_morning";
    case ConstraintId::night_count: return "night_count";
    case ConstraintId::day_cap: return "day_cap";
  }
  return "?";
}

std::vector<ConstraintVerdict> check_unary(const ShiftPattern& pattern, int nurse,
                                           const NspInstance& instance) {
  if (nurse < 0 || nurse >= instance.nurses) throw RangeError("nurse index out of range");
  if (pattern.days() != instance.days || pattern.shifts_per_day() != instance.shifts_per_day)
    throw ShapeError("pattern grid does not match the instance");
  std::vector<ConstraintVerdict> verdicts;

  {
    ConstraintVerdict v{ConstraintId::total_shifts, true, {}};
    const int total = pattern.popcount();
    const int lo = instance.min_total_shifts[static_cast<std::size_t>(nurse)];
    const int hi = instance.max_total_shifts[static_cast<std::size_t>(nurse)];
    if (total > hi) {
      v.satisfied = false;
      v.witness = nurse_tag(nurse) + " works " + std::to_string(total) + " shifts, max " +
                  std::to_string(hi);
    } else if (total < lo) {
      v.satisfied = false;
      v.witness = nurse_tag(nurse) + " works " + std::to_string(total) + " shifts, min " +
                  std::to_string(lo);
    }
    verdicts.push_back(std::move(v));
  }
  {
    ConstraintVerdict v{ConstraintId::night_morning, true, {}};
    const int pairs = pattern.night_morning_pairs();
    if (pairs > instance.max_night_morning) {
      v.satisfied = false;
      for (int d = 1; d < pattern.days(); ++d)
        if (pattern.night(d) && pattern.morning(d + 1)) {
          v.witness = nurse_tag(nurse) + " has " + std::to_string(pairs) +
                      " night-to-morning pairs (budget " +
                      std::to_string(instance.max_night_morning) + "), first at day " +
                      std::to_string(d);
          break;
        }
    }
    verdicts.push_back(std::move(v));
  }
  {
    ConstraintVerdict v{ConstraintId::night_count, true, {}};
    const int nights = pattern.night_count();
    const int cap = instance.max_nights[static_cast<std::size_t>(nurse)];
    if (nights > cap) {
      v.satisfied = false;
      v.witness = nurse_tag(nurse) + " works " + std::to_string(nights) + " nights, max " +
                  std::to_string(cap);
    }
    verdicts.push_back(std::move(v));
  }
  if (instance.max_shifts_per_day) {
    ConstraintVerdict v{ConstraintId::day_cap, true, {}};
    for (int d = 1; d <= pattern.days(); ++d) {
      const int c = pattern.day_count(d);
      if (c > *instance.max_shifts_per_day) {
        v.satisfied = false;
        v.witness = nurse_tag(nurse) + " works " + std::to_string(c) + " shifts on day " +
                    std::to_string(d) + ", max " + std::to_string(*instance.max_shifts_per_day);
        break;
      }
    }
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

std::vector<ConstraintVerdict> check_global(const Schedule& schedule,
                                            const NspInstance& instance) {
  instance.validate();
  if (schedule.nurses() != instance.nurses || schedule.days() != instance.days ||
      schedule.shifts_per_day() != instance.shifts_per_day)
    throw ShapeError("schedule shape does not match the instance");

  std::vector<ConstraintVerdict> verdicts;
  {
    ConstraintVerdict v{ConstraintId::coverage, true, {}};
    for (int d = 0; d < instance.days && v.satisfied; ++d)
      for (int s = 0; s < instance.shifts_per_day && v.satisfied; ++s) {
        const int cov = schedule.column_sum(d * instance.shifts_per_day + s);
        const int q = instance.min_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        const int p = instance.max_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        if (cov < q || cov > p) {
          v.satisfied = false;
          v.witness = "day " + std::to_string(d + 1) + " shift " + std::to_string(s + 1) +
                      " staffed by " + std::to_string(cov) + ", needs [" + std::to_string(q) +
                      ", " + std::to_string(p) + "]";
        }
      }
    verdicts.push_back(std::move(v));
  }
  // Unary families aggregated over nurses; first offender wins the witness.
  std::vector<ConstraintVerdict> aggregate;
  for (int i = 0; i < instance.nurses; ++i) {
    auto per_nurse = check_unary(schedule.row(i), i, instance);
    if (aggregate.empty()) {
      aggregate = std::move(per_nurse);
      continue;
    }
    for (std::size_t f = 0; f < aggregate.size(); ++f)
      if (aggregate[f].satisfied && !per_nurse[f].satisfied) aggregate[f] = per_nurse[f];
  }
  for (auto& v : aggregate) verdicts.push_back(std::move(v));
  return verdicts;
}

std::vector<ConstraintVerdict> check_global(const Assignment& assignment,
                                            const WcspInstance& wcsp) {
  return check_global(to_schedule(assignment, wcsp), wcsp.base);
}

bool all_satisfied(const std::vector<ConstraintVerdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const ConstraintVerdict& v) { return v.satisfied; });
}

bool feasible(const Schedule& schedule, const NspInstance& instance) {
  return all_satisfied(check_global(schedule, instance));
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

PropagationResult nc_propagate(WcspInstance& wcsp) {
  PropagationResult result;
  for (int i = 0; i < wcsp.base.nurses; ++i) {
    auto& domain = wcsp.variable_domains[static_cast<std::size_t>(i)];
    std::vector<int> kept;
    for (int j : domain) {
      if (all_satisfied(check_unary(wcsp.domain[static_cast<std::size_t>(j)], i, wcsp.base))) {
        kept.push_back(j);
      } else {
        result.removals.emplace_back(i, j);
        ++result.removed;
        result.changed = true;
      }
    }
    domain = std::move(kept);
    if (domain.empty()) result.inconsistent = true;
  }
  return result;
}

namespace {

// Shared slot bookkeeping for coverage reasoning. Slot index z is day-major.
struct CoverageGrid {
  int slots = 0;
  std::vector<int> q, p;

  explicit CoverageGrid(const NspInstance& ins) : slots(ins.days * ins.shifts_per_day) {
    q.resize(static_cast<std::size_t>(slots));
    p.resize(static_cast<std::size_t>(slots));
    for (int d = 0; d < ins.days; ++d)
      for (int s = 0; s < ins.shifts_per_day; ++s) {
        q[static_cast<std::size_t>(d * ins.shifts_per_day + s)] =
            ins.min_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        p[static_cast<std::size_t>(d * ins.shifts_per_day + s)] =
            ins.max_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      }
  }
};

// Per-variable slot contribution envelope over its current domain.
struct Envelope {
  std::vector<std::vector<int>> lo, hi;  // [variable][slot]

  Envelope(const WcspInstance& wcsp, int slots) {
    const int n = wcsp.base.nurses;
    lo.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(slots), 0));
    hi = lo;
    for (int i = 0; i < n; ++i)
      for (int z = 0; z < slots; ++z) {
        int mn = 1, mx = 0;
        for (int j : wcsp.variable_domains[static_cast<std::size_t>(i)]) {
          int b = wcsp.domain[static_cast<std::size_t>(j)].bit(z) ? 1 : 0;
          mn = std::min(mn, b);
          mx = std::max(mx, b);
        }
        if (wcsp.variable_domains[static_cast<std::size_t>(i)].empty()) mn = 0;
        lo[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] = mn;
        hi[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] = mx;
      }
  }
};

// Exact existence test: can the variables other than `fixed_var` be completed
// so that every slot lands within [q, p] given `base_cov` already placed?
// Depth-first over variables with envelope-based look-ahead pruning.
class SupportSearch {
public:
  SupportSearch(const WcspInstance& wcsp, const CoverageGrid& grid)
      : wcsp_(wcsp), grid_(grid) {}

  bool supported(int fixed_var, int fixed_value) {
    const int n = wcsp_.base.nurses;
    order_.clear();
    for (int i = 0; i < n; ++i)
      if (i != fixed_var) order_.push_back(i);

    Envelope env(wcsp_, grid_.slots);
    // suffix_lo/hi[d][z]: contribution envelope of order_[d..] on slot z.
    const std::size_t depth_count = order_.size() + 1;
    suffix_lo_.assign(depth_count, std::vector<int>(static_cast<std::size_t>(grid_.slots), 0));
    suffix_hi_ = suffix_lo_;
    for (int d = static_cast<int>(order_.size()) - 1; d >= 0; --d)
      for (int z = 0; z < grid_.slots; ++z) {
        suffix_lo_[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
            suffix_lo_[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
            env.lo[static_cast<std::size_t>(order_[static_cast<std::size_t>(d)])][static_cast<std::size_t>(z)];
        suffix_hi_[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
            suffix_hi_[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
            env.hi[static_cast<std::size_t>(order_[static_cast<std::size_t>(d)])][static_cast<std::size_t>(z)];
      }

    cov_.assign(static_cast<std::size_t>(grid_.slots), 0);
    const ShiftPattern& fixed = wcsp_.domain[static_cast<std::size_t>(fixed_value)];
    for (int z = 0; z < grid_.slots; ++z) cov_[static_cast<std::size_t>(z)] = fixed.bit(z) ? 1 : 0;

    // Cheap interval screen before searching: even the loosest completion
    // cannot rescue a slot the envelope already rules out.
    if (!viable(0)) return false;
    return dfs(0);
  }

private:
  bool viable(std::size_t depth) const {
    for (int z = 0; z < grid_.slots; ++z) {
      const int c = cov_[static_cast<std::size_t>(z)];
      if (c + suffix_hi_[depth][static_cast<std::size_t>(z)] < grid_.q[static_cast<std::size_t>(z)])
        return false;
      if (c + suffix_lo_[depth][static_cast<std::size_t>(z)] > grid_.p[static_cast<std::size_t>(z)])
        return false;
    }
    return true;
  }

  bool dfs(std::size_t depth) {
    if (depth == order_.size()) return true;  // viable() already vetted the leaf
    const int var = order_[depth];
    for (int j : wcsp_.variable_domains[static_cast<std::size_t>(var)]) {
      const ShiftPattern& pat = wcsp_.domain[static_cast<std::size_t>(j)];
      for (int z = 0; z < grid_.slots; ++z)
        cov_[static_cast<std::size_t>(z)] += pat.bit(z) ? 1 : 0;
      if (viable(depth + 1) && dfs(depth + 1)) return true;
      for (int z = 0; z < grid_.slots; ++z)
        cov_[static_cast<std::size_t>(z)] -= pat.bit(z) ? 1 : 0;
    }
    return false;
  }

  const WcspInstance& wcsp_;
  const CoverageGrid& grid_;
  std::vector<int> order_;
  std::vector<int> cov_;
  std::vector<std::vector<int>> suffix_lo_, suffix_hi_;
};

}  // namespace

PropagationResult gac_propagate(WcspInstance& wcsp) {
  PropagationResult result;
  CoverageGrid grid(wcsp.base);
  bool changed_this_pass = true;
  while (changed_this_pass) {
    changed_this_pass = false;
    for (int i = 0; i < wcsp.base.nurses; ++i) {
      auto& domain = wcsp.variable_domains[static_cast<std::size_t>(i)];
      std::vector<int> kept;
      for (int j : domain) {
        SupportSearch search(wcsp, grid);  // envelopes rebuilt after removals
        if (search.supported(i, j)) {
          kept.push_back(j);
        } else {
          result.removals.emplace_back(i, j);
          ++result.removed;
          result.changed = true;
          changed_this_pass = true;
        }
      }
      domain = std::move(kept);
      if (domain.empty()) {
        result.inconsistent = true;
        return result;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

Rat compute_lb(const Assignment& partial, const WcspInstance& wcsp) {
  if (static_cast<int>(partial.value.size()) != wcsp.base.nurses)
    throw ShapeError("assignment size does not match nurse count");
  Rat bound(0);
  for (int i = 0; i < wcsp.base.nurses; ++i) {
    const auto& row = wcsp.base.cost[static_cast<std::size_t>(i)];
    if (partial.assigned(i)) {
      bound += row[static_cast<std::size_t>(partial.value[static_cast<std::size_t>(i)])];
      continue;
    }
    const auto& domain = wcsp.variable_domains[static_cast<std::size_t>(i)];
    if (domain.empty()) return wcsp.cost_cap;  // no completion exists
    Rat best = row[static_cast<std::size_t>(domain.front())];
    for (int j : domain) best = std::min(best, row[static_cast<std::size_t>(j)]);
    bound += best;
  }
  return bound;
}

Rat compute_ub(const Assignment& partial, const WcspInstance& wcsp) {
  if (static_cast<int>(partial.value.size()) != wcsp.base.nurses)
    throw ShapeError("assignment size does not match nurse count");
  Rat bound(0);
  for (int i = 0; i < wcsp.base.nurses; ++i) {
    const auto& row = wcsp.base.cost[static_cast<std::size_t>(i)];
    if (partial.assigned(i)) {
      bound += row[static_cast<std::size_t>(partial.value[static_cast<std::size_t>(i)])];
      continue;
    }
    const auto& domain = wcsp.variable_domains[static_cast<std::size_t>(i)];
    if (domain.empty()) return Rat(0);  // dead branch; any value is safe here
    Rat best = row[static_cast<std::size_t>(domain.front())];
    for (int j : domain) best = std::max(best, row[static_cast<std::size_t>(j)]);
    bound += best;
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Branch and bound / DFS
// ---------------------------------------------------------------------------

namespace {

class BnbSearch {
public:
  BnbSearch(const WcspInstance& wcsp, const SolveOptions& options)
      : wcsp_(wcsp), opt_(options), grid_(wcsp.base) {
    const int n = wcsp.base.nurses;

    order_.resize(static_cast<std::size_t>(n));
    std::iota(order_.begin(), order_.end(), 0);
    if (opt_.var_order == VarOrder::smallest_domain)
      std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
        return wcsp.variable_domains[static_cast<std::size_t>(a)].size() <
               wcsp.variable_domains[static_cast<std::size_t>(b)].size();
      });

    values_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      values_[static_cast<std::size_t>(i)] = wcsp.variable_domains[static_cast<std::size_t>(i)];
      if (opt_.val_order == ValOrder::by_cost) {
        const auto& row = wcsp.base.cost[static_cast<std::size_t>(i)];
        std::stable_sort(values_[static_cast<std::size_t>(i)].begin(),
                         values_[static_cast<std::size_t>(i)].end(), [&](int a, int b) {
                           const Rat& ca = row[static_cast<std::size_t>(a)];
                           const Rat& cb = row[static_cast<std::size_t>(b)];
                           return opt_.sense == Sense::minimize ? ca < cb : ca > cb;
                         });
      }
    }

    // Static per-depth envelopes over the search order: coverage reach and
    // best-possible remaining cost. Sound for pruning because domains do
    // not shrink during the search itself.
    const std::size_t depth_count = order_.size() + 1;
    suffix_lo_.assign(depth_count, std::vector<int>(static_cast<std::size_t>(grid_.slots), 0));
    suffix_hi_ = suffix_lo_;
    suffix_best_.assign(depth_count, Rat(0));
    Envelope env(wcsp, grid_.slots);
    for (int d = static_cast<int>(order_.size()) - 1; d >= 0; --d) {
      const int var = order_[static_cast<std::size_t>(d)];
      for (int z = 0; z < grid_.slots; ++z) {
        suffix_lo_[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
            suffix_lo_[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
            env.lo[static_cast<std::size_t>(var)][static_cast<std::size_t>(z)];
        suffix_hi_[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
            suffix_hi_[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
            env.hi[static_cast<std::size_t>(var)][static_cast<std::size_t>(z)];
      }
      const auto& domain = wcsp.variable_domains[static_cast<std::size_t>(var)];
      const auto& row = wcsp.base.cost[static_cast<std::size_t>(var)];
      Rat best(0);
      if (!domain.empty()) {
        best = row[static_cast<std::size_t>(domain.front())];
        for (int j : domain)
          best = opt_.sense == Sense::minimize ? std::min(best, row[static_cast<std::size_t>(j)])
                                               : std::max(best, row[static_cast<std::size_t>(j)]);
      }
      suffix_best_[static_cast<std::size_t>(d)] = suffix_best_[static_cast<std::size_t>(d + 1)] + best;
    }

    unary_ok_.resize(wcsp.domain.size() * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (std::size_t j = 0; j < wcsp.domain.size(); ++j)
        unary_ok_[static_cast<std::size_t>(i) * wcsp.domain.size() + j] =
            all_satisfied(check_unary(wcsp.domain[j], i, wcsp.base));
  }

  SolveResult run() {
    const auto start = Clock::now();
    SolveResult result;
    current_ = Assignment::empty(wcsp_.base.nurses);
    cov_.assign(static_cast<std::size_t>(grid_.slots), 0);
    cost_so_far_ = Rat(0);
    bool empty_domain = std::any_of(
        wcsp_.variable_domains.begin(), wcsp_.variable_domains.end(),
        [](const std::vector<int>& d) { return d.empty(); });
    if (!empty_domain) dfs(0, result);
    result.stats = stats_;
    result.stats.elapsed_seconds = seconds_since(start);
    if (limit_hit_) {
      result.status = SolveStatus::budget_exhausted;
      result.proved_optimal = false;
    } else if (result.cost) {
      result.status = SolveStatus::optimal;
      result.proved_optimal = true;
    } else {
      result.status = SolveStatus::infeasible;
      result.proved_optimal = false;
    }
    if (!opt_.enumerate_optima) result.all_optima.clear();
    return result;
  }

private:
  bool better(const Rat& a, const Rat& b) const {
    return opt_.sense == Sense::minimize ? a < b : a > b;
  }

  void dfs(std::size_t depth, SolveResult& result) {
    if (limit_hit_) return;
    if (depth == order_.size()) {
      // Leaf: the coverage screen kept every slot inside [q, p], and unary
      // checks gated each value, so this assignment is feasible.
      if (!result.cost || better(cost_so_far_, *result.cost)) {
        result.cost = cost_so_far_;
        result.assignment = current_;
        result.all_optima.clear();
        result.all_optima.push_back(current_);
        result.cost_trace.push_back(cost_so_far_);
        ++stats_.incumbent_updates;
      } else if (opt_.enumerate_optima && cost_so_far_ == *result.cost) {
        result.all_optima.push_back(current_);
      }
      return;
    }
    const int var = order_[depth];
    for (int j : values_[static_cast<std::size_t>(var)]) {
      if (opt_.node_limit > 0 && stats_.nodes_expanded >= opt_.node_limit) {
        limit_hit_ = true;
        return;
      }
      ++stats_.nodes_expanded;
      if (!unary_ok_[static_cast<std::size_t>(var) * wcsp_.domain.size() + static_cast<std::size_t>(j)]) {
        ++stats_.prunes;
        continue;
      }
      const ShiftPattern& pat = wcsp_.domain[static_cast<std::size_t>(j)];
      bool ok = true;
      for (int z = 0; z < grid_.slots; ++z) {
        cov_[static_cast<std::size_t>(z)] += pat.bit(z) ? 1 : 0;
        const int c = cov_[static_cast<std::size_t>(z)];
        if (c > grid_.p[static_cast<std::size_t>(z)] ||
            c + suffix_hi_[depth + 1][static_cast<std::size_t>(z)] < grid_.q[static_cast<std::size_t>(z)] ||
            c + suffix_lo_[depth + 1][static_cast<std::size_t>(z)] > grid_.p[static_cast<std::size_t>(z)])
          ok = false;
      }
      const Rat value_cost = wcsp_.base.cost[static_cast<std::size_t>(var)][static_cast<std::size_t>(j)];
      if (ok && opt_.use_bounding && result.cost) {
        const Rat optimistic = cost_so_far_ + value_cost + suffix_best_[depth + 1];
        // Non-strict cut keeps the first optimum; enumeration must keep ties.
        const bool cut = opt_.enumerate_optima ? better(*result.cost, optimistic)
                                               : !better(optimistic, *result.cost);
        if (cut) ok = false;
      }
      if (ok) {
        current_.value[static_cast<std::size_t>(var)] = j;
        cost_so_far_ += value_cost;
        dfs(depth + 1, result);
        cost_so_far_ -= value_cost;
        current_.value[static_cast<std::size_t>(var)] = -1;
      } else {
        ++stats_.prunes;
      }
      for (int z = 0; z < grid_.slots; ++z) cov_[static_cast<std::size_t>(z)] -= pat.bit(z) ? 1 : 0;
      if (limit_hit_) return;
    }
  }

  const WcspInstance& wcsp_;
  SolveOptions opt_;
  CoverageGrid grid_;
  std::vector<int> order_;
  std::vector<std::vector<int>> values_;
  std::vector<std::vector<int>> suffix_lo_, suffix_hi_;
  std::vector<Rat> suffix_best_;
  std::vector<char> unary_ok_;
  Assignment current_{std::vector<int>{}};
  std::vector<int> cov_;
  Rat cost_so_far_;
  SearchStats stats_;
  bool limit_hit_ = false;
};

}  // namespace

SolveResult branch_and_bound(const WcspInstance& wcsp, const SolveOptions& options) {
  wcsp.base.validate();
  BnbSearch search(wcsp, options);
  return search.run();
}

SolveResult dfs_first_feasible(const WcspInstance& wcsp) {
  // Plain depth-first feasibility search == branch and bound restricted to
  // its feasibility machinery: index order, domain-order values, no
  // bounding, stop at the first leaf. Implemented directly so the first
  // leaf really is the first feasible assignment in domain order.
  wcsp.base.validate();
  const auto start = Clock::now();
  CoverageGrid grid(wcsp.base);
  Envelope env(wcsp, grid.slots);
  const int n = wcsp.base.nurses;

  std::vector<std::vector<int>> suffix_hi(static_cast<std::size_t>(n) + 1,
                                          std::vector<int>(static_cast<std::size_t>(grid.slots), 0));
  auto suffix_lo = suffix_hi;
  for (int d = n - 1; d >= 0; --d)
    for (int z = 0; z < grid.slots; ++z) {
      suffix_hi[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
          suffix_hi[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
          env.hi[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)];
      suffix_lo[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)] =
          suffix_lo[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(z)] +
          env.lo[static_cast<std::size_t>(d)][static_cast<std::size_t>(z)];
    }

  SolveResult result;
  Assignment current = Assignment::empty(n);
  std::vector<int> cov(static_cast<std::size_t>(grid.slots), 0);

  auto dfs = [&](auto&& self, int depth) -> bool {
    if (depth == n) return true;
    for (int j : wcsp.variable_domains[static_cast<std::size_t>(depth)]) {
      ++result.stats.nodes_expanded;
      const ShiftPattern& pat = wcsp.domain[static_cast<std::size_t>(j)];
      if (!all_satisfied(check_unary(pat, depth, wcsp.base))) {
        ++result.stats.prunes;
        continue;
      }
      bool ok = true;
      for (int z = 0; z < grid.slots; ++z) {
        cov[static_cast<std::size_t>(z)] += pat.bit(z) ? 1 : 0;
        const int c = cov[static_cast<std::size_t>(z)];
        if (c > grid.p[static_cast<std::size_t>(z)] ||
            c + suffix_hi[static_cast<std::size_t>(depth) + 1][static_cast<std::size_t>(z)] <
                grid.q[static_cast<std::size_t>(z)] ||
            c + suffix_lo[static_cast<std::size_t>(depth) + 1][static_cast<std::size_t>(z)] >
                grid.p[static_cast<std::size_t>(z)])
          ok = false;
      }
      if (ok) {
        current.value[static_cast<std::size_t>(depth)] = j;
        if (self(self, depth + 1)) return true;
        current.value[static_cast<std::size_t>(depth)] = -1;
      } else {
        ++result.stats.prunes;
      }
      for (int z = 0; z < grid.slots; ++z) cov[static_cast<std::size_t>(z)] -= pat.bit(z) ? 1 : 0;
    }
    return false;
  };

  const bool found = n > 0 && dfs(dfs, 0);
  result.stats.elapsed_seconds = seconds_since(start);
  if (found) {
    result.status = SolveStatus::feasible;
    result.assignment = current;
    result.cost = solution_cost(current, wcsp.base);
  } else {
    result.status = SolveStatus::infeasible;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Stochastic local search
// ---------------------------------------------------------------------------

SolveResult sls_solve(const WcspInstance& wcsp, const SlsOptions& options) {
  wcsp.base.validate();
  const auto start = Clock::now();
  if (options.budget < 0) throw RangeError("sweep budget must be non-negative");

  // dfs_cp narrows the value sets first; the reductions are solution-safe,
  // so local moves explore the same feasible space through smaller menus.
  WcspInstance narrowed;
  const WcspInstance* space = &wcsp;
  if (options.init == SlsInit::dfs_cp) {
    narrowed = wcsp;
    PropagationResult nc = nc_propagate(narrowed);
    PropagationResult gac;
    if (!nc.inconsistent) gac = gac_propagate(narrowed);
    if (nc.inconsistent || gac.inconsistent) {
      SolveResult result;
      result.status = SolveStatus::infeasible;
      result.proved_optimal = true;  // wipeout is a proof
      result.stats.elapsed_seconds = seconds_since(start);
      return result;
    }
    space = &narrowed;
  }

  SolveResult result;
  rng::Engine eng(options.seed);
  const int n = space->base.nurses;

  Assignment current = Assignment::empty(n);
  bool have_start = false;
  if (options.init == SlsInit::random) {
    for (int attempt = 0; attempt < options.random_retry_cap && !have_start; ++attempt) {
      for (int i = 0; i < n; ++i) {
        const auto& domain = space->variable_domains[static_cast<std::size_t>(i)];
        if (domain.empty()) break;
        current.value[static_cast<std::size_t>(i)] =
            domain[rng::below(eng, domain.size())];
      }
      have_start = current.complete() && all_satisfied(check_global(current, *space));
    }
  } else {
    SolveResult seed_result = dfs_first_feasible(*space);
    result.stats.nodes_expanded += seed_result.stats.nodes_expanded;
    if (seed_result.assignment) {
      current = *seed_result.assignment;
      have_start = true;
    } else {
      // The seeding search was exhaustive, so an empty result is a proof.
      result.status = SolveStatus::infeasible;
      result.proved_optimal = true;
      result.stats.elapsed_seconds = seconds_since(start);
      return result;
    }
  }
  if (!have_start) {
    result.status = SolveStatus::budget_exhausted;  // no feasible start found
    result.stats.elapsed_seconds = seconds_since(start);
    return result;
  }

  const CoverageGrid grid(space->base);
  std::vector<int> cov(static_cast<std::size_t>(grid.slots), 0);
  for (int i = 0; i < n; ++i) {
    const ShiftPattern& pat = space->domain[static_cast<std::size_t>(current.value[static_cast<std::size_t>(i)])];
    for (int z = 0; z < grid.slots; ++z) cov[static_cast<std::size_t>(z)] += pat.bit(z) ? 1 : 0;
  }

  Rat cost = solution_cost(current, space->base);
  result.cost_trace.push_back(cost);
  const bool minimize = options.sense == Sense::minimize;

  // Value menus ordered best-first for the optimization sense.
  std::vector<std::vector<int>> menu(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    menu[static_cast<std::size_t>(i)] = space->variable_domains[static_cast<std::size_t>(i)];
    const auto& row = space->base.cost[static_cast<std::size_t>(i)];
    std::stable_sort(menu[static_cast<std::size_t>(i)].begin(), menu[static_cast<std::size_t>(i)].end(),
                     [&](int a, int b) {
                       const Rat& ca = row[static_cast<std::size_t>(a)];
                       const Rat& cb = row[static_cast<std::size_t>(b)];
                       return minimize ? ca < cb : ca > cb;
                     });
  }

  for (long long sweep = 0; sweep < options.budget; ++sweep) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      const int cur = current.value[static_cast<std::size_t>(i)];
      const ShiftPattern& cur_pat = space->domain[static_cast<std::size_t>(cur)];
      const Rat cur_cost = space->base.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(cur)];
      for (int j : menu[static_cast<std::size_t>(i)]) {
        if (j == cur) continue;
        const Rat delta = space->base.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - cur_cost;
        const bool strict_gain = minimize ? delta < Rat(0) : delta > Rat(0);
        // Menu is sorted best-first: once a value stops strictly improving,
        // nothing after it can either.
        if (!strict_gain) break;
        ++result.stats.nodes_expanded;
        const ShiftPattern& pat = space->domain[static_cast<std::size_t>(j)];
        if (!all_satisfied(check_unary(pat, i, space->base))) continue;
        bool ok = true;
        for (int z = 0; z < grid.slots && ok; ++z) {
          const int c = cov[static_cast<std::size_t>(z)] - (cur_pat.bit(z) ? 1 : 0) + (pat.bit(z) ? 1 : 0);
          ok = c >= grid.q[static_cast<std::size_t>(z)] && c <= grid.p[static_cast<std::size_t>(z)];
        }
        if (!ok) continue;
        // First strictly improving feasible swap wins.
        for (int z = 0; z < grid.slots; ++z)
          cov[static_cast<std::size_t>(z)] += (pat.bit(z) ? 1 : 0) - (cur_pat.bit(z) ? 1 : 0);
        current.value[static_cast<std::size_t>(i)] = j;
        cost += delta;
        result.cost_trace.push_back(cost);
        ++result.stats.incumbent_updates;
        improved = true;
        break;
      }
    }
    if (!improved) break;  // local optimum
  }

  result.status = SolveStatus::feasible;
  result.assignment = current;
  result.cost = cost;
  result.stats.elapsed_seconds = seconds_since(start);
  return result;
}

}  // namespace nsp::solver
