#include "nspforge/model.hpp"

#include <algorithm>
#include <numeric>

#include "nspforge/errors.hpp"

namespace nsp {

namespace {

void require_grid(int days, int shifts_per_day) {
  if (days <= 0 || shifts_per_day <= 0)
    throw RangeError("pattern grid needs positive days and shifts per day");
}

}  // namespace

// ---------------------------------------------------------------------------
// ShiftPattern
// ---------------------------------------------------------------------------

ShiftPattern::ShiftPattern(int days, int shifts_per_day)
    : days_(days), shifts_per_day_(shifts_per_day) {
  require_grid(days, shifts_per_day);
  bits_.assign(static_cast<std::size_t>(days) * shifts_per_day, 0);
}

ShiftPattern ShiftPattern::from_text(std::string_view text, int days, int shifts_per_day) {
  require_grid(days, shifts_per_day);
  ShiftPattern p(days, shifts_per_day);
  if (static_cast<int>(text.size()) != p.slots())
    throw ShapeError("pattern text length " + std::to_string(text.size()) + " does not match " +
                     std::to_string(p.slots()) + " slots");
  for (int z = 0; z < p.slots(); ++z) {
    char c = text[static_cast<std::size_t>(z)];
    if (c != '0' && c != '1') throw ParseError("pattern must be over '0'/'1'");
    p.bits_[static_cast<std::size_t>(z)] = c == '1';
  }
  return p;
}

ShiftPattern ShiftPattern::from_ordinal(std::uint64_t ordinal, int days, int shifts_per_day) {
  require_grid(days, shifts_per_day);
  ShiftPattern p(days, shifts_per_day);
  const int n = p.slots();
  if (n < 64 && ordinal >> n)
    throw RangeError("ordinal does not fit in " + std::to_string(n) + " slots");
  for (int z = 0; z < n; ++z)
    p.bits_[static_cast<std::size_t>(z)] = (ordinal >> (n - 1 - z)) & 1u;
  return p;
}

std::string ShiftPattern::to_text() const {
  std::string out(bits_.size(), '0');
  for (std::size_t z = 0; z < bits_.size(); ++z)
    if (bits_[z]) out[z] = '1';
  return out;
}

bool ShiftPattern::assigned(int day, int shift) const {
  if (day < 1 || day > days_) throw RangeError("day " + std::to_string(day) + " out of range");
  if (shift < 1 || shift > shifts_per_day_)
    throw RangeError("shift " + std::to_string(shift) + " out of range");
  return bits_[static_cast<std::size_t>((day - 1) * shifts_per_day_ + (shift - 1))] != 0;
}

bool ShiftPattern::bit(int slot) const {
  if (slot < 0 || slot >= slots()) throw RangeError("slot out of range");
  return bits_[static_cast<std::size_t>(slot)] != 0;
}

void ShiftPattern::set_bit(int slot, bool value) {
  if (slot < 0 || slot >= slots()) throw RangeError("slot out of range");
  bits_[static_cast<std::size_t>(slot)] = value;
}

int ShiftPattern::popcount() const noexcept {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int ShiftPattern::day_count(int day) const {
  if (day < 1 || day > days_) throw RangeError("day out of range");
  int total = 0;
  for (int s = 1; s <= shifts_per_day_; ++s) total += assigned(day, s);
  return total;
}

bool ShiftPattern::night(int day) const { return assigned(day, shifts_per_day_); }

bool ShiftPattern::morning(int day) const { return assigned(day, 1); }

int ShiftPattern::night_morning_pairs() const {
  int pairs = 0;
  for (int d = 1; d < days_; ++d)
    if (night(d) && morning(d + 1)) ++pairs;
  return pairs;
}

int ShiftPattern::night_count() const {
  int nights = 0;
  for (int d = 1; d <= days_; ++d) nights += night(d);
  return nights;
}

Rat pattern_cost(const ShiftPattern& pattern, const std::vector<Rat>& per_shift_costs) {
  if (static_cast<int>(per_shift_costs.size()) != pattern.shifts_per_day())
    throw ShapeError("need one cost per daily shift position");
  Rat total(0);
  for (int d = 1; d <= pattern.days(); ++d)
    for (int s = 1; s <= pattern.shifts_per_day(); ++s)
      if (pattern.assigned(d, s)) total += per_shift_costs[static_cast<std::size_t>(s - 1)];
  return total;
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

Schedule::Schedule(int nurses, int days, int shifts_per_day)
    : nurses_(nurses), days_(days), shifts_per_day_(shifts_per_day) {
  if (nurses <= 0) throw RangeError("schedule needs at least one nurse");
  require_grid(days, shifts_per_day);
  cells_.assign(static_cast<std::size_t>(nurses) * days * shifts_per_day, 0);
}

Schedule Schedule::from_rows(const std::vector<ShiftPattern>& rows) {
  if (rows.empty()) throw ShapeError("schedule needs at least one row");
  Schedule s(static_cast<int>(rows.size()), rows.front().days(), rows.front().shifts_per_day());
  for (int i = 0; i < s.nurses(); ++i) s.set_row(i, rows[static_cast<std::size_t>(i)]);
  return s;
}

bool Schedule::at(int nurse, int slot) const {
  if (nurse < 0 || nurse >= nurses_) throw RangeError("nurse out of range");
  if (slot < 0 || slot >= columns()) throw RangeError("slot out of range");
  return cells_[static_cast<std::size_t>(nurse) * columns() + slot] != 0;
}

void Schedule::set(int nurse, int slot, bool value) {
  if (nurse < 0 || nurse >= nurses_) throw RangeError("nurse out of range");
  if (slot < 0 || slot >= columns()) throw RangeError("slot out of range");
  cells_[static_cast<std::size_t>(nurse) * columns() + slot] = value;
}

ShiftPattern Schedule::row(int nurse) const {
  ShiftPattern p(days_, shifts_per_day_);
  for (int z = 0; z < columns(); ++z) p.set_bit(z, at(nurse, z));
  return p;
}

void Schedule::set_row(int nurse, const ShiftPattern& pattern) {
  if (pattern.days() != days_ || pattern.shifts_per_day() != shifts_per_day_)
    throw ShapeError("pattern grid does not match schedule grid");
  for (int z = 0; z < columns(); ++z) set(nurse, z, pattern.bit(z));
}

int Schedule::column_sum(int slot) const {
  int total = 0;
  for (int i = 0; i < nurses_; ++i) total += at(i, slot);
  return total;
}

// ---------------------------------------------------------------------------
// NspInstance / WcspInstance
// ---------------------------------------------------------------------------

void NspInstance::validate() const {
  if (nurses <= 0 || days <= 0 || shifts_per_day <= 0)
    throw RangeError("instance needs positive nurse, day and shift counts");
  auto check_grid = [&](const std::vector<std::vector<int>>& g, const char* name) {
    if (static_cast<int>(g.size()) != shifts_per_day)
      throw ShapeError(std::string(name) + " must have one row per shift");
    for (const auto& row : g)
      if (static_cast<int>(row.size()) != days)
        throw ShapeError(std::string(name) + " must have one column per day");
  };
  check_grid(min_coverage, "min coverage");
  check_grid(max_coverage, "max coverage");
  for (int s = 0; s < shifts_per_day; ++s)
    for (int k = 0; k < days; ++k) {
      int q = min_coverage[s][k], p = max_coverage[s][k];
      if (q < 0 || p < 0) throw RangeError("coverage bounds must be non-negative");
      if (q > p)
        throw ConsistencyError("min coverage exceeds max coverage at day " + std::to_string(k + 1) +
                               " shift " + std::to_string(s + 1));
      if (q > nurses) throw ConsistencyError("min coverage exceeds the number of nurses");
    }
  auto check_per_nurse = [&](const std::vector<int>& v, const char* name) {
    if (static_cast<int>(v.size()) != nurses)
      throw ShapeError(std::string(name) + " must have one entry per nurse");
    for (int x : v)
      if (x < 0) throw RangeError(std::string(name) + " must be non-negative");
  };
  check_per_nurse(max_total_shifts, "max total shifts");
  check_per_nurse(min_total_shifts, "min total shifts");
  check_per_nurse(max_nights, "max nights");
  for (int i = 0; i < nurses; ++i)
    if (min_total_shifts[i] > max_total_shifts[i])
      throw ConsistencyError("nurse " + std::to_string(i + 1) + " has min shifts above max");
  if (max_night_morning < 0) throw RangeError("night-morning budget must be non-negative");
  if (max_shifts_per_day && *max_shifts_per_day < 0)
    throw RangeError("per-day ceiling must be non-negative");
  if (static_cast<int>(cost.size()) != nurses)
    throw ShapeError("cost matrix must have one row per nurse");
  const std::size_t m = cost.empty() ? 0 : cost.front().size();
  for (const auto& row : cost)
    if (row.size() != m) throw ShapeError("cost matrix must be rectangular");
}

Rat default_cost_cap(const NspInstance& instance) {
  Rat cap(1);
  for (const auto& row : instance.cost) {
    if (row.empty()) continue;
    cap += *std::max_element(row.begin(), row.end());
  }
  return cap;
}

WcspInstance make_wcsp(NspInstance instance, std::vector<ShiftPattern> domain) {
  instance.validate();
  if (static_cast<int>(domain.size()) != instance.pattern_count())
    throw ShapeError("domain size must match cost columns");
  for (const auto& p : domain)
    if (p.days() != instance.days || p.shifts_per_day() != instance.shifts_per_day)
      throw ShapeError("domain pattern grid does not match the instance");
  WcspInstance wcsp;
  wcsp.cost_cap = default_cost_cap(instance);
  wcsp.base = std::move(instance);
  wcsp.domain = std::move(domain);
  std::vector<int> all(wcsp.domain.size());
  std::iota(all.begin(), all.end(), 0);
  wcsp.variable_domains.assign(static_cast<std::size_t>(wcsp.base.nurses), all);
  return wcsp;
}

// ---------------------------------------------------------------------------
// Assignment
// ---------------------------------------------------------------------------

bool Assignment::complete() const {
  return std::all_of(value.begin(), value.end(), [](int v) { return v >= 0; });
}

int Assignment::assigned_count() const {
  return static_cast<int>(std::count_if(value.begin(), value.end(), [](int v) { return v >= 0; }));
}

Rat solution_cost(const Assignment& assignment, const NspInstance& instance) {
  if (static_cast<int>(assignment.value.size()) != instance.nurses)
    throw ShapeError("assignment size does not match nurse count");
  if (!assignment.complete())
    throw IncompleteAssignmentError("cost of a partial assignment is undefined");
  Rat total(0);
  for (int i = 0; i < instance.nurses; ++i) {
    int j = assignment.value[static_cast<std::size_t>(i)];
    if (j >= instance.pattern_count()) throw RangeError("assignment value out of domain");
    total += instance.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return total;
}

Schedule to_schedule(const Assignment& assignment, const WcspInstance& wcsp) {
  if (!assignment.complete())
    throw IncompleteAssignmentError("cannot materialize a partial assignment");
  std::vector<ShiftPattern> rows;
  rows.reserve(assignment.value.size());
  for (int j : assignment.value) {
    if (j < 0 || j >= static_cast<int>(wcsp.domain.size()))
      throw RangeError("assignment value out of domain");
    rows.push_back(wcsp.domain[static_cast<std::size_t>(j)]);
  }
  return Schedule::from_rows(rows);
}

}  // namespace nsp
