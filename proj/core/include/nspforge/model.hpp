#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nspforge/rational.hpp"

namespace nsp {

// One nurse's week: a binary string over day-major slots. With s shifts per
// day and k days, slot z = (day-1)*s + (shift-1) for 1-based day/shift; the
// canonical text form lists slots left to right ('1' = assigned).
class ShiftPattern {
public:
  ShiftPattern() = default;
  ShiftPattern(int days, int shifts_per_day);

  // Parses the canonical text form; length must equal days*shifts_per_day
  // and every character must be '0' or '1'.
  static ShiftPattern from_text(std::string_view text, int days, int shifts_per_day);

  // Pattern whose text form is `ordinal` written in binary over
  // days*shifts_per_day digits (first slot = most significant bit), so
  // ordinal order equals lexicographic text order. Used to enumerate the
  // full 2^(s*k) pattern space.
  static ShiftPattern from_ordinal(std::uint64_t ordinal, int days, int shifts_per_day);

  std::string to_text() const;

  int days() const noexcept { return days_; }
  int shifts_per_day() const noexcept { return shifts_per_day_; }
  int slots() const noexcept { return days_ * shifts_per_day_; }

  // 1-based day/shift accessor; throws RangeError outside the grid.
  bool assigned(int day, int shift) const;

  // 0-based day-major slot accessor.
  bool bit(int slot) const;
  void set_bit(int slot, bool value);

  int popcount() const noexcept;
  int day_count(int day) const;       // shifts worked on 1-based `day`
  bool night(int day) const;          // last shift of 1-based `day`
  bool morning(int day) const;        // first shift of 1-based `day`
  int night_morning_pairs() const;    // days d with night(d) && morning(d+1)
  int night_count() const;

  friend bool operator==(const ShiftPattern& a, const ShiftPattern& b) {
    return a.days_ == b.days_ && a.shifts_per_day_ == b.shifts_per_day_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const ShiftPattern& a, const ShiftPattern& b) { return !(a == b); }

private:
  int days_ = 0;
  int shifts_per_day_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Weight of a pattern given one cost per daily shift position (size s);
// every worked slot contributes the cost of its shift-of-day.
Rat pattern_cost(const ShiftPattern& pattern, const std::vector<Rat>& per_shift_costs);

// Complete roster: one row per nurse over day-major slot columns.
class Schedule {
public:
  Schedule() = default;
  Schedule(int nurses, int days, int shifts_per_day);
  static Schedule from_rows(const std::vector<ShiftPattern>& rows);

  int nurses() const noexcept { return nurses_; }
  int days() const noexcept { return days_; }
  int shifts_per_day() const noexcept { return shifts_per_day_; }
  int columns() const noexcept { return days_ * shifts_per_day_; }

  // 0-based accessors.
  bool at(int nurse, int slot) const;
  void set(int nurse, int slot, bool value);

  ShiftPattern row(int nurse) const;
  void set_row(int nurse, const ShiftPattern& pattern);

  // Number of nurses working 0-based slot column.
  int column_sum(int slot) const;

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.nurses_ == b.nurses_ && a.days_ == b.days_ &&
           a.shifts_per_day_ == b.shifts_per_day_ && a.cells_ == b.cells_;
  }
  friend bool operator!=(const Schedule& a, const Schedule& b) { return !(a == b); }

private:
  int nurses_ = 0;
  int days_ = 0;
  int shifts_per_day_ = 0;
  std::vector<std::uint8_t> cells_;  // row-major
};

// Scheduling problem data. Coverage bounds are indexed [shift][day]
// (s rows of k columns, 0-based); per-nurse bounds are parallel to rows.
struct NspInstance {
  int nurses = 0;          // n
  int days = 0;            // k
  int shifts_per_day = 0;  // s

  std::vector<std::vector<int>> min_coverage;  // q, s x k
  std::vector<std::vector<int>> max_coverage;  // p, s x k

  std::vector<int> max_total_shifts;  // h_i, size n
  std::vector<int> min_total_shifts;  // lower bound per nurse, default 0
  int max_night_morning = 0;          // y: allowed night->next-morning pairs
  std::vector<int> max_nights;        // b_i, size n

  // Optional ceiling on shifts worked within one day; set when an instance
  // is built from a learned model, absent otherwise.
  std::optional<int> max_shifts_per_day;

  // Value weights: cost[i][j] = weight of nurse i taking pattern j.
  std::vector<std::vector<Rat>> cost;

  int pattern_count() const { return cost.empty() ? 0 : static_cast<int>(cost.front().size()); }

  // Shape and ordering checks (q <= p, bound ranges, rectangular cost).
  // Throws ShapeError / RangeError / ConsistencyError.
  void validate() const;
};

// Instance plus explicit value set: the solvable form of the problem.
struct WcspInstance {
  NspInstance base;
  std::vector<ShiftPattern> domain;                // all m candidate patterns
  std::vector<std::vector<int>> variable_domains;  // per nurse: indices into domain
  Rat cost_cap;                                    // K: costs at/above are forbidden
};

// Default cap: 1 + sum over nurses of their worst value weight, i.e. just
// above any complete assignment's cost, so only genuinely forbidden
// combinations reach it.
Rat default_cost_cap(const NspInstance& instance);

// Bundles an instance with its pattern list, gives every nurse the full
// domain, and applies the default cap.
WcspInstance make_wcsp(NspInstance instance, std::vector<ShiftPattern> domain);

// Partial or complete choice of one domain index per nurse (-1 = unassigned).
struct Assignment {
  std::vector<int> value;

  static Assignment empty(int nurses) { return Assignment{std::vector<int>(nurses, -1)}; }
  bool assigned(int nurse) const { return value[nurse] >= 0; }
  bool complete() const;
  int assigned_count() const;

  friend bool operator==(const Assignment& a, const Assignment& b) { return a.value == b.value; }
};

// Sum of chosen value weights; throws IncompleteAssignmentError on a
// partial assignment.
Rat solution_cost(const Assignment& assignment, const NspInstance& instance);

// Materializes the chosen patterns as a roster; assignment must be complete.
Schedule to_schedule(const Assignment& assignment, const WcspInstance& wcsp);

}  // namespace nsp
