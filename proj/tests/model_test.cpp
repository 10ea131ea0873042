#include "nspforge/model.hpp"

#include <gtest/gtest.h>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"
#include "support/golden.hpp"

namespace {

using nsp::Assignment;
using nsp::NspInstance;
using nsp::Rat;
using nsp::Schedule;
using nsp::ShiftPattern;

TEST(ShiftPattern, TextRoundTrip) {
  const ShiftPattern p = ShiftPattern::from_text("0100100011000000100000101000", 7, 4);
  EXPECT_EQ(p.to_text(), "0100100011000000100000101000");
  EXPECT_EQ(p.days(), 7);
  EXPECT_EQ(p.shifts_per_day(), 4);
  EXPECT_EQ(p.popcount(), 7);
}

TEST(ShiftPattern, FromTextValidates) {
  EXPECT_THROW(ShiftPattern::from_text("01", 1, 4), nsp::ShapeError);
  EXPECT_THROW(ShiftPattern::from_text("01x1", 1, 4), nsp::ParseError);
}

TEST(ShiftPattern, OrdinalMatchesLexicographicText) {
  // The ordinal encoding makes ordinal order equal lexicographic text order.
  std::string previous;
  for (std::uint64_t o = 0; o < 16; ++o) {
    const std::string text = ShiftPattern::from_ordinal(o, 1, 4).to_text();
    if (o > 0) EXPECT_LT(previous, text);
    previous = text;
  }
  EXPECT_EQ(ShiftPattern::from_ordinal(0, 1, 4).to_text(), "0000");
  EXPECT_EQ(ShiftPattern::from_ordinal(9, 1, 4).to_text(), "1001");
  EXPECT_EQ(ShiftPattern::from_ordinal(15, 1, 4).to_text(), "1111");
}

TEST(ShiftPattern, DayShiftAccessorsAreOneBased) {
  const ShiftPattern p = ShiftPattern::from_text("10000100", 2, 4);
  EXPECT_TRUE(p.assigned(1, 1));
  EXPECT_FALSE(p.assigned(1, 2));
  EXPECT_TRUE(p.assigned(2, 2));
  EXPECT_THROW(p.assigned(0, 1), nsp::RangeError);
  EXPECT_THROW(p.assigned(1, 0), nsp::RangeError);
  EXPECT_THROW(p.assigned(3, 1), nsp::RangeError);
  EXPECT_THROW(p.assigned(1, 5), nsp::RangeError);
}

TEST(ShiftPattern, NightAndMorningSemantics) {
  // Night = last shift of a day; morning = first shift of the next day.
  const ShiftPattern p = ShiftPattern::from_text("00011000", 2, 4);
  EXPECT_TRUE(p.night(1));
  EXPECT_TRUE(p.morning(2));
  EXPECT_EQ(p.night_morning_pairs(), 1);
  EXPECT_EQ(p.night_count(), 1);

  const ShiftPattern q = ShiftPattern::from_text("000100011001", 3, 4);
  // nights on days 1, 2, 3; mornings on day 3 only -> pairs at (2,3)
  EXPECT_EQ(q.night_count(), 3);
  EXPECT_EQ(q.night_morning_pairs(), 1);
  EXPECT_EQ(q.day_count(1), 1);
  EXPECT_EQ(q.day_count(2), 1);
  EXPECT_EQ(q.day_count(3), 2);
}

TEST(ShiftPattern, WeekPatternGoldenCost) {
  const ShiftPattern p = ShiftPattern::from_text(golden::kWeekPatternText, 7, 4);
  EXPECT_EQ(nsp::pattern_cost(p, golden::week_pattern_costs()), Rat(golden::kWeekPatternCost));
  const ShiftPattern tiny = ShiftPattern::from_text("1001", 1, 4);
  EXPECT_EQ(nsp::pattern_cost(tiny, golden::week_pattern_costs()), Rat(4));
}

TEST(ShiftPattern, PatternCostChecksShape) {
  const ShiftPattern p = ShiftPattern::from_text("1001", 1, 4);
  EXPECT_THROW(nsp::pattern_cost(p, {Rat(1), Rat(2)}), nsp::ShapeError);
}

TEST(ShiftPattern, PatternCostIsLinearInSlots) {
  // Cost equals the sum over assigned slots of that slot's shift cost.
  nsp::rng::Engine eng(7);
  const std::vector<Rat> costs = {Rat(1), Rat(2), Rat(1), Rat(3)};
  for (int trial = 0; trial < 50; ++trial) {
    ShiftPattern p(7, 4);
    Rat expected(0);
    for (int z = 0; z < 28; ++z)
      if (nsp::rng::bernoulli(eng, 0.4)) {
        p.set_bit(z, true);
        expected += costs[static_cast<std::size_t>(z % 4)];
      }
    EXPECT_EQ(nsp::pattern_cost(p, costs), expected);
  }
}

TEST(Schedule, RowsAndColumns) {
  Schedule s(2, 1, 4);
  s.set(0, 0, true);
  s.set(0, 3, true);
  s.set(1, 1, true);
  s.set(1, 2, true);
  EXPECT_EQ(s.row(0).to_text(), "1001");
  EXPECT_EQ(s.row(1).to_text(), "0110");
  EXPECT_EQ(s.column_sum(0), 1);
  EXPECT_EQ(s.column_sum(1), 1);
  EXPECT_EQ(s.column_sum(3), 1);

  Schedule rebuilt = Schedule::from_rows({s.row(0), s.row(1)});
  EXPECT_EQ(rebuilt, s);
}

TEST(Schedule, SetRowReplacesPattern) {
  Schedule s(2, 1, 4);
  s.set_row(0, nsp::ShiftPattern::from_text("1111", 1, 4));
  EXPECT_EQ(s.column_sum(2), 1);
  EXPECT_THROW(s.set_row(0, nsp::ShiftPattern::from_text("11", 1, 2)), nsp::ShapeError);
}

TEST(Instance, ValidateCatchesBadGrids) {
  nsp::WcspInstance wcsp = golden::tiny_wcsp();
  NspInstance instance = wcsp.base;
  EXPECT_NO_THROW(instance.validate());

  NspInstance bad = instance;
  bad.min_coverage[0][0] = 3;  // above max_coverage 2
  EXPECT_THROW(bad.validate(), nsp::ConsistencyError);

  bad = instance;
  bad.max_total_shifts.pop_back();
  EXPECT_THROW(bad.validate(), nsp::ShapeError);

  bad = instance;
  bad.cost[0].pop_back();
  EXPECT_THROW(bad.validate(), nsp::ShapeError);
}

TEST(Instance, DefaultCostCapExceedsAnySolutionCost) {
  const nsp::WcspInstance wcsp = golden::tiny_wcsp();
  // 1 + sum of per-nurse maxima: 1 + 4 + 4 = 9.
  EXPECT_EQ(wcsp.cost_cap, Rat(9));
  // No complete assignment can reach the cap.
  for (int a : wcsp.variable_domains[0])
    for (int b : wcsp.variable_domains[1]) {
      Assignment assign = Assignment::empty(2);
      assign.value = {a, b};
      EXPECT_LT(nsp::solution_cost(assign, wcsp.base), wcsp.cost_cap);
    }
}

TEST(Instance, SolutionCostRejectsPartialAssignments) {
  const nsp::WcspInstance wcsp = golden::tiny_wcsp();
  Assignment partial = Assignment::empty(2);
  partial.value[0] = 0;
  EXPECT_THROW(nsp::solution_cost(partial, wcsp.base), nsp::IncompleteAssignmentError);
}

TEST(Instance, ToScheduleExpandsPatterns) {
  const nsp::WcspInstance wcsp = golden::tiny_wcsp();
  Assignment assign = Assignment::empty(2);
  assign.value = {0, 2};  // 1001, 0110
  const Schedule s = nsp::to_schedule(assign, wcsp);
  EXPECT_EQ(s.row(0).to_text(), "1001");
  EXPECT_EQ(s.row(1).to_text(), "0110");
  EXPECT_EQ(s.column_sum(0), 1);
}

TEST(Rng, BelowIsUnbiasedAcrossRange) {
  nsp::rng::Engine eng(1);
  std::vector<int> histogram(5, 0);
  for (int i = 0; i < 5000; ++i) ++histogram[static_cast<std::size_t>(nsp::rng::below(eng, 5))];
  for (int count : histogram) EXPECT_GT(count, 800);
}

TEST(Rng, CanonicalStaysInUnitInterval) {
  nsp::rng::Engine eng(2);
  for (int i = 0; i < 1000; ++i) {
    const double x = nsp::rng::canonical(eng);
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    const double y = nsp::rng::open_closed(eng);
    EXPECT_GT(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
}

TEST(Rng, WeightedPickFollowsWeights) {
  nsp::rng::Engine eng(3);
  std::vector<double> weights = {1.0, 0.0, 3.0};
  std::vector<int> histogram(3, 0);
  for (int i = 0; i < 4000; ++i)
    ++histogram[static_cast<std::size_t>(nsp::rng::weighted_pick(eng, weights))];
  EXPECT_EQ(histogram[1], 0);
  EXPECT_GT(histogram[2], histogram[0]);
  EXPECT_THROW(nsp::rng::weighted_pick(eng, {0.0, 0.0}), nsp::RangeError);
  EXPECT_THROW(nsp::rng::weighted_pick(eng, {-1.0, 2.0}), nsp::RangeError);
}

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(nsp::parse_rational("7"), Rat(7));
  EXPECT_EQ(nsp::parse_rational("-3"), Rat(-3));
  EXPECT_EQ(nsp::parse_rational("3/2"), Rat(3, 2));
  EXPECT_EQ(nsp::parse_rational("1.25"), Rat(5, 4));
  EXPECT_EQ(nsp::parse_rational("-0.5"), Rat(-1, 2));
  EXPECT_EQ(nsp::to_string(Rat(7)), "7");
  EXPECT_EQ(nsp::to_string(Rat(3, 5)), "3/5");
  EXPECT_THROW(nsp::parse_rational("abc"), nsp::ParseError);
  EXPECT_THROW(nsp::parse_rational("1/0"), nsp::ParseError);
}

}  // namespace
