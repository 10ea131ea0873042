#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::io {

// ---------------------------------------------------------------------------
// Market-basket style data: one labeled row per slot, items are nurse ids.
// ---------------------------------------------------------------------------

struct Transaction {
  std::string label;
  std::vector<std::string> items;  // unique, in universe order
};

struct TransactionDb {
  std::vector<std::string> item_universe;  // ordered; defines item ranks
  std::vector<Transaction> transactions;

  // Index in the universe, or -1.
  int index_of(std::string_view item) const;
};

// Quantities per (slot row, item): how many units each item contributes.
struct QuantityDb {
  std::vector<std::string> item_universe;
  std::vector<std::string> slot_labels;
  std::vector<std::vector<long long>> quantity;  // rows x items, >= 0
};

// External per-item worth, parallel to its universe.
struct UtilityTable {
  std::vector<std::string> item_universe;
  std::vector<Rat> utility;  // >= 0
};

// Labeled categorical table (classifier training/test data): first column
// holds row labels, remaining columns are named categorical features.
struct LabeledTable {
  std::vector<std::string> column_names;           // feature columns, in file order
  std::vector<std::string> row_labels;
  std::vector<std::vector<std::string>> cells;     // rows x columns
};

// ---------------------------------------------------------------------------
// Instance file: UTF-8, '#' comments, [meta]/[coverage]/[limits]/[costs]
// sections plus an optional [domain] section of pattern strings.
//   [meta]     n=, days=, shifts=, y=
//   [coverage] s rows of k comma-separated q/p pairs
//   [limits]   nurse_<i>,h,b[,min_shifts]
//   [costs]    n rows of m comma-separated rationals
//   [domain]   m pattern strings, one per line
// Parse errors name the offending 1-based line.
// ---------------------------------------------------------------------------

NspInstance parse_instance(std::string_view text);
std::string serialize_instance(const NspInstance& instance,
                               const std::vector<ShiftPattern>* domain = nullptr);

// Requires a [domain] section sized to the cost columns; applies the
// default cost cap and full per-nurse domains.
WcspInstance parse_wcsp(std::string_view text);
std::string serialize_wcsp(const WcspInstance& wcsp);

// ---------------------------------------------------------------------------
// CSV forms. All are UTF-8 with '#' comment lines.
// ---------------------------------------------------------------------------

// `label,item1;item2;...` — one transaction per line. The universe is the
// ordered set of items by first appearance unless a `#universe:` comment
// pins it explicitly.
TransactionDb parse_transactions(std::string_view csv);
std::string serialize_transactions(const TransactionDb& db);

// Header `slot,<item>,<item>,...`; one special row labeled `utility` holds
// per-item worth (blank cell = absent); remaining rows are quantities.
// An item with positive quantity somewhere but no utility is a
// consistency error.
std::pair<QuantityDb, UtilityTable> parse_quantity_table(std::string_view csv);
std::string serialize_quantity_table(const QuantityDb& db, const UtilityTable& util);

// Header `nurse,Day1Shift1,...`; cells 0/1. Round-trips exactly.
Schedule parse_schedule_csv(std::string_view csv);
std::string schedule_to_csv(const Schedule& schedule);

// Header `label,<col>,...`; all cells categorical strings.
LabeledTable parse_labeled_table(std::string_view csv);
std::string serialize_labeled_table(const LabeledTable& table);

// Collapse a roster into transactions: one per day (items = nurses working
// that day) or one per slot (items = nurses on that exact slot).
enum class Granularity { day, day_shift };
TransactionDb schedule_to_transactions(const Schedule& schedule, Granularity granularity);

// Filesystem helpers for the command-line layer.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace nsp::io
