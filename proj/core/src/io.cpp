#include "nspforge/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nspforge/errors.hpp"

namespace nsp::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

struct Line {
  int number;  // 1-based position in the original text
  std::string text;
};

// Drops blank lines and full-line '#' comments, keeping line numbers for
// error messages. `#universe:` pins survive via the out parameter.
std::vector<Line> content_lines(std::string_view text, std::vector<std::string>* universe_pin = nullptr) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    std::string_view raw = pos == std::string_view::npos ? text.substr(start)
                                                         : text.substr(start, pos - start);
    ++number;
    std::string t = trim(raw);
    if (!t.empty()) {
      if (t.front() == '#') {
        // The pin accepts either list separator; items may contain neither.
        if (universe_pin && t.rfind("#universe:", 0) == 0) {
          universe_pin->clear();
          for (const auto& chunk : split(t.substr(10), ','))
            for (auto& item : split(chunk, ';'))
              if (!item.empty()) universe_pin->push_back(std::move(item));
        }
      } else {
        lines.push_back({number, std::move(t)});
      }
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return lines;
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'", line);
  }
}

Rat parse_rat_at(const std::string& s, int line) {
  try {
    return parse_rational(s);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TransactionDb
// ---------------------------------------------------------------------------

int TransactionDb::index_of(std::string_view item) const {
  for (std::size_t i = 0; i < item_universe.size(); ++i)
    if (item_universe[i] == item) return static_cast<int>(i);
  return -1;
}

TransactionDb parse_transactions(std::string_view csv) {
  std::vector<std::string> pin;
  auto lines = content_lines(csv, &pin);
  TransactionDb db;
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> raw_items;
  for (const auto& line : lines) {
    auto comma = line.text.find(',');
    if (comma == std::string::npos)
      throw ParseError("expected 'label,item;item;...'", line.number);
    Transaction t;
    t.label = trim(std::string_view(line.text).substr(0, comma));
    if (t.label.empty()) throw ParseError("empty transaction label", line.number);
    std::string items = trim(std::string_view(line.text).substr(comma + 1));
    std::vector<std::string> parsed;
    if (!items.empty()) {
      for (auto& item : split(items, ';')) {
        if (item.empty()) throw ParseError("empty item id", line.number);
        parsed.push_back(item);
      }
    }
    raw_items.push_back(parsed);
    db.transactions.push_back(std::move(t));
    for (const auto& item : parsed) seen.insert(item);
  }
  if (!pin.empty()) {
    db.item_universe = pin;
    for (const auto& item : seen)
      if (std::find(pin.begin(), pin.end(), item) == pin.end())
        throw ConsistencyError("item '" + item + "' missing from the pinned universe");
  } else {
    db.item_universe.assign(seen.begin(), seen.end());  // lexicographic
  }
  // Canonicalize each transaction: unique items in universe order.
  for (std::size_t r = 0; r < raw_items.size(); ++r) {
    std::set<int> ranks;
    for (const auto& item : raw_items[r]) ranks.insert(db.index_of(item));
    auto& items = db.transactions[r].items;
    items.clear();
    for (int rank : ranks) items.push_back(db.item_universe[static_cast<std::size_t>(rank)]);
  }
  return db;
}

std::string serialize_transactions(const TransactionDb& db) {
  std::ostringstream out;
  out << "#universe:";
  for (std::size_t i = 0; i < db.item_universe.size(); ++i)
    out << (i ? "," : " ") << db.item_universe[i];
  out << "\n";
  for (const auto& t : db.transactions) {
    out << t.label << ",";
    for (std::size_t i = 0; i < t.items.size(); ++i) out << (i ? ";" : "") << t.items[i];
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Quantity / utility CSV
// ---------------------------------------------------------------------------

std::pair<QuantityDb, UtilityTable> parse_quantity_table(std::string_view csv) {
  auto lines = content_lines(csv);
  if (lines.empty()) throw ParseError("empty quantity table");
  auto header = split(lines.front().text, ',');
  if (header.size() < 2) throw ParseError("quantity header needs item columns", lines.front().number);
  QuantityDb db;
  db.item_universe.assign(header.begin() + 1, header.end());
  UtilityTable util;
  util.item_universe = db.item_universe;
  util.utility.assign(db.item_universe.size(), Rat(0));
  std::vector<bool> has_utility(db.item_universe.size(), false);
  bool saw_utility_row = false;

  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split(lines[r].text, ',');
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells", lines[r].number);
    if (cells.front() == "utility") {
      if (saw_utility_row) throw ParseError("duplicate utility row", lines[r].number);
      saw_utility_row = true;
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) continue;  // absent utility
        Rat u = parse_rat_at(cells[c], lines[r].number);
        if (u < Rat(0)) throw RangeError("utilities must be non-negative");
        util.utility[c - 1] = u;
        has_utility[c - 1] = true;
      }
      continue;
    }
    db.slot_labels.push_back(cells.front());
    std::vector<long long> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      long long q = parse_int(cells[c], lines[r].number);
      if (q < 0) throw RangeError("quantities must be non-negative");
      row.push_back(q);
    }
    db.quantity.push_back(std::move(row));
  }
  if (!saw_utility_row) throw ParseError("missing utility row");
  for (std::size_t c = 0; c < db.item_universe.size(); ++c) {
    if (has_utility[c]) continue;
    for (const auto& row : db.quantity)
      if (row[c] > 0)
        throw ConsistencyError("item '" + db.item_universe[c] +
                               "' has quantities but no utility");
  }
  return {std::move(db), std::move(util)};
}

std::string serialize_quantity_table(const QuantityDb& db, const UtilityTable& util) {
  if (util.item_universe != db.item_universe)
    throw ConsistencyError("utility table universe differs from quantity table");
  std::ostringstream out;
  out << "slot";
  for (const auto& item : db.item_universe) out << "," << item;
  out << "\nutility";
  for (const auto& u : util.utility) out << "," << to_string(u);
  out << "\n";
  for (std::size_t r = 0; r < db.quantity.size(); ++r) {
    out << db.slot_labels[r];
    for (long long q : db.quantity[r]) out << "," << q;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Schedule CSV
// ---------------------------------------------------------------------------

std::string schedule_to_csv(const Schedule& schedule) {
  std::ostringstream out;
  out << "nurse";
  for (int d = 1; d <= schedule.days(); ++d)
    for (int s = 1; s <= schedule.shifts_per_day(); ++s) out << ",Day" << d << "Shift" << s;
  out << "\n";
  for (int i = 0; i < schedule.nurses(); ++i) {
    out << "Nurse_" << (i + 1);
    for (int z = 0; z < schedule.columns(); ++z) out << "," << (schedule.at(i, z) ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

Schedule parse_schedule_csv(std::string_view csv) {
  auto lines = content_lines(csv);
  if (lines.size() < 2) throw ParseError("schedule needs a header and at least one row");
  auto header = split(lines.front().text, ',');
  int days = 0, shifts = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    int d = 0, s = 0;
    if (std::sscanf(header[c].c_str(), "Day%dShift%d", &d, &s) != 2 || d <= 0 || s <= 0)
      throw ParseError("bad slot label '" + header[c] + "'", lines.front().number);
    days = std::max(days, d);
    shifts = std::max(shifts, s);
  }
  if (static_cast<std::size_t>(days) * shifts + 1 != header.size())
    throw ParseError("slot labels do not tile the day/shift grid", lines.front().number);
  // Validate that labels run day-major in order.
  std::size_t c = 1;
  for (int d = 1; d <= days; ++d)
    for (int s = 1; s <= shifts; ++s, ++c) {
      std::string expect = "Day" + std::to_string(d) + "Shift" + std::to_string(s);
      if (header[c] != expect)
        throw ParseError("expected column '" + expect + "', got '" + header[c] + "'",
                         lines.front().number);
    }
  Schedule schedule(static_cast<int>(lines.size()) - 1, days, shifts);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split(lines[r].text, ',');
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells", lines[r].number);
    for (std::size_t z = 1; z < cells.size(); ++z) {
      if (cells[z] != "0" && cells[z] != "1")
        throw ParseError("schedule cells must be 0 or 1", lines[r].number);
      schedule.set(static_cast<int>(r) - 1, static_cast<int>(z) - 1, cells[z] == "1");
    }
  }
  return schedule;
}

// ---------------------------------------------------------------------------
// Labeled categorical table
// ---------------------------------------------------------------------------

LabeledTable parse_labeled_table(std::string_view csv) {
  auto lines = content_lines(csv);
  if (lines.size() < 2) throw ParseError("labeled table needs a header and at least one row");
  auto header = split(lines.front().text, ',');
  if (header.size() < 2) throw ParseError("labeled table needs feature columns", lines.front().number);
  LabeledTable table;
  table.column_names.assign(header.begin() + 1, header.end());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split(lines[r].text, ',');
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells", lines[r].number);
    table.row_labels.push_back(cells.front());
    table.cells.emplace_back(cells.begin() + 1, cells.end());
  }
  return table;
}

std::string serialize_labeled_table(const LabeledTable& table) {
  std::ostringstream out;
  out << "label";
  for (const auto& name : table.column_names) out << "," << name;
  out << "\n";
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    out << table.row_labels[r];
    for (const auto& cell : table.cells[r]) out << "," << cell;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Instance format
// ---------------------------------------------------------------------------

namespace {

enum class Section { none, meta, coverage, limits, costs, domain };

Section section_of(const std::string& line) {
  if (line == "[meta]") return Section::meta;
  if (line == "[coverage]") return Section::coverage;
  if (line == "[limits]") return Section::limits;
  if (line == "[costs]") return Section::costs;
  if (line == "[domain]") return Section::domain;
  return Section::none;
}

struct ParsedInstance {
  NspInstance instance;
  std::vector<ShiftPattern> domain;
  bool has_domain = false;
};

ParsedInstance parse_instance_text(std::string_view text) {
  auto lines = content_lines(text);
  std::map<std::string, std::pair<std::string, int>> meta;
  std::vector<std::pair<std::vector<std::string>, int>> coverage_rows, limit_rows, cost_rows;
  std::vector<std::pair<std::string, int>> domain_rows;
  Section section = Section::none;
  for (const auto& line : lines) {
    if (line.text.front() == '[') {
      Section s = section_of(line.text);
      if (s == Section::none) throw ParseError("unknown section '" + line.text + "'", line.number);
      section = s;
      continue;
    }
    switch (section) {
      case Section::meta: {
        auto eq = line.text.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line.number);
        meta[trim(std::string_view(line.text).substr(0, eq))] = {
            trim(std::string_view(line.text).substr(eq + 1)), line.number};
        break;
      }
      case Section::coverage:
        coverage_rows.push_back({split(line.text, ','), line.number});
        break;
      case Section::limits:
        limit_rows.push_back({split(line.text, ','), line.number});
        break;
      case Section::costs:
        cost_rows.push_back({split(line.text, ','), line.number});
        break;
      case Section::domain:
        domain_rows.push_back({line.text, line.number});
        break;
      case Section::none:
        throw ParseError("content before any section header", line.number);
    }
  }

  auto require_meta = [&](const char* key) -> std::pair<std::string, int> {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(std::string("missing meta key '") + key + "'");
    return it->second;
  };
  ParsedInstance out;
  NspInstance& ins = out.instance;
  {
    auto [v, ln] = require_meta("n");
    ins.nurses = parse_int(v, ln);
  }
  {
    auto [v, ln] = require_meta("days");
    ins.days = parse_int(v, ln);
  }
  {
    auto [v, ln] = require_meta("shifts");
    ins.shifts_per_day = parse_int(v, ln);
  }
  {
    auto [v, ln] = require_meta("y");
    ins.max_night_morning = parse_int(v, ln);
  }
  if (auto it = meta.find("day_cap"); it != meta.end())
    ins.max_shifts_per_day = parse_int(it->second.first, it->second.second);

  if (static_cast<int>(coverage_rows.size()) != ins.shifts_per_day)
    throw ParseError("coverage must have one row per shift (" +
                     std::to_string(ins.shifts_per_day) + ")");
  ins.min_coverage.assign(static_cast<std::size_t>(ins.shifts_per_day), {});
  ins.max_coverage.assign(static_cast<std::size_t>(ins.shifts_per_day), {});
  for (int s = 0; s < ins.shifts_per_day; ++s) {
    auto& [cells, ln] = coverage_rows[static_cast<std::size_t>(s)];
    if (static_cast<int>(cells.size()) != ins.days)
      throw ParseError("coverage row needs one q/p pair per day", ln);
    for (const auto& cell : cells) {
      auto slash = cell.find('/');
      if (slash == std::string::npos) throw ParseError("coverage cell must be q/p", ln);
      ins.min_coverage[static_cast<std::size_t>(s)].push_back(parse_int(cell.substr(0, slash), ln));
      ins.max_coverage[static_cast<std::size_t>(s)].push_back(parse_int(cell.substr(slash + 1), ln));
    }
  }

  if (static_cast<int>(limit_rows.size()) != ins.nurses)
    throw ParseError("limits must have one line per nurse (" + std::to_string(ins.nurses) + ")");
  for (auto& [cells, ln] : limit_rows) {
    if (cells.size() != 3 && cells.size() != 4)
      throw ParseError("expected 'nurse,<max shifts>,<max nights>[,<min shifts>]'", ln);
    if (cells.front().empty()) throw ParseError("empty nurse label", ln);
    ins.max_total_shifts.push_back(parse_int(cells[1], ln));
    ins.max_nights.push_back(parse_int(cells[2], ln));
    ins.min_total_shifts.push_back(cells.size() == 4 ? parse_int(cells[3], ln) : 0);
  }

  if (cost_rows.empty()) throw ParseError("missing [costs] section");
  if (static_cast<int>(cost_rows.size()) != ins.nurses)
    throw ParseError("costs must have one row per nurse");
  for (auto& [cells, ln] : cost_rows) {
    std::vector<Rat> row;
    for (const auto& cell : cells) row.push_back(parse_rat_at(cell, ln));
    if (!ins.cost.empty() && row.size() != ins.cost.front().size())
      throw ParseError("cost rows must have equal length", ln);
    ins.cost.push_back(std::move(row));
  }

  out.has_domain = !domain_rows.empty();
  for (auto& [text_row, ln] : domain_rows) {
    try {
      out.domain.push_back(ShiftPattern::from_text(text_row, ins.days, ins.shifts_per_day));
    } catch (const Error& e) {
      throw ParseError(e.what(), ln);
    }
  }
  ins.validate();
  return out;
}

}  // namespace

NspInstance parse_instance(std::string_view text) { return parse_instance_text(text).instance; }

WcspInstance parse_wcsp(std::string_view text) {
  ParsedInstance parsed = parse_instance_text(text);
  if (!parsed.has_domain) throw ParseError("missing [domain] section");
  return make_wcsp(std::move(parsed.instance), std::move(parsed.domain));
}

std::string serialize_instance(const NspInstance& instance,
                               const std::vector<ShiftPattern>* domain) {
  std::ostringstream out;
  out << "[meta]\n";
  out << "n=" << instance.nurses << "\n";
  out << "days=" << instance.days << "\n";
  out << "shifts=" << instance.shifts_per_day << "\n";
  out << "y=" << instance.max_night_morning << "\n";
  if (instance.max_shifts_per_day) out << "day_cap=" << *instance.max_shifts_per_day << "\n";
  out << "[coverage]\n";
  for (int s = 0; s < instance.shifts_per_day; ++s) {
    for (int k = 0; k < instance.days; ++k)
      out << (k ? "," : "") << instance.min_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)]
          << "/" << instance.max_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
    out << "\n";
  }
  out << "[limits]\n";
  for (int i = 0; i < instance.nurses; ++i) {
    out << "nurse_" << (i + 1) << "," << instance.max_total_shifts[static_cast<std::size_t>(i)]
        << "," << instance.max_nights[static_cast<std::size_t>(i)];
    if (instance.min_total_shifts[static_cast<std::size_t>(i)] != 0)
      out << "," << instance.min_total_shifts[static_cast<std::size_t>(i)];
    out << "\n";
  }
  out << "[costs]\n";
  for (const auto& row : instance.cost) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << to_string(row[j]);
    out << "\n";
  }
  if (domain) {
    out << "[domain]\n";
    for (const auto& p : *domain) out << p.to_text() << "\n";
  }
  return out.str();
}

std::string serialize_wcsp(const WcspInstance& wcsp) {
  return serialize_instance(wcsp.base, &wcsp.domain);
}

// ---------------------------------------------------------------------------
// Schedule -> transactions
// ---------------------------------------------------------------------------

TransactionDb schedule_to_transactions(const Schedule& schedule, Granularity granularity) {
  TransactionDb db;
  for (int i = 0; i < schedule.nurses(); ++i)
    db.item_universe.push_back("Nurse_" + std::to_string(i + 1));
  if (granularity == Granularity::day) {
    for (int d = 0; d < schedule.days(); ++d) {
      Transaction t;
      t.label = "Day_" + std::to_string(d + 1);
      for (int i = 0; i < schedule.nurses(); ++i) {
        bool works = false;
        for (int s = 0; s < schedule.shifts_per_day(); ++s)
          works = works || schedule.at(i, d * schedule.shifts_per_day() + s);
        if (works) t.items.push_back(db.item_universe[static_cast<std::size_t>(i)]);
      }
      db.transactions.push_back(std::move(t));
    }
  } else {
    for (int d = 0; d < schedule.days(); ++d)
      for (int s = 0; s < schedule.shifts_per_day(); ++s) {
        Transaction t;
        t.label = "Day_" + std::to_string(d + 1) + "Shift_" + std::to_string(s + 1);
        for (int i = 0; i < schedule.nurses(); ++i)
          if (schedule.at(i, d * schedule.shifts_per_day() + s))
            t.items.push_back(db.item_universe[static_cast<std::size_t>(i)]);
        db.transactions.push_back(std::move(t));
      }
  }
  return db;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ParseError("failed writing '" + path + "'");
}

}  // namespace nsp::io
