#include "nspforge/mining.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"

namespace nsp::mining {

namespace {

using IndexSet = std::vector<int>;  // sorted universe ranks

std::vector<IndexSet> rank_transactions(const io::TransactionDb& db) {
  std::vector<IndexSet> out;
  out.reserve(db.transactions.size());
  for (const auto& t : db.transactions) {
    IndexSet ranks;
    for (const auto& item : t.items) {
      int r = db.index_of(item);
      if (r < 0) throw ConsistencyError("transaction item '" + item + "' not in the universe");
      ranks.push_back(r);
    }
    std::sort(ranks.begin(), ranks.end());
    out.push_back(std::move(ranks));
  }
  return out;
}

bool contains(const IndexSet& transaction, const IndexSet& itemset) {
  return std::includes(transaction.begin(), transaction.end(), itemset.begin(), itemset.end());
}

std::vector<std::string> to_items(const IndexSet& set, const std::vector<std::string>& universe) {
  std::vector<std::string> out;
  out.reserve(set.size());
  for (int r : set) out.push_back(universe[static_cast<std::size_t>(r)]);
  return out;
}

// Candidates of size k+1 from sorted frequent k-sets: join pairs sharing
// their first k-1 members, then drop any candidate with an infrequent
// k-subset (downward closure).
std::vector<IndexSet> next_candidates(const std::vector<IndexSet>& level) {
  std::set<IndexSet> frequent(level.begin(), level.end());
  std::vector<IndexSet> candidates;
  for (std::size_t a = 0; a < level.size(); ++a)
    for (std::size_t b = a + 1; b < level.size(); ++b) {
      const IndexSet& x = level[a];
      const IndexSet& y = level[b];
      if (!std::equal(x.begin(), x.end() - 1, y.begin(), y.end() - 1)) continue;
      IndexSet joined = x;
      joined.push_back(y.back());
      if (joined[joined.size() - 2] > joined.back())
        std::swap(joined[joined.size() - 2], joined[joined.size() - 1]);
      bool closed = true;
      IndexSet sub(joined.begin(), joined.end() - 1);
      for (std::size_t drop = 0; drop + 1 < joined.size() && closed; ++drop) {
        sub = joined;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        closed = frequent.count(sub) > 0;
      }
      if (closed) candidates.push_back(std::move(joined));
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return candidates;
}

}  // namespace

long long ratio_to_count(const Rat& min_support_ratio, int transaction_count) {
  if (min_support_ratio < Rat(0) || min_support_ratio > Rat(1))
    throw RangeError("support ratio must lie in [0, 1]");
  if (transaction_count < 0) throw RangeError("negative transaction count");
  // ceil(ratio * count), exactly.
  Rat scaled = min_support_ratio * Rat(transaction_count);
  long long num = scaled.numerator(), den = scaled.denominator();
  long long count = num / den + (num % den != 0 ? 1 : 0);
  return std::max<long long>(count, 1);
}

std::vector<FrequentItemset> apriori(const io::TransactionDb& db, long long min_support_count) {
  if (min_support_count < 1) throw RangeError("minimum support count must be at least 1");
  auto transactions = rank_transactions(db);

  auto support_of = [&](const IndexSet& itemset) {
    long long n = 0;
    for (const auto& t : transactions) n += contains(t, itemset);
    return n;
  };

  std::vector<FrequentItemset> result;
  std::vector<IndexSet> level;
  for (int r = 0; r < static_cast<int>(db.item_universe.size()); ++r) {
    IndexSet single{r};
    if (support_of(single) >= min_support_count) level.push_back(std::move(single));
  }
  while (!level.empty()) {
    for (const auto& itemset : level)
      result.push_back({to_items(itemset, db.item_universe), support_of(itemset)});
    std::vector<IndexSet> next;
    for (auto& candidate : next_candidates(level))
      if (support_of(candidate) >= min_support_count) next.push_back(std::move(candidate));
    level = std::move(next);
  }
  return result;  // already sorted by (size, universe ranks)
}

std::vector<AssociationRule> generate_rules(const std::vector<FrequentItemset>& frequent,
                                            const Rat& min_confidence,
                                            bool single_consequent, int min_antecedent) {
  if (min_confidence < Rat(0) || min_confidence > Rat(1))
    throw RangeError("confidence threshold must lie in [0, 1]");
  if (min_antecedent < 1) throw RangeError("antecedent size floor must be at least 1");
  std::map<std::vector<std::string>, long long> support;
  for (const auto& f : frequent) {
    auto sorted = f.items;
    std::sort(sorted.begin(), sorted.end());
    support[std::move(sorted)] = f.support;
  }

  std::vector<AssociationRule> rules;
  for (const auto& f : frequent) {
    const std::size_t n = f.items.size();
    if (n < 2) continue;
    // Enumerate antecedents as bitmasks over the itemset's members.
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      AssociationRule rule;
      for (std::size_t i = 0; i < n; ++i)
        ((mask >> i) & 1u ? rule.antecedent : rule.consequent).push_back(f.items[i]);
      if (single_consequent && rule.consequent.size() != 1) continue;
      if (static_cast<int>(rule.antecedent.size()) < min_antecedent) continue;
      auto key = rule.antecedent;
      std::sort(key.begin(), key.end());
      auto it = support.find(key);
      if (it == support.end())
        throw ConsistencyError("antecedent of a candidate rule is missing from the frequent list");
      rule.support = f.support;
      rule.confidence = Rat(f.support, it->second);
      if (rule.confidence >= min_confidence) rules.push_back(std::move(rule));
    }
  }
  std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support != b.support) return a.support > b.support;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return rules;
}

// ---------------------------------------------------------------------------
// High-utility itemsets
// ---------------------------------------------------------------------------

namespace {

struct QuantityView {
  const io::QuantityDb& db;
  const io::UtilityTable& util;
  std::vector<Rat> row_utility;  // transaction utility per row

  explicit QuantityView(const io::QuantityDb& d, const io::UtilityTable& u) : db(d), util(u) {
    if (util.item_universe != db.item_universe)
      throw ConsistencyError("utility table universe differs from quantity table");
    row_utility.reserve(db.quantity.size());
    for (std::size_t r = 0; r < db.quantity.size(); ++r)
      row_utility.push_back(transaction_utility(db, util, static_cast<int>(r)));
  }

  bool covers(int row, const IndexSet& itemset) const {
    for (int i : itemset)
      if (db.quantity[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] <= 0) return false;
    return true;
  }

  Rat twu_of(const IndexSet& itemset) const {
    Rat total(0);
    for (std::size_t r = 0; r < db.quantity.size(); ++r)
      if (covers(static_cast<int>(r), itemset)) total += row_utility[r];
    return total;
  }

  // Exact utility plus covering-row count.
  std::pair<Rat, int> utility_of(const IndexSet& itemset) const {
    Rat total(0);
    int occurrences = 0;
    for (std::size_t r = 0; r < db.quantity.size(); ++r) {
      if (!covers(static_cast<int>(r), itemset)) continue;
      ++occurrences;
      for (int i : itemset)
        total += Rat(db.quantity[r][static_cast<std::size_t>(i)]) *
                 util.utility[static_cast<std::size_t>(i)];
    }
    return {total, occurrences};
  }
};

}  // namespace

Rat transaction_utility(const io::QuantityDb& db, const io::UtilityTable& util, int row) {
  if (row < 0 || row >= static_cast<int>(db.quantity.size()))
    throw RangeError("transaction row out of range");
  if (util.item_universe != db.item_universe)
    throw ConsistencyError("utility table universe differs from quantity table");
  Rat total(0);
  for (std::size_t i = 0; i < db.item_universe.size(); ++i)
    total += Rat(db.quantity[static_cast<std::size_t>(row)][i]) * util.utility[i];
  return total;
}

Rat twu(const io::QuantityDb& db, const io::UtilityTable& util,
        const std::vector<int>& item_indices) {
  QuantityView view(db, util);
  IndexSet itemset = item_indices;
  std::sort(itemset.begin(), itemset.end());
  for (int i : itemset)
    if (i < 0 || i >= static_cast<int>(db.item_universe.size()))
      throw RangeError("item index out of range");
  return view.twu_of(itemset);
}

TwoPhaseResult two_phase(const io::QuantityDb& db, const io::UtilityTable& util,
                         const Rat& min_utility) {
  QuantityView view(db, util);
  TwoPhaseResult result;

  // Phase I: level-wise on the transaction-weighted bound. The bound is
  // anti-monotone, so the apriori join/prune scheme applies unchanged.
  std::vector<IndexSet> level;
  std::vector<IndexSet> phase1_sets;
  for (int r = 0; r < static_cast<int>(db.item_universe.size()); ++r) {
    IndexSet single{r};
    if (view.twu_of(single) >= min_utility) level.push_back(std::move(single));
  }
  while (!level.empty()) {
    for (const auto& itemset : level) phase1_sets.push_back(itemset);
    std::vector<IndexSet> next;
    for (auto& candidate : next_candidates(level))
      if (view.twu_of(candidate) >= min_utility) next.push_back(std::move(candidate));
    level = std::move(next);
  }

  // Phase II: one exact rescan per surviving candidate.
  for (const auto& itemset : phase1_sets) {
    UtilityItemset entry;
    entry.items = to_items(itemset, db.item_universe);
    entry.twu = view.twu_of(itemset);
    auto [utility, occurrences] = view.utility_of(itemset);
    entry.utility = utility;
    entry.occurrences = occurrences;
    result.phase1.push_back(entry);
    if (utility >= min_utility) result.phase2.push_back(std::move(entry));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Roster simulation
// ---------------------------------------------------------------------------

namespace {

struct SlotDriver {
  const NspInstance& instance;
  std::vector<std::string> warnings;
  std::vector<SimulationEvent> events;
  Schedule schedule;

  explicit SlotDriver(const NspInstance& ins)
      : instance(ins), schedule(ins.nurses, ins.days, ins.shifts_per_day) {}

  // One slot walk shared by both drivers: `step` tries to extend `current`
  // and returns false when it cannot make progress this round.
  template <typename Step>
  void run(int max_iterations, Step step) {
    for (int d = 0; d < instance.days; ++d)
      for (int s = 0; s < instance.shifts_per_day; ++s) {
        const int q = instance.min_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        const int p = instance.max_coverage[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        std::set<int> current;
        int spent = 0;
        while (static_cast<int>(current.size()) < q && spent < max_iterations) {
          ++spent;
          if (!step(d, s, p, current)) break;
        }
        for (int nurse : current)
          schedule.set(nurse, d * instance.shifts_per_day + s, true);
        if (static_cast<int>(current.size()) < q)
          warnings.push_back("underfilled: day " + std::to_string(d + 1) + " shift " +
                             std::to_string(s + 1) + " reached " +
                             std::to_string(current.size()) + " of " + std::to_string(q));
      }
  }
};

// Universe ranks restricted to nurses that exist in the instance; items
// beyond the roster are reported once and dropped.
std::vector<int> mapped_ranks(const std::vector<std::string>& items,
                              const std::vector<std::string>& universe, int nurses,
                              std::vector<std::string>& warnings, std::set<std::string>& reported) {
  std::vector<int> ranks;
  for (const auto& item : items) {
    auto it = std::find(universe.begin(), universe.end(), item);
    int rank = it == universe.end() ? -1 : static_cast<int>(it - universe.begin());
    if (rank < 0 || rank >= nurses) {
      if (reported.insert(item).second)
        warnings.push_back("unmapped-item: '" + item + "' has no nurse row");
      continue;
    }
    ranks.push_back(rank);
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  return ranks;
}

}  // namespace

SimulationResult simulate_schedule(const std::vector<AssociationRule>& rules,
                                   const std::vector<std::string>& item_universe,
                                   const NspInstance& instance, std::uint64_t seed,
                                   int max_iterations) {
  instance.validate();
  if (max_iterations < 1) throw RangeError("max_iterations must be positive");
  SlotDriver driver(instance);
  if (rules.empty()) {
    driver.warnings.push_back("empty-model: no rules to fire; schedule left empty");
    return {std::move(driver.schedule), std::move(driver.warnings), {}};
  }

  // Deterministic firing order: strongest rules first.
  std::vector<AssociationRule> sorted = rules;
  std::sort(sorted.begin(), sorted.end(), [](const AssociationRule& a, const AssociationRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support != b.support) return a.support > b.support;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });

  std::set<std::string> reported;
  struct MappedRule {
    std::vector<int> antecedent, consequent, all;
    double weight;
  };
  std::vector<MappedRule> mapped;
  std::vector<double> weights;
  for (const auto& rule : sorted) {
    MappedRule m;
    m.antecedent = mapped_ranks(rule.antecedent, item_universe, instance.nurses, driver.warnings, reported);
    m.consequent = mapped_ranks(rule.consequent, item_universe, instance.nurses, driver.warnings, reported);
    if (m.antecedent.size() != rule.antecedent.size() || m.consequent.empty()) continue;
    m.all = m.antecedent;
    m.all.insert(m.all.end(), m.consequent.begin(), m.consequent.end());
    std::sort(m.all.begin(), m.all.end());
    m.weight = to_double(rule.confidence);
    mapped.push_back(std::move(m));
  }
  if (mapped.empty()) {
    driver.warnings.push_back("empty-model: no mappable rules; schedule left empty");
    return {std::move(driver.schedule), std::move(driver.warnings), {}};
  }
  for (const auto& m : mapped) weights.push_back(m.weight);

  rng::Engine eng(seed);
  driver.run(max_iterations, [&](int day, int shift, int cap, std::set<int>& current) {
    // Fire the strongest applicable rule.
    for (std::size_t r = 0; r < mapped.size(); ++r) {
      const auto& rule = mapped[r];
      bool applicable = std::all_of(rule.antecedent.begin(), rule.antecedent.end(),
                                    [&](int x) { return current.count(x) > 0; });
      if (!applicable) continue;
      std::vector<int> fresh;
      for (int x : rule.consequent)
        if (!current.count(x)) fresh.push_back(x);
      if (fresh.empty()) continue;
      if (static_cast<int>(current.size() + fresh.size()) > cap) continue;
      SimulationEvent ev{day, shift, true, static_cast<int>(r), {}};
      for (int x : fresh) {
        current.insert(x);
        ev.added.push_back(item_universe[static_cast<std::size_t>(x)]);
      }
      driver.events.push_back(std::move(ev));
      return true;
    }
    // Nothing fires: seed the slot with a confidence-weighted draw.
    if (static_cast<int>(current.size()) >= cap) return false;
    std::size_t pick = rng::weighted_pick(eng, weights);
    SimulationEvent ev{day, shift, false, static_cast<int>(pick), {}};
    for (int x : mapped[pick].all) {
      if (static_cast<int>(current.size()) >= cap) break;
      if (current.insert(x).second)
        ev.added.push_back(item_universe[static_cast<std::size_t>(x)]);
    }
    if (ev.added.empty()) return true;  // unlucky draw; later draws may differ
    driver.events.push_back(std::move(ev));
    return true;
  });
  return {std::move(driver.schedule), std::move(driver.warnings), std::move(driver.events)};
}

SimulationResult simulate_schedule(const std::vector<UtilityItemset>& itemsets,
                                   const std::vector<std::string>& item_universe,
                                   const NspInstance& instance, std::uint64_t seed,
                                   int max_iterations) {
  instance.validate();
  if (max_iterations < 1) throw RangeError("max_iterations must be positive");
  SlotDriver driver(instance);
  if (itemsets.empty()) {
    driver.warnings.push_back("empty-model: no itemsets to draw; schedule left empty");
    return {std::move(driver.schedule), std::move(driver.warnings), {}};
  }

  std::vector<UtilityItemset> sorted = itemsets;
  std::sort(sorted.begin(), sorted.end(), [](const UtilityItemset& a, const UtilityItemset& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.items < b.items;
  });

  std::set<std::string> reported;
  std::vector<std::vector<int>> members;
  std::vector<double> weights;
  for (const auto& entry : sorted) {
    auto ranks = mapped_ranks(entry.items, item_universe, instance.nurses, driver.warnings, reported);
    if (ranks.empty()) continue;
    members.push_back(std::move(ranks));
    weights.push_back(std::max(to_double(entry.utility), 0.0));
  }
  if (members.empty() || std::all_of(weights.begin(), weights.end(), [](double w) { return w <= 0.0; })) {
    driver.warnings.push_back("empty-model: no mappable weighted itemsets; schedule left empty");
    return {std::move(driver.schedule), std::move(driver.warnings), {}};
  }

  rng::Engine eng(seed);
  driver.run(max_iterations, [&](int day, int shift, int cap, std::set<int>& current) {
    if (static_cast<int>(current.size()) >= cap) return false;
    std::size_t pick = rng::weighted_pick(eng, weights);
    SimulationEvent ev{day, shift, false, static_cast<int>(pick), {}};
    for (int x : members[pick]) {
      if (static_cast<int>(current.size()) >= cap) break;
      if (current.insert(x).second)
        ev.added.push_back(item_universe[static_cast<std::size_t>(x)]);
    }
    if (!ev.added.empty()) driver.events.push_back(std::move(ev));
    return true;
  });
  return {std::move(driver.schedule), std::move(driver.warnings), std::move(driver.events)};
}

}  // namespace nsp::mining
