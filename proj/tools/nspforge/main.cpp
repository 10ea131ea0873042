// nspforge — command-line front end for the scheduling toolkit.
//
// Subcommands: mine rules|huim|simulate, bayes train|predict|simulate,
// solve bnb|sls|dfs, learn csp|nmf|bench, eval fn|report.
//
// Machine output is JSON on stdout (or --out); progress and timings go to
// stderr so that seeded runs stay byte-reproducible. Exit codes: 0 success,
// 1 usage or input error, 2 no solution (proved_infeasible says whether the
// search proved it), 3 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nspforge/bayes.hpp"
#include "nspforge/errors.hpp"
#include "nspforge/eval.hpp"
#include "nspforge/io.hpp"
#include "nspforge/learner.hpp"
#include "nspforge/mining.hpp"
#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"
#include "nspforge/solver.hpp"

namespace {

using nlohmann::ordered_json;
using nsp::Rat;

enum ExitCode : int { kOk = 0, kUsage = 1, kNoSolution = 2, kInternal = 3 };

int log_level() {
  const char* env = std::getenv("NSPFORGE_LOG");
  if (!env) return 1;  // default: one-line summaries
  const std::string v(env);
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void note(const std::string& line) {
  if (log_level() >= 1) std::cerr << line << "\n";
}

void debug_note(const std::string& line) {
  if (log_level() >= 2) std::cerr << line << "\n";
}

// Primary output: stdout, or --out when given (stdout then stays silent).
void emit(const ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    nsp::io::write_file(out_path, text);
    note("wrote " + out_path);
  }
}

ordered_json rat_field(const Rat& r) { return nsp::to_string(r); }

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Plain numeric CSV (no header): one matrix row per line.
Eigen::MatrixXd parse_matrix_csv(const std::string& path) {
  const std::string text = nsp::io::read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw nsp::ParseError("bad numeric cell '" + cell + "'", line_no);
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && rows.front().size() != row.size())
      throw nsp::ParseError("ragged matrix row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw nsp::ParseError("matrix file holds no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  return out.str();
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array())
    throw nsp::ParseError("expected an array of matrix rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != m.cols())
      throw nsp::ParseError("ragged matrix row in JSON");
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

ordered_json schedule_rows_json(const nsp::Schedule& s) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < s.nurses(); ++i) rows.push_back(s.row(i).to_text());
  return rows;
}

ordered_json assignment_json(const nsp::Assignment& a, const nsp::WcspInstance& w) {
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < a.value.size(); ++i)
    out.push_back(w.domain[static_cast<std::size_t>(a.value[i])].to_text());
  return out;
}

ordered_json stats_json(const nsp::solver::SearchStats& st) {
  ordered_json j;
  j["nodes_expanded"] = st.nodes_expanded;
  j["prunes"] = st.prunes;
  j["incumbent_updates"] = st.incumbent_updates;
  return j;
}

const char* status_name(nsp::solver::SolveStatus s) {
  switch (s) {
    case nsp::solver::SolveStatus::optimal: return "optimal";
    case nsp::solver::SolveStatus::feasible: return "feasible";
    case nsp::solver::SolveStatus::infeasible: return "infeasible";
    case nsp::solver::SolveStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

// Shared solve-result rendering + exit-code policy.
int finish_solve(ordered_json& j, const nsp::solver::SolveResult& result,
                 const nsp::WcspInstance& wcsp, const std::string& out_path,
                 const Timer& timer) {
  j["status"] = status_name(result.status);
  j["optimal"] = result.proved_optimal;
  if (result.assignment) {
    j["assignment"] = assignment_json(*result.assignment, wcsp);
    j["cost"] = rat_field(*result.cost);
    j["cost_value"] = nsp::to_double(*result.cost);
  } else {
    j["assignment"] = nullptr;
    j["cost"] = nullptr;
    j["proved_infeasible"] = result.status == nsp::solver::SolveStatus::infeasible;
  }
  j["stats"] = stats_json(result.stats);
  if (!result.cost_trace.empty()) {
    ordered_json trace = ordered_json::array();
    for (const Rat& c : result.cost_trace) trace.push_back(nsp::to_string(c));
    j["cost_trace"] = std::move(trace);
  }
  if (!result.all_optima.empty()) {
    ordered_json optima = ordered_json::array();
    for (const auto& a : result.all_optima) optima.push_back(assignment_json(a, wcsp));
    j["optima"] = std::move(optima);
  }
  emit(j, out_path);
  note(std::string("status=") + status_name(result.status) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s  nodes=" +
       std::to_string(result.stats.nodes_expanded));
  return result.assignment ? kOk : kNoSolution;
}

std::vector<std::string> collect_csvs(const std::vector<std::string>& inputs) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> here;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
          here.push_back(entry.path().string());
      std::sort(here.begin(), here.end());
      files.insert(files.end(), here.begin(), here.end());
    } else {
      files.push_back(in);
    }
  }
  if (files.empty()) throw nsp::ParseError("no schedule files found");
  return files;
}

int support_count(const std::string& text, std::size_t transactions) {
  const Rat r = nsp::parse_rational(text);
  if (r.denominator() == 1) {
    if (r.numerator() < 1) throw nsp::RangeError("support count must be >= 1");
    return static_cast<int>(r.numerator());
  }
  return nsp::mining::ratio_to_count(r, static_cast<int>(transactions));
}

// ---------------------------------------------------------------------------
// mine
// ---------------------------------------------------------------------------

int run_mine_rules(const std::string& in, const std::string& min_support,
                   const std::string& min_confidence, bool single_consequent,
                   int min_antecedent, const std::string& out_path) {
  const Timer timer;
  const nsp::io::TransactionDb db = nsp::io::parse_transactions(nsp::io::read_file(in));
  const int support = support_count(min_support, db.transactions.size());
  const Rat confidence = nsp::parse_rational(min_confidence);

  const auto frequent = nsp::mining::apriori(db, support);
  const auto rules = nsp::mining::generate_rules(frequent, confidence, single_consequent,
                                                 min_antecedent);

  ordered_json j;
  j["universe"] = db.item_universe;
  j["transaction_count"] = db.transactions.size();
  j["min_support_count"] = support;
  j["min_confidence"] = rat_field(confidence);
  ordered_json freq = ordered_json::array();
  for (const auto& f : frequent) {
    ordered_json row;
    row["items"] = f.items;
    row["support"] = f.support;
    freq.push_back(std::move(row));
  }
  j["frequent"] = std::move(freq);
  ordered_json rj = ordered_json::array();
  for (const auto& r : rules) {
    ordered_json row;
    row["antecedent"] = r.antecedent;
    row["consequent"] = r.consequent;
    row["support"] = r.support;
    row["confidence"] = rat_field(r.confidence);
    row["confidence_value"] = nsp::to_double(r.confidence);
    rj.push_back(std::move(row));
  }
  j["rules"] = std::move(rj);
  emit(j, out_path);
  note("frequent=" + std::to_string(frequent.size()) + " rules=" + std::to_string(rules.size()) +
       "  elapsed=" + std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_mine_huim(const std::string& in, const std::string& min_utility,
                  const std::string& out_path) {
  const Timer timer;
  const auto [db, util] = nsp::io::parse_quantity_table(nsp::io::read_file(in));
  const Rat threshold = nsp::parse_rational(min_utility);
  const auto result = nsp::mining::two_phase(db, util, threshold);

  auto itemset_json = [&](const nsp::mining::UtilityItemset& u) {
    ordered_json row;
    row["items"] = u.items;
    row["twu"] = rat_field(u.twu);
    row["twu_value"] = nsp::to_double(u.twu);
    row["utility"] = rat_field(u.utility);
    row["utility_value"] = nsp::to_double(u.utility);
    row["occurrences"] = u.occurrences;
    return row;
  };

  ordered_json j;
  j["universe"] = db.item_universe;
  j["min_utility"] = rat_field(threshold);
  ordered_json p1 = ordered_json::array(), p2 = ordered_json::array();
  for (const auto& u : result.phase1) p1.push_back(itemset_json(u));
  for (const auto& u : result.phase2) p2.push_back(itemset_json(u));
  j["phase1"] = std::move(p1);
  j["phase2"] = std::move(p2);
  emit(j, out_path);
  note("phase1=" + std::to_string(result.phase1.size()) +
       " phase2=" + std::to_string(result.phase2.size()) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_mine_simulate(const std::string& txns, const std::string& instance_path,
                      const std::string& min_support, const std::string& min_confidence,
                      bool single_consequent, int min_antecedent,
                      const std::string& min_utility, int count, std::uint64_t seed,
                      const std::string& out_dir, const std::string& out_path) {
  const Timer timer;
  const nsp::NspInstance instance = nsp::io::parse_instance(nsp::io::read_file(instance_path));

  ordered_json j;
  j["count"] = count;
  j["seed"] = seed;
  ordered_json schedules = ordered_json::array();
  ordered_json warnings = ordered_json::array();
  long long events_total = 0;

  for (int c = 0; c < count; ++c) {
    nsp::mining::SimulationResult sim;
    if (!min_utility.empty()) {
      const auto [qdb, util] = nsp::io::parse_quantity_table(nsp::io::read_file(txns));
      const auto mined = nsp::mining::two_phase(qdb, util, nsp::parse_rational(min_utility));
      sim = nsp::mining::simulate_schedule(mined.phase2, qdb.item_universe, instance,
                                           seed + static_cast<std::uint64_t>(c));
    } else {
      const nsp::io::TransactionDb db = nsp::io::parse_transactions(nsp::io::read_file(txns));
      const auto frequent =
          nsp::mining::apriori(db, support_count(min_support, db.transactions.size()));
      const auto rules = nsp::mining::generate_rules(
          frequent, nsp::parse_rational(min_confidence), single_consequent, min_antecedent);
      sim = nsp::mining::simulate_schedule(rules, db.item_universe, instance,
                                           seed + static_cast<std::uint64_t>(c));
    }
    schedules.push_back(schedule_rows_json(sim.schedule));
    for (const auto& w : sim.warnings) warnings.push_back(w);
    events_total += static_cast<long long>(sim.events.size());
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      nsp::io::write_file(out_dir + "/schedule_" + std::to_string(c) + ".csv",
                          nsp::io::schedule_to_csv(sim.schedule));
    }
  }
  j["schedules"] = std::move(schedules);
  j["warnings"] = std::move(warnings);
  j["events_total"] = events_total;
  emit(j, out_path);
  note("generated=" + std::to_string(count) + "  elapsed=" + std::to_string(timer.seconds()) +
       "s");
  return kOk;
}

// ---------------------------------------------------------------------------
// bayes
// ---------------------------------------------------------------------------

int run_bayes_train(const std::string& in, const std::string& target,
                    const std::string& labels_csv, const std::string& out_path) {
  const Timer timer;
  const auto table = nsp::io::parse_labeled_table(nsp::io::read_file(in));
  std::vector<std::string> universe;
  if (!labels_csv.empty()) {
    std::istringstream cells(labels_csv);
    std::string cell;
    while (std::getline(cells, cell, ',')) universe.push_back(cell);
  }
  const auto model = nsp::bayes::nb_train(table, target, universe);
  const std::string json_text = nsp::bayes::model_to_json(model);
  if (out_path.empty()) {
    std::cout << json_text;
  } else {
    nsp::io::write_file(out_path, json_text);
    note("wrote " + out_path);
  }
  note("rows=" + std::to_string(model.n_train) + " labels=" + std::to_string(model.labels.size()) +
       "  elapsed=" + std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_bayes_predict(const std::string& model_path, const std::string& in,
                      const std::string& target, bool evaluate, const std::string& out_path) {
  const Timer timer;
  const auto model = nsp::bayes::model_from_json(nsp::io::read_file(model_path));
  const auto table = nsp::io::parse_labeled_table(nsp::io::read_file(in));

  int target_col = -1;
  for (std::size_t c = 0; c < table.column_names.size(); ++c)
    if (table.column_names[c] == target) target_col = static_cast<int>(c);
  if (evaluate && target_col < 0)
    throw nsp::ParseError("evaluation requires the target column '" + target + "'");

  ordered_json rows = ordered_json::array();
  std::vector<std::string> predicted, truth;
  for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
    std::map<std::string, std::string> evidence;
    for (std::size_t c = 0; c < table.column_names.size(); ++c) {
      if (static_cast<int>(c) == target_col) continue;
      evidence[table.column_names[c]] = table.cells[r][c];
    }
    const auto prediction = nsp::bayes::nb_predict(model, evidence);
    ordered_json row;
    row["row"] = table.row_labels[r];
    row["label"] = prediction.label;
    ordered_json scores, scores_value;
    for (const auto& label : model.labels) {
      scores[label] = rat_field(prediction.score.at(label));
      scores_value[label] = nsp::to_double(prediction.score.at(label));
    }
    row["scores"] = std::move(scores);
    row["scores_value"] = std::move(scores_value);
    if (target_col >= 0 && !table.cells[r][static_cast<std::size_t>(target_col)].empty()) {
      row["truth"] = table.cells[r][static_cast<std::size_t>(target_col)];
      predicted.push_back(prediction.label);
      truth.push_back(table.cells[r][static_cast<std::size_t>(target_col)]);
    }
    rows.push_back(std::move(row));
  }

  ordered_json j;
  j["labels"] = model.labels;
  j["predictions"] = std::move(rows);
  if (evaluate) {
    if (truth.empty()) throw nsp::ParseError("no rows carry a ground-truth label");
    const auto eval = nsp::bayes::nb_evaluate(predicted, truth, model.labels);
    j["accuracy"] = rat_field(eval.accuracy);
    j["accuracy_value"] = nsp::to_double(eval.accuracy);
    j["hits"] = eval.hits;
    j["misses"] = eval.misses;
    j["confusion"] = eval.confusion;
  }
  emit(j, out_path);
  note("predicted=" + std::to_string(table.row_labels.size()) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_bayes_simulate(const std::string& history_path, int count, std::uint64_t seed,
                       const std::string& out_dir, const std::string& out_path) {
  const Timer timer;
  const nsp::Schedule history = nsp::io::parse_schedule_csv(nsp::io::read_file(history_path));
  const auto generator = nsp::bayes::bn_fit(std::vector<nsp::Schedule>{history});
  const auto schedules = nsp::bayes::bn_simulate(generator, count, seed);

  ordered_json j;
  j["count"] = count;
  j["seed"] = seed;
  j["nurses"] = history.nurses();
  j["days"] = history.days();
  j["shifts_per_day"] = history.shifts_per_day();
  ordered_json arr = ordered_json::array();
  for (std::size_t c = 0; c < schedules.size(); ++c) {
    arr.push_back(schedule_rows_json(schedules[c]));
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      nsp::io::write_file(out_dir + "/schedule_" + std::to_string(c) + ".csv",
                          nsp::io::schedule_to_csv(schedules[c]));
    }
  }
  j["schedules"] = std::move(arr);
  emit(j, out_path);
  note("generated=" + std::to_string(count) + "  elapsed=" + std::to_string(timer.seconds()) +
       "s");
  return kOk;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

nsp::WcspInstance load_and_propagate(const std::string& in, bool nc, bool gac, ordered_json& j) {
  nsp::WcspInstance wcsp = nsp::io::parse_wcsp(nsp::io::read_file(in));
  ordered_json prop;
  prop["nc"] = nc;
  prop["gac"] = gac;
  long long removed = 0;
  bool inconsistent = false;
  if (nc) {
    const auto r = nsp::solver::nc_propagate(wcsp);
    removed += r.removed;
    inconsistent = inconsistent || r.inconsistent;
  }
  if (gac && !inconsistent) {
    const auto r = nsp::solver::gac_propagate(wcsp);
    removed += r.removed;
    inconsistent = inconsistent || r.inconsistent;
  }
  debug_note("propagation removed " + std::to_string(removed) + " values");
  prop["removed"] = removed;
  prop["inconsistent"] = inconsistent;
  j["propagation"] = std::move(prop);
  return wcsp;
}

int run_solve_bnb(const std::string& in, const std::string& sense, bool nc, bool gac,
                  bool all_optima, long long node_limit, const std::string& var_order,
                  const std::string& val_order, const std::string& out_path) {
  const Timer timer;
  ordered_json j;
  const nsp::WcspInstance wcsp = load_and_propagate(in, nc, gac, j);

  nsp::solver::SolveOptions options;
  options.sense = sense == "max" ? nsp::solver::Sense::maximize : nsp::solver::Sense::minimize;
  options.var_order = var_order == "index" ? nsp::solver::VarOrder::index
                                           : nsp::solver::VarOrder::smallest_domain;
  options.val_order = val_order == "domain" ? nsp::solver::ValOrder::domain_order
                                            : nsp::solver::ValOrder::by_cost;
  options.enumerate_optima = all_optima;
  options.node_limit = node_limit;
  const auto result = nsp::solver::branch_and_bound(wcsp, options);
  j["sense"] = sense;
  return finish_solve(j, result, wcsp, out_path, timer);
}

int run_solve_dfs(const std::string& in, bool nc, bool gac, const std::string& out_path) {
  const Timer timer;
  ordered_json j;
  const nsp::WcspInstance wcsp = load_and_propagate(in, nc, gac, j);
  const auto result = nsp::solver::dfs_first_feasible(wcsp);
  return finish_solve(j, result, wcsp, out_path, timer);
}

int run_solve_sls(const std::string& in, const std::string& sense, const std::string& init,
                  long long budget, std::uint64_t seed, long long retry_cap,
                  const std::string& out_path) {
  const Timer timer;
  ordered_json j;
  const nsp::WcspInstance wcsp = load_and_propagate(in, false, false, j);

  nsp::solver::SlsOptions options;
  options.sense = sense == "max" ? nsp::solver::Sense::maximize : nsp::solver::Sense::minimize;
  options.init = init == "random" ? nsp::solver::SlsInit::random
               : init == "dfs"    ? nsp::solver::SlsInit::dfs
                                  : nsp::solver::SlsInit::dfs_cp;
  options.budget = budget;
  options.seed = seed;
  options.random_retry_cap = retry_cap;
  const auto result = nsp::solver::sls_solve(wcsp, options);
  j["sense"] = sense;
  j["init"] = init;
  j["seed"] = seed;
  j["budget"] = budget;
  return finish_solve(j, result, wcsp, out_path, timer);
}

// ---------------------------------------------------------------------------
// learn
// ---------------------------------------------------------------------------

int run_learn_csp(const std::vector<std::string>& inputs, const std::string& out_path,
                  const std::string& instance_out, const std::string& costs_path,
                  int cap_exponent) {
  const Timer timer;
  std::vector<nsp::Schedule> corpus;
  for (const auto& f : collect_csvs(inputs))
    corpus.push_back(nsp::io::parse_schedule_csv(nsp::io::read_file(f)));
  const auto learned = nsp::learner::learn_csp(corpus);
  const std::string json_text = nsp::learner::learned_to_json(learned);
  if (out_path.empty()) {
    std::cout << json_text;
  } else {
    nsp::io::write_file(out_path, json_text);
    note("wrote " + out_path);
  }

  if (!instance_out.empty()) {
    if (costs_path.empty())
      throw nsp::ParseError("--instance-out needs --costs (per-shift cost CSV, one row per nurse)");
    const Eigen::MatrixXd shift_costs = parse_matrix_csv(costs_path);
    if (shift_costs.rows() != learned.nurses ||
        shift_costs.cols() != learned.shifts_per_day)
      throw nsp::ShapeError("costs must be nurses x shifts_per_day");
    // Pattern weights via the per-shift tally, materialized over 2^exponent.
    if (learned.domain_exponent > cap_exponent)
      throw nsp::CapacityError("grid too large to materialize (see --cap)");
    const std::uint64_t m = std::uint64_t{1} << learned.domain_exponent;
    std::vector<std::vector<Rat>> cost(static_cast<std::size_t>(learned.nurses));
    std::vector<nsp::Rat> per_shift(static_cast<std::size_t>(learned.shifts_per_day));
    for (int i = 0; i < learned.nurses; ++i) {
      for (int s = 0; s < learned.shifts_per_day; ++s)
        per_shift[static_cast<std::size_t>(s)] =
            nsp::Rat(static_cast<long long>(std::llround(shift_costs(i, s))));
      cost[static_cast<std::size_t>(i)].reserve(m);
      for (std::uint64_t o = 0; o < m; ++o)
        cost[static_cast<std::size_t>(i)].push_back(nsp::pattern_cost(
            nsp::ShiftPattern::from_ordinal(o, learned.days, learned.shifts_per_day),
            per_shift));
    }
    const auto wcsp = nsp::learner::constraints_to_wcsp(learned, cost, cap_exponent);
    nsp::io::write_file(instance_out, nsp::io::serialize_instance(wcsp.base, &wcsp.domain));
    note("wrote " + instance_out);
  }
  note("corpus=" + std::to_string(corpus.size()) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

ordered_json factors_json(const nsp::learner::NmfFactors& factors) {
  ordered_json j;
  j["rank"] = factors.rank;
  j["iterations"] = factors.error_trace.size();
  j["error"] = factors.error_trace.back();
  j["gate_threshold"] = factors.gate_threshold;
  j["error_trace"] = factors.error_trace;
  j["W"] = matrix_json(factors.W);
  j["H"] = matrix_json(factors.H);
  j["training"] = matrix_json(factors.training);
  return j;
}

nsp::learner::NmfFactors factors_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    nsp::learner::NmfFactors f;
    f.rank = j.at("rank").get<int>();
    f.gate_threshold = j.at("gate_threshold").get<double>();
    f.error_trace = j.at("error_trace").get<std::vector<double>>();
    f.W = matrix_from_json(j.at("W"));
    f.H = matrix_from_json(j.at("H"));
    f.training = matrix_from_json(j.at("training"));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw nsp::ParseError(std::string("bad factors JSON: ") + e.what());
  }
}

int run_learn_nmf(const std::string& in, int rank, int max_iter, double tol,
                  std::uint64_t seed, const std::string& out_path) {
  const Timer timer;
  const Eigen::MatrixXd x = parse_matrix_csv(in);
  const auto factors = nsp::learner::nmf_factorize(x, rank, max_iter, tol, seed);
  emit(factors_json(factors), out_path);
  note("iterations=" + std::to_string(factors.error_trace.size()) + " error=" +
       std::to_string(factors.error_trace.back()) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_learn_complete(const std::string& factors_path, const std::string& partial_path,
                       const std::string& mask_path, double gate, const std::string& out_path) {
  const Timer timer;
  const auto factors = factors_from_json(nsp::io::read_file(factors_path));
  const Eigen::MatrixXd partial = parse_matrix_csv(partial_path);
  const Eigen::MatrixXd mask = parse_matrix_csv(mask_path);
  const auto prediction = nsp::learner::nmf_predict(partial, mask, factors, gate);

  ordered_json j;
  j["accepted"] = prediction.accepted;
  j["distance"] = prediction.distance;
  j["gate_threshold"] = gate < 0.0 ? factors.gate_threshold : gate;
  if (prediction.accepted) j["completed"] = matrix_json(prediction.completed);
  emit(j, out_path);
  note(std::string("accepted=") + (prediction.accepted ? "yes" : "no") + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

int run_learn_bench(const std::string& sizes_csv, std::uint64_t seed,
                    const std::string& out_path) {
  const Timer timer;
  std::vector<int> sizes;
  std::istringstream cells(sizes_csv);
  std::string cell;
  while (std::getline(cells, cell, ',')) sizes.push_back(std::stoi(cell));
  const auto result = nsp::learner::learning_benchmark(sizes, seed);

  ordered_json j;
  j["seed"] = seed;
  j["noise_factor"] = result.noise_factor;
  j["linear_ok"] = result.linear_ok;
  ordered_json rows = ordered_json::array();
  for (const auto& row : result.rows) {
    ordered_json r;
    r["corpus_size"] = row.corpus_size;
    r["seconds"] = row.seconds;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  emit(j, out_path);
  note("sizes=" + std::to_string(result.rows.size()) + "  elapsed=" +
       std::to_string(timer.seconds()) + "s");
  return kOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int run_eval_fn(const std::string& a_path, const std::string& b_path,
                const std::string& out_path) {
  const Eigen::MatrixXd a = parse_matrix_csv(a_path);
  const Eigen::MatrixXd b = parse_matrix_csv(b_path);
  ordered_json j;
  j["frobenius"] = nsp::eval::frobenius_distance(a, b);
  emit(j, out_path);
  return kOk;
}

int run_eval_report(const std::string& reference, const std::vector<std::string>& generated,
                    const std::string& method, const std::string& mode,
                    const std::string& out_path) {
  const nsp::Schedule ref = nsp::io::parse_schedule_csv(nsp::io::read_file(reference));
  std::vector<nsp::Schedule> gen;
  for (const auto& f : collect_csvs(generated))
    gen.push_back(nsp::io::parse_schedule_csv(nsp::io::read_file(f)));

  const nsp::eval::Aggregate agg = mode == "min" ? nsp::eval::Aggregate::min
                                 : mode == "max" ? nsp::eval::Aggregate::max
                                                 : nsp::eval::Aggregate::mean;
  const auto report = nsp::eval::compare_generated(ref, gen, method, agg);

  ordered_json j;
  j["method"] = report.method;
  j["mode"] = mode;
  j["count"] = report.per_schedule.size();
  j["per_schedule"] = report.per_schedule;
  j["aggregate"] = report.aggregate;
  emit(j, out_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scheduling toolkit: mining, probabilistic generation, exact and local search, "
               "constraint learning"};
  app.require_subcommand(1);

  // Shared option storage (CLI11 binds by reference).
  std::string in, out, out_dir, model_path, target, labels_csv;
  std::string min_support = "1", min_confidence = "1/2", min_utility;
  bool single_consequent = false;
  int min_antecedent = 1;
  std::string sense = "min", var_order = "sdf", val_order = "cost", init = "dfs-cp";
  bool nc = false, gac = false, all_optima = false, evaluate = false;
  long long node_limit = 0, budget = 100, retry_cap = 1000;
  std::uint64_t seed = 0;
  int count = 1, rank = 2, max_iter = 200, cap_exponent = 24;
  double tol = 1e-9, gate = -1.0;
  std::string instance_path, factors_path, partial_path, mask_path, costs_path, instance_out;
  std::string sizes_csv = "10,100", a_path, b_path, reference, method = "generator",
              mode = "mean";
  std::vector<std::string> inputs, generated;

  // --- mine ---------------------------------------------------------------
  auto* mine = app.add_subcommand("mine", "frequent patterns, rules, high-utility itemsets");
  mine->require_subcommand(1);
  auto* mine_rules = mine->add_subcommand("rules", "level-wise frequent itemsets and rules");
  mine_rules->add_option("--in", in, "transaction file")->required();
  mine_rules->add_option("--min-support", min_support,
                         "integer count, or a ratio of the transaction count");
  mine_rules->add_option("--min-confidence", min_confidence, "rational threshold, e.g. 3/5");
  mine_rules->add_flag("--single-consequent", single_consequent,
                       "emit only single-item consequents");
  mine_rules->add_option("--min-antecedent", min_antecedent, "minimum antecedent size");
  mine_rules->add_option("--out", out, "write JSON here instead of stdout");

  auto* mine_huim = mine->add_subcommand("huim", "two-phase high-utility itemsets");
  mine_huim->add_option("--in", in, "quantity table with a utility row")->required();
  mine_huim->add_option("--min-utility", min_utility, "utility threshold")->required();
  mine_huim->add_option("--out", out, "write JSON here instead of stdout");

  auto* mine_sim = mine->add_subcommand("simulate", "sample rosters from mined structure");
  mine_sim->add_option("--from", in, "transaction or quantity file to mine")->required();
  mine_sim->add_option("--instance", instance_path, "target instance (bounds)")->required();
  mine_sim->add_option("--min-support", min_support, "rule mode: support threshold");
  mine_sim->add_option("--min-confidence", min_confidence, "rule mode: confidence threshold");
  mine_sim->add_flag("--single-consequent", single_consequent, "rule mode filter");
  mine_sim->add_option("--min-antecedent", min_antecedent, "rule mode filter");
  mine_sim->add_option("--min-utility", min_utility,
                       "itemset mode: use high-utility itemsets instead of rules");
  mine_sim->add_option("--count", count, "how many rosters");
  mine_sim->add_option("--seed", seed, "generator seed")->required();
  mine_sim->add_option("--out-dir", out_dir, "also write each roster as CSV here");
  mine_sim->add_option("--out", out, "write JSON here instead of stdout");

  // --- bayes --------------------------------------------------------------
  auto* bayes = app.add_subcommand("bayes", "count-based classifier and roster generator");
  bayes->require_subcommand(1);
  auto* bayes_train = bayes->add_subcommand("train", "fit counts from a labeled table");
  bayes_train->add_option("--in", in, "labeled CSV table")->required();
  bayes_train->add_option("--target-col", target, "label column name")->required();
  bayes_train->add_option("--labels", labels_csv, "comma-separated label universe");
  bayes_train->add_option("--out", out, "write model JSON here instead of stdout");

  auto* bayes_predict = bayes->add_subcommand("predict", "score rows with a trained model");
  bayes_predict->add_option("--model", model_path, "model JSON")->required();
  bayes_predict->add_option("--in", in, "table of evidence rows")->required();
  bayes_predict->add_option("--target-col", target, "truth column (enables --evaluate)")
      ->required();
  bayes_predict->add_flag("--evaluate", evaluate, "report accuracy and confusion counts");
  bayes_predict->add_option("--out", out, "write JSON here instead of stdout");

  auto* bayes_sim = bayes->add_subcommand("simulate", "sample rosters from cell posteriors");
  bayes_sim->add_option("--history", instance_path, "observed roster CSV")->required();
  bayes_sim->add_option("--count", count, "how many rosters");
  bayes_sim->add_option("--seed", seed, "generator seed")->required();
  bayes_sim->add_option("--out-dir", out_dir, "also write each roster as CSV here");
  bayes_sim->add_option("--out", out, "write JSON here instead of stdout");

  // --- solve --------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "exact and local search over pattern instances");
  solve->require_subcommand(1);
  auto* solve_bnb = solve->add_subcommand("bnb", "depth-first branch and bound");
  solve_bnb->add_option("--in", in, "instance file with [domain]")->required();
  solve_bnb->add_option("--sense", sense, "min or max")
      ->check(CLI::IsMember({"min", "max"}));
  solve_bnb->add_flag("--nc", nc, "unary-filter domains first");
  solve_bnb->add_flag("--gac", gac, "support-filter domains first");
  solve_bnb->add_flag("--all-optima", all_optima, "collect every optimal assignment");
  solve_bnb->add_option("--node-limit", node_limit, "stop after this many nodes (0 = off)");
  solve_bnb->add_option("--var-order", var_order, "sdf or index")
      ->check(CLI::IsMember({"sdf", "index"}));
  solve_bnb->add_option("--val-order", val_order, "cost or domain")
      ->check(CLI::IsMember({"cost", "domain"}));
  solve_bnb->add_option("--out", out, "write JSON here instead of stdout");

  auto* solve_dfs = solve->add_subcommand("dfs", "first feasible assignment, no bounding");
  solve_dfs->add_option("--in", in, "instance file with [domain]")->required();
  solve_dfs->add_flag("--nc", nc, "unary-filter domains first");
  solve_dfs->add_flag("--gac", gac, "support-filter domains first");
  solve_dfs->add_option("--out", out, "write JSON here instead of stdout");

  auto* solve_sls = solve->add_subcommand("sls", "iterative improvement over feasible rosters");
  solve_sls->add_option("--in", in, "instance file with [domain]")->required();
  solve_sls->add_option("--sense", sense, "min or max")
      ->check(CLI::IsMember({"min", "max"}));
  solve_sls->add_option("--init", init, "random, dfs, or dfs-cp")
      ->check(CLI::IsMember({"random", "dfs", "dfs-cp"}));
  solve_sls->add_option("--budget", budget, "improvement sweeps");
  solve_sls->add_option("--seed", seed, "generator seed")->required();
  solve_sls->add_option("--retry-cap", retry_cap, "random-init resampling cap");
  solve_sls->add_option("--out", out, "write JSON here instead of stdout");

  // --- learn --------------------------------------------------------------
  auto* learn = app.add_subcommand("learn", "bound extraction and matrix factorization");
  learn->require_subcommand(1);
  auto* learn_csp = learn->add_subcommand("csp", "extract bounds from roster CSVs");
  learn_csp->add_option("--in", inputs, "roster CSV files or directories")->required();
  learn_csp->add_option("--out", out, "write learned JSON here instead of stdout");
  learn_csp->add_option("--instance-out", instance_out,
                        "also materialize a solvable instance (small grids)");
  learn_csp->add_option("--costs", costs_path, "per-shift cost CSV (nurses x shifts)");
  learn_csp->add_option("--cap", cap_exponent, "largest 2^e domain to materialize");

  auto* learn_nmf = learn->add_subcommand("nmf", "non-negative factorization of a matrix");
  learn_nmf->add_option("--in", in, "numeric CSV matrix")->required();
  learn_nmf->add_option("--rank", rank, "factor rank")->required();
  learn_nmf->add_option("--max-iter", max_iter, "iteration cap");
  learn_nmf->add_option("--tol", tol, "stop when the error change drops below this");
  learn_nmf->add_option("--seed", seed, "init seed")->required();
  learn_nmf->add_option("--out", out, "write factors JSON here instead of stdout");

  auto* learn_complete = learn->add_subcommand("complete", "gate and fill a partial matrix");
  learn_complete->add_option("--factors", factors_path, "factors JSON from `learn nmf`")
      ->required();
  learn_complete->add_option("--in", partial_path, "partial matrix CSV")->required();
  learn_complete->add_option("--mask", mask_path, "0/1 known-cell mask CSV")->required();
  learn_complete->add_option("--gate", gate, "distance gate (default: training error)");
  learn_complete->add_option("--out", out, "write JSON here instead of stdout");

  auto* learn_bench = learn->add_subcommand("bench", "bound-extraction scaling probe");
  learn_bench->add_option("--sizes", sizes_csv, "comma-separated corpus sizes");
  learn_bench->add_option("--seed", seed, "corpus generator seed")->required();
  learn_bench->add_option("--out", out, "write JSON here instead of stdout");

  // --- eval ---------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "distance metrics and comparison reports");
  eval->require_subcommand(1);
  auto* eval_fn = eval->add_subcommand("fn", "entrywise distance between two matrices");
  eval_fn->add_option("--a", a_path, "numeric CSV matrix")->required();
  eval_fn->add_option("--b", b_path, "numeric CSV matrix")->required();
  eval_fn->add_option("--out", out, "write JSON here instead of stdout");

  auto* eval_report = eval->add_subcommand("report", "compare rosters to a reference");
  eval_report->add_option("--reference", reference, "reference roster CSV")->required();
  eval_report->add_option("--generated", generated, "roster CSVs or directories")->required();
  eval_report->add_option("--method", method, "label for the generator under test");
  eval_report->add_option("--mode", mode, "mean, min, or max")
      ->check(CLI::IsMember({"mean", "min", "max"}));
  eval_report->add_option("--out", out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Flag/option mistakes land on the documented usage exit code; --help
    // and --version return success.
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (mine_rules->parsed())
      return run_mine_rules(in, min_support, min_confidence, single_consequent, min_antecedent,
                            out);
    if (mine_huim->parsed()) return run_mine_huim(in, min_utility, out);
    if (mine_sim->parsed())
      return run_mine_simulate(in, instance_path, min_support, min_confidence,
                               single_consequent, min_antecedent, min_utility, count, seed,
                               out_dir, out);
    if (bayes_train->parsed()) return run_bayes_train(in, target, labels_csv, out);
    if (bayes_predict->parsed()) return run_bayes_predict(model_path, in, target, evaluate, out);
    if (bayes_sim->parsed()) return run_bayes_simulate(instance_path, count, seed, out_dir, out);
    if (solve_bnb->parsed())
      return run_solve_bnb(in, sense, nc, gac, all_optima, node_limit, var_order, val_order,
                           out);
    if (solve_dfs->parsed()) return run_solve_dfs(in, nc, gac, out);
    if (solve_sls->parsed())
      return run_solve_sls(in, sense, init, budget, seed, retry_cap, out);
    if (learn_csp->parsed())
      return run_learn_csp(inputs, out, instance_out, costs_path, cap_exponent);
    if (learn_nmf->parsed()) return run_learn_nmf(in, rank, max_iter, tol, seed, out);
    if (learn_complete->parsed())
      return run_learn_complete(factors_path, partial_path, mask_path, gate, out);
    if (learn_bench->parsed()) return run_learn_bench(sizes_csv, seed, out);
    if (eval_fn->parsed()) return run_eval_fn(a_path, b_path, out);
    if (eval_report->parsed()) return run_eval_report(reference, generated, method, mode, out);
    std::cerr << "no subcommand dispatched\n";
    return kUsage;
  } catch (const nsp::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::RangeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::ConsistencyError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::TrainingError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::LearningError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const nsp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
