#include "nspforge/bayes.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"

namespace nsp::bayes {

namespace {

int label_rank(const std::vector<std::string>& labels, const std::string& value) {
  auto it = std::find(labels.begin(), labels.end(), value);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

}  // namespace

NbModel nb_train(const io::LabeledTable& table, const std::string& target_column,
                 std::vector<std::string> label_universe) {
  auto target_it = std::find(table.column_names.begin(), table.column_names.end(), target_column);
  if (target_it == table.column_names.end())
    throw TrainingError("target column '" + target_column + "' not in the table");
  const int target = static_cast<int>(target_it - table.column_names.begin());
  if (table.cells.empty()) throw TrainingError("cannot train on an empty table");

  NbModel model;
  for (int c = 0; c < static_cast<int>(table.column_names.size()); ++c)
    if (c != target) model.feature_names.push_back(table.column_names[static_cast<std::size_t>(c)]);

  if (label_universe.empty()) {
    std::set<std::string> seen;
    for (const auto& row : table.cells) seen.insert(row[static_cast<std::size_t>(target)]);
    label_universe.assign(seen.begin(), seen.end());
  }
  model.labels = std::move(label_universe);
  model.class_count.assign(model.labels.size(), 0);
  model.n_train = static_cast<long long>(table.cells.size());

  for (const auto& row : table.cells) {
    const std::string& label = row[static_cast<std::size_t>(target)];
    int rank = label_rank(model.labels, label);
    if (rank < 0) throw TrainingError("target value '" + label + "' outside the label universe");
    ++model.class_count[static_cast<std::size_t>(rank)];
    int feature = 0;
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      if (c == target) continue;
      auto key = std::make_pair(feature, row[static_cast<std::size_t>(c)]);
      auto [it, inserted] =
          model.cond_count.try_emplace(key, std::vector<long long>(model.labels.size(), 0));
      ++it->second[static_cast<std::size_t>(rank)];
      ++feature;
    }
  }
  return model;
}

NbPrediction nb_predict(const NbModel& model,
                        const std::map<std::string, std::string>& evidence) {
  if (model.labels.empty() || model.n_train <= 0) throw TrainingError("untrained model");
  std::vector<std::pair<int, std::string>> keys;
  for (const auto& [name, value] : evidence) {
    auto it = std::find(model.feature_names.begin(), model.feature_names.end(), name);
    if (it == model.feature_names.end())
      throw TrainingError("evidence feature '" + name + "' unknown to the model");
    keys.emplace_back(static_cast<int>(it - model.feature_names.begin()), value);
  }

  const long long smoothing = static_cast<long long>(model.labels.size());
  NbPrediction out;
  Rat best(-1);
  for (std::size_t rank = 0; rank < model.labels.size(); ++rank) {
    // Unsmoothed prior times one add-one smoothed likelihood per feature.
    Rat score(model.class_count[rank], model.n_train);
    for (const auto& key : keys) {
      auto it = model.cond_count.find(key);
      long long joint = it == model.cond_count.end() ? 0 : it->second[rank];
      score *= Rat(joint + 1, model.class_count[rank] + smoothing);
    }
    out.score[model.labels[rank]] = score;
    if (score > best) {  // strict: earliest label wins ties
      best = score;
      out.label = model.labels[rank];
    }
  }
  return out;
}

NbEvaluation nb_evaluate(const std::vector<std::string>& predicted,
                         const std::vector<std::string>& truth,
                         const std::vector<std::string>& labels) {
  if (predicted.size() != truth.size())
    throw ShapeError("prediction and truth lists differ in length");
  if (predicted.empty()) throw ShapeError("nothing to evaluate");
  NbEvaluation eval;
  eval.confusion.assign(labels.size(), std::vector<long long>(labels.size(), 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    int p = label_rank(labels, predicted[i]);
    int t = label_rank(labels, truth[i]);
    if (p < 0 || t < 0) throw RangeError("value outside the label universe");
    ++eval.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    if (p == t)
      ++eval.hits;
    else
      ++eval.misses;
  }
  eval.accuracy = Rat(eval.hits, static_cast<long long>(predicted.size()));
  return eval;
}

// ---------------------------------------------------------------------------
// Posterior cell sampler
// ---------------------------------------------------------------------------

BernoulliGenerator bn_fit(const std::vector<Schedule>& history) {
  if (history.empty()) throw LearningError("cannot fit a generator to an empty history");
  const Schedule& first = history.front();
  for (const auto& s : history)
    if (s.nurses() != first.nurses() || s.days() != first.days() ||
        s.shifts_per_day() != first.shifts_per_day())
      throw LearningError("history schedules must share one shape");

  BernoulliGenerator gen;
  gen.nurses = first.nurses();
  gen.days = first.days();
  gen.shifts_per_day = first.shifts_per_day();
  const int cols = first.columns();
  gen.alpha.assign(static_cast<std::size_t>(gen.nurses), std::vector<double>(cols, 1.0));
  gen.beta.assign(static_cast<std::size_t>(gen.nurses), std::vector<double>(cols, 1.0));
  for (const auto& s : history)
    for (int i = 0; i < gen.nurses; ++i)
      for (int z = 0; z < cols; ++z)
        (s.at(i, z) ? gen.alpha : gen.beta)[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] += 1.0;
  return gen;
}

std::vector<Schedule> bn_simulate(const BernoulliGenerator& generator, int count,
                                  std::uint64_t seed) {
  if (count < 0) throw RangeError("sample count must be non-negative");
  rng::Engine eng(seed);
  std::vector<Schedule> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    Schedule s(generator.nurses, generator.days, generator.shifts_per_day);
    for (int i = 0; i < generator.nurses; ++i)
      for (int z = 0; z < s.columns(); ++z)
        s.set(i, z, rng::bernoulli(eng, generator.mean(i, z)));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Schedule> bn_simulate(const std::vector<Schedule>& history, int count,
                                  std::uint64_t seed) {
  return bn_simulate(bn_fit(history), count, seed);
}

// ---------------------------------------------------------------------------
// Model JSON
// ---------------------------------------------------------------------------

std::string model_to_json(const NbModel& model) {
  nlohmann::json j;
  j["n_train"] = model.n_train;
  j["features"] = model.feature_names;
  j["labels"] = model.labels;
  j["class_count"] = model.class_count;
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [key, per_label] : model.cond_count) {
    counts.push_back({{"feature", model.feature_names[static_cast<std::size_t>(key.first)]},
                      {"value", key.second},
                      {"count", per_label}});
  }
  j["cond_count"] = std::move(counts);
  return j.dump(2) + "\n";
}

NbModel model_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model JSON: ") + e.what());
  }
  try {
    NbModel model;
    model.n_train = j.at("n_train").get<long long>();
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.class_count = j.at("class_count").get<std::vector<long long>>();
    if (model.class_count.size() != model.labels.size())
      throw ParseError("class counts do not match the labels");
    for (const auto& entry : j.at("cond_count")) {
      std::string feature = entry.at("feature").get<std::string>();
      auto it = std::find(model.feature_names.begin(), model.feature_names.end(), feature);
      if (it == model.feature_names.end())
        throw ParseError("count entry names unknown feature '" + feature + "'");
      auto per_label = entry.at("count").get<std::vector<long long>>();
      if (per_label.size() != model.labels.size())
        throw ParseError("count entry does not match the labels");
      model.cond_count[{static_cast<int>(it - model.feature_names.begin()),
                        entry.at("value").get<std::string>()}] = std::move(per_label);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model JSON: ") + e.what());
  }
}

}  // namespace nsp::bayes
