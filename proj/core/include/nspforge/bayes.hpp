#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nspforge/io.hpp"
#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::bayes {

// Count-based categorical naive Bayes model. Everything needed to score is
// held as integer counts so serialized models are lossless.
struct NbModel {
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;  // fixed universe order: ties break earliest
  long long n_train = 0;
  std::vector<long long> class_count;  // per label
  // (feature index, observed value) -> per-label co-occurrence counts.
  std::map<std::pair<int, std::string>, std::vector<long long>> cond_count;
};

// Builds counts from a labeled table; `target_column` names the label
// column, the rest become features. The label universe fixes smoothing
// cardinality and tie order; when empty it defaults to the distinct target
// values in lexicographic order. Unknown target column, empty table, or a
// target value outside the universe is a TrainingError.
NbModel nb_train(const io::LabeledTable& table, const std::string& target_column,
                 std::vector<std::string> label_universe = {});

struct NbPrediction {
  std::string label;                 // argmax, ties to earliest universe label
  std::map<std::string, Rat> score;  // unnormalized posterior per label
};

// Scores = unsmoothed prior (class_count / n_train) times one add-one
// smoothed likelihood (count+1)/(class_count+|labels|) per evidence feature.
// Evidence must cover known feature names only (TrainingError otherwise);
// unseen values simply contribute the smoothing floor.
NbPrediction nb_predict(const NbModel& model,
                        const std::map<std::string, std::string>& evidence);

struct NbEvaluation {
  Rat accuracy;  // hits / total
  long long hits = 0;
  long long misses = 0;
  // confusion[truth rank][predicted rank], ranks in label-universe order.
  std::vector<std::vector<long long>> confusion;
};

// Compares parallel prediction/truth lists; every value must be in the
// label universe.
NbEvaluation nb_evaluate(const std::vector<std::string>& predicted,
                         const std::vector<std::string>& truth,
                         const std::vector<std::string>& labels);

// Per-cell posterior over schedule bits with a uniform prior: alpha counts
// observed ones plus one, beta observed zeros plus one.
struct BernoulliGenerator {
  int nurses = 0, days = 0, shifts_per_day = 0;
  std::vector<std::vector<double>> alpha;  // nurses x slots
  std::vector<std::vector<double>> beta;

  double mean(int nurse, int slot) const { return alpha[nurse][slot] / (alpha[nurse][slot] + beta[nurse][slot]); }
};

// History must be non-empty with identical shapes (LearningError otherwise).
BernoulliGenerator bn_fit(const std::vector<Schedule>& history);

// Draws `count` rosters cell-by-cell (row-major) from the posterior means.
// Deterministic for a fixed seed.
std::vector<Schedule> bn_simulate(const BernoulliGenerator& generator, int count,
                                  std::uint64_t seed);
std::vector<Schedule> bn_simulate(const std::vector<Schedule>& history, int count,
                                  std::uint64_t seed);

// Lossless JSON round-trip for trained models.
std::string model_to_json(const NbModel& model);
NbModel model_from_json(std::string_view json_text);

}  // namespace nsp::bayes
