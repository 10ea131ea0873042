#include "nspforge/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "nspforge/errors.hpp"
#include "nspforge/rng.hpp"
#include "nspforge/synth.hpp"

namespace nsp::learner {

LearnedConstraints learn_csp(const std::vector<Schedule>& corpus) {
  if (corpus.empty()) throw LearningError("cannot learn from an empty corpus");
  const Schedule& first = corpus.front();
  for (const auto& s : corpus)
    if (s.nurses() != first.nurses() || s.days() != first.days() ||
        s.shifts_per_day() != first.shifts_per_day())
      throw LearningError("corpus schedules must share one shape");

  LearnedConstraints learned;
  learned.nurses = first.nurses();
  learned.days = first.days();
  learned.shifts_per_day = first.shifts_per_day();
  learned.domain_exponent = first.days() * first.shifts_per_day();

  int min_cov = first.nurses() + 1, max_cov = -1;
  int max_daily = 0, min_daily_worked = first.shifts_per_day() + 1;
  int max_total = 0, min_total = first.columns() + 1;
  bool clean = true;

  for (const auto& s : corpus) {
    // Column slices: staffing level of every slot.
    for (int z = 0; z < s.columns(); ++z) {
      const int cov = s.column_sum(z);
      min_cov = std::min(min_cov, cov);
      max_cov = std::max(max_cov, cov);
    }
    // Row slices: per-nurse workload shape.
    for (int i = 0; i < s.nurses(); ++i) {
      const ShiftPattern row = s.row(i);
      for (int d = 1; d <= s.days(); ++d) {
        const int c = row.day_count(d);
        max_daily = std::max(max_daily, c);
        if (c > 0) min_daily_worked = std::min(min_daily_worked, c);
      }
      const int total = row.popcount();
      max_total = std::max(max_total, total);
      min_total = std::min(min_total, total);
      clean = clean && row.night_morning_pairs() == 0;
    }
  }

  learned.min_coverage = std::min(min_cov, first.nurses());
  learned.max_coverage = std::max(max_cov, 0);
  learned.max_shifts_per_day = max_daily;
  learned.min_shifts_per_day_worked =
      min_daily_worked > first.shifts_per_day() ? 0 : min_daily_worked;
  learned.no_night_morning = clean;
  learned.max_shifts_per_week = max_total;
  learned.min_shifts_per_week = std::min(min_total, first.columns());
  return learned;
}

// JSON layout: c2 = slot-coverage floor, c3 = daily-shift ceiling,
// c4 = night->morning prohibition flag, c5 = weekly-shift ceiling; the
// *_max / *_min extras carry the symmetric bounds the struct also tracks.
std::string learned_to_json(const LearnedConstraints& learned) {
  nlohmann::json j;
  j["n"] = learned.nurses;
  j["days"] = learned.days;
  j["shifts_per_day"] = learned.shifts_per_day;
  j["domain_exponent"] = learned.domain_exponent;
  j["c2"] = learned.min_coverage;
  j["c2_max"] = learned.max_coverage;
  j["c3"] = learned.max_shifts_per_day;
  j["c3_min"] = learned.min_shifts_per_day_worked;
  j["c4"] = learned.no_night_morning;
  j["c5"] = learned.max_shifts_per_week;
  j["c5_min"] = learned.min_shifts_per_week;
  return j.dump(2) + "\n";
}

LearnedConstraints learned_from_json(std::string_view json_text) {
  try {
    nlohmann::json j = nlohmann::json::parse(json_text);
    LearnedConstraints learned;
    learned.nurses = j.at("n").get<int>();
    learned.days = j.at("days").get<int>();
    learned.shifts_per_day = j.at("shifts_per_day").get<int>();
    learned.domain_exponent = j.at("domain_exponent").get<int>();
    learned.min_coverage = j.at("c2").get<int>();
    learned.max_coverage = j.value("c2_max", learned.nurses);
    learned.max_shifts_per_day = j.at("c3").get<int>();
    learned.min_shifts_per_day_worked = j.value("c3_min", 0);
    learned.no_night_morning = j.at("c4").get<bool>();
    learned.max_shifts_per_week = j.at("c5").get<int>();
    learned.min_shifts_per_week = j.value("c5_min", 0);
    return learned;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad learned-model JSON: ") + e.what());
  }
}

WcspInstance constraints_to_wcsp(const LearnedConstraints& learned,
                                 const std::vector<std::vector<Rat>>& cost, int cap_exponent) {
  if (learned.nurses <= 0 || learned.days <= 0 || learned.shifts_per_day <= 0)
    throw RangeError("learned model lacks a positive grid");
  if (learned.domain_exponent != learned.days * learned.shifts_per_day)
    throw ConsistencyError("domain exponent does not match the grid");
  if (learned.domain_exponent > cap_exponent)
    throw CapacityError("materializing 2^" + std::to_string(learned.domain_exponent) +
                        " patterns exceeds the 2^" + std::to_string(cap_exponent) + " cap");

  const std::uint64_t m = std::uint64_t{1} << learned.domain_exponent;
  std::vector<ShiftPattern> domain;
  domain.reserve(m);
  for (std::uint64_t o = 0; o < m; ++o)
    domain.push_back(ShiftPattern::from_ordinal(o, learned.days, learned.shifts_per_day));

  NspInstance instance;
  instance.nurses = learned.nurses;
  instance.days = learned.days;
  instance.shifts_per_day = learned.shifts_per_day;
  instance.min_coverage.assign(static_cast<std::size_t>(learned.shifts_per_day),
                               std::vector<int>(static_cast<std::size_t>(learned.days),
                                                learned.min_coverage));
  instance.max_coverage.assign(static_cast<std::size_t>(learned.shifts_per_day),
                               std::vector<int>(static_cast<std::size_t>(learned.days),
                                                learned.max_coverage));
  instance.max_total_shifts.assign(static_cast<std::size_t>(learned.nurses),
                                   learned.max_shifts_per_week);
  instance.min_total_shifts.assign(static_cast<std::size_t>(learned.nurses),
                                   learned.min_shifts_per_week);
  instance.max_night_morning = learned.no_night_morning ? 0 : std::max(learned.days - 1, 0);
  instance.max_nights.assign(static_cast<std::size_t>(learned.nurses), learned.days);
  instance.max_shifts_per_day = learned.max_shifts_per_day;
  instance.cost = cost;
  if (static_cast<int>(cost.size()) != learned.nurses ||
      (cost.size() && cost.front().size() != m))
    throw ShapeError("cost matrix must be nurses x 2^domain_exponent");
  return make_wcsp(std::move(instance), std::move(domain));
}

// ---------------------------------------------------------------------------
// Multiplicative-update factorization
// ---------------------------------------------------------------------------

namespace {
constexpr double kDenominatorFloor = 1e-12;
}

NmfFactors nmf_factorize(const Eigen::MatrixXd& X, int rank, int max_iterations, double tol,
                         std::uint64_t seed) {
  const auto m = X.rows(), n = X.cols();
  if (m == 0 || n == 0) throw ShapeError("cannot factorize an empty matrix");
  if ((X.array() < 0.0).any()) throw RangeError("factorization input must be non-negative");
  if (rank < 1 || rank > std::min(m, n))
    throw RangeError("rank must lie in [1, min(rows, cols)]");
  if (max_iterations < 1) throw RangeError("need at least one iteration");
  if (tol < 0.0) throw RangeError("tolerance must be non-negative");

  rng::Engine eng(seed);
  NmfFactors out;
  out.rank = rank;
  out.training = X;
  out.W.resize(m, rank);
  out.H.resize(rank, n);
  // Row-major fill order is part of the seeded contract.
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < rank; ++c) out.W(r, c) = rng::open_closed(eng);
  for (Eigen::Index r = 0; r < rank; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out.H(r, c) = rng::open_closed(eng);

  double previous = -1.0;
  for (int it = 0; it < max_iterations; ++it) {
    // H first against the current W, then W against the fresh H.
    out.H = out.H.cwiseProduct(
        (out.W.transpose() * X).cwiseQuotient(
            (out.W.transpose() * out.W * out.H).cwiseMax(kDenominatorFloor)));
    out.W = out.W.cwiseProduct(
        (X * out.H.transpose()).cwiseQuotient(
            (out.W * out.H * out.H.transpose()).cwiseMax(kDenominatorFloor)));
    const double err = (X - out.W * out.H).norm();
    out.error_trace.push_back(err);
    if (previous >= 0.0 && std::abs(err - previous) < tol) break;
    previous = err;
  }
  out.gate_threshold = out.error_trace.back();
  return out;
}

NmfPrediction nmf_predict(const Eigen::MatrixXd& partial, const Eigen::MatrixXd& mask,
                          const NmfFactors& factors, double gate) {
  if (partial.rows() != factors.training.rows() || partial.cols() != factors.training.cols())
    throw ShapeError("partial matrix shape does not match the training matrix");
  if (mask.rows() != partial.rows() || mask.cols() != partial.cols())
    throw ShapeError("mask shape does not match the partial matrix");
  if (gate < 0.0) gate = factors.gate_threshold;

  double sq = 0.0;
  for (Eigen::Index r = 0; r < partial.rows(); ++r)
    for (Eigen::Index c = 0; c < partial.cols(); ++c)
      if (mask(r, c) != 0.0) {
        const double d = partial(r, c) - factors.training(r, c);
        sq += d * d;
      }

  NmfPrediction out;
  out.distance = std::sqrt(sq);
  if (out.distance > gate) return out;  // rejected: too far from what was learned

  const Eigen::MatrixXd reconstruction = factors.W * factors.H;
  out.accepted = true;
  out.completed = partial;
  for (Eigen::Index r = 0; r < partial.rows(); ++r)
    for (Eigen::Index c = 0; c < partial.cols(); ++c)
      if (mask(r, c) == 0.0)
        out.completed(r, c) = std::max(0.0, std::round(reconstruction(r, c)));
  return out;
}

// ---------------------------------------------------------------------------
// Scaling probe
// ---------------------------------------------------------------------------

BenchResult learning_benchmark(const std::vector<int>& corpus_sizes,
                               std::uint64_t generator_seed) {
  if (corpus_sizes.empty()) throw RangeError("need at least one corpus size");
  for (int size : corpus_sizes)
    if (size < 1) throw RangeError("corpus sizes must be positive");

  using Clock = std::chrono::steady_clock;
  BenchResult result;
  for (int size : corpus_sizes) {
    std::vector<Schedule> corpus;
    corpus.reserve(static_cast<std::size_t>(size));
    for (int c = 0; c < size; ++c)
      corpus.push_back(synth::random_schedule(25, 7, 4, 0.3,
                                              generator_seed + static_cast<std::uint64_t>(c)));
    // Repeat until >= 20 ms accumulates so tiny corpora are not pure timer
    // jitter; median of three estimates.
    std::vector<double> estimates;
    for (int probe = 0; probe < 3; ++probe) {
      long long reps = 0;
      const auto start = Clock::now();
      double elapsed = 0.0;
      do {
        LearnedConstraints learned = learn_csp(corpus);
        // The learned bounds feed a volatile sink so the pass cannot be
        // optimized away.
        volatile int sink = learned.max_shifts_per_week + learned.min_coverage;
        (void)sink;
        ++reps;
        elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      } while (elapsed < 0.02);
      estimates.push_back(elapsed / static_cast<double>(reps));
    }
    std::sort(estimates.begin(), estimates.end());
    result.rows.push_back({size, estimates[1]});
  }

  result.linear_ok = true;
  for (std::size_t a = 0; a < result.rows.size(); ++a)
    for (std::size_t b = a + 1; b < result.rows.size(); ++b) {
      const auto& ra = result.rows[a];
      const auto& rb = result.rows[b];
      if (ra.corpus_size >= rb.corpus_size) continue;
      const double scale = static_cast<double>(rb.corpus_size) / ra.corpus_size;
      if (rb.seconds > result.noise_factor * ra.seconds * scale) result.linear_ok = false;
    }
  return result;
}

}  // namespace nsp::learner
