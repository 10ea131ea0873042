#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "nspforge/model.hpp"
#include "nspforge/rational.hpp"

namespace nsp::learner {

// Bounds read off a corpus of example rosters by column/row slicing.
// Maxima are observed extremes (safe: no training example violates them);
// the *_min fields record the symmetric floors the same slices yield.
struct LearnedConstraints {
  int nurses = 0, days = 0, shifts_per_day = 0;
  int domain_exponent = 0;  // days * shifts_per_day

  int min_coverage = 0;            // smallest slot-column sum seen
  int max_coverage = 0;            // largest slot-column sum seen
  int max_shifts_per_day = 0;      // largest per-nurse single-day count
  int min_shifts_per_day_worked = 0;  // smallest count over worked days only
  bool no_night_morning = true;    // no night->next-morning pair anywhere
  int max_shifts_per_week = 0;     // largest per-nurse total
  int min_shifts_per_week = 0;     // smallest per-nurse total
};

// Empty corpus or mismatched shapes is a LearningError.
LearnedConstraints learn_csp(const std::vector<Schedule>& corpus);

// Lossless JSON round-trip for learned models.
std::string learned_to_json(const LearnedConstraints& learned);
LearnedConstraints learned_from_json(std::string_view json_text);

// Instantiates a solvable problem from learned bounds: coverage within
// [min_coverage, max_coverage] on every slot, per-nurse week total within
// [min_shifts_per_week, max_shifts_per_week], per-day ceiling
// max_shifts_per_day, and a zero night->morning budget when the corpus was
// clean. The domain is every pattern over 2^domain_exponent, so exponents
// above cap_exponent raise CapacityError; `cost` must be nurses x 2^exponent.
WcspInstance constraints_to_wcsp(const LearnedConstraints& learned,
                                 const std::vector<std::vector<Rat>>& cost,
                                 int cap_exponent = 24);

// ---------------------------------------------------------------------------
// Low-rank roster factorization (multiplicative updates).
// ---------------------------------------------------------------------------

struct NmfFactors {
  Eigen::MatrixXd W;  // m x r
  Eigen::MatrixXd H;  // r x n
  int rank = 0;
  std::vector<double> error_trace;  // Frobenius error per iteration
  double gate_threshold = 0.0;      // defaults to the final training error
  Eigen::MatrixXd training;         // the matrix the factors were fit to
};

// Seeded uniform-(0,1] init; per iteration H updates first from the current
// W, then W updates against the already-updated H; denominators floored at
// 1e-12. Stops when the error improves by less than `tol` or after
// max_iterations. X must be non-negative (RangeError); rank must satisfy
// 0 < rank <= min(m, n).
NmfFactors nmf_factorize(const Eigen::MatrixXd& X, int rank, int max_iterations,
                         double tol, std::uint64_t seed);

struct NmfPrediction {
  bool accepted = false;
  double distance = 0.0;          // Frobenius distance over known entries
  Eigen::MatrixXd completed;      // filled only when accepted
};

// Gate-then-fill: measures the known entries (mask != 0) of `partial`
// against the training matrix; within `gate` (default: the factors' own
// threshold) the unknown entries are filled from round(W*H) clamped to
// non-negative, otherwise the input is rejected with the distance.
NmfPrediction nmf_predict(const Eigen::MatrixXd& partial, const Eigen::MatrixXd& mask,
                          const NmfFactors& factors, double gate = -1.0);

// ---------------------------------------------------------------------------
// Learning-cost scaling probe.
// ---------------------------------------------------------------------------

struct BenchRow {
  int corpus_size = 0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  // True when every pair of sizes a < b satisfies
  // seconds(b) <= noise_factor * seconds(a) * (b / a).
  bool linear_ok = false;
  double noise_factor = 2.0;
};

// Learns from synthetic corpora of each size (25 nurses, 7 days, 4 shifts,
// seeded generator) and times the pass; each measurement repeats until it
// accumulates >= 20 ms and takes the median of three estimates so jitter
// does not drown small sizes.
BenchResult learning_benchmark(const std::vector<int>& corpus_sizes,
                               std::uint64_t generator_seed);

}  // namespace nsp::learner
