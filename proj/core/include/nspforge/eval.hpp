#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nspforge/model.hpp"

namespace nsp::eval {

// sqrt of the summed squared entrywise differences; shapes must match
// (ShapeError). Zero iff the matrices are identical.
double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Roster as a dense 0/1 matrix (nurses x slots).
Eigen::MatrixXd schedule_matrix(const Schedule& schedule);

enum class Aggregate { mean, min, max };

struct QualityReport {
  std::string method;                           // which generator produced the rosters
  std::map<std::string, std::string> settings;  // free-form parameter echo
  std::vector<double> per_schedule;             // distance of each roster to the reference
  double aggregate = 0.0;
  Aggregate mode = Aggregate::mean;
  std::optional<double> accuracy;               // attached by classifier pipelines
};

// Distances of each generated roster to the reference, aggregated; shapes
// must all match the reference. `generated` must be non-empty.
QualityReport compare_generated(const Schedule& reference,
                                const std::vector<Schedule>& generated,
                                std::string method, Aggregate mode = Aggregate::mean);

}  // namespace nsp::eval
