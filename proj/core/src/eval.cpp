#include "nspforge/eval.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "nspforge/errors.hpp"

namespace nsp::eval {

double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("matrices must share a shape to be compared");
  return (a - b).norm();
}

Eigen::MatrixXd schedule_matrix(const Schedule& schedule) {
  Eigen::MatrixXd out(schedule.nurses(), schedule.columns());
  for (int i = 0; i < schedule.nurses(); ++i)
    for (int z = 0; z < schedule.columns(); ++z)
      out(i, z) = static_cast<double>(schedule.at(i, z));
  return out;
}

QualityReport compare_generated(const Schedule& reference,
                                const std::vector<Schedule>& generated,
                                std::string method, Aggregate mode) {
  if (generated.empty()) throw RangeError("need at least one generated schedule");
  const Eigen::MatrixXd ref = schedule_matrix(reference);

  QualityReport report;
  report.method = std::move(method);
  report.mode = mode;
  report.per_schedule.reserve(generated.size());
  for (const auto& g : generated) {
    if (g.nurses() != reference.nurses() || g.days() != reference.days() ||
        g.shifts_per_day() != reference.shifts_per_day())
      throw ShapeError("generated schedule shape does not match the reference");
    report.per_schedule.push_back(frobenius_distance(ref, schedule_matrix(g)));
  }

  switch (mode) {
    case Aggregate::mean:
      report.aggregate =
          std::accumulate(report.per_schedule.begin(), report.per_schedule.end(), 0.0) /
          static_cast<double>(report.per_schedule.size());
      break;
    case Aggregate::min:
      report.aggregate =
          *std::min_element(report.per_schedule.begin(), report.per_schedule.end());
      break;
    case Aggregate::max:
      report.aggregate =
          *std::max_element(report.per_schedule.begin(), report.per_schedule.end());
      break;
  }
  return report;
}

}  // namespace nsp::eval
