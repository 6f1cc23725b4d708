#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace dhillon {

/// Complete (uncensored) sample of positive failure times, kept in input order.
class Dataset {
 public:
  /// Throws DomainError naming the first offending (0-based) index when a time
  /// is not positive and finite, or when `times` is empty.
  explicit Dataset(std::vector<double> times, std::string label = {}, std::string unit = "units");

  std::span<const double> times() const { return times_; }
  Eigen::Map<const Eigen::ArrayXd> array() const {
    return {times_.data(), static_cast<Eigen::Index>(times_.size())};
  }
  std::size_t size() const { return times_.size(); }
  const std::string& label() const { return label_; }
  const std::string& unit() const { return unit_; }

  double min() const;
  double max() const;
  double median() const;
  /// max - min below 1e-12 * max.
  bool degenerate() const;

  /// Same data multiplied by c > 0.
  Dataset scaled(double c) const;

 private:
  std::vector<double> times_;
  std::string label_;
  std::string unit_;
};

}  // namespace dhillon
