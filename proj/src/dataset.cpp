#include "dhillon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dhillon/errors.hpp"

namespace dhillon {

Dataset::Dataset(std::vector<double> times, std::string label, std::string unit)
    : times_(std::move(times)), label_(std::move(label)), unit_(std::move(unit)) {
  if (times_.empty()) throw DomainError("Dataset: at least one observation is required");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw DomainError("Dataset: observation " + std::to_string(i) + " is not a positive finite time (" +
                        num(t) + ")");
    }
  }
}

double Dataset::min() const { return *std::min_element(times_.begin(), times_.end()); }
double Dataset::max() const { return *std::max_element(times_.begin(), times_.end()); }

double Dataset::median() const {
  std::vector<double> s(times_);
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

bool Dataset::degenerate() const { return max() - min() < 1e-12 * max(); }

Dataset Dataset::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("Dataset::scaled: factor must be positive");
  std::vector<double> s(times_);
  for (auto& t : s) t *= c;
  return Dataset(std::move(s), label_, unit_);
}

}  // namespace dhillon
