#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>

#include "dhillon/dataset.hpp"

namespace dhillon {

/// Shape `beta` and scale `theta` of Dhillon(beta, theta), whose survival
/// function is 1 / (1 + theta t^beta).
class DhillonParams {
 public:
  /// Throws DomainError unless both values are positive and finite.
  DhillonParams(double beta, double theta);

  double beta() const { return beta_; }
  double theta() const { return theta_; }

  friend bool operator==(const DhillonParams&, const DhillonParams&) = default;

 private:
  double beta_;
  double theta_;
};

struct HazardShape {
  enum class Kind { Decreasing, Unimodal };
  Kind kind;
  std::optional<double> mode;
};

struct MeanVariance {
  std::optional<double> mean;      // present iff beta > 1
  std::optional<double> variance;  // present iff beta > 2
};

double pdf(const DhillonParams& p, double t);
double log_pdf(const DhillonParams& p, double t);
double survival(const DhillonParams& p, double t);
double cdf(const DhillonParams& p, double t);
double hazard(const DhillonParams& p, double t);

/// Elementwise survival over an array of non-negative times.
Eigen::ArrayXd survival(const DhillonParams& p, const Eigen::ArrayXd& t);

/// Decreasing for beta <= 1, otherwise unimodal with mode ((beta-1)/theta)^(1/beta).
HazardShape hazard_shape(const DhillonParams& p);

/// Inverse cdf, u in (0, 1).
double quantile(const DhillonParams& p, double u);

/// n inverse-transform draws from a Xoshiro256 stream seeded with `seed`.
Dataset sample(const DhillonParams& p, std::size_t n, std::uint64_t seed);
/// Inverse-transform draws for caller-supplied uniforms.
Dataset sample(const DhillonParams& p, std::span<const double> uniforms);

/// E[T^r]; throws MomentDoesNotExist unless 0 < r < beta.
double raw_moment(const DhillonParams& p, double r);
MeanVariance mean_variance(const DhillonParams& p);

/// E[T - t | T > t]; throws MrlUndefined when beta <= 1.
double mean_residual_life(const DhillonParams& p, double t);

}  // namespace dhillon
