#pragma once

// Wind deviation model: mean-plus-noise forecasts, aggregate deviation
// statistics, standard normal quantiles and seedable deviation samplers
// for the five distribution families used in ex-post validation.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mdf {

// Per-period forecast means (T x n_w, per-unit) and deviation covariances.
struct WindModel {
  Eigen::MatrixXd mean_pu;                   // T x n_w
  std::vector<Eigen::MatrixXd> covariance;   // one n_w x n_w PSD matrix per period

  int periods() const { return static_cast<int>(mean_pu.rows()); }
  int units() const { return static_cast<int>(mean_pu.cols()); }

  // Throws ValidationError on shape mismatch, negative means or a
  // covariance with an eigenvalue below -1e-10.
  void validate() const;

  // Zero-covariance model with the same mean (deterministic runs).
  WindModel deterministic() const;

  // Restriction to a single period (horizon-1 model).
  WindModel slice(int period) const;

  static WindModel empty(int periods);  // n_w = 0
};

// Statistics of the total deviation Omega_t = 1' w_t and of the stacked
// vector (Omega_1, ..., Omega_t).
struct AggregateDeviation {
  Eigen::VectorXd sigma;                        // per-period std of Omega_t
  std::vector<Eigen::MatrixXd> cumulative_cov;  // t x t covariance of (Omega_1..Omega_t)
};

AggregateDeviation aggregate_stats(const WindModel& model);

// Inverse CDF of the standard normal distribution. |Phi(result) - p| <= 1e-12.
// Throws ArgumentError unless 0 < p < 1.
double quantile_standard_normal(double p);

// CDF of the standard normal distribution.
double standard_normal_cdf(double x);

// Deterministic seed-splitting rule for parallel workers: worker i draws
// from split_seed(master, i). splitmix64 finalizer over master ^ mix(i).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

enum class DeviationFamily { laplace, logistic, normal, uniform, weibull };

DeviationFamily family_from_name(const std::string& name);
std::string family_name(DeviationFamily family);

// Zero-mean deviation sampler. Components are drawn independently with the
// requested per-component standard deviation, except for the normal family
// which reproduces the full per-period covariance when one is supplied.
//
// All families are exactly variance-matched to the target std:
//   laplace   scale sigma/sqrt(2)
//   logistic  scale sigma*sqrt(3)/pi
//   normal    std sigma
//   uniform   support +-sqrt(3)*sigma
//   weibull   shape k=2, scale matched to sigma, shifted by its mean to zero
//
// Draws are reproducible: period t always consumes the generator seeded with
// split_seed(seed, t), independent of call order.
class DeviationSampler {
 public:
  DeviationSampler(DeviationFamily family, Eigen::MatrixXd target_std_pu,
                   std::uint64_t seed);

  // Sampler matched to a wind model (normal keeps full covariance).
  static DeviationSampler for_model(DeviationFamily family, const WindModel& model,
                                    std::uint64_t seed);

  // count x n_w matrix of deviations for one period.
  Eigen::MatrixXd sample_period(int period, int count) const;

  // Full tensor, one count x n_w matrix per period. Throws ArgumentError
  // when count < 1.
  std::vector<Eigen::MatrixXd> sample(int count) const;

  DeviationFamily family() const { return family_; }
  std::uint64_t seed() const { return seed_; }
  int periods() const { return static_cast<int>(target_std_.rows()); }
  int units() const { return static_cast<int>(target_std_.cols()); }
  double target_std(int period, int unit) const { return target_std_(period, unit); }

 private:
  DeviationFamily family_;
  Eigen::MatrixXd target_std_;                 // T x n_w
  std::uint64_t seed_;
  std::vector<Eigen::MatrixXd> chol_;          // normal with cross-correlation only
};

}  // namespace mdf
