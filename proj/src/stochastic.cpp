#include "mdf/stochastic.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mdf/errors.hpp"

namespace mdf {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;
// Weibull shape 2: mean = scale * gamma(1.5), var = scale^2 * (1 - pi/4).
constexpr double kWeibullMeanFactor = 0.8862269254527580;   // gamma(1.5)
constexpr double kWeibullStdFactor = 0.4632513714779969;    // sqrt(1 - pi/4)

// Symmetric PSD check with the tolerance fixed by the WindModel contract.
void check_psd(const Eigen::MatrixXd& m, int period) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "covariance for period " << period + 1 << " is not square";
    throw ValidationError(os.str());
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    std::ostringstream os;
    os << "covariance for period " << period + 1 << " is not symmetric";
    throw ValidationError(os.str());
  }
  if (m.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    std::ostringstream os;
    os << "covariance for period " << period + 1 << " is not positive semidefinite"
       << " (min eigenvalue " << es.eigenvalues().minCoeff() << ")";
    throw ValidationError(os.str());
  }
}

// Lower factor L with L L' = cov, valid for singular PSD matrices.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0) return cov;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform draw strictly inside (0, 1); 53-bit resolution.
double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

void WindModel::validate() const {
  if (static_cast<int>(covariance.size()) != periods()) {
    throw ValidationError("wind model: covariance count does not match horizon");
  }
  if (mean_pu.size() > 0 && mean_pu.minCoeff() < 0.0) {
    throw ValidationError("wind model: negative mean forecast");
  }
  for (int t = 0; t < periods(); ++t) {
    if (covariance[t].rows() != units()) {
      std::ostringstream os;
      os << "wind model: covariance for period " << t + 1 << " has wrong dimension";
      throw ValidationError(os.str());
    }
    check_psd(covariance[t], t);
  }
}

WindModel WindModel::deterministic() const {
  WindModel out = *this;
  for (auto& cov : out.covariance) cov.setZero();
  return out;
}

WindModel WindModel::slice(int period) const {
  if (period < 0 || period >= periods()) {
    throw ArgumentError("wind model: period out of range");
  }
  WindModel out;
  out.mean_pu = mean_pu.row(period);
  out.covariance = {covariance[static_cast<size_t>(period)]};
  return out;
}

WindModel WindModel::empty(int periods) {
  WindModel out;
  out.mean_pu.resize(periods, 0);
  out.covariance.assign(static_cast<size_t>(periods), Eigen::MatrixXd(0, 0));
  return out;
}

AggregateDeviation aggregate_stats(const WindModel& model) {
  model.validate();
  const int T = model.periods();
  AggregateDeviation out;
  out.sigma.resize(T);
  for (int t = 0; t < T; ++t) {
    const double var = model.covariance[t].sum();  // 1' Sigma 1
    out.sigma(t) = std::sqrt(std::max(0.0, var));
  }
  out.cumulative_cov.reserve(T);
  for (int t = 0; t < T; ++t) {
    // Cross-period independence: diagonal covariance of (Omega_1..Omega_t).
    Eigen::MatrixXd cum = Eigen::MatrixXd::Zero(t + 1, t + 1);
    for (int k = 0; k <= t; ++k) cum(k, k) = out.sigma(k) * out.sigma(k);
    out.cumulative_cov.push_back(std::move(cum));
  }
  return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double quantile_standard_normal(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("quantile_standard_normal: p must lie in (0, 1)");
  }
  // Acklam's rational approximation, then two Halley refinements against
  // the erfc-based CDF; accurate to full double precision.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = standard_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x51ed270b9d1c8aefULL));
}

DeviationFamily family_from_name(const std::string& name) {
  if (name == "laplace") return DeviationFamily::laplace;
  if (name == "logistic") return DeviationFamily::logistic;
  if (name == "normal") return DeviationFamily::normal;
  if (name == "uniform") return DeviationFamily::uniform;
  if (name == "weibull") return DeviationFamily::weibull;
  throw ArgumentError("unknown deviation family: " + name);
}

std::string family_name(DeviationFamily family) {
  switch (family) {
    case DeviationFamily::laplace: return "laplace";
    case DeviationFamily::logistic: return "logistic";
    case DeviationFamily::normal: return "normal";
    case DeviationFamily::uniform: return "uniform";
    case DeviationFamily::weibull: return "weibull";
  }
  throw ArgumentError("unknown deviation family");
}

DeviationSampler::DeviationSampler(DeviationFamily family, Eigen::MatrixXd target_std_pu,
                                   std::uint64_t seed)
    : family_(family), target_std_(std::move(target_std_pu)), seed_(seed) {
  if (target_std_.size() > 0 && target_std_.minCoeff() < 0.0) {
    throw ArgumentError("deviation sampler: negative target std");
  }
}

DeviationSampler DeviationSampler::for_model(DeviationFamily family,
                                             const WindModel& model,
                                             std::uint64_t seed) {
  model.validate();
  const int T = model.periods();
  const int n = model.units();
  Eigen::MatrixXd stds(T, n);
  bool diagonal = true;
  for (int t = 0; t < T; ++t) {
    stds.row(t) = model.covariance[t].diagonal().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd off =
        model.covariance[t] - Eigen::MatrixXd(model.covariance[t].diagonal().asDiagonal());
    if (off.size() > 0 && off.cwiseAbs().maxCoeff() > 0.0) diagonal = false;
  }
  DeviationSampler sampler(family, std::move(stds), seed);
  if (family == DeviationFamily::normal && !diagonal) {
    sampler.chol_.reserve(T);
    for (int t = 0; t < T; ++t) sampler.chol_.push_back(psd_sqrt(model.covariance[t]));
  }
  return sampler;
}

Eigen::MatrixXd DeviationSampler::sample_period(int period, int count) const {
  if (count < 1) throw ArgumentError("deviation sampler: count must be >= 1");
  if (period < 0 || period >= periods()) {
    throw ArgumentError("deviation sampler: period out of range");
  }
  const int n = units();
  Eigen::MatrixXd out(count, n);
  std::mt19937_64 rng(split_seed(seed_, static_cast<std::uint64_t>(period)));
  const bool correlated = !chol_.empty();
  for (int s = 0; s < count; ++s) {
    for (int j = 0; j < n; ++j) {
      const double u = uniform01(rng);
      const double sigma = correlated ? 1.0 : target_std_(period, j);
      double x = 0.0;
      switch (family_) {
        case DeviationFamily::laplace: {
          const double scale = sigma / kSqrt2;
          x = u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
          break;
        }
        case DeviationFamily::logistic: {
          const double scale = sigma * kSqrt3 / kPi;
          x = scale * std::log(u / (1.0 - u));
          break;
        }
        case DeviationFamily::normal:
          x = sigma * quantile_standard_normal(u);
          break;
        case DeviationFamily::uniform:
          x = kSqrt3 * sigma * (2.0 * u - 1.0);
          break;
        case DeviationFamily::weibull: {
          const double scale = sigma / kWeibullStdFactor;
          x = scale * (std::sqrt(-std::log(1.0 - u)) - kWeibullMeanFactor);
          break;
        }
      }
      out(s, j) = x;
    }
  }
  if (correlated) {
    out = out * chol_[static_cast<size_t>(period)].transpose();
  }
  return out;
}

std::vector<Eigen::MatrixXd> DeviationSampler::sample(int count) const {
  if (count < 1) throw ArgumentError("deviation sampler: count must be >= 1");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<size_t>(periods()));
  for (int t = 0; t < periods(); ++t) out.push_back(sample_period(t, count));
  return out;
}

}  // namespace mdf
