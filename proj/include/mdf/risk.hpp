#pragma once

// Risk parameters: maximum allowed violation probabilities per constraint
// class. Every epsilon must lie in (0, 0.5] so the Gaussian reformulation
// multiplier Phi^-1(1 - eps) is nonnegative and the cone stays convex.

#include <vector>

namespace mdf {

struct RiskParameters {
  std::vector<double> eps_gen;     // per generator
  std::vector<double> eps_line;    // per line
  std::vector<double> eps_power;   // per aggregator, charging power
  std::vector<double> eps_energy;  // per aggregator, state of charge

  static RiskParameters uniform(int n_gen, int n_line, int n_agg, double eps_gen,
                                double eps_line, double eps_power, double eps_energy);

  // Throws ValidationError when any epsilon is outside (0, 0.5] or a
  // count disagrees with the network.
  void validate(int n_gen, int n_line, int n_agg) const;
};

}  // namespace mdf
