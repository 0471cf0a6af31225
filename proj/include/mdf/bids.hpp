#pragma once

// Multi-dimensional-flexibility bids: virtual-battery box parameters with a
// service window, the operator's partial acceptance, and reward evaluation.

#include <string>

namespace mdf {

// One aggregator's flexibility offer. Power and energy limits are per-unit,
// relative to the base load; t_start/t_end are 1-based hours, inclusive.
struct MdfBid {
  int bus = 0;
  int t_start = 1;
  int t_end = 1;
  double r_min = 0.0;   // <= 0, max charging rate
  double r_max = 0.0;   // >= 0, max discharging rate
  double e_min = 0.0;   // <= 0, max energy released
  double e_max = 0.0;   // >= 0, max energy stored
  double gamma_p = 0.0; // $ per unit of cleared power band
  double gamma_e = 0.0; // $ per unit of cleared energy band

  // Sign and window sanity; throws ValidationError.
  void validate(int horizon) const;

  bool in_window(int period_zero_based) const {
    return period_zero_based >= t_start - 1 && period_zero_based <= t_end - 1;
  }
  int window_length() const { return t_end - t_start + 1; }
};

// Cleared portion of a bid: r_min <= r_minus <= 0 <= r_plus <= r_max and
// the energy analogue.
struct MdfAcceptance {
  double r_minus = 0.0;
  double r_plus = 0.0;
  double e_minus = 0.0;
  double e_plus = 0.0;
};

// Window check alone (1 <= t_start <= t_end <= horizon).
void validate_window(const MdfBid& bid, int horizon);

// Acceptance-box check with tolerance; throws ValidationError.
void validate_acceptance(const MdfBid& bid, const MdfAcceptance& acc, double tol = 1e-9);

// Linear parametric reward, the one registered form. Any convex,
// conic-representable reward can be cleared the same way; the clearing
// engine only needs objective coefficients on (r-, r+, e-, e+).
struct LinearReward {
  double gamma_p = 0.0;
  double gamma_e = 0.0;

  double value(const MdfAcceptance& acc) const {
    return gamma_p * (acc.r_plus - acc.r_minus) + gamma_e * (acc.e_plus - acc.e_minus);
  }
};

// Reward owed for an accepted portion of a bid; validates the acceptance box.
double reward(const MdfBid& bid, const MdfAcceptance& acc);

}  // namespace mdf
