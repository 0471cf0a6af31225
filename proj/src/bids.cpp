#include "mdf/bids.hpp"

#include <sstream>

#include "mdf/errors.hpp"

namespace mdf {

void validate_window(const MdfBid& bid, int horizon) {
  if (bid.t_start < 1 || bid.t_end > horizon || bid.t_start > bid.t_end) {
    std::ostringstream os;
    os << "bid at bus " << bid.bus << ": service window [" << bid.t_start << ", "
       << bid.t_end << "] invalid for horizon " << horizon;
    throw ValidationError(os.str());
  }
}

void MdfBid::validate(int horizon) const {
  validate_window(*this, horizon);
  std::ostringstream os;
  os << "bid at bus " << bus << ": ";
  if (r_min > 0.0 || r_max < 0.0) {
    os << "rate limits must satisfy r_min <= 0 <= r_max";
    throw ValidationError(os.str());
  }
  if (e_min > 0.0 || e_max < 0.0) {
    os << "energy limits must satisfy e_min <= 0 <= e_max";
    throw ValidationError(os.str());
  }
  if (gamma_p < 0.0 || gamma_e < 0.0) {
    os << "reward coefficients must be nonnegative";
    throw ValidationError(os.str());
  }
}

void validate_acceptance(const MdfBid& bid, const MdfAcceptance& acc, double tol) {
  const bool ok = acc.r_minus >= bid.r_min - tol && acc.r_minus <= tol &&
                  acc.r_plus >= -tol && acc.r_plus <= bid.r_max + tol &&
                  acc.e_minus >= bid.e_min - tol && acc.e_minus <= tol &&
                  acc.e_plus >= -tol && acc.e_plus <= bid.e_max + tol;
  if (!ok) {
    std::ostringstream os;
    os << "acceptance outside bid box at bus " << bid.bus << ": (" << acc.r_minus << ", "
       << acc.r_plus << ", " << acc.e_minus << ", " << acc.e_plus << ")";
    throw ValidationError(os.str());
  }
}

double reward(const MdfBid& bid, const MdfAcceptance& acc) {
  validate_acceptance(bid, acc);
  return LinearReward{bid.gamma_p, bid.gamma_e}.value(acc);
}

}  // namespace mdf
