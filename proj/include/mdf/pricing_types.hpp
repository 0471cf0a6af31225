#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mdf {

// Locational marginal prices for the load buses, $/MWh.
struct LmpProfile {
  std::vector<int> bus_ids;  // load bus ids, column order
  Eigen::MatrixXd lmp;       // T x n_d
  Eigen::VectorXd mean;      // per bus over the horizon
  Eigen::VectorXd stddev;
  Eigen::VectorXd spread;    // max - min
};

}  // namespace mdf
