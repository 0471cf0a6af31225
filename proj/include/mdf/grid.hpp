#pragma once

// Transmission-network data model, case-document loading, per-unit
// conversion, connection matrices and PTDF computation (DC power flow).

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mdf/bids.hpp"
#include "mdf/risk.hpp"
#include "mdf/stochastic.hpp"

namespace mdf {

struct Bus {
  int id = 0;  // 1-based, contiguous
  bool has_generator = false;
  bool has_wind = false;
  bool has_load = false;
  bool has_aggregator = false;
};

struct Line {
  int from_bus = 0;
  int to_bus = 0;
  double reactance_pu = 0.0;
  double flow_limit_mw = 0.0;
};

struct Generator {
  int bus = 0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double cost_quad = 0.0;   // $/MW^2 h
  double cost_lin = 0.0;    // $/MWh
  double cost_const = 0.0;  // $
};

struct WindUnit {
  int bus = 0;
};

struct LoadBus {
  int bus = 0;
  std::vector<double> profile_mw;  // length T
};

struct Network {
  std::string name;
  double power_base_mva = 100.0;
  int slack_bus = 0;  // bus id
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<WindUnit> wind_units;
  std::vector<LoadBus> loads;
  std::vector<MdfBid> bids;  // one aggregator per bus at most
  WindModel wind;            // per-unit forecast for the wind units
  RiskParameters risk;

  int bus_count() const { return static_cast<int>(buses.size()); }
  int line_count() const { return static_cast<int>(lines.size()); }
  int generator_count() const { return static_cast<int>(generators.size()); }
  int wind_count() const { return static_cast<int>(wind_units.size()); }
  int load_count() const { return static_cast<int>(loads.size()); }
  int aggregator_count() const { return static_cast<int>(bids.size()); }
  int horizon() const;

  int bus_index(int bus_id) const;  // 0-based; throws ValidationError

  // T x n_d base-load matrix in per-unit.
  Eigen::MatrixXd load_profile_pu() const;
  double total_load_pu(int period) const;
  // Period with the largest total base load (ties resolved to the earliest).
  int peak_period() const;

  void validate() const;
};

// Parses and validates a case document (JSON text). Errors name the
// offending field.
Network load_case(const std::string& case_json, const std::string& origin = "case");
Network load_case_file(const std::string& path);

// Line-flow sensitivities to bus injections: flows_pu = gamma * injections_pu.
struct PtdfMatrix {
  Eigen::MatrixXd gamma;  // L x N
  int slack_index = 0;    // 0-based column forced to zero
};

// Standard DC construction from the reduced susceptance matrix. Throws
// ArgumentError for an unknown slack id and NumericsError when the network
// graph is disconnected.
PtdfMatrix compute_ptdf(const Network& network, int slack_bus_id);

struct ConnectionMatrices {
  Eigen::MatrixXd gen;         // N x n_g
  Eigen::MatrixXd wind;        // N x n_w
  Eigen::MatrixXd load;        // N x n_d
  Eigen::MatrixXd aggregator;  // N x n_f
};

ConnectionMatrices connection_matrices(const Network& network);

// Single-period view: horizon-1 load profiles and wind model, no bids.
// Used by the single-period dispatch entry point.
Network slice_single_period(const Network& network, int period);

}  // namespace mdf
