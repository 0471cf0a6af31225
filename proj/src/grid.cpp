#include "mdf/grid.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mdf/errors.hpp"

namespace mdf {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

const json& require_key(const json& obj, const std::string& key, const std::string& where,
                        const std::string& origin) {
  if (!obj.contains(key)) parse_fail(origin, where + ": missing key '" + key + "'");
  return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& where,
                      const std::string& origin) {
  const json& v = require_key(obj, key, where, origin);
  if (!v.is_number()) parse_fail(origin, where + "." + key + ": expected a number");
  return v.get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& where,
                const std::string& origin) {
  const json& v = require_key(obj, key, where, origin);
  if (!v.is_number_integer()) parse_fail(origin, where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::vector<double> risk_vector(const json& risk, const std::string& key, int count,
                                double fallback, const std::string& origin) {
  std::vector<double> out(static_cast<size_t>(count), fallback);
  if (!risk.contains(key)) return out;
  const json& v = risk.at(key);
  if (v.is_number()) {
    std::fill(out.begin(), out.end(), v.get<double>());
  } else if (v.is_array()) {
    if (static_cast<int>(v.size()) != count) {
      parse_fail(origin, "risk." + key + ": expected " + std::to_string(count) + " entries");
    }
    for (int i = 0; i < count; ++i) out[static_cast<size_t>(i)] = v[static_cast<size_t>(i)].get<double>();
  } else {
    parse_fail(origin, "risk." + key + ": expected a number or an array");
  }
  return out;
}

}  // namespace

RiskParameters RiskParameters::uniform(int n_gen, int n_line, int n_agg, double eg,
                                       double el, double ep, double ee) {
  RiskParameters out;
  out.eps_gen.assign(static_cast<size_t>(n_gen), eg);
  out.eps_line.assign(static_cast<size_t>(n_line), el);
  out.eps_power.assign(static_cast<size_t>(n_agg), ep);
  out.eps_energy.assign(static_cast<size_t>(n_agg), ee);
  return out;
}

void RiskParameters::validate(int n_gen, int n_line, int n_agg) const {
  auto check = [](const std::vector<double>& eps, size_t count, const char* what) {
    if (eps.size() != count) {
      throw ValidationError(std::string("risk: wrong number of entries for ") + what);
    }
    for (double e : eps) {
      if (!(e > 0.0 && e <= 0.5)) {
        throw ValidationError(std::string("risk: epsilon for ") + what +
                              " must lie in (0, 0.5]");
      }
    }
  };
  check(eps_gen, static_cast<size_t>(n_gen), "generators");
  check(eps_line, static_cast<size_t>(n_line), "lines");
  check(eps_power, static_cast<size_t>(n_agg), "aggregator power");
  check(eps_energy, static_cast<size_t>(n_agg), "aggregator energy");
}

int Network::horizon() const {
  if (!loads.empty()) return static_cast<int>(loads.front().profile_mw.size());
  return wind.periods();
}

int Network::bus_index(int bus_id) const {
  if (bus_id < 1 || bus_id > bus_count()) {
    std::ostringstream os;
    os << "bus id " << bus_id << " not in network (1.." << bus_count() << ")";
    throw ValidationError(os.str());
  }
  return bus_id - 1;
}

Eigen::MatrixXd Network::load_profile_pu() const {
  const int T = horizon();
  Eigen::MatrixXd out(T, load_count());
  for (int d = 0; d < load_count(); ++d) {
    for (int t = 0; t < T; ++t) {
      out(t, d) = loads[static_cast<size_t>(d)].profile_mw[static_cast<size_t>(t)] / power_base_mva;
    }
  }
  return out;
}

double Network::total_load_pu(int period) const {
  double total = 0.0;
  for (const auto& l : loads) total += l.profile_mw.at(static_cast<size_t>(period));
  return total / power_base_mva;
}

int Network::peak_period() const {
  int best = 0;
  double best_load = -1.0;
  for (int t = 0; t < horizon(); ++t) {
    const double tl = total_load_pu(t);
    if (tl > best_load + 1e-12) {
      best_load = tl;
      best = t;
    }
  }
  return best;
}

void Network::validate() const {
  const int N = bus_count();
  if (N == 0) throw ValidationError("network: no buses");
  for (int i = 0; i < N; ++i) {
    if (buses[static_cast<size_t>(i)].id != i + 1) {
      throw ValidationError("network: bus ids must be contiguous 1..N");
    }
  }
  bus_index(slack_bus);
  for (size_t l = 0; l < lines.size(); ++l) {
    const Line& ln = lines[l];
    std::ostringstream os;
    os << "lines[" << l << "]: ";
    if (ln.from_bus == ln.to_bus) {
      throw ValidationError(os.str() + "from_bus equals to_bus");
    }
    bus_index(ln.from_bus);
    bus_index(ln.to_bus);
    if (!(ln.reactance_pu > 0.0)) throw ValidationError(os.str() + "reactance must be > 0");
    if (!(ln.flow_limit_mw > 0.0)) throw ValidationError(os.str() + "flow limit must be > 0");
  }
  if (generators.empty()) throw ValidationError("network: no generators");
  for (const auto& g : generators) {
    bus_index(g.bus);
    if (g.p_min_mw > g.p_max_mw) throw ValidationError("generator: p_min > p_max");
    if (g.cost_quad < 0.0) throw ValidationError("generator: quadratic cost must be >= 0");
  }
  std::set<int> wind_buses;
  for (const auto& w : wind_units) {
    bus_index(w.bus);
    if (!wind_buses.insert(w.bus).second) {
      throw ValidationError("wind_units: more than one unit at a bus");
    }
  }
  const int T = horizon();
  for (const auto& d : loads) {
    bus_index(d.bus);
    if (static_cast<int>(d.profile_mw.size()) != T) {
      throw ValidationError("loads: every profile must cover the same horizon");
    }
  }
  std::set<int> agg_buses;
  for (const auto& b : bids) {
    bus_index(b.bus);
    if (!agg_buses.insert(b.bus).second) {
      std::ostringstream os;
      os << "aggregators: more than one bid at bus " << b.bus;
      throw ValidationError(os.str());
    }
    b.validate(T);
  }
  wind.validate();
  if (wind.units() != wind_count()) {
    throw ValidationError("wind_forecast: column count must match wind_units");
  }
  if (wind_count() > 0 && wind.periods() != T) {
    throw ValidationError("wind_forecast: horizon must match load profiles");
  }
  risk.validate(generator_count(), line_count(), aggregator_count());
}

Network load_case(const std::string& case_json, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(case_json);
  } catch (const json::parse_error& e) {
    parse_fail(origin, std::string("invalid JSON: ") + e.what());
  }
  Network net;
  net.name = doc.value("name", origin);
  net.power_base_mva = require_number(doc, "power_base_mva", "document", origin);
  if (!(net.power_base_mva > 0.0)) parse_fail(origin, "power_base_mva must be > 0");

  const json& buses = require_key(doc, "buses", "document", origin);
  for (size_t i = 0; i < buses.size(); ++i) {
    Bus b;
    b.id = require_int(buses[i], "id", "buses[" + std::to_string(i) + "]", origin);
    net.buses.push_back(b);
  }
  std::sort(net.buses.begin(), net.buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });

  for (const std::string key : {"lines", "generators", "loads"}) {
    if (!doc.contains(key)) parse_fail(origin, "document: missing key '" + key + "'");
  }
  const json& lines = doc.at("lines");
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "lines[" + std::to_string(i) + "]";
    Line ln;
    ln.from_bus = require_int(lines[i], "from", where, origin);
    ln.to_bus = require_int(lines[i], "to", where, origin);
    ln.reactance_pu = require_number(lines[i], "reactance_pu", where, origin);
    ln.flow_limit_mw = require_number(lines[i], "flow_limit_mw", where, origin);
    net.lines.push_back(ln);
  }
  const json& gens = doc.at("generators");
  for (size_t i = 0; i < gens.size(); ++i) {
    const std::string where = "generators[" + std::to_string(i) + "]";
    Generator g;
    g.bus = require_int(gens[i], "bus", where, origin);
    g.p_min_mw = require_number(gens[i], "p_min_mw", where, origin);
    g.p_max_mw = require_number(gens[i], "p_max_mw", where, origin);
    g.cost_quad = require_number(gens[i], "c2", where, origin);
    g.cost_lin = require_number(gens[i], "c1", where, origin);
    g.cost_const = require_number(gens[i], "c0", where, origin);
    net.generators.push_back(g);
  }
  if (doc.contains("wind_units")) {
    const json& wind = doc.at("wind_units");
    for (size_t i = 0; i < wind.size(); ++i) {
      WindUnit w;
      w.bus = require_int(wind[i], "bus", "wind_units[" + std::to_string(i) + "]", origin);
      net.wind_units.push_back(w);
    }
  }
  const json& loads = doc.at("loads");
  for (size_t i = 0; i < loads.size(); ++i) {
    const std::string where = "loads[" + std::to_string(i) + "]";
    LoadBus d;
    d.bus = require_int(loads[i], "bus", where, origin);
    const json& profile = require_key(loads[i], "profile_mw", where, origin);
    if (!profile.is_array() || profile.empty()) {
      parse_fail(origin, where + ".profile_mw: expected a non-empty array");
    }
    for (const auto& v : profile) d.profile_mw.push_back(v.get<double>());
    net.loads.push_back(d);
  }
  if (doc.contains("aggregators")) {
    const json& aggs = doc.at("aggregators");
    for (size_t i = 0; i < aggs.size(); ++i) {
      const std::string where = "aggregators[" + std::to_string(i) + "]";
      MdfBid b;
      b.bus = require_int(aggs[i], "bus", where, origin);
      b.t_start = require_int(aggs[i], "t_start", where, origin);
      b.t_end = require_int(aggs[i], "t_end", where, origin);
      b.r_min = require_number(aggs[i], "r_min_pu", where, origin);
      b.r_max = require_number(aggs[i], "r_max_pu", where, origin);
      b.e_min = require_number(aggs[i], "e_min_pu", where, origin);
      b.e_max = require_number(aggs[i], "e_max_pu", where, origin);
      b.gamma_p = require_number(aggs[i], "gamma_p", where, origin);
      b.gamma_e = require_number(aggs[i], "gamma_e", where, origin);
      net.bids.push_back(b);
    }
  }

  const int T = net.horizon();
  const int n_w = net.wind_count();
  if (n_w > 0) {
    const json& wf = require_key(doc, "wind_forecast", "document", origin);
    const json& mean = require_key(wf, "mean_pu", "wind_forecast", origin);
    if (static_cast<int>(mean.size()) != T) {
      parse_fail(origin, "wind_forecast.mean_pu: expected " + std::to_string(T) + " rows");
    }
    net.wind.mean_pu.resize(T, n_w);
    for (int t = 0; t < T; ++t) {
      const json& row = mean[static_cast<size_t>(t)];
      if (static_cast<int>(row.size()) != n_w) {
        parse_fail(origin, "wind_forecast.mean_pu: row " + std::to_string(t) + " has wrong width");
      }
      for (int j = 0; j < n_w; ++j) net.wind.mean_pu(t, j) = row[static_cast<size_t>(j)].get<double>();
    }
    const json& cov = require_key(wf, "covariance", "wind_forecast", origin);
    const std::string type = require_key(cov, "type", "wind_forecast.covariance", origin).get<std::string>();
    net.wind.covariance.assign(static_cast<size_t>(T), Eigen::MatrixXd::Zero(n_w, n_w));
    if (type == "zero") {
      // deterministic forecast
    } else if (type == "diagonal_relative") {
      const double ratio = require_number(cov, "ratio", "wind_forecast.covariance", origin);
      for (int t = 0; t < T; ++t) {
        for (int j = 0; j < n_w; ++j) {
          const double sd = ratio * net.wind.mean_pu(t, j);
          net.wind.covariance[static_cast<size_t>(t)](j, j) = sd * sd;
        }
      }
    } else if (type == "per_period") {
      const json& mats = require_key(cov, "matrices", "wind_forecast.covariance", origin);
      if (static_cast<int>(mats.size()) != T) {
        parse_fail(origin, "wind_forecast.covariance.matrices: expected one matrix per period");
      }
      for (int t = 0; t < T; ++t) {
        const json& m = mats[static_cast<size_t>(t)];
        for (int r = 0; r < n_w; ++r) {
          for (int c = 0; c < n_w; ++c) {
            net.wind.covariance[static_cast<size_t>(t)](r, c) =
                m.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>();
          }
        }
      }
    } else {
      parse_fail(origin, "wind_forecast.covariance.type: unknown type '" + type + "'");
    }
  } else {
    net.wind = WindModel::empty(T);
  }

  const json risk = doc.value("risk", json::object());
  net.risk.eps_gen = risk_vector(risk, "eps_gen", net.generator_count(), 0.1, origin);
  net.risk.eps_line = risk_vector(risk, "eps_line", net.line_count(), 0.2, origin);
  net.risk.eps_power = risk_vector(risk, "eps_power", net.aggregator_count(), 0.1, origin);
  net.risk.eps_energy = risk_vector(risk, "eps_energy", net.aggregator_count(), 0.1, origin);

  if (doc.contains("slack_bus")) {
    net.slack_bus = doc.at("slack_bus").get<int>();
  } else if (!net.generators.empty()) {
    // Default: lowest-id generator bus.
    int lowest = net.generators.front().bus;
    for (const auto& g : net.generators) lowest = std::min(lowest, g.bus);
    net.slack_bus = lowest;
  }

  for (const auto& g : net.generators) {
    if (g.bus >= 1 && g.bus <= net.bus_count()) net.buses[static_cast<size_t>(g.bus - 1)].has_generator = true;
  }
  for (const auto& w : net.wind_units) {
    if (w.bus >= 1 && w.bus <= net.bus_count()) net.buses[static_cast<size_t>(w.bus - 1)].has_wind = true;
  }
  for (const auto& d : net.loads) {
    if (d.bus >= 1 && d.bus <= net.bus_count()) net.buses[static_cast<size_t>(d.bus - 1)].has_load = true;
  }
  for (const auto& b : net.bids) {
    if (b.bus >= 1 && b.bus <= net.bus_count()) net.buses[static_cast<size_t>(b.bus - 1)].has_aggregator = true;
  }

  net.validate();
  return net;
}

Network load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open case file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_case(buffer.str(), path);
}

PtdfMatrix compute_ptdf(const Network& network, int slack_bus_id) {
  const int N = network.bus_count();
  const int L = network.line_count();
  if (slack_bus_id < 1 || slack_bus_id > N) {
    throw ArgumentError("compute_ptdf: slack bus id not in network");
  }
  const int slack = slack_bus_id - 1;

  // Connectivity check; a disconnected graph makes the reduced matrix singular.
  std::vector<std::vector<int>> adjacent(static_cast<size_t>(N));
  for (const auto& ln : network.lines) {
    adjacent[static_cast<size_t>(ln.from_bus - 1)].push_back(ln.to_bus - 1);
    adjacent[static_cast<size_t>(ln.to_bus - 1)].push_back(ln.from_bus - 1);
  }
  std::vector<bool> seen(static_cast<size_t>(N), false);
  std::queue<int> frontier;
  frontier.push(slack);
  seen[static_cast<size_t>(slack)] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adjacent[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != N) {
    throw NumericsError("compute_ptdf: network graph is disconnected (singular susceptance matrix)");
  }

  Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(L, N);
  Eigen::VectorXd susceptance(L);
  for (int l = 0; l < L; ++l) {
    const Line& ln = network.lines[static_cast<size_t>(l)];
    incidence(l, ln.from_bus - 1) = 1.0;
    incidence(l, ln.to_bus - 1) = -1.0;
    susceptance(l) = 1.0 / ln.reactance_pu;
  }
  const Eigen::MatrixXd line_b = susceptance.asDiagonal() * incidence;    // L x N
  const Eigen::MatrixXd bus_b = incidence.transpose() * line_b;           // N x N

  std::vector<int> keep;
  keep.reserve(static_cast<size_t>(N - 1));
  for (int i = 0; i < N; ++i) {
    if (i != slack) keep.push_back(i);
  }
  Eigen::MatrixXd reduced(N - 1, N - 1);
  for (int r = 0; r < N - 1; ++r) {
    for (int c = 0; c < N - 1; ++c) reduced(r, c) = bus_b(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(reduced);
  if (llt.info() != Eigen::Success) {
    throw NumericsError("compute_ptdf: reduced susceptance matrix is singular");
  }
  Eigen::MatrixXd line_b_reduced(L, N - 1);
  for (int c = 0; c < N - 1; ++c) line_b_reduced.col(c) = line_b.col(keep[static_cast<size_t>(c)]);

  PtdfMatrix out;
  out.slack_index = slack;
  out.gamma = Eigen::MatrixXd::Zero(L, N);
  const Eigen::MatrixXd shift = llt.solve(line_b_reduced.transpose()).transpose();  // L x (N-1)
  for (int c = 0; c < N - 1; ++c) out.gamma.col(keep[static_cast<size_t>(c)]) = shift.col(c);
  return out;
}

ConnectionMatrices connection_matrices(const Network& network) {
  const int N = network.bus_count();
  ConnectionMatrices out;
  out.gen = Eigen::MatrixXd::Zero(N, network.generator_count());
  out.wind = Eigen::MatrixXd::Zero(N, network.wind_count());
  out.load = Eigen::MatrixXd::Zero(N, network.load_count());
  out.aggregator = Eigen::MatrixXd::Zero(N, network.aggregator_count());
  for (int j = 0; j < network.generator_count(); ++j) out.gen(network.generators[static_cast<size_t>(j)].bus - 1, j) = 1.0;
  for (int j = 0; j < network.wind_count(); ++j) out.wind(network.wind_units[static_cast<size_t>(j)].bus - 1, j) = 1.0;
  for (int j = 0; j < network.load_count(); ++j) out.load(network.loads[static_cast<size_t>(j)].bus - 1, j) = 1.0;
  for (int j = 0; j < network.aggregator_count(); ++j) out.aggregator(network.bids[static_cast<size_t>(j)].bus - 1, j) = 1.0;
  return out;
}

Network slice_single_period(const Network& network, int period) {
  if (period < 0 || period >= network.horizon()) {
    throw ArgumentError("slice_single_period: period out of range");
  }
  Network out = network;
  out.name = network.name + "@t" + std::to_string(period + 1);
  for (auto& d : out.loads) d.profile_mw = {d.profile_mw.at(static_cast<size_t>(period))};
  out.bids.clear();
  out.risk.eps_power.clear();
  out.risk.eps_energy.clear();
  if (network.wind_count() > 0) {
    out.wind = network.wind.slice(period);
  } else {
    out.wind = WindModel::empty(1);
  }
  for (auto& b : out.buses) b.has_aggregator = false;
  return out;
}

}  // namespace mdf
