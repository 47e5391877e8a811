#include "netcpd/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace netcpd {
namespace {

nlohmann::ordered_json matrix_json(const Matrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::ordered_json to_json(const DetectorConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["c_gate"] = cfg.c_gate;
  // JSON has no infinity; null stands for a disabled score threshold.
  if (std::isinf(cfg.c1)) {
    j["c1"] = nullptr;
  } else {
    j["c1"] = cfg.c1;
  }
  j["rho_hat"] = cfg.rho_hat;
  j["tau_rule"] = to_string(cfg.tau_rule);
  j["use_absolute_inner_product"] = cfg.use_absolute_inner_product;
  if (cfg.max_time) {
    j["max_time"] = *cfg.max_time;
  } else {
    j["max_time"] = nullptr;
  }
  return j;
}

DetectorConfig detector_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("detector config must be a JSON object");
  DetectorConfig cfg;
  if (j.contains("mode")) cfg.mode = parse_control_mode(j.at("mode").get<std::string>());
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<int>();
  if (j.contains("c_gate")) cfg.c_gate = j.at("c_gate").get<double>();
  if (j.contains("c1")) {
    cfg.c1 = j.at("c1").is_null() ? std::numeric_limits<double>::infinity()
                                  : j.at("c1").get<double>();
  }
  if (j.contains("rho_hat")) cfg.rho_hat = j.at("rho_hat").get<double>();
  if (j.contains("tau_rule")) cfg.tau_rule = parse_tau_rule(j.at("tau_rule").get<std::string>());
  if (j.contains("use_absolute_inner_product")) {
    cfg.use_absolute_inner_product = j.at("use_absolute_inner_product").get<bool>();
  }
  if (j.contains("max_time") && !j.at("max_time").is_null()) {
    cfg.max_time = j.at("max_time").get<int>();
  }
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(spec.kind);
  j["n"] = spec.n;
  if (spec.delta) {
    j["delta"] = *spec.delta;
  } else {
    j["delta"] = nullptr;
  }
  j["horizon"] = spec.horizon;
  j["seed"] = spec.seed;
  if (spec.custom_before) j["custom_before"] = matrix_json(spec.custom_before->entries);
  if (spec.custom_after) j["custom_after"] = matrix_json(spec.custom_after->entries);
  return j;
}

nlohmann::ordered_json to_json(const ChangeScenario& truth) {
  nlohmann::ordered_json j;
  j["n"] = truth.n();
  if (truth.delta) {
    j["delta"] = *truth.delta;
  } else {
    j["delta"] = nullptr;
  }
  j["rho"] = truth.rho;
  j["kappa"] = truth.kappa;
  j["kappa0"] = truth.kappa0;
  j["rank"] = truth.rank;
  j["theta_before"] = matrix_json(truth.theta_before.entries);
  j["theta_after"] = matrix_json(truth.theta_after.entries);
  return j;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace netcpd
