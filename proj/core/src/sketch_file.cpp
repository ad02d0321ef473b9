#include "hermsketch/sketch_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hermsketch/errors.hpp"

namespace hermsketch {

namespace {

using json = nlohmann::ordered_json;

json moments_to_json(const RunningMoments& m) {
  json j;
  if (m.exponential_mode()) {
    j["mode"] = "exponential";
    j["count"] = m.count();
    j["ew_mean"] = m.mean();
    j["ew_var"] = m.spread();
  } else {
    j["mode"] = "cumulative";
    j["count"] = m.count();
    j["mean"] = m.mean();
    j["m2"] = m.spread();
  }
  return j;
}

RunningMoments moments_from_json(const json& j, std::optional<double> lambda) {
  const std::string mode = j.at("mode").get<std::string>();
  const auto count = j.at("count").get<std::uint64_t>();
  if (mode == "cumulative") {
    if (lambda) throw data_error("sketch file: cumulative moments on an exponentially weighted sketch");
    return RunningMoments::restore(std::nullopt, count, j.at("mean").get<double>(),
                                   j.at("m2").get<double>());
  }
  if (mode == "exponential") {
    if (!lambda) throw data_error("sketch file: exponential moments on a stationary sketch");
    return RunningMoments::restore(lambda, count, j.at("ew_mean").get<double>(),
                                   j.at("ew_var").get<double>());
  }
  throw data_error("sketch file: unknown moments mode '" + mode + "'");
}

std::vector<double> finite_array(const json& j, const char* section) {
  if (!j.is_array()) throw data_error(std::string("sketch file: '") + section + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw data_error(std::string("sketch file: '") + section + "' holds a non-numeric value");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw data_error(std::string("sketch file: '") + section + "' holds a non-finite value");
    out.push_back(d);
  }
  return out;
}

json header(const char* est_type, int order_n, bool standardize,
            const std::optional<double>& lambda, std::uint64_t obs_count) {
  json j;
  j["format_version"] = kSketchFormatVersion;
  j["est_type"] = est_type;
  j["order_n"] = order_n;
  j["standardize"] = standardize;
  if (lambda) {
    j["lambda"] = *lambda;
  } else {
    j["lambda"] = nullptr;
  }
  j["obs_count"] = obs_count;
  return j;
}

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw data_error(std::string("sketch file: missing section '") + key + "'");
  return *it;
}

}  // namespace

std::string serialize(const UnivariateSketch& s) {
  json j = header("univariate", s.order_n(), s.standardize(), s.exp_weight_lambda(), s.count());
  j["moments"] = json::array({moments_to_json(s.moments())});
  j["coefficients"] = s.coefficients();
  return j.dump(2) + "\n";
}

std::string serialize(const BivariateSketch& s) {
  json j = header("bivariate", s.order_n(), s.standardize(), s.exp_weight_lambda(), s.count());
  j["moments"] = json::array({moments_to_json(s.moments_x()), moments_to_json(s.moments_y())});
  j["coefficients"] = s.coefficient_matrix();
  j["marginal_x"] = s.marginal_x();
  j["marginal_y"] = s.marginal_y();
  return j.dump(2) + "\n";
}

std::string serialize(const AnySketch& sketch) {
  return std::visit([](const auto& s) { return serialize(s); }, sketch);
}

AnySketch deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("sketch file: not a well-formed document: ") + e.what());
  }
  const auto& version = require(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kSketchFormatVersion) {
    throw data_error("sketch file: unsupported format_version (expected " +
                     std::to_string(kSketchFormatVersion) + ")");
  }
  const std::string est_type = require(j, "est_type").get<std::string>();
  const int order_n = require(j, "order_n").get<int>();
  const bool standardize = require(j, "standardize").get<bool>();
  std::optional<double> lambda;
  const auto& jl = require(j, "lambda");
  if (!jl.is_null()) {
    if (!jl.is_number() || !std::isfinite(jl.get<double>())) {
      throw data_error("sketch file: 'lambda' must be null or a finite number");
    }
    lambda = jl.get<double>();
  }
  const auto obs_count = require(j, "obs_count").get<std::uint64_t>();
  const auto& jm = require(j, "moments");
  if (!jm.is_array()) throw data_error("sketch file: 'moments' must be an array");

  try {
    if (est_type == "univariate") {
      if (jm.size() != 1) throw data_error("sketch file: univariate sketches carry one moments entry");
      auto coefficients = finite_array(require(j, "coefficients"), "coefficients");
      if (coefficients.size() != static_cast<std::size_t>(order_n) + 1) {
        throw data_error("sketch file: 'coefficients' length does not match order_n");
      }
      return UnivariateSketch::restore(order_n, standardize, lambda, obs_count,
                                       moments_from_json(jm.at(0), lambda),
                                       std::move(coefficients));
    }
    if (est_type == "bivariate") {
      if (jm.size() != 2) throw data_error("sketch file: bivariate sketches carry two moments entries");
      auto coefficients = finite_array(require(j, "coefficients"), "coefficients");
      auto marginal_x = finite_array(require(j, "marginal_x"), "marginal_x");
      auto marginal_y = finite_array(require(j, "marginal_y"), "marginal_y");
      const std::size_t m = static_cast<std::size_t>(order_n) + 1;
      if (coefficients.size() != m * m || marginal_x.size() != m || marginal_y.size() != m) {
        throw data_error("sketch file: coefficient array lengths do not match order_n");
      }
      return BivariateSketch::restore(order_n, standardize, lambda, obs_count,
                                      moments_from_json(jm.at(0), lambda),
                                      moments_from_json(jm.at(1), lambda),
                                      std::move(coefficients), std::move(marginal_x),
                                      std::move(marginal_y));
    }
  } catch (const data_error&) {
    throw;
  } catch (const std::exception& e) {
    throw data_error(std::string("sketch file: invalid state: ") + e.what());
  }
  throw data_error("sketch file: unknown est_type '" + est_type + "'");
}

AnySketch load_sketch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("sketch file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

void save_sketch(const std::string& path, const AnySketch& sketch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("sketch file: cannot write '" + path + "'");
  out << serialize(sketch);
  if (!out) throw data_error("sketch file: write to '" + path + "' failed");
}

}  // namespace hermsketch
