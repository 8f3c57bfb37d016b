#pragma once

// Model documents (JSON in), scan reports (CSV and JSON out), raw sample dumps.
//
// Model document:
//   {"gaussian_var": 1.0,
//    "measure": {"family": "PowerTail",
//                "params": {"amplitude": 3, "index": 3, "cut": 1, "side": "positive"}},
//    "run": {"t_min": 1, "t_max": 1e6, "points": 50, "samples": 100000,
//            "seed": 1, "alpha": 0.01}}          // "run" is optional
// kappa and the drift are derived; any such fields in the document are ignored.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyclt/errors.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/measure.hpp"
#include "levyclt/verify.hpp"

namespace levyclt {

using json = nlohmann::json;

struct RunOverrides {
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<std::size_t> points;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
};

struct ModelDocument {
  double gaussian_var = 0.0;
  MeasureSpec measure;
  RunOverrides run;
};

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DocumentError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline double number_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw DocumentError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number_field(obj, key, where);
}

inline Side side_field(const json& params, const std::string& where) {
  if (!params.contains("side")) return Side::positive;
  const auto& v = params.at("side");
  if (!v.is_string()) throw DocumentError(where + ": 'side' must be a string");
  const auto s = v.get<std::string>();
  if (s == "positive") return Side::positive;
  if (s == "negative") return Side::negative;
  if (s == "symmetric") return Side::symmetric;
  throw DocumentError(where + ": unknown side '" + s + "'");
}

inline Component parse_component(const std::string& family, const json& params,
                                 const std::string& where) {
  if (family == "PowerTail") {
    PowerTail m;
    m.amplitude = number_field(params, "amplitude", where);
    m.index = number_field(params, "index", where);
    m.cut = number_field(params, "cut", where);
    m.side = side_field(params, where);
    return m;
  }
  if (family == "LogPerturbedPowerTail") {
    LogPerturbedPowerTail m;
    m.gamma = number_field(params, "gamma", where);
    m.amplitude = number_or(params, "amplitude", 1.0, where);
    m.side = side_field(params, where);
    return m;
  }
  if (family == "CompoundPoissonParametric") {
    if (params.contains("jump_law") &&
        !(params.at("jump_law").is_string() && params.at("jump_law").get<std::string>() == "normal")) {
      throw DocumentError(where + ": only the 'normal' jump_law is supported");
    }
    GaussianJumps m;
    m.rate = number_field(params, "rate", where);
    m.mean = number_or(params, "jump_mean", 0.0, where);
    m.sd = number_field(params, "jump_sd", where);
    return m;
  }
  throw DocumentError(where + ": unknown family '" + family + "'");
}

inline std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw DocumentError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline const json& params_of(const json& measure, const std::string& where) {
  static const json empty = json::object();
  if (!measure.contains("params")) return empty;
  const auto& p = measure.at("params");
  if (!p.is_object()) throw DocumentError(where + ": 'params' must be an object");
  return p;
}

inline MeasureSpec parse_measure(const json& measure) {
  const std::string where = "measure";
  if (!measure.is_object()) throw DocumentError("measure must be an object");
  const auto family = string_field(measure, "family", where);
  const auto& params = params_of(measure, where);
  if (family == "Zero") return MeasureSpec::zero();
  if (family == "TwoSidedMixture") {
    const auto& list = require(params, "components", where);
    if (!list.is_array()) throw DocumentError(where + ": 'components' must be an array");
    std::vector<Component> parts;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = where + ".components[" + std::to_string(i) + "]";
      const auto& item = list[i];
      if (!item.is_object()) throw DocumentError(at + " must be an object");
      const auto sub = string_field(item, "family", at);
      if (sub == "Zero") continue;
      parts.push_back(parse_component(sub, params_of(item, at), at));
    }
    return MeasureSpec::mixture(std::move(parts));
  }
  auto c = parse_component(family, params, where);
  return std::visit(
      [](auto&& m) -> MeasureSpec {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PowerTail>) return MeasureSpec::power_tail(m);
        if constexpr (std::is_same_v<T, LogPerturbedPowerTail>) {
          return MeasureSpec::log_perturbed_power_tail(m);
        }
        if constexpr (std::is_same_v<T, GaussianJumps>) return MeasureSpec::compound_poisson(m);
      },
      c);
}

template <class T>
std::optional<T> optional_field(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const auto& v = obj.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
      throw DocumentError(std::string("run: field '") + key + "' must be a nonnegative integer");
    }
  } else if (!v.is_number()) {
    throw DocumentError(std::string("run: field '") + key + "' must be a number");
  }
  return v.get<T>();
}

}  // namespace detail

/// Throws DocumentError for structural problems and ModelError (or a
/// subclass) when a parameter violates a family invariant.
inline ModelDocument parse_model_document(const json& doc) {
  if (!doc.is_object()) throw DocumentError("model document must be a JSON object");
  ModelDocument out;
  out.gaussian_var = detail::number_field(doc, "gaussian_var", "document");
  out.measure = detail::parse_measure(detail::require(doc, "measure", "document"));
  if (doc.contains("run")) {
    const auto& run = doc.at("run");
    if (!run.is_object()) throw DocumentError("run must be an object");
    out.run.t_min = detail::optional_field<double>(run, "t_min");
    out.run.t_max = detail::optional_field<double>(run, "t_max");
    out.run.points = detail::optional_field<std::size_t>(run, "points");
    out.run.samples = detail::optional_field<std::size_t>(run, "samples");
    out.run.seed = detail::optional_field<std::uint64_t>(run, "seed");
    out.run.alpha = detail::optional_field<double>(run, "alpha");
  }
  return out;
}

inline ModelDocument parse_model_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DocumentError(std::string("malformed JSON: ") + e.what());
  }
  return parse_model_document(doc);
}

inline ModelDocument read_model_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open model document '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_document(buffer.str());
}

inline LevyModel to_model(const ModelDocument& doc) { return build_model(doc.gaussian_var, doc.measure); }

// ---- output ---------------------------------------------------------------

inline json component_json(const Component& c) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PowerTail>) {
          return {{"family", "PowerTail"},
                  {"params",
                   {{"amplitude", m.amplitude}, {"index", m.index}, {"cut", m.cut},
                    {"side", detail::side_name(m.side)}}}};
        } else if constexpr (std::is_same_v<T, LogPerturbedPowerTail>) {
          return {{"family", "LogPerturbedPowerTail"},
                  {"params",
                   {{"gamma", m.gamma}, {"amplitude", m.amplitude},
                    {"side", detail::side_name(m.side)}}}};
        } else {
          return {{"family", "CompoundPoissonParametric"},
                  {"params",
                   {{"rate", m.rate}, {"jump_law", "normal"}, {"jump_mean", m.mean},
                    {"jump_sd", m.sd}}}};
        }
      },
      c);
}

inline json measure_json(const MeasureSpec& m) {
  switch (m.family()) {
    case Family::zero:
      return {{"family", "Zero"}, {"params", json::object()}};
    case Family::two_sided_mixture: {
      json parts = json::array();
      for (const auto& c : m.components()) parts.push_back(component_json(c));
      return {{"family", "TwoSidedMixture"}, {"params", {{"components", parts}}}};
    }
    default:
      return component_json(m.components().front());
  }
}

inline json model_json(const LevyModel& model) {
  return {{"gaussian_var", model.gaussian_var()}, {"measure", measure_json(model.measure())}};
}

inline json verdict_json(const MomentVerdict& v) {
  json out = {{"status", verdict_name(v.status)}};
  out["value"] = v.value ? json(*v.value) : json(nullptr);
  return out;
}

inline json estimate_json(const DistanceEstimate& e) {
  return {{"value", e.value}, {"n", e.n}, {"dkw_slack", e.dkw_slack}, {"alpha", e.alpha}};
}

inline json bound_json(const BoundBreakdown& b) {
  return {{"t", b.t},
          {"p_big_jump", b.p_big_jump},
          {"berry_esseen", b.berry_esseen},
          {"centering", b.centering},
          {"total", b.total}};
}

inline json report_json(const ScanReport& report, const LevyModel& model) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"sigma_t", r.sigma_t},
                    {"ks_sigma_t", estimate_json(r.ks_sigma_t)},
                    {"ks_sigma", estimate_json(r.ks_sigma)},
                    {"bound", bound_json(r.bound)},
                    {"small_jump_eps", r.small_jump_eps},
                    {"substitution_bound", r.substitution_bound},
                    {"integral_sigma_t", r.integral_sigma_t},
                    {"integral_sigma", r.integral_sigma},
                    {"integral_slack", r.integral_slack}});
  }
  json out = {{"model", model_json(model)},
              {"sigma", report.sigma},
              {"kappa", report.kappa},
              {"samples", report.samples},
              {"alpha", report.alpha},
              {"seed", report.seed},
              {"rows", rows}};
  if (!report.rows.empty()) {
    const auto a = decay_integral(report, Normalization::sigma_t);
    const auto b = decay_integral(report, Normalization::sigma);
    out["integrals"] = {{"sigma_t", {{"estimate", a.estimate}, {"slack", a.slack}}},
                        {"sigma", {{"estimate", b.estimate}, {"slack", b.slack}}}};
  }
  return out;
}

/// Formats with 17 significant digits.
inline std::string format_real(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

inline constexpr const char* report_csv_header =
    "t,ks_sigma_t,slack,ks_sigma,p_big_jump,berry_esseen,centering,bound_total,integral_sigma_t,"
    "integral_sigma";

inline void write_report_csv(std::ostream& out, const ScanReport& report) {
  out << report_csv_header << '\n';
  for (const auto& r : report.rows) {
    const std::array<double, 10> cols{r.t,
                                      r.ks_sigma_t.value,
                                      r.ks_sigma_t.dkw_slack,
                                      r.ks_sigma.value,
                                      r.bound.p_big_jump,
                                      r.bound.berry_esseen,
                                      r.bound.centering,
                                      r.bound.total,
                                      r.integral_sigma_t,
                                      r.integral_sigma};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      out << format_real(cols[i]);
    }
    out << '\n';
  }
}

/// Little-endian IEEE-754 binary64, no header.
inline void write_samples_binary(std::ostream& out, std::span<const double> values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
  }
}

inline std::vector<double> read_samples_binary(std::istream& in) {
  std::vector<double> out;
  std::array<unsigned char, 8> bytes{};
  while (in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

inline void write_samples_csv(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_real(v) << '\n';
}

}  // namespace levyclt
