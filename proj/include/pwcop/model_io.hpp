#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwcop/changepoint.hpp"
#include "pwcop/copula.hpp"
#include "pwcop/dependence.hpp"
#include "pwcop/empirical.hpp"
#include "pwcop/families.hpp"
#include "pwcop/gluing.hpp"
#include "pwcop/marginal.hpp"
#include "pwcop/reference_models.hpp"
#include "pwcop/regression.hpp"

namespace pwcop::io {

using nlohmann::json;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------------------
// Copulas

inline json to_json(const Copula& c) {
  if (c.family() == Family::glued) {
    const auto& glued = dynamic_cast<const pwcop::detail::GluedModel&>(c.model());
    json pieces = json::array();
    for (const auto& p : glued.pieces()) pieces.push_back(to_json(p));
    return {{"family", "glued"}, {"pieces", pieces}, {"gluing_points", glued.gluing_points()}};
  }
  const Family f = c.family();
  if (family_arity(f) < 0 && f != Family::example4 && f != Family::example4_left &&
      f != Family::example4_right)
    throw std::invalid_argument("copula family '" + std::string(family_name(f)) +
                                "' cannot be serialized");
  return {{"family", std::string(family_name(f))}, {"params", c.parameters()}};
}

inline Copula copula_from_json(const json& j) {
  const std::string name = j.at("family").get<std::string>();
  const auto f = family_from_name(name);
  if (!f) throw DataError("unknown copula family '" + name + "'");
  if (*f == Family::glued) {
    std::vector<Copula> pieces;
    for (const auto& p : j.at("pieces")) pieces.push_back(copula_from_json(p));
    return glue(std::move(pieces), j.at("gluing_points").get<std::vector<double>>());
  }
  const auto params = j.value("params", std::vector<double>{});
  if (*f == Family::example4 || *f == Family::example4_left || *f == Family::example4_right) {
    if (params.size() != 1) throw DataError(name + " takes one parameter (k)");
    auto model = make_example4_model(params[0]);
    if (*f == Family::example4) return example4_copula(model);
    auto [left, right] = example4_pieces(model);
    return *f == Family::example4_left ? left : right;
  }
  return make_family(*f, params);
}

// ---------------------------------------------------------------------------------------
// Marginals

inline json to_json(const MarginalModel& m) {
  const MarginalImpl& impl = m.impl();
  if (const auto* u = dynamic_cast<const UniformMarginal*>(&impl))
    return {{"type", "uniform"}, {"lo", u->lo()}, {"hi", u->hi()}};
  if (const auto* e = dynamic_cast<const EmpiricalMarginal*>(&impl))
    return {{"type", "empirical"}, {"x", e->knots_x()}, {"p", e->knots_p()}};
  if (const auto* f = dynamic_cast<const FunctionMarginal*>(&impl))
    return {{"type", f->name()}, {"params", f->params()}};
  throw std::invalid_argument("marginal cannot be serialized");
}

inline MarginalModel marginal_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") return uniform_marginal(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (type == "empirical")
    return MarginalModel(std::make_shared<EmpiricalMarginal>(j.at("x").get<std::vector<double>>(),
                                                             j.at("p").get<std::vector<double>>()));
  if (type == "example4_y") {
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != 1) throw DataError("example4_y marginal takes one parameter (k)");
    return example4_y_marginal(make_example4_model(params[0]));
  }
  throw DataError("unknown marginal type '" + type + "'");
}

// ---------------------------------------------------------------------------------------
// Model documents

inline json to_json(const PiecewiseRegressionModel& m) {
  json segments = json::array();
  for (const auto& c : m.segment_copulas()) segments.push_back(to_json(c));
  return {{"format", "pwcop-model"},
          {"version", kModelFormatVersion},
          {"break_points", m.break_points()},
          {"segments", segments},
          {"marginal_x", to_json(m.marginal_x())},
          {"marginal_y", to_json(m.marginal_y())}};
}

inline PiecewiseRegressionModel model_from_json(const json& j) {
  try {
    if (!j.contains("version")) throw DataError("model document lacks a version field");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("unsupported model document version " + std::to_string(version));
    std::vector<Copula> copulas;
    for (const auto& s : j.at("segments")) copulas.push_back(copula_from_json(s));
    return PiecewiseRegressionModel(j.at("break_points").get<std::vector<double>>(), std::move(copulas),
                                    marginal_from_json(j.at("marginal_x")),
                                    marginal_from_json(j.at("marginal_y")));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid model document: ") + e.what());
  }
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string serialize(const json& j) { return j.dump(2) + "\n"; }

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------------------
// Reports

inline json to_json(const DependenceReport& r) {
  return {{"schema_version", kReportSchemaVersion},
          {"rho", r.rho},
          {"sigma", r.sigma},
          {"quadrant_class", std::string(to_string(r.quadrant_class))},
          {"regression_class", std::string(to_string(r.regression_class))},
          {"grid_n", r.grid_n},
          {"tolerance", r.tolerance}};
}

inline json to_json(const CrossingReport& r) {
  json crossings = json::array();
  for (const auto& c : r.crossings)
    crossings.push_back({{"t", c.t}, {"direction", std::string(to_string(c.direction))}});
  return {{"crossings", crossings},
          {"touches", r.touches},
          {"grid_n", r.grid_n},
          {"tolerance", r.tolerance},
          {"persistence", r.persistence}};
}

inline json to_json(const FitResult& f) {
  json candidates = json::array();
  for (const auto& c : f.candidates) {
    json cj = {{"family", std::string(family_name(c.family))}, {"params", c.parameters},
               {"skipped", c.skipped}};
    if (c.skipped)
      cj["note"] = c.note;
    else {
      cj["rho"] = c.rho_model;
      cj["gof_distance"] = c.gof_distance;
    }
    candidates.push_back(std::move(cj));
  }
  return {{"family", std::string(family_name(f.family))},
          {"params", f.parameters},
          {"rho_hat", f.rho_hat},
          {"gof_distance", f.gof_distance},
          {"segment", {f.segment.lo, f.segment.hi}},
          {"n", f.n},
          {"candidates", candidates}};
}

// ---------------------------------------------------------------------------------------
// CSV

enum class HeaderMode { automatic, present, absent };

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::optional<double> parse_number(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

/// Reads the first two columns of a comma-separated file. Blank lines are skipped; every
/// other row must hold two finite numbers, and failing rows are reported by line number.
inline Sample read_csv_sample(std::istream& in, HeaderMode header = HeaderMode::automatic) {
  std::vector<Observation> obs;
  std::vector<std::size_t> bad_lines;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    std::optional<double> x, y;
    if (fields.size() >= 2) {
      x = detail::parse_number(fields[0]);
      y = detail::parse_number(fields[1]);
    }
    const bool numeric = x && y;
    if (first_content) {
      first_content = false;
      if (header == HeaderMode::present || (header == HeaderMode::automatic && !numeric)) continue;
    }
    if (!numeric) {
      bad_lines.push_back(line_no);
      continue;
    }
    obs.push_back({*x, *y});
  }
  if (!bad_lines.empty()) {
    std::string msg = "unparseable rows at line(s)";
    for (std::size_t i = 0; i < bad_lines.size() && i < 20; ++i) msg += " " + std::to_string(bad_lines[i]);
    if (bad_lines.size() > 20) msg += " ... (" + std::to_string(bad_lines.size()) + " total)";
    throw DataError(msg);
  }
  return Sample(std::move(obs));
}

inline Sample read_csv_sample(const std::string& path, HeaderMode header = HeaderMode::automatic) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv_sample(in, header);
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline void write_csv_sample(std::ostream& out, const Sample& s) {
  out << "x,y\n";
  for (const auto& o : s.observations()) out << format_double(o.x) << ',' << format_double(o.y) << '\n';
}

}  // namespace pwcop::io
