// pwcop: simulate reference models, detect break-points, fit piecewise copula
// regressions, predict regression curves and compute dependence measures.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwcop/model_io.hpp"
#include "pwcop/pwcop.hpp"

namespace {

using pwcop::io::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

pwcop::io::HeaderMode header_mode(const std::string& s) {
  if (s == "auto") return pwcop::io::HeaderMode::automatic;
  if (s == "yes") return pwcop::io::HeaderMode::present;
  return pwcop::io::HeaderMode::absent;
}

// Writes to `path`, or standard output when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pwcop::DataError("cannot write '" + path + "'");
  out << text;
}

std::vector<pwcop::Family> parse_families(const std::vector<std::string>& names) {
  std::vector<pwcop::Family> out;
  for (const auto& name : names) {
    const auto f = pwcop::family_from_name(name);
    if (!f || pwcop::family_arity(*f) < 0 || *f == pwcop::Family::example1)
      throw UsageError("unknown or non-fittable family '" + name + "'");
    out.push_back(*f);
  }
  return out;
}

struct SimulateOptions {
  std::string model;
  double theta = 0.5;
  double k = 0.1;
  long long n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateOptions& o) {
  if (o.n < 1) throw UsageError("--n must be >= 1");
  const auto n = static_cast<std::size_t>(o.n);
  const pwcop::Sample s = o.model == "example1" ? pwcop::simulate_example1(n, o.theta, o.seed)
                                                : pwcop::simulate_example4(n, o.k, o.seed);
  std::ostringstream os;
  pwcop::io::write_csv_sample(os, s);
  emit(o.out, os.str());
  return kOk;
}

struct AnalyzeOptions {
  std::string in;
  std::string header = "auto";
  pwcop::DetectionParams detection;
  std::string out;
};

int run_analyze(const AnalyzeOptions& o) {
  const pwcop::Sample s = pwcop::io::read_csv_sample(o.in, header_mode(o.header));
  const auto ps = pwcop::pseudo_observations(s);
  const auto detection = pwcop::empirical_breakpoints(s, o.detection);
  json warnings = json::array();
  if (detection.small_sample)
    warnings.push_back("sample size " + std::to_string(s.size()) + " below the recommended " +
                       std::to_string(pwcop::kRecommendedSampleSize));
  const json report = {
      {"schema_version", pwcop::io::kReportSchemaVersion},
      {"n", s.size()},
      {"rho_hat", pwcop::sample_spearman(ps)},
      {"sigma_hat", pwcop::schweizer_wolff_sigma(pwcop::make_empirical_copula(ps))},
      {"mixed_dependence", detection.mixed_dependence},
      {"diagonal", pwcop::io::to_json(detection.report)},
      {"gluing_points", detection.gluing_points},
      {"candidates", detection.break_points},
      {"warnings", warnings}};
  emit(o.out, pwcop::io::serialize(report));
  return kOk;
}

struct FitOptions {
  std::string in;
  std::string header = "auto";
  std::vector<double> break_points;
  std::vector<std::string> families;
  pwcop::DetectionParams detection;
  std::string out;
};

int run_fit(const FitOptions& o) {
  const pwcop::Sample s = pwcop::io::read_csv_sample(o.in, header_mode(o.header));
  const auto families = o.families.empty() ? pwcop::default_fit_families() : parse_families(o.families);
  std::optional<std::vector<double>> bps;
  if (!o.break_points.empty()) bps = o.break_points;
  const auto fit = pwcop::fit_piecewise(s, bps, families, o.detection);
  emit(o.out, pwcop::io::serialize(pwcop::io::to_json(fit.model)));

  std::cout << std::left << std::setw(8) << "segment" << std::setw(26) << "interval" << std::setw(7)
            << "n" << std::setw(15) << "family" << std::setw(14) << "param" << std::setw(11)
            << "rho_hat" << "gof" << '\n';
  for (std::size_t i = 0; i < fit.segments.size(); ++i) {
    const auto& r = fit.segments[i];
    std::ostringstream interval, param;
    interval << std::setprecision(5) << '[' << r.segment.lo << ", " << r.segment.hi << ']';
    param << std::setprecision(5);
    if (r.parameters.empty())
      param << '-';
    else
      param << r.parameters[0];
    std::cout << std::left << std::setw(8) << i + 1 << std::setw(26) << interval.str() << std::setw(7)
              << r.n << std::setw(15) << pwcop::family_name(r.family) << std::setw(14) << param.str()
              << std::setw(11) << std::setprecision(5) << r.rho_hat << std::setprecision(4)
              << r.gof_distance << '\n';
  }
  return kOk;
}

struct PredictOptions {
  std::string model;
  double from = 0.0, to = 1.0;
  int steps = 101;
  std::vector<double> xs;
  std::string statistic = "median";
  bool strict = false;
  std::string out;
};

int run_predict(const PredictOptions& o) {
  std::ifstream in(o.model);
  if (!in) throw pwcop::DataError("cannot open '" + o.model + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto model = pwcop::io::model_from_json(pwcop::io::parse_json_text(buffer.str()));
  const auto statistic = o.statistic == "mean" ? pwcop::Statistic::mean : pwcop::Statistic::median;

  std::vector<double> grid = o.xs;
  if (grid.empty()) {
    if (o.steps < 1) throw UsageError("--steps must be >= 1");
    for (int i = 0; i < o.steps; ++i)
      grid.push_back(o.steps == 1 ? o.from : o.from + (o.to - o.from) * i / (o.steps - 1));
  }
  std::ostringstream os;
  os << "x,mu\n";
  std::size_t outside = 0;
  for (double x : grid) {
    double mu = std::numeric_limits<double>::quiet_NaN();
    if (model.marginal_x().contains(x)) {
      mu = pwcop::piecewise_regression(model, x, statistic);
    } else if (o.strict) {
      throw pwcop::DomainError("x = " + pwcop::io::format_double(x) + " outside the model support");
    } else {
      ++outside;
    }
    os << pwcop::io::format_double(x) << ',' << (std::isnan(mu) ? "nan" : pwcop::io::format_double(mu))
       << '\n';
  }
  if (outside > 0)
    std::cerr << "warning: " << outside << " x value(s) outside the model support; wrote nan\n";
  emit(o.out, os.str());
  return kOk;
}

struct MeasuresOptions {
  std::string family;
  std::optional<double> theta;
  double k = 0.1;
  std::string data;
  std::string header = "auto";
  int quad_n = 0;
  std::string out;
};

int run_measures(const MeasuresOptions& o) {
  if (o.family.empty() == o.data.empty()) throw UsageError("give exactly one of --family or --data");
  json doc;
  if (!o.family.empty()) {
    const auto f = pwcop::family_from_name(o.family);
    if (!f) throw UsageError("unknown family '" + o.family + "'");
    std::optional<pwcop::Copula> c;
    if (*f == pwcop::Family::example4 || *f == pwcop::Family::example4_left ||
        *f == pwcop::Family::example4_right) {
      c = pwcop::io::copula_from_json({{"family", o.family}, {"params", {o.k}}});
    } else {
      const int arity = pwcop::family_arity(*f);
      if (arity < 0) throw UsageError("family '" + o.family + "' needs a data set");
      if (arity == 1 && !o.theta) throw UsageError("family '" + o.family + "' needs --theta");
      std::vector<double> params;
      if (arity == 1) params.push_back(*o.theta);
      c = pwcop::make_family(*f, params);
    }
    doc = pwcop::io::to_json(pwcop::dependence_report(*c, {o.quad_n}));
    doc["copula"] = pwcop::io::to_json(*c);
  } else {
    const pwcop::Sample s = pwcop::io::read_csv_sample(o.data, header_mode(o.header));
    const auto c = pwcop::make_empirical_copula(pwcop::pseudo_observations(s));
    const double tol = 1.0 / std::sqrt(static_cast<double>(s.size()));
    doc = pwcop::io::to_json(pwcop::dependence_report(c, {o.quad_n, pwcop::kClassificationGrid, tol}));
    doc["n"] = s.size();
  }
  emit(o.out, pwcop::io::serialize(doc));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise copula regression toolkit"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a reference model as x,y CSV");
  simulate->add_option("model", sim.model, "example1 | example4")
      ->required()
      ->check(CLI::IsMember({"example1", "example4"}));
  simulate->add_option("--theta", sim.theta, "Tent peak location (example1)");
  simulate->add_option("--k", sim.k, "Noise scale (example4)");
  simulate->add_option("--n", sim.n, "Number of pairs")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("-o,--out", sim.out, "Output CSV (default: stdout)");

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Detect break-point candidates in a data set");
  analyze->add_option("input", ana.in, "Two-column CSV")->required();
  analyze->add_option("--header", ana.header, "auto | yes | no")->check(CLI::IsMember({"auto", "yes", "no"}));
  analyze->add_option("--grid", ana.detection.grid_n, "Diagonal grid size")->check(CLI::Range(64, 1 << 20));
  analyze->add_option("--persistence", ana.detection.persistence, "Points a sign must persist")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--tol-scale", ana.detection.tol_scale, "Tolerance band = scale / sqrt(n)")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("-o,--out", ana.out, "Output JSON (default: stdout)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a piecewise copula regression model");
  fit_cmd->add_option("input", fit.in, "Two-column CSV")->required();
  fit_cmd->add_option("--breakpoints", fit.break_points, "Break-points in x (comma separated)")
      ->delimiter(',');
  fit_cmd->add_option("--families", fit.families, "Candidate families (comma separated)")->delimiter(',');
  fit_cmd->add_option("--header", fit.header, "auto | yes | no")->check(CLI::IsMember({"auto", "yes", "no"}));
  fit_cmd->add_option("--grid", fit.detection.grid_n, "Diagonal grid size")->check(CLI::Range(64, 1 << 20));
  fit_cmd->add_option("--persistence", fit.detection.persistence, "Points a sign must persist")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tol-scale", fit.detection.tol_scale, "Tolerance band = scale / sqrt(n)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("-o,--out", fit.out, "Output model JSON")->required();

  PredictOptions pred;
  auto* predict = app.add_subcommand("predict", "Evaluate a fitted model's regression curve");
  predict->add_option("model", pred.model, "Model JSON")->required();
  predict->add_option("--from", pred.from, "Grid start");
  predict->add_option("--to", pred.to, "Grid end");
  predict->add_option("--steps", pred.steps, "Grid points");
  predict->add_option("--x", pred.xs, "Explicit x values (comma separated)")->delimiter(',');
  predict->add_option("--statistic", pred.statistic, "median | mean")
      ->check(CLI::IsMember({"median", "mean"}));
  predict->add_flag("--strict", pred.strict, "Fail on x outside the model support");
  predict->add_option("-o,--out", pred.out, "Output CSV (default: stdout)");

  MeasuresOptions meas;
  auto* measures = app.add_subcommand("measures", "Dependence measures of a copula or data set");
  measures->add_option("--family", meas.family, "Copula family name");
  measures->add_option("--theta", meas.theta, "Family parameter");
  measures->add_option("--k", meas.k, "Noise scale for the example4 copulas");
  measures->add_option("--data", meas.data, "Two-column CSV");
  measures->add_option("--header", meas.header, "auto | yes | no")->check(CLI::IsMember({"auto", "yes", "no"}));
  measures->add_option("--quad-n", meas.quad_n, "Quadrature nodes per axis (0: default)");
  measures->add_option("-o,--out", meas.out, "Output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (analyze->parsed()) return run_analyze(ana);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (predict->parsed()) return run_predict(pred);
    if (measures->parsed()) return run_measures(meas);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pwcop::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const pwcop::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const pwcop::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
