#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "backflow/bm.hpp"
#include "backflow/error.hpp"
#include "backflow/extremal.hpp"
#include "backflow/flux.hpp"
#include "backflow/lattice.hpp"

namespace backflow::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();

// Binds CLI11 options straight into a per-command parameter map. std::map
// nodes never move, so the references handed to CLI11 stay valid.
class Registry {
 public:
  Registry(CLI::App* app, std::map<std::string, ParamValue>* params, std::string* out)
      : app_(app), params_(params), out_(out) {}

  void integer(const std::string& key, std::int64_t fallback, const std::string& help) {
    auto& slot = params_->insert_or_assign(key, ParamValue{fallback}).first->second;
    app_->add_option("--" + key, std::get<std::int64_t>(slot), help)->capture_default_str();
  }

  void real(const std::string& key, double fallback, const std::string& help) {
    auto& slot = params_->insert_or_assign(key, ParamValue{fallback}).first->second;
    auto* opt = app_->add_option("--" + key, std::get<double>(slot), help);
    if (!std::isnan(fallback)) opt->capture_default_str();
  }

  void text(const std::string& key, const std::string& fallback, const std::string& help) {
    auto& slot = params_->insert_or_assign(key, ParamValue{fallback}).first->second;
    app_->add_option("--" + key, std::get<std::string>(slot), help)->capture_default_str();
  }

  void chain() {
    text("chain", "ring", "chain boundary: infinite or ring");
    integer("n", 9, "ring site count N");
    real("epsilon", 0.0, "hopping bias epsilon");
    real("tau", 1.0, "coupling strength tau");
    real("hbar", 1.0, "reduced Planck constant");
  }

  void output(const std::string& fallback) {
    app_->add_option("--out", *out_, "output file (default: stdout)");
    text("format", fallback, "output format: csv or json");
  }

  void threads() { integer("threads", 1, "worker threads (0: all cores)"); }

 private:
  CLI::App* app_;
  std::map<std::string, ParamValue>* params_;
  std::string* out_;
};

unsigned thread_count(const RunConfig& c) {
  const std::int64_t t = c.integer("threads");
  if (t < 0) throw Error(ErrorCode::InvalidParams, "--threads must be >= 0");
  if (t == 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(t);
}

int to_int(std::int64_t v, const std::string& key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::InvalidParams, "--" + key + " out of range");
  }
  return static_cast<int>(v);
}

ChainParams make_params(const RunConfig& c) {
  const std::string& chain = c.text("chain");
  const double eps = c.real("epsilon");
  const double tau = c.real("tau");
  const double hbar = c.real("hbar");
  if (chain == "infinite") return ChainParams::infinite(eps, tau, hbar);
  if (chain != "ring") throw UsageError{"--chain must be 'infinite' or 'ring'"};
  const int n = to_int(c.integer("n"), "n");
  if (n == 1 || n == 2) {
    throw Error(ErrorCode::WindowTooSmall, "a ring of " + std::to_string(n) + " site(s) has a single positive-momentum mode");
  }
  return ChainParams::ring(n, eps, tau, hbar);
}

Branch parse_branch(const std::string& text) {
  if (text == "plus") return Branch::Plus;
  if (text == "minus") return Branch::Minus;
  throw UsageError{"--branch must be 'plus' or 'minus'"};
}

std::vector<double> time_grid(double lo, double hi, std::int64_t steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidParams, "--t-steps must be >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::InvalidParams, "time range must be finite");
  if (steps > 1 && !(lo < hi)) throw Error(ErrorCode::InvalidParams, "time range needs t-min < t-max");
  return linspace(lo, hi, static_cast<int>(steps));
}

template <typename Fn>
void emit(const RunConfig& c, std::ostream& out, Fn&& write) {
  if (c.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError{"cannot open output file " + c.out};
  write(file);
}

void write_json(std::ostream& os, const Json& doc) { os << doc.dump(2) << '\n'; }

// Companion JSON of a CSV emission: next to --out, or on the error stream.
void emit_sidecar(const RunConfig& c, std::ostream& err, const Json& doc) {
  if (c.out.empty()) {
    write_json(err, doc);
    return;
  }
  const std::string path = c.out + ".json";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError{"cannot open output file " + path};
  write_json(file, doc);
}

void write_rows(std::ostream& os, const std::vector<FluxSeries>& series) {
  os << "t,site,flux\n";
  if (series.empty()) return;
  for (std::size_t i = 0; i < series.front().samples.size(); ++i) {
    for (const FluxSeries& s : series) {
      os << format_number(s.samples[i].t) << ',' << s.site << ',' << format_number(s.samples[i].flux) << '\n';
    }
  }
}

Json rows_json(const std::vector<FluxSeries>& series) {
  Json rows = Json::array();
  if (series.empty()) return rows;
  for (std::size_t i = 0; i < series.front().samples.size(); ++i) {
    for (const FluxSeries& s : series) {
      rows.push_back({{"t", s.samples[i].t}, {"site", s.site}, {"flux", s.samples[i].flux}});
    }
  }
  return rows;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const ChainParams p = make_params(c);
  const FluxBounds b = p.is_ring() ? ring_bounds(p) : infinite_bounds(p);
  Json doc;
  doc["lambda_plus"] = b.lambda_plus;
  doc["lambda_minus"] = b.lambda_minus;
  std::string eta1;
  std::string eta2;
  if (const auto* w = std::get_if<DiscreteWindow>(&b.window)) {
    doc["eta1"] = w->eta1;
    doc["eta2"] = w->eta2;
    eta1 = std::to_string(w->eta1);
    eta2 = std::to_string(w->eta2);
  } else {
    doc["eta1"] = nullptr;
    doc["eta2"] = nullptr;
  }
  doc["xi"] = p.xi();
  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Json) {
      write_json(os, doc);
      return;
    }
    os << "lambda_plus,lambda_minus,eta1,eta2,xi\n"
       << format_number(b.lambda_plus) << ',' << format_number(b.lambda_minus) << ',' << eta1 << ',' << eta2
       << ',' << format_number(p.xi()) << '\n';
  });
  return kExitOk;
}

int cmd_flux_series(const RunConfig& c, std::ostream& out) {
  const ChainParams p = make_params(c);
  const Branch branch = parse_branch(c.text("branch"));
  const int jprime = to_int(c.integer("jprime"), "jprime");
  const double tprime = c.real("tprime");

  std::vector<int> sites;
  if (c.text("sites") == "auto") {
    if (p.is_ring()) {
      for (int j = 0; j < p.sites(); ++j) sites.push_back(j);
    } else {
      for (int j = jprime - 5; j <= jprime + 5; ++j) sites.push_back(j);
    }
  } else {
    sites = parse_int_list(c.text("sites"));
  }
  if (sites.empty()) throw Error(ErrorCode::InvalidParams, "site list is empty");

  const double t_min = std::isnan(c.real("t-min")) ? tprime - 3.0 : c.real("t-min");
  const double t_max = std::isnan(c.real("t-max")) ? tprime + 3.0 : c.real("t-max");
  const std::vector<double> times = time_grid(t_min, t_max, c.integer("t-steps"));

  PositiveMomentumState state;
  FluxBounds bounds;
  if (p.is_ring()) {
    state = ring_optimal_coeffs(p, jprime, tprime, branch);
    bounds = ring_bounds(p);
  } else {
    state = infinite_optimal_weight(p, jprime, tprime, branch, to_int(c.integer("nodes"), "nodes"));
    bounds = infinite_bounds(p);
  }
  std::vector<FluxSeries> series;
  series.reserve(sites.size());
  for (int j : sites) series.push_back(flux_series(state, p, j, times));

  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Csv) {
      write_rows(os, series);
      return;
    }
    Json doc;
    doc["branch"] = c.text("branch");
    doc["jprime"] = jprime;
    doc["tprime"] = tprime;
    doc["lambda_plus"] = bounds.lambda_plus;
    doc["lambda_minus"] = bounds.lambda_minus;
    doc["rows"] = rows_json(series);
    write_json(os, doc);
  });
  return kExitOk;
}

int cmd_two_state(const RunConfig& c, std::ostream& out) {
  const ChainParams p = make_params(c);
  if (!p.is_ring()) throw Error(ErrorCode::InvalidParams, "two-state needs --chain ring");
  const TwoStateMinimum m = two_state_min(p, to_int(c.integer("m1"), "m1"), to_int(c.integer("m2"), "m2"));
  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Json) {
      write_json(os, Json{{"j_min", m.j_min}, {"theta_star", m.theta_star}});
      return;
    }
    os << "j_min,theta_star\n" << format_number(m.j_min) << ',' << format_number(m.theta_star) << '\n';
  });
  return kExitOk;
}

int cmd_bm_curve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ChainParams p = make_params(c);
  const int nodes = to_int(c.integer("nodes"), "nodes");
  const auto [lo_default, hi_default] = default_nu_range(p);
  const double lo = std::isnan(c.real("nu-min")) ? lo_default : c.real("nu-min");
  const double hi = std::isnan(c.real("nu-max")) ? hi_default : c.real("nu-max");
  const std::int64_t steps = c.integer("nu-steps");
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidParams, "nu range must satisfy 0 < nu-min < nu-max");
  }
  if (steps < 3) throw Error(ErrorCode::InvalidParams, "--nu-steps must be >= 3");
  const std::vector<double> grid = logspace(lo, hi, static_cast<int>(steps));

  const BMCurve curve = bm_curve(p, grid, nodes, thread_count(c));
  std::vector<double> values;
  values.reserve(curve.points.size());
  for (const BMCurvePoint& pt : curve.points) values.push_back(pt.lambda_p);

  auto family = [&](double nu) { return lambda_p(BMProblem{p, nu, nodes}).lambda; };
  NuMaximum peak;
  std::optional<Error> failure;
  try {
    peak = maximize_on_grid(family, grid, values, c.real("refine-tol"));
  } catch (const Error& e) {
    failure = e;
  }

  Json summary{{"nu_star", peak.nu_star}, {"lambda_star", peak.lambda_star}};
  if (failure) summary = Json{{"nu_star", nullptr}, {"lambda_star", nullptr}};

  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Csv) {
      os << "nu,lambda_p\n";
      for (const BMCurvePoint& pt : curve.points) {
        os << format_number(pt.nu) << ',' << format_number(pt.lambda_p) << '\n';
      }
      return;
    }
    Json doc;
    doc["chain"] = curve.ring ? "ring" : "infinite";
    doc["epsilon"] = curve.epsilon;
    if (curve.ring) {
      doc["n"] = curve.sites;
    } else {
      doc["nodes"] = curve.nodes;
    }
    Json points = Json::array();
    for (const BMCurvePoint& pt : curve.points) points.push_back({{"nu", pt.nu}, {"lambda_p", pt.lambda_p}});
    doc["points"] = std::move(points);
    doc["nu_star"] = summary["nu_star"];
    doc["lambda_star"] = summary["lambda_star"];
    write_json(os, doc);
  });
  if (c.format == OutputFormat::Csv) emit_sidecar(c, err, summary);
  if (failure) throw *failure;
  return kExitOk;
}

int cmd_bm_trace(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ChainParams p = make_params(c);
  const int nodes = to_int(c.integer("nodes"), "nodes");
  double nu = c.real("nu");
  if (std::isnan(nu)) {
    ScanOptions options;
    options.threads = thread_count(c);
    nu = backflow_peak(p, nodes, options).nu_star;
  }
  const BMProblem problem{p, nu, nodes};
  const EigenSolution solution = lambda_p(problem);

  const double window = nu * p.hbar() / p.tau();
  const double t_min = std::isnan(c.real("t-min")) ? -window : c.real("t-min");
  const double t_max = std::isnan(c.real("t-max")) ? window : c.real("t-max");
  const BMFluxTrace trace = bm_flux_trace(solution, problem, time_grid(t_min, t_max, c.integer("t-steps")));

  Json summary{{"nu", nu}, {"lambda_p", solution.lambda}, {"integrated_backflow", trace.integrated_backflow}};
  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Csv) {
      write_rows(os, {trace.series});
      return;
    }
    Json doc = summary;
    doc["rows"] = rows_json({trace.series});
    write_json(os, doc);
  });
  if (c.format == OutputFormat::Csv) emit_sidecar(c, err, summary);
  return kExitOk;
}

int cmd_scaling(const RunConfig& c, std::ostream& out) {
  const std::vector<int> sites = parse_int_list(c.text("n-list"));
  ScanOptions options;
  options.threads = thread_count(c);
  const ScalingStudy study = ring_scaling_study(sites, c.real("epsilon"), options);
  emit(c, out, [&](std::ostream& os) {
    if (c.format == OutputFormat::Csv) {
      os << "n,c_tb,nu_star\n";
      for (const ScalingRow& r : study.table) {
        os << r.sites << ',' << format_number(r.c_tb) << ',' << format_number(r.nu_star) << '\n';
      }
      return;
    }
    Json doc;
    doc["exponent_gap"] = study.exponent_gap();
    doc["exponent_nu"] = study.exponent_nu();
    Json table = Json::array();
    for (const ScalingRow& r : study.table) {
      table.push_back({{"n", r.sites}, {"c_tb", r.c_tb}, {"nu_star", r.nu_star}});
    }
    doc["table"] = std::move(table);
    write_json(os, doc);
  });
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifyOptions options;
  options.seed = c.integer("seed");
  const std::string& filter = c.text("filter");
  if (filter != "all") {
    std::stringstream ss(filter);
    std::string group;
    while (std::getline(ss, group, ',')) {
      if (std::find(verify_groups().begin(), verify_groups().end(), group) == verify_groups().end()) {
        throw UsageError{"unknown verify group '" + group + "'"};
      }
      options.groups.push_back(group);
    }
    if (options.groups.empty()) throw UsageError{"--filter is empty"};
  }
  const std::string& mutate = c.text("mutate");
  if (mutate != "none" && mutate != "flux-eps-sign") throw UsageError{"--mutate must be 'none' or 'flux-eps-sign'"};
  if (mutate != "none") options.mutate = mutate;

  const std::vector<CheckResult> results = run_verification(options);
  std::size_t passed = 0;
  for (const CheckResult& r : results) {
    passed += r.passed ? 1 : 0;
    std::string line = r.group;
    line.resize(std::max<std::size_t>(line.size() + 1, 15), ' ');
    line += r.name;
    line.resize(std::max<std::size_t>(line.size() + 1, 64), ' ');
    out << line << (r.passed ? "PASS  " : "FAIL  ") << r.detail << '\n';
  }
  out << passed << '/' << results.size() << " checks passed\n";
  return passed == results.size() ? kExitOk : kExitVerifyFailed;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NoInteriorMax:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

}  // namespace

std::int64_t RunConfig::integer(const std::string& key) const { return std::get<std::int64_t>(params.at(key)); }
double RunConfig::real(const std::string& key) const { return std::get<double>(params.at(key)); }
const std::string& RunConfig::text(const std::string& key) const { return std::get<std::string>(params.at(key)); }

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, end - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) {
      int v = 0;
      const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
      if (r.ec != std::errc() || r.ptr != item.data() + item.size()) {
        throw UsageError{"not an integer: '" + item + "'"};
      }
      values.push_back(v);
    } else if (text.find_first_not_of(" \t,") != std::string::npos) {
      throw UsageError{"empty entry in integer list '" + text + "'"};
    }
    start = end + 1;
  }
  return values;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig config;
  std::map<std::string, std::map<std::string, ParamValue>> per_command;
  auto registry = [&](CLI::App* sub) { return Registry{sub, &per_command[sub->get_name()], &config.out}; };
  CLI::App app{"Probability backflow bounds for tight-binding chains", "backflow"};
  app.require_subcommand(1);

  auto* bounds = app.add_subcommand("bounds", "extremal instantaneous flux bounds");
  {
    Registry r = registry(bounds);
    r.chain();
    r.output("json");
  }

  auto* flux = app.add_subcommand("flux-series", "flux of the optimal state over sites and times");
  {
    Registry r = registry(flux);
    r.chain();
    r.integer("jprime", 3, "site j' of the extremum");
    r.real("tprime", 3.0, "time t' of the extremum");
    r.text("branch", "minus", "plus or minus");
    r.text("sites", "auto", "comma-separated sites (auto: whole ring, or j'-5..j'+5)");
    r.real("t-min", kAuto, "first time (default t'-3)");
    r.real("t-max", kAuto, "last time (default t'+3)");
    r.integer("t-steps", 601, "number of times");
    r.integer("nodes", kDefaultNodes, "quadrature nodes (infinite chain)");
    r.output("csv");
  }

  auto* two = app.add_subcommand("two-state", "minimal flux of a two-mode superposition");
  {
    Registry r = registry(two);
    r.chain();
    r.integer("m1", 0, "first mode index");
    r.integer("m2", 1, "second mode index");
    r.output("json");
  }

  auto* curve = app.add_subcommand("bm-curve", "maximal integrated backflow against nu");
  {
    Registry r = registry(curve);
    r.chain();
    r.real("nu-min", kAuto, "smallest nu (default 0.1)");
    r.real("nu-max", kAuto, "largest nu (default 200, or 10 N^2/pi^2 for a ring)");
    r.integer("nu-steps", 200, "log-spaced nu samples");
    r.integer("nodes", kDefaultNodes, "quadrature nodes (infinite chain)");
    r.real("refine-tol", 1e-6, "golden-section tolerance on nu");
    r.threads();
    r.output("csv");
  }

  auto* trace = app.add_subcommand("bm-trace", "flux at site 0 of the maximal-backflow state");
  {
    Registry r = registry(trace);
    r.chain();
    r.real("nu", kAuto, "time window nu (default: the peak)");
    r.integer("nodes", kDefaultNodes, "quadrature nodes (infinite chain)");
    r.real("t-min", kAuto, "first time (default -T)");
    r.real("t-max", kAuto, "last time (default T)");
    r.integer("t-steps", 2001, "number of times");
    r.threads();
    r.output("csv");
  }

  auto* scaling = app.add_subcommand("scaling", "ring size scaling of the backflow peak");
  {
    Registry r = registry(scaling);
    r.real("epsilon", 0.0, "hopping bias epsilon");
    r.text("n-list", "8,12,16,24,32,48,64,96,128", "comma-separated ring sizes");
    r.threads();
    r.output("json");
  }

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  {
    Registry r = registry(verify);
    r.text("filter", "all", "comma-separated groups: continuity,bounds,eigen,normalization,constants");
    r.integer("seed", kDefaultSeed, "random seed");
    r.text("mutate", "none", "inject a fault: none or flux-eps-sign");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream text;
    std::ostringstream ignored;
    app.exit(e, text, ignored);
    RunConfig help;
    help.command = "help";
    help.params["text"] = text.str();
    return help;
  } catch (const CLI::ParseError& e) {
    std::ostringstream ignored;
    std::ostringstream text;
    app.exit(e, ignored, text);
    std::string message = text.str();
    while (!message.empty() && message.back() == '\n') message.pop_back();
    throw UsageError{message};
  }

  const CLI::App* chosen = app.get_subcommands().front();
  config.command = chosen->get_name();
  config.params = std::move(per_command[config.command]);
  if (config.has("format")) {
    const std::string& f = config.text("format");
    if (f == "csv") {
      config.format = OutputFormat::Csv;
    } else if (f == "json") {
      config.format = OutputFormat::Json;
    } else {
      throw UsageError{"--format must be 'csv' or 'json'"};
    }
  }
  return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string& cmd = config.command;
  if (cmd == "help") {
    out << config.text("text");
    return kExitOk;
  }
  if (cmd == "bounds") return cmd_bounds(config, out);
  if (cmd == "flux-series") return cmd_flux_series(config, out);
  if (cmd == "two-state") return cmd_two_state(config, out);
  if (cmd == "bm-curve") return cmd_bm_curve(config, out, err);
  if (cmd == "bm-trace") return cmd_bm_trace(config, out, err);
  if (cmd == "scaling") return cmd_scaling(config, out);
  if (cmd == "verify") return cmd_verify(config, out);
  throw UsageError{"unknown command '" + cmd + "'"};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_args(args), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace backflow::cli
