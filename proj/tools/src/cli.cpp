#include "irtid_cli/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "irtid/errors.hpp"
#include "irtid/experiments.hpp"
#include "irtid/irf.hpp"
#include "irtid/manifest.hpp"
#include "irtid/recovery.hpp"
#include "irtid_cli/io.hpp"

#ifndef IRTID_VERSION
#define IRTID_VERSION "0.0.0"
#endif

namespace irtid::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Check failure with a message already formatted for the user.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

json params_json(const ItemParams& p) {
  return {{"family", std::string(to_string(p.family))},
          {"a", p.a},
          {"b", p.b},
          {"c", p.c},
          {"d", p.d},
          {"reflected", p.reflected}};
}

// --- output plumbing -------------------------------------------------------------

struct Common {
  std::string out_path;
  std::string format = "csv";
};

class Session {
 public:
  Session(std::string command, std::ostream& out, std::ostream& err, const Common& common)
      : command_(std::move(command)), out_(out), err_(err), common_(common),
        started_(utc_now()) {
    if (!common_.out_path.empty()) {
      file_ = std::make_unique<std::ofstream>(common_.out_path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output file: " + common_.out_path);
    }
  }

  std::ostream& stream() { return file_ ? *file_ : out_; }
  bool json_format() const { return common_.format == "json"; }

  /// Closes the output and writes the run manifest (sidecar file when --out
  /// is given, otherwise stderr).
  void finish(const json& config, std::uint64_t seed) {
    if (file_) file_->close();
    RunManifest m;
    m.command = command_;
    m.config_digest = fnv1a_hex(config.dump());
    m.seed = seed;
    m.tool_version = tool_version();
    m.started_at = started_;
    m.finished_at = utc_now();
    if (!common_.out_path.empty()) {
      std::ofstream side(common_.out_path + ".manifest.json", std::ios::binary);
      side << m.to_json() << '\n';
    } else {
      err_ << m.to_json() << '\n';
    }
  }

 private:
  std::string command_;
  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  std::string started_;
  std::unique_ptr<std::ofstream> file_;
};

void write_csv_row(std::ostream& os, std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line.push_back(',');
    line += c;
    first = false;
  }
  line.push_back('\n');
  os << line;
}

std::size_t item_index(long one_based, std::size_t n) {
  if (one_based < 1 || static_cast<std::size_t>(one_based) > n) {
    throw UsageError("--item must lie in 1.." + std::to_string(n));
  }
  return static_cast<std::size_t>(one_based - 1);
}

FamilySampler preset_or_usage(const std::string& name, std::uint64_t seed) {
  auto sampler = find_preset(name, seed);
  if (!sampler) {
    std::string list;
    for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
    throw UsageError("unknown preset '" + name + "'; available presets: " + list);
  }
  return *sampler;
}

// --- plot-irf --------------------------------------------------------------------------

struct PlotOptions {
  std::string model_path;
  long item = 1;
  std::string family = "normal_ogive";
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  std::size_t points = 999;
  std::size_t tail_points = 25;
};

int cmd_plot_irf(const PlotOptions& o, Session& s) {
  ItemParams p;
  if (!o.model_path.empty()) {
    const auto items = read_model_file(o.model_path);
    p = items[item_index(o.item, items.size())];
  } else {
    const auto family = parse_family(o.family);
    if (!family) throw UsageError("unknown family '" + o.family + "'");
    p = *family == Family::NormalOgive ? ItemParams::normal_ogive(o.a, o.b)
                                        : ItemParams::logistic_4pl(o.a, o.b, o.c, o.d);
  }
  if (o.points < 2 || o.tail_points < 2) throw UsageError("grids need at least 2 points");
  const Irf irf = Irf::from_params(p);

  struct Row {
    const char* grid;
    double theta;
  };
  std::vector<Row> rows;
  for (std::size_t j = 0; j < o.points; ++j) {
    rows.push_back({"uniform", 0.001 + 0.998 * static_cast<double>(j) / (o.points - 1)});
  }
  const auto tail = [&](std::size_t j) {
    return std::pow(10.0, -8.0 + 6.0 * static_cast<double>(j) / (o.tail_points - 1));
  };
  for (std::size_t j = 0; j < o.tail_points; ++j) rows.push_back({"lower", tail(j)});
  for (std::size_t j = o.tail_points; j-- > 0;) rows.push_back({"upper", 1.0 - tail(j)});

  std::ostream& os = s.stream();
  json records = json::array();
  if (!s.json_format()) write_csv_row(os, {"grid", "theta", "p", "p_prime"});
  for (const auto& r : rows) {
    const double value = irf.eval(r.theta);
    const double slope = irf.deriv(r.theta);
    if (s.json_format()) {
      records.push_back({{"grid", r.grid}, {"theta", r.theta}, {"p", value}, {"p_prime", num(slope)}});
    } else {
      write_csv_row(os, {r.grid, format_double(r.theta), format_double(value), format_double(slope)});
    }
  }
  const json config = {{"command", "plot-irf"},
                       {"item", params_json(p)},
                       {"points", o.points},
                       {"tail_points", o.tail_points},
                       {"format", s.json_format() ? "json" : "csv"}};
  if (s.json_format()) os << json{{"config", config}, {"rows", records}}.dump(2) << '\n';
  s.finish(config, 0);
  return kExitPass;
}

// --- check --------------------------------------------------------------------------------

struct CheckOptions {
  std::string model_path;
  double alpha = 0.05;
  double beta = 0.95;
  double epsilon = 0.05;
  std::size_t grid = kDefaultCertificateGrid;
  double tail_step = 1e-3;
};

json limit_json(const EndpointLimit& lim) {
  return {{"kind", std::string(to_string(lim.kind))},
          {"value", num(lim.value)},
          {"samples", {num(lim.samples[0]), num(lim.samples[1]), num(lim.samples[2])}},
          {"trend_agrees", lim.trend_agrees}};
}

int cmd_check(const CheckOptions& o, Session& s, std::ostream& err) {
  if (o.model_path.empty()) throw UsageError("check requires --model");
  // Parameter errors are part of the report, not usage errors.
  const auto params = read_model_file(o.model_path, false);
  json config = {{"command", "check"}, {"model", json::array()}, {"alpha", o.alpha},
                 {"beta", o.beta},     {"epsilon", o.epsilon},   {"grid", o.grid},
                 {"tail_step", o.tail_step}};
  for (const auto& p : params) config["model"].push_back(params_json(p));

  json report = {{"config", config}};
  bool all_pass = true;
  try {
    const ModelSpec model = ModelSpec::from_params(params);
    json items = json::array();
    double m_min = std::numeric_limits<double>::infinity();
    double big_m_max = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      const Irf& irf = model.item(i);
      const auto c3 = check_condition3(irf, o.alpha, o.beta, o.grid);
      const auto c4 = check_condition4(irf, o.epsilon, o.tail_step);
      const auto limits = derivative_limits(*irf.params());
      m_min = std::min(m_min, c3.m);
      big_m_max = std::max(big_m_max, c3.M);
      const bool pass = c3.pass && c4.pass && limits.trend_agrees();
      all_pass = all_pass && pass;
      items.push_back(
          {{"item", i + 1},
           {"params", params_json(*irf.params())},
           {"condition3",
            {{"m", c3.m}, {"M", num(c3.M)}, {"argmin", c3.argmin}, {"argmax", c3.argmax},
             {"pass", c3.pass}}},
           {"condition4",
            {{"epsilon", c4.epsilon}, {"l_eps", c4.l_eps}, {"u_eps", c4.u_eps},
             {"sup_low", c4.sup_low}, {"sup_high", c4.sup_high}, {"kappa", c4.kappa},
             {"gamma", c4.gamma}, {"c_a", c4.c_a}, {"c_b", c4.c_b}, {"c_cd", c4.c_cd},
             {"method", c4.method == WitnessMethod::ClosedForm ? "closed_form" : "numeric"},
             {"pass", c4.pass}}},
           {"derivative_limits",
            {{"lower", limit_json(limits.lower)}, {"upper", limit_json(limits.upper)}}},
           {"pass", pass}});
    }
    report["items"] = items;
    report["summary"] = {{"items", model.size()}, {"m_min", m_min}, {"M_max", num(big_m_max)},
                         {"pass", all_pass}};
  } catch (const ValidationError& e) {
    all_pass = false;
    report["error"] = {{"message", e.what()},
                       {"item", e.index() >= 0 ? json(e.index() + 1) : json(nullptr)}};
    report["summary"] = {{"pass", false}};
    err << "validation failed: " << e.what() << '\n';
  }
  s.stream() << report.dump(2) << '\n';
  s.finish(config, 0);
  return all_pass ? kExitPass : kExitFail;
}

// --- recover -------------------------------------------------------------------------------

struct RecoverOptions {
  std::string model_path;
  std::string data_path;
  long item = 1;
  double alpha = 0.1;
  double beta = 0.9;
  std::size_t min_bin = kDefaultMinBinSize;
};

int cmd_recover(const RecoverOptions& o, Session& s, std::ostream& err) {
  if (o.model_path.empty() == o.data_path.empty()) {
    throw UsageError("recover needs exactly one of --model or --data");
  }
  std::ostream& os = s.stream();
  json config = {{"command", "recover"}, {"item", o.item}, {"format", s.json_format() ? "json" : "csv"}};

  if (!o.model_path.empty()) {
    const auto params = read_model_file(o.model_path);
    config["mode"] = "oracle";
    config["model"] = json::array();
    for (const auto& p : params) config["model"].push_back(params_json(p));
    config["alpha"] = o.alpha;
    config["beta"] = o.beta;
    const ModelSpec model = ModelSpec::from_params(params);
    const std::size_t i = item_index(o.item, model.size());
    RecoveryGrid grid;
    try {
      grid = recover_irf_oracle(model, i, o.alpha, o.beta);
    } catch (const EmptyGridError& e) {
      err << e.what() << '\n';
      s.finish(config, 0);
      return kExitFail;
    }
    double worst = 0.0;
    json entries = json::array();
    if (!s.json_format()) write_csv_row(os, {"k", "theta_k", "p_hat", "p_true"});
    for (const auto& e : grid.entries) {
      const double truth = model.item(i).eval(e.theta_k);
      worst = std::max(worst, std::fabs(e.p_hat - truth));
      if (s.json_format()) {
        entries.push_back({{"k", e.k}, {"theta_k", e.theta_k}, {"p_hat", e.p_hat}, {"p_true", truth}});
      } else {
        write_csv_row(os, {std::to_string(e.k), format_double(e.theta_k), format_double(e.p_hat),
                           format_double(truth)});
      }
    }
    if (s.json_format()) {
      os << json{{"config", config}, {"entries", entries}, {"max_abs_error", worst}}.dump(2)
         << '\n';
    } else {
      os << "# max_abs_error=" << format_double(worst) << '\n';
    }
    s.finish(config, 0);
    return kExitPass;
  }

  const ResponseMatrix responses = read_responses_file(o.data_path);
  config["mode"] = "empirical";
  config["data_digest"] = [&] {
    std::ostringstream buf;
    write_responses(buf, responses);
    return fnv1a_hex(buf.str());
  }();
  config["min_bin"] = o.min_bin;
  const std::size_t i = item_index(o.item, responses.cols());
  Regressogram reg;
  try {
    reg = recover_irf_empirical(responses, i, o.min_bin);
  } catch (const DegenerateError& e) {
    err << "warning: " << e.what() << "; item skipped\n";
    s.finish(config, 0);
    return kExitFail;
  }
  json bins = json::array();
  if (!s.json_format()) write_csv_row(os, {"score_lo", "score_hi", "count", "theta", "p_hat"});
  for (const auto& b : reg.bins) {
    if (s.json_format()) {
      bins.push_back({{"score_lo", b.score_lo}, {"score_hi", b.score_hi}, {"count", b.count},
                      {"theta", b.theta}, {"p_hat", b.p_hat}});
    } else {
      write_csv_row(os, {std::to_string(b.score_lo), std::to_string(b.score_hi),
                         std::to_string(b.count), format_double(b.theta), format_double(b.p_hat)});
    }
  }
  if (s.json_format()) os << json{{"config", config}, {"bins", bins}}.dump(2) << '\n';
  s.finish(config, 0);
  return kExitPass;
}

// --- converge ------------------------------------------------------------------------------

struct ConvergeOptions {
  std::string preset = "homogeneous-identity";
  std::string n_grid = "11,51,201";
  double alpha = 0.1;
  double beta = 0.9;
  std::uint64_t seed = kDefaultPresetSeed;
  std::size_t sup_grid = kDefaultSupGrid;
  std::string curve_path;
};

int cmd_converge(const ConvergeOptions& o, Session& s) {
  const FamilySampler sampler = preset_or_usage(o.preset, o.seed);
  const auto sizes = parse_size_list(o.n_grid);
  if (!(o.alpha > 0.0 && o.alpha < o.beta && o.beta < 1.0)) {
    throw UsageError("require 0 < alpha < beta < 1");
  }
  const ConvergenceReport r = convergence_experiment(sampler, sizes, o.alpha, o.beta, o.sup_grid);
  const json config = {{"command", "converge"}, {"preset", o.preset}, {"n_grid", sizes},
                       {"alpha", o.alpha},       {"beta", o.beta},     {"seed", o.seed},
                       {"sup_grid", o.sup_grid}, {"format", s.json_format() ? "json" : "csv"}};

  auto write_curve = [&](std::ostream& os) {
    write_csv_row(os, {"n", "error"});
    for (std::size_t j = 0; j < r.errors.size(); ++j) {
      write_csv_row(os, {std::to_string(r.n_grid[j]), format_double(r.errors[j])});
    }
  };
  if (s.json_format()) {
    json skipped = json::array();
    for (std::size_t j = 0; j < r.skipped.size(); ++j) {
      skipped.push_back({{"n", r.skipped[j]}, {"reason", r.skip_reasons[j]}});
    }
    s.stream() << json{{"config", config},
                       {"family", r.family},
                       {"n_grid", r.n_grid},
                       {"errors", r.errors},
                       {"slope", num(r.slope)},
                       {"skipped", skipped},
                       {"decreasing", r.decreasing_end_to_end()}}
                      .dump(2)
               << '\n';
  } else {
    write_curve(s.stream());
  }
  if (!o.curve_path.empty()) {
    std::ofstream curve(o.curve_path, std::ios::binary);
    if (!curve) throw UsageError("cannot open curve file: " + o.curve_path);
    write_curve(curve);
  }
  s.finish(config, o.seed);
  return r.decreasing_end_to_end() ? kExitPass : kExitFail;
}

// --- bounds ----------------------------------------------------------------------------------

struct BoundsOptions {
  std::string lemma = "lemma1";
  std::string preset = "homogeneous-identity";
  double k_ratio = 0.5;
  LemmaCheckConfig lemma_config{};
  std::string n_grid = "11,21,41,81,161";
  std::size_t rest_items = 100;
  double theta = 0.5;
  std::size_t trials = 100000;
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
};

json report_json(const BoundCheckReport& r) {
  return {{"n", r.n},
          {"k", r.k},
          {"lhs", num(r.lhs)},
          {"rhs", num(r.rhs)},
          {"tolerance", r.tolerance},
          {"kind", r.lower_bound ? "lower" : "upper"},
          {"pass", r.pass},
          {"c_tilde_estimate", num(r.c_tilde_estimate)},
          {"excluded", r.excluded}};
}

int cmd_bounds(BoundsOptions o, Session& s) {
  o.lemma_config.n_grid = parse_size_list(o.n_grid);
  json config = {{"command", "bounds"}, {"lemma", o.lemma}, {"preset", o.preset},
                 {"seed", o.seed}};
  const FamilySampler sampler = preset_or_usage(o.preset, kDefaultPresetSeed);
  std::vector<BoundCheckReport> reports;
  if (o.lemma == "lemma1" || o.lemma == "lemma2") {
    try {
      o.lemma_config.validate();
    } catch (const ValidationError& e) {
      throw UsageError(std::string("invalid bound configuration: ") + e.what());
    }
    const auto& c = o.lemma_config;
    config["k_ratio"] = o.k_ratio;
    config["delta"] = c.delta;
    config["eta"] = c.eta;
    config["alpha"] = c.alpha;
    config["beta"] = c.beta;
    config["n_grid"] = c.n_grid;
    config["min_n"] = c.min_n;
    try {
      reports = o.lemma == "lemma1" ? check_lemma1(sampler, o.k_ratio, c)
                                    : check_lemma2(sampler, o.k_ratio, c);
    } catch (const NoSolutionError& e) {
      throw UsageError(e.what());
    }
  } else if (o.lemma == "hoeffding" || o.lemma == "normal") {
    config["rest_items"] = o.rest_items;
    config["theta"] = o.theta;
    if (o.rest_items < 1) throw UsageError("--rest-items must be positive");
    const ModelSpec model = sampler.make(o.rest_items + 1);
    if (o.lemma == "hoeffding") {
      config["m"] = o.lemma_config.m;
      config["trials"] = o.trials;
      reports.push_back(check_hoeffding(model, 0, o.theta, o.lemma_config.m, o.trials, o.seed));
    } else {
      std::size_t k = 0;
      if (o.k) {
        k = *o.k;
      } else {
        KahanSum mu;
        for (std::size_t j = 1; j < model.size(); ++j) mu.add(model.item(j).eval(o.theta));
        k = static_cast<std::size_t>(std::floor(mu.value()));
      }
      config["k"] = k;
      reports.push_back(check_normal_approx(model, 0, o.theta, k));
    }
  } else {
    throw UsageError("unknown --lemma '" + o.lemma + "' (lemma1, lemma2, hoeffding, normal)");
  }

  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  const bool pass = all_pass(reports);
  s.stream() << json{{"config", config}, {"reports", arr}, {"pass", pass}}.dump(2) << '\n';
  s.finish(config, o.seed);
  return pass ? kExitPass : kExitFail;
}

// --- simulate --------------------------------------------------------------------------------

struct SimulateOptions {
  std::string model_path;
  std::string preset;
  std::size_t n_items = 20;
  std::size_t respondents = 1000;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateOptions& o, Session& s) {
  if (o.model_path.empty() == o.preset.empty()) {
    throw UsageError("simulate needs exactly one of --model or --preset");
  }
  json config = {{"command", "simulate"}, {"respondents", o.respondents}, {"seed", o.seed}};
  std::optional<ModelSpec> model;
  if (!o.model_path.empty()) {
    const auto params = read_model_file(o.model_path);
    config["model"] = json::array();
    for (const auto& p : params) config["model"].push_back(params_json(p));
    model = ModelSpec::from_params(params);
  } else {
    config["preset"] = o.preset;
    config["n_items"] = o.n_items;
    model = preset_or_usage(o.preset, kDefaultPresetSeed).make(o.n_items);
  }
  const ResponseMatrix responses = simulate_responses({o.seed, o.respondents, *model});
  write_responses(s.stream(), responses);
  s.finish(config, o.seed);
  return kExitPass;
}

}  // namespace

std::string tool_version() { return IRTID_VERSION; }

std::string RunManifest::to_json() const {
  return json{{"command", command},
              {"config_digest", config_digest},
              {"seed", seed},
              {"tool_version", tool_version},
              {"started_at", started_at},
              {"finished_at", finished_at}}
      .dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of asymptotic identifiability for nonparametric IRT models",
               "irt-identify"};
  app.require_subcommand(1);
  app.set_version_flag("--version", IRTID_VERSION);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out_path, "Write output to this file");
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot-irf", "Emit theta, P and P' over uniform and tail grids");
  plot_cmd->add_option("--model", plot.model_path, "Model file (uses --item)");
  plot_cmd->add_option("--item", plot.item, "1-based item index in the model file");
  plot_cmd->add_option("--family", plot.family, "normal_ogive or 4pl");
  plot_cmd->add_option("--a", plot.a, "Discrimination");
  plot_cmd->add_option("--b", plot.b, "Difficulty");
  plot_cmd->add_option("--c", plot.c, "Lower asymptote (4PL)");
  plot_cmd->add_option("--d", plot.d, "Upper asymptote (4PL)");
  plot_cmd->add_option("--points", plot.points, "Points on the uniform grid");
  plot_cmd->add_option("--tail-points", plot.tail_points, "Points on each geometric tail grid");
  add_common(plot_cmd);

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Certify derivative bounds and tail flatness per item");
  check_cmd->add_option("--model", check.model_path, "Model file")->required();
  check_cmd->add_option("--alpha", check.alpha, "Left end of the compact interval");
  check_cmd->add_option("--beta", check.beta, "Right end of the compact interval");
  check_cmd->add_option("--epsilon", check.epsilon, "Tail flatness level");
  check_cmd->add_option("--n-grid", check.grid, "Grid size for the derivative bounds");
  check_cmd->add_option("--tail-step", check.tail_step, "Tail grid spacing");
  add_common(check_cmd);

  RecoverOptions recover;
  auto* recover_cmd = app.add_subcommand("recover", "Recover one IRF from a model (oracle) or data");
  recover_cmd->add_option("--model", recover.model_path, "Model file (oracle mode)");
  recover_cmd->add_option("--data", recover.data_path, "Response CSV (empirical mode)");
  recover_cmd->add_option("--item", recover.item, "1-based item index");
  recover_cmd->add_option("--alpha", recover.alpha, "Left end of the recovery interval");
  recover_cmd->add_option("--beta", recover.beta, "Right end of the recovery interval");
  recover_cmd->add_option("--min-bin", recover.min_bin, "Minimum respondents per bin");
  add_common(recover_cmd);

  ConvergeOptions converge;
  auto* converge_cmd = app.add_subcommand("converge", "Recovery error as the number of items grows");
  converge_cmd->add_option("--preset", converge.preset, "Model family preset");
  converge_cmd->add_option("--n-grid", converge.n_grid, "Comma-separated item counts");
  converge_cmd->add_option("--alpha", converge.alpha, "Left end of the comparison interval");
  converge_cmd->add_option("--beta", converge.beta, "Right end of the comparison interval");
  converge_cmd->add_option("--seed", converge.seed, "Seed for seeded presets");
  converge_cmd->add_option("--sup-grid", converge.sup_grid, "Comparison grid size");
  converge_cmd->add_option("--curve", converge.curve_path, "Also write the n,error curve CSV here");
  add_common(converge_cmd);

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Check the rest-score and concentration bounds");
  bounds_cmd->add_option("--lemma", bounds.lemma, "lemma1, lemma2, hoeffding or normal");
  bounds_cmd->add_option("--preset", bounds.preset, "Model family preset");
  bounds_cmd->add_option("--k-ratio", bounds.k_ratio, "k / (n - 1)");
  bounds_cmd->add_option("--delta", bounds.lemma_config.delta, "Tail width");
  bounds_cmd->add_option("--eta", bounds.lemma_config.eta, "Window exponent");
  bounds_cmd->add_option("--alpha", bounds.lemma_config.alpha, "Left end of the interval");
  bounds_cmd->add_option("--beta", bounds.lemma_config.beta, "Right end of the interval");
  bounds_cmd->add_option("--n-grid", bounds.n_grid, "Comma-separated item counts");
  bounds_cmd->add_option("--min-n", bounds.lemma_config.min_n, "Smallest judged n");
  bounds_cmd->add_option("--m", bounds.lemma_config.m, "Hoeffding radius");
  bounds_cmd->add_option("--rest-items", bounds.rest_items, "n - 1 for hoeffding/normal");
  bounds_cmd->add_option("--theta", bounds.theta, "Trait value for hoeffding/normal");
  bounds_cmd->add_option("--trials", bounds.trials, "Monte Carlo trials for hoeffding");
  bounds_cmd->add_option("--k", bounds.k, "Rest score for normal (default floor of the mean)");
  bounds_cmd->add_option("--seed", bounds.seed, "Monte Carlo seed");
  add_common(bounds_cmd);

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a 0/1 response matrix");
  simulate_cmd->add_option("--model", simulate.model_path, "Model file");
  simulate_cmd->add_option("--preset", simulate.preset, "Model family preset");
  simulate_cmd->add_option("--n-items", simulate.n_items, "Items for --preset");
  simulate_cmd->add_option("--respondents", simulate.respondents, "Number of respondents");
  simulate_cmd->add_option("--seed", simulate.seed, "Seed");
  add_common(simulate_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  // JSON is the natural format for reports; CSV is the default for tables.
  auto* sub = app.get_subcommands().front();
  if ((sub == check_cmd || sub == bounds_cmd) && sub->count("--format") == 0) {
    common.format = "json";
  }
  if (sub == converge_cmd && sub->count("--format") == 0) common.format = "json";

  try {
    Session session(sub->get_name(), out, err, common);
    if (sub == plot_cmd) return cmd_plot_irf(plot, session);
    if (sub == check_cmd) return cmd_check(check, session, err);
    if (sub == recover_cmd) return cmd_recover(recover, session, err);
    if (sub == converge_cmd) return cmd_converge(converge, session);
    if (sub == bounds_cmd) return cmd_bounds(bounds, session);
    if (sub == simulate_cmd) return cmd_simulate(simulate, session);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace irtid::cli
