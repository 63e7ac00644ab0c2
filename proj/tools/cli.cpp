#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "slepf/cft_params.hpp"
#include "slepf/coulomb.hpp"
#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"
#include "slepf/ising.hpp"
#include "slepf/linkpat.hpp"
#include "slepf/loewner.hpp"
#include "slepf/mc_pf.hpp"
#include "slepf/pde_verify.hpp"

namespace slepf::cli {

namespace {

using nlohmann::ordered_json;

// Config files: a JSON object (nested objects are subcommand sections) or TOML/INI.
class JsonOrTomlConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream toml(text);
      return CLI::ConfigTOML::from_config(toml);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config: unsupported value " + v.dump());
  }
  static void flatten(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

// Floats keep 15 significant digits; non-finite values become null.
void write_json(std::ostream& os, const ordered_json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner << ordered_json(k).dump() << ": ";
        write_json(os, v, indent + 2);
      }
      os << "\n" << pad << "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << pad << "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%#.15g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

// Top-level scalars of a report as a one-row table.
Table scalar_table(const ordered_json& j) {
  Table t;
  std::vector<std::string> row;
  for (const auto& [k, v] : j.items()) {
    if (v.is_structured()) continue;
    t.header.push_back(k);
    if (v.is_number_float()) {
      row.push_back(csv_number(v.get<double>()));
    } else if (v.is_string()) {
      row.push_back(v.get<std::string>());
    } else {
      row.push_back(v.dump());
    }
  }
  t.rows.push_back(std::move(row));
  return t;
}

struct Report {
  ordered_json json;
  std::optional<Table> table;
  bool passed = true;
  std::string default_format = "json";
};

std::vector<double> parse_points(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("malformed point list '" + text + "'");
    }
  }
  if (out.empty()) throw DomainError("empty point list");
  return out;
}

ordered_json suite_json(const SuiteReport& r) {
  ordered_json j;
  j["suite"] = r.suite;
  j["kappa"] = r.kappa;
  j["passed"] = r.passed();
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label}, {"value", e.value}, {"tolerance", e.tolerance}, {"passed", e.passed}});
  }
  j["entries"] = entries;
  return j;
}

Table suite_table(const SuiteReport& r) {
  Table t{{"suite", "kappa", "label", "value", "tolerance", "passed"}, {}};
  for (const auto& e : r.entries) {
    t.rows.push_back({r.suite, csv_number(r.kappa), e.label, csv_number(e.value), csv_number(e.tolerance),
                      e.passed ? "true" : "false"});
  }
  return t;
}

Report suite_report(const SuiteReport& r, ordered_json config) {
  Report rep;
  rep.json = suite_json(r);
  rep.json["config"] = std::move(config);
  rep.table = suite_table(r);
  rep.passed = r.passed();
  return rep;
}

std::string diagnostics_note(const McDiagnostics& d) {
  return d.warned_few_samples ? "fewer than 100 samples" : "";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple-SLE pure partition functions: exact, Monte-Carlo and Coulomb-gas evaluation, "
               "verification suites and the critical Ising crossing experiment."};
  app.name("slepf");
  app.set_config("--config", "", "JSON or TOML file supplying option defaults");
  app.config_formatter(std::make_shared<JsonOrTomlConfig>());
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed_flag;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string output_path;
  std::string format;
  app.add_option("--seed", seed_flag, "Random seed (falls back to SLEPF_SEED, then 1)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output,-o", output_path, "Write the report to this file");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  double kappa = 0.0;
  std::string alpha_text, points_text, method = "exact", suite;

  auto* params = app.add_subcommand("params", "Conformal weights derived from kappa");
  params->add_option("--kappa", kappa)->required();

  auto* pf = app.add_subcommand("pf", "Partition-function evaluation and verification");
  pf->require_subcommand(1);
  pf->fallthrough();
  long samples = 100000;
  double step_eps = CascadeConfig{}.step_eps;
  double stop_eps = CascadeConfig{}.stop_eps;
  auto* pf_eval = pf->add_subcommand("eval", "Evaluate Z_alpha at boundary points");
  pf_eval->add_option("--kappa", kappa)->required();
  pf_eval->add_option("--alpha", alpha_text, "Link pattern, e.g. 1-2,3-4")->required();
  pf_eval->add_option("--points", points_text, "Comma-separated increasing points")->required();
  pf_eval->add_option("--method", method)->check(CLI::IsMember({"exact", "mc", "coulomb"}));
  pf_eval->add_option("--samples", samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
  auto* pf_verify = pf->add_subcommand("verify", "Run a verification suite on the exact evaluators");
  pf_verify->add_option("--suite", suite)->required()->check(
      CLI::IsMember({"pde", "cov", "asy", "bounds", "martingale"}));
  pf_verify->add_option("--kappa", kappa)->required();

  auto* mc = app.add_subcommand("mc", "Monte-Carlo cascade");
  mc->require_subcommand(1);
  mc->fallthrough();
  auto* mc_est = mc->add_subcommand("estimate", "Cascade estimate of Z_alpha");
  std::string link_choice = "first", fixed_link;
  bool allow_above_four = false;
  mc_est->add_option("--kappa", kappa)->required();
  mc_est->add_option("--alpha", alpha_text)->required();
  mc_est->add_option("--points", points_text)->required();
  mc_est->add_option("--samples", samples)->check(CLI::PositiveNumber);
  mc_est->add_option("--dt", step_eps, "Relative Loewner step: dt = value * min |g - W|^2")
      ->check(CLI::PositiveNumber);
  mc_est->add_option("--stop-eps", stop_eps)->check(CLI::PositiveNumber);
  mc_est->add_option("--link", link_choice)->check(CLI::IsMember({"first", "random", "fixed"}));
  mc_est->add_option("--fixed-link", fixed_link, "Link a-b used with --link fixed");
  mc_est->add_flag("--allow-above-four", allow_above_four, "Experimental kappa in (4, 6]");

  auto* sle = app.add_subcommand("sle", "Loewner chains");
  sle->require_subcommand(1);
  sle->fallthrough();
  auto* sle_sample = sle->add_subcommand("sample", "Driving function and optional tip trace");
  long steps = 1000;
  double dt = 1e-3;
  long trace_stride = 0;
  sle_sample->add_option("--kappa", kappa)->required();
  sle_sample->add_option("--steps", steps)->check(CLI::PositiveNumber);
  sle_sample->add_option("--dt", dt)->check(CLI::PositiveNumber);
  sle_sample->add_option("--trace", trace_stride, "Trace the tip every this many steps (0: off)")
      ->check(CLI::NonNegativeNumber);

  auto* ising = app.add_subcommand("ising", "Critical Ising model");
  ising->require_subcommand(1);
  ising->fallthrough();
  auto* crossing = ising->add_subcommand("crossing", "Interface connectivity vs the kappa = 3 prediction");
  IsingConfig icfg;
  icfg.samples = 10000;
  std::string arcs = "corners", dynamics = "hybrid";
  double beta = beta_critical();
  int chains = 4;
  long prediction_samples = 20000;
  crossing->add_option("--width", icfg.width)->check(CLI::PositiveNumber);
  crossing->add_option("--height", icfg.height)->check(CLI::PositiveNumber);
  crossing->add_option("--arcs", arcs, "corners, or comma-separated boundary fractions");
  crossing->add_option("--sweeps", icfg.sweeps_between, "Sweeps between retained samples")
      ->check(CLI::PositiveNumber);
  crossing->add_option("--burn-in", icfg.burn_in)->check(CLI::NonNegativeNumber);
  crossing->add_option("--samples", icfg.samples)->check(CLI::PositiveNumber);
  crossing->add_option("--beta", beta);
  crossing->add_option("--dynamics", dynamics)->check(CLI::IsMember({"heat_bath", "swendsen_wang", "hybrid"}));
  crossing->add_option("--chains", chains, "Independent Markov chains")->check(CLI::PositiveNumber);
  crossing->add_option("--prediction-samples", prediction_samples)->check(CLI::PositiveNumber);

  auto* fusion = app.add_subcommand("fusion", "Fusion layer");
  fusion->require_subcommand(1);
  fusion->fallthrough();
  auto* fusion_check = fusion->add_subcommand("check", "Fused PDE residuals, limits, OPE and constants");
  fusion_check->add_option("--kappa", kappa)->required();

  auto* coulomb = app.add_subcommand("coulomb", "Coulomb-gas integrals");
  coulomb->require_subcommand(1);
  coulomb->fallthrough();
  auto* coulomb_check = coulomb->add_subcommand("check", "Integral representations against the exact formulas");
  coulomb_check->add_option("--kappa", kappa)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::uint64_t seed = 1;
  if (seed_flag) {
    seed = *seed_flag;
  } else if (const char* env = std::getenv("SLEPF_SEED")) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      err << "SLEPF_SEED must be an unsigned integer\n";
      return kUsage;
    }
  }

  Report rep;
  ordered_json config;
  try {
    if (params->parsed()) {
      config = {{"subcommand", "params"}, {"kappa", kappa}};
      const auto p = derive_params(kappa);
      rep.json = {{"kappa", p.kappa}, {"h", p.h}, {"c", p.c}, {"h13", p.h13}};
    } else if (pf_eval->parsed()) {
      const auto alpha = LinkPattern::parse(alpha_text);
      const auto pts = parse_points(points_text);
      config = {{"subcommand", "pf eval"}, {"kappa", kappa}, {"alpha", alpha.to_string()}, {"points", pts},
                {"method", method}};
      PartitionFnEstimate est;
      if (method == "exact") {
        est = {z_exact(kappa, alpha, pts), 0.0, Method::exact};
      } else if (method == "coulomb") {
        est = coulomb_n2(kappa, alpha, pts);
      } else {
        CascadeConfig cc;
        cc.kappa = kappa;
        cc.alpha = alpha;
        cc.pts = pts;
        cc.samples = samples;
        cc.seed = seed;
        cc.threads = threads;
        est = estimate_z(cc).as_estimate();
        config["samples"] = samples;
        config["seed"] = seed;
        config["threads"] = threads;
      }
      rep.json = {{"value", est.value}, {"abs_error", est.abs_error}, {"method", to_string(est.method)}};
    } else if (pf_verify->parsed()) {
      config = {{"subcommand", "pf verify"}, {"suite", suite}, {"kappa", kappa}, {"seed", seed}};
      rep = suite_report(run_suite(suite, kappa, seed), config);
    } else if (mc_est->parsed()) {
      CascadeConfig cc;
      cc.kappa = kappa;
      cc.alpha = LinkPattern::parse(alpha_text);
      cc.pts = parse_points(points_text);
      cc.samples = samples;
      cc.step_eps = step_eps;
      cc.stop_eps = stop_eps;
      cc.seed = seed;
      cc.threads = threads;
      cc.allow_above_four = allow_above_four;
      cc.link_choice = link_choice == "first" ? LinkChoice::first
                       : link_choice == "random" ? LinkChoice::random
                                                 : LinkChoice::fixed;
      if (cc.link_choice == LinkChoice::fixed) {
        const auto l = LinkPattern::parse(fixed_link);
        if (l.n_links() != 1) throw DomainError("--fixed-link takes a single link a-b");
        cc.fixed_link = l.links().front();
      }
      config = {{"subcommand", "mc estimate"}, {"kappa", kappa}, {"alpha", cc.alpha.to_string()},
                {"points", cc.pts}, {"samples", samples}, {"dt", step_eps}, {"stop_eps", stop_eps},
                {"link", link_choice}, {"seed", seed}, {"threads", threads}};
      const auto est = estimate_z(cc);
      const auto& d = est.diagnostics;
      rep.json = {{"mean", est.mean},
                  {"se", est.se},
                  {"samples", est.samples},
                  {"diagnostics",
                   {{"crossings", d.crossings},
                    {"curves", d.curves},
                    {"mean_steps", d.mean_steps},
                    {"max_sample", d.max_sample},
                    {"warning", diagnostics_note(d)}}}};
    } else if (sle_sample->parsed()) {
      config = {{"subcommand", "sle sample"}, {"kappa", kappa}, {"steps", steps}, {"dt", dt},
                {"trace", trace_stride}, {"seed", seed}};
      const auto drive = sample_driving(kappa, static_cast<double>(steps) * dt, dt, seed);
      std::vector<std::complex<double>> tips;
      if (trace_stride > 0) tips = trace_tips(drive, static_cast<std::size_t>(trace_stride));
      Table t;
      t.header = {"t", "w"};
      if (trace_stride > 0) {
        t.header.push_back("tip_x");
        t.header.push_back("tip_y");
      }
      ordered_json rows = ordered_json::array();
      for (std::size_t n = 0; n < drive.w.size(); ++n) {
        const double time = static_cast<double>(n) * dt;
        std::vector<std::string> row{csv_number(time), csv_number(drive.w[n])};
        ordered_json jr = {{"t", time}, {"w", drive.w[n]}};
        if (trace_stride > 0) {
          const auto stride = static_cast<std::size_t>(trace_stride);
          if (n > 0 && n % stride == 0 && n / stride - 1 < tips.size()) {
            const auto z = tips[n / stride - 1];
            row.push_back(csv_number(z.real()));
            row.push_back(csv_number(z.imag()));
            jr["tip_x"] = z.real();
            jr["tip_y"] = z.imag();
          } else {
            row.emplace_back();
            row.emplace_back();
          }
        }
        t.rows.push_back(std::move(row));
        rows.push_back(std::move(jr));
      }
      rep.json = {{"rows", rows}};
      rep.table = std::move(t);
      rep.default_format = "csv";
    } else if (crossing->parsed()) {
      icfg.marks = parse_arcs(arcs, icfg.width, icfg.height);
      icfg.beta = beta;
      icfg.seed = seed;
      icfg.chains = chains;
      icfg.dynamics = dynamics == "heat_bath"       ? Dynamics::heat_bath
                      : dynamics == "swendsen_wang" ? Dynamics::swendsen_wang
                                                    : Dynamics::hybrid;
      config = {{"subcommand", "ising crossing"}, {"width", icfg.width}, {"height", icfg.height},
                {"arcs", arcs}, {"marks", icfg.marks}, {"beta", beta}, {"sweeps", icfg.sweeps_between},
                {"burn_in", icfg.burn_in}, {"samples", icfg.samples}, {"dynamics", dynamics},
                {"chains", chains}, {"seed", seed}};
      const auto res = crossing_experiment(icfg, prediction_samples);
      Table t{{"alpha", "empirical", "stderr", "predicted"}, {}};
      ordered_json rows = ordered_json::array();
      for (std::size_t a = 0; a < res.patterns.size(); ++a) {
        const double pred = a < res.predicted.size() ? res.predicted[a] : std::nan("");
        t.rows.push_back({res.patterns[a].to_string(), csv_number(res.empirical[a]),
                          csv_number(res.stderr_binomial[a]), csv_number(pred)});
        rows.push_back({{"alpha", res.patterns[a].to_string()},
                        {"empirical", res.empirical[a]},
                        {"stderr", res.stderr_binomial[a]},
                        {"predicted", pred}});
      }
      rep.json = {{"samples", res.samples}, {"rows", rows}};
      rep.table = std::move(t);
      rep.default_format = "csv";
    } else if (fusion_check->parsed()) {
      config = {{"subcommand", "fusion check"}, {"kappa", kappa}};
      rep = suite_report(run_suite("fusion", kappa, seed), config);
    } else if (coulomb_check->parsed()) {
      config = {{"subcommand", "coulomb check"}, {"kappa", kappa}};
      rep = suite_report(run_suite("coulomb", kappa, seed), config);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << " (sample " << e.sample_index() << ", capacity " << e.capacity() << ")\n";
    return kVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
  if (!rep.json.contains("config")) rep.json["config"] = config;

  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path);
    if (!file) {
      err << "error: cannot open " << output_path << "\n";
      return kUsage;
    }
  }
  std::ostream& sink = output_path.empty() ? out : file;
  const std::string fmt = format.empty() ? rep.default_format : format;
  if (fmt == "csv") {
    write_csv(sink, rep.table ? *rep.table : scalar_table(rep.json));
  } else {
    write_json(sink, rep.json);
    sink << "\n";
  }
  if (!rep.passed) err << "verification failed\n";
  return rep.passed ? kOk : kVerificationFailed;
}

}  // namespace slepf::cli
