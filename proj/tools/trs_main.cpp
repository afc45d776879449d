// trs: population-size estimation from triple-record-system count data.
//
// Subcommands: datasets, fit, estimate, simulate, report, replay. Every
// command echoes a machine-readable JSON document; the printed tables are a
// rendering of that JSON, never a second computation. Each run writes a
// manifest whose argv replays to byte-identical outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trs/counts.hpp"
#include "trs/estimators.hpp"
#include "trs/gibbs.hpp"
#include "trs/manifest.hpp"
#include "trs/posterior.hpp"
#include "trs/simulation.hpp"
#include "trs/version.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct DataOptions {
  std::string source;  // builtin name or file path
};

struct LoadedData {
  trs::TrsCounts counts;
  trs::DatasetMeta meta;
  std::string digest_source;
  std::string digest_bytes;
};

LoadedData load_data(const std::string& source) {
  LoadedData out;
  const bool is_file = std::filesystem::exists(source);
  if (!is_file) {
    const auto& ds = trs::builtin_dataset(source);
    out.counts = ds.counts;
    out.meta = ds.meta;
    out.digest_source = "builtin:" + ds.meta.name;
    out.digest_bytes = trs::emit_counts(ds.counts);
    return out;
  }
  const std::string bytes = trs::read_file(source);
  if (!bytes.empty() && (bytes.front() == '{' || bytes.front() == '[')) {
    const json j = json::parse(bytes);
    trs::TrsCounts c;
    c.x111 = j.at("x111").get<std::int64_t>();
    c.x110 = j.at("x110").get<std::int64_t>();
    c.x101 = j.at("x101").get<std::int64_t>();
    c.x011 = j.at("x011").get<std::int64_t>();
    c.x100 = j.at("x100").get<std::int64_t>();
    c.x010 = j.at("x010").get<std::int64_t>();
    c.x001 = j.at("x001").get<std::int64_t>();
    c.validate();
    out.counts = c;
    out.meta.name = j.value("name", source);
    out.meta.stratum = j.value("stratum", "all");
    if (j.contains("inhabitants")) {
      out.meta.inhabitants = j.at("inhabitants").get<std::int64_t>();
    }
  } else {
    out.counts = trs::parse_counts(bytes);
    out.meta.name = source;
  }
  out.digest_source = "file:" + source;
  out.digest_bytes = bytes.empty() ? trs::emit_counts(out.counts) : bytes;
  return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// ---------------------------------------------------------------------------
// datasets
// ---------------------------------------------------------------------------

ordered_json datasets_json() {
  ordered_json out = ordered_json::array();
  for (const auto& ds : trs::builtin_datasets()) {
    ordered_json j;
    j["name"] = ds.meta.name;
    j["stratum"] = ds.meta.stratum;
    const auto cells = ds.counts.cells();
    const auto& names = trs::TrsCounts::cell_names();
    for (std::size_t i = 0; i < 7; ++i) j[std::string(names[i])] = cells[i];
    j["x0"] = ds.counts.observed_total();
    if (ds.meta.inhabitants) j["inhabitants"] = *ds.meta.inhabitants;
    out.push_back(std::move(j));
  }
  return out;
}

void render_datasets(const ordered_json& rows) {
  std::printf("%-10s %-7s %5s %5s %5s %5s %5s %5s %5s %6s %12s\n", "name",
              "stratum", "x111", "x110", "x101", "x011", "x100", "x010", "x001",
              "x0", "inhabitants");
  for (const auto& r : rows) {
    std::printf("%-10s %-7s %5lld %5lld %5lld %5lld %5lld %5lld %5lld %6lld %12s\n",
                r.at("name").get<std::string>().c_str(),
                r.at("stratum").get<std::string>().c_str(),
                r.at("x111").get<long long>(), r.at("x110").get<long long>(),
                r.at("x101").get<long long>(), r.at("x011").get<long long>(),
                r.at("x100").get<long long>(), r.at("x010").get<long long>(),
                r.at("x001").get<long long>(), r.at("x0").get<long long>(),
                r.contains("inhabitants")
                    ? std::to_string(r.at("inhabitants").get<long long>()).c_str()
                    : "-");
  }
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
  std::string data;
  std::string prior = "jeffreys";
  std::vector<double> alpha_prior;   // beta_1..beta_5
  std::vector<double> delta_prior;   // gamma_1, lambda_1, ..., gamma_3, lambda_3
  std::int64_t iters = 200000;
  std::int64_t burnin = -1;  // default: 10% of iters
  std::int64_t thin = 10;
  std::uint64_t seed = 0;
  std::vector<int> pin_alpha;
  std::string output = ".";
  std::string format = "json";
};

trs::PriorSpec prior_from_options(const FitOptions& opt) {
  if (opt.prior == "jeffreys") {
    if (!opt.alpha_prior.empty() || !opt.delta_prior.empty()) {
      throw std::invalid_argument("--alpha-prior/--delta-prior require --prior informative");
    }
    return trs::PriorSpec::jeffreys();
  }
  if (opt.prior != "informative") {
    throw std::invalid_argument("--prior must be jeffreys or informative");
  }
  if (opt.alpha_prior.size() != 5 || opt.delta_prior.size() != 6) {
    throw std::invalid_argument(
        "informative prior needs --alpha-prior b1..b5 and --delta-prior "
        "g1,l1,g2,l2,g3,l3");
  }
  std::array<double, 5> conc{};
  for (int i = 0; i < 5; ++i) conc[i] = opt.alpha_prior[i];
  std::array<double, 3> shape{}, scale{};
  for (int l = 0; l < 3; ++l) {
    shape[l] = opt.delta_prior[2 * l];
    scale[l] = opt.delta_prior[2 * l + 1];
  }
  return trs::PriorSpec::informative(conc, shape, scale);
}

ordered_json summarize_scalar(const std::vector<double>& draws, double level) {
  const trs::PosteriorSummary s = trs::summarize(draws, level);
  ordered_json j;
  j["median"] = s.median;
  j["mean"] = s.mean;
  j["mae"] = s.mae;
  j["hpd_low"] = s.hpd_low;
  j["hpd_high"] = s.hpd_high;
  if (draws.size() >= 1000) j["geweke_z"] = trs::geweke_z(draws);
  return j;
}

int cmd_fit(const FitOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedData data = load_data(opt.data);
  const trs::PriorSpec prior = prior_from_options(opt);

  trs::GibbsConfig cfg;
  cfg.iterations = opt.iters;
  cfg.burn_in = opt.burnin >= 0 ? opt.burnin : opt.iters / 10;
  cfg.thin = opt.thin;
  cfg.seed = opt.seed;
  for (int s : opt.pin_alpha) {
    if (s < 1 || s > 4) throw std::invalid_argument("--pin-alpha indices are 1..4");
    cfg.pin_alpha[static_cast<std::size_t>(s - 1)] = true;
  }
  cfg.validate();

  const trs::Chain chain = trs::run_gibbs(data.counts, prior, cfg);

  ordered_json summary;
  summary["data"] = data.meta.name;
  summary["stratum"] = data.meta.stratum;
  if (data.meta.inhabitants) summary["inhabitants"] = *data.meta.inhabitants;
  summary["x0"] = data.counts.observed_total();
  summary["prior"] = opt.prior;
  summary["iterations"] = cfg.iterations;
  summary["burn_in"] = cfg.burn_in;
  summary["thin"] = cfg.thin;
  summary["seed"] = cfg.seed;
  summary["retained"] = chain.size();

  const auto n_draws = chain.scalar("N");
  summary["N"] = summarize_scalar(n_draws, 0.95);
  const double n_median = summary["N"]["median"].get<double>();
  summary["ur_percent"] = trs::ur_rate(n_median, data.counts.observed_total());
  if (data.meta.inhabitants) {
    summary["ir_per_100k"] = trs::ir_rate(n_median, *data.meta.inhabitants);
  }
  bool diagnostics_clean = true;
  for (const char* name : {"alpha1", "alpha2", "alpha3", "alpha4", "delta1",
                           "delta2", "delta3", "P1", "P2", "P3"}) {
    summary[name] = summarize_scalar(chain.scalar(name), 0.95);
  }
  for (const auto& [key, value] : summary.items()) {
    if (value.is_object() && value.contains("geweke_z") &&
        std::fabs(value.at("geweke_z").get<double>()) > 1.96) {
      diagnostics_clean = false;
    }
  }
  summary["geweke_all_below_1p96"] = diagnostics_clean;

  // outputs
  std::vector<std::string> outputs;
  const std::string summary_path = join_path(opt.output, "fit_summary.json");
  trs::atomic_write_file(summary_path, summary.dump(2) + "\n");
  outputs.push_back(summary_path);

  std::ostringstream chain_csv;
  chain.write_csv(chain_csv);
  const std::string chain_path = join_path(opt.output, "chain.csv");
  trs::atomic_write_file(chain_path, chain_csv.str());
  outputs.push_back(chain_path);

  const auto write_hist = [&](const char* scalar, const std::string& stem) {
    const auto draws = chain.scalar(scalar);
    const trs::Histogram h = trs::freedman_diaconis_histogram(draws);
    const std::string path = join_path(opt.output, stem + ".csv");
    trs::atomic_write_file(path, trs::histogram_csv(h));
    outputs.push_back(path);
    if (opt.format == "svg") {
      const std::string svg_path = join_path(opt.output, stem + ".svg");
      trs::atomic_write_file(svg_path, trs::histogram_svg(h, scalar));
      outputs.push_back(svg_path);
    }
  };
  write_hist("N", "hist_N");
  write_hist("P1", "hist_P1");
  write_hist("P2", "hist_P2");
  write_hist("P3", "hist_P3");
  write_hist("alpha1", "density_alpha1");
  write_hist("alpha2", "density_alpha2");
  write_hist("alpha3", "density_alpha3");
  write_hist("alpha4", "density_alpha4");

  // manifest
  trs::RunManifest manifest;
  manifest.command = "fit";
  manifest.argv = {"fit", "--data", opt.data, "--prior", opt.prior,
                   "--iters", std::to_string(opt.iters),
                   "--burnin", std::to_string(cfg.burn_in),
                   "--thin", std::to_string(opt.thin),
                   "--seed", std::to_string(opt.seed),
                   "--output", opt.output, "--format", opt.format};
  for (int s : opt.pin_alpha) {
    manifest.argv.push_back("--pin-alpha");
    manifest.argv.push_back(std::to_string(s));
  }
  if (!opt.alpha_prior.empty()) {
    manifest.argv.push_back("--alpha-prior");
    for (double b : opt.alpha_prior) manifest.argv.push_back(std::to_string(b));
    manifest.argv.push_back("--delta-prior");
    for (double v : opt.delta_prior) manifest.argv.push_back(std::to_string(v));
  }
  manifest.seed = opt.seed;
  manifest.add_input(data.digest_source, data.digest_bytes);
  manifest.config = {{"iterations", cfg.iterations},
                     {"burn_in", cfg.burn_in},
                     {"thin", cfg.thin},
                     {"prior", opt.prior}};
  manifest.outputs = outputs;
  manifest.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(join_path(opt.output, "fit_manifest.json"));

  // human rendering of the JSON document
  std::printf("THBM fit of %s (x0 = %lld, %s prior, %lld iterations)\n",
              summary["data"].get<std::string>().c_str(),
              summary["x0"].get<long long>(), opt.prior.c_str(),
              static_cast<long long>(opt.iters));
  const auto& n = summary["N"];
  std::printf("  N median %.0f  mean %.1f  MAE %.1f  95%% HPD (%.0f, %.0f)\n",
              n["median"].get<double>(), n["mean"].get<double>(),
              n["mae"].get<double>(), n["hpd_low"].get<double>(),
              n["hpd_high"].get<double>());
  std::printf("  UR %.1f%%", summary["ur_percent"].get<double>());
  if (summary.contains("ir_per_100k")) {
    std::printf("  IR %.2f per 100k", summary["ir_per_100k"].get<double>());
  }
  std::printf("\n  Geweke |z| < 1.96 for all tracked scalars: %s\n",
              diagnostics_clean ? "yes" : "NO (inspect chain)");
  std::printf("  wrote %s\n", summary_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateOptions {
  std::string data;
  std::string methods = "sc,llm,independent,qsm,pqsm,mtb";
  int bootstrap = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::string output = ".";
};

int cmd_estimate(const EstimateOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedData data = load_data(opt.data);
  const auto methods = split_csv_list(opt.methods);
  if (methods.empty()) throw std::invalid_argument("no methods given");
  for (const auto& m : methods) {
    if (std::find(trs::estimator_names().begin(), trs::estimator_names().end(), m) ==
        trs::estimator_names().end()) {
      throw std::invalid_argument("unknown method '" + m +
                                  "' (choose from sc,llm,independent,qsm,pqsm,mtb)");
    }
  }

  ordered_json doc;
  doc["data"] = data.meta.name;
  doc["x0"] = data.counts.observed_total();
  doc["bootstrap_replicates"] = opt.bootstrap;
  doc["level"] = opt.level;
  doc["seed"] = opt.seed;
  doc["methods"] = ordered_json::array();

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const auto& m = methods[mi];
    ordered_json row;
    row["method"] = m;
    try {
      const trs::EstimateResult est = trs::run_estimator(m, data.counts);
      row["n_hat"] = est.n_hat;
      row["feasible"] = est.feasible;
      for (const auto& [k, v] : est.extras) row[k] = v;
      if (std::isfinite(est.n_hat)) {
        const auto ci = trs::bootstrap_ci(m, data.counts, opt.bootstrap, opt.level,
                                          opt.seed + mi);
        row["ci_low"] = ci.ci_low;
        row["ci_high"] = ci.ci_high;
        row["mae"] = ci.mae;
        if (ci.failures > 0) row["bootstrap_failures"] = ci.failures;
      }
    } catch (const std::exception& e) {
      row["error"] = e.what();
    }
    doc["methods"].push_back(std::move(row));
  }

  std::vector<std::string> outputs;
  const std::string json_path = join_path(opt.output, "estimates.json");
  trs::atomic_write_file(json_path, doc.dump(2) + "\n");
  outputs.push_back(json_path);

  std::ostringstream csv;
  csv << "method,n_hat,mae,ci_low,ci_high,feasible\n";
  for (const auto& row : doc["methods"]) {
    csv << row.at("method").get<std::string>() << ',';
    if (row.contains("n_hat")) csv << round2(row.at("n_hat").get<double>());
    csv << ',';
    if (row.contains("mae")) csv << round2(row.at("mae").get<double>());
    csv << ',';
    if (row.contains("ci_low")) csv << round2(row.at("ci_low").get<double>());
    csv << ',';
    if (row.contains("ci_high")) csv << round2(row.at("ci_high").get<double>());
    csv << ',';
    csv << (row.value("feasible", false) ? "yes" : "no") << '\n';
  }
  const std::string csv_path = join_path(opt.output, "estimates.csv");
  trs::atomic_write_file(csv_path, csv.str());
  outputs.push_back(csv_path);

  trs::RunManifest manifest;
  manifest.command = "estimate";
  manifest.argv = {"estimate", "--data", opt.data, "--methods", opt.methods,
                   "--bootstrap", std::to_string(opt.bootstrap),
                   "--level", std::to_string(opt.level),
                   "--seed", std::to_string(opt.seed),
                   "--output", opt.output};
  manifest.seed = opt.seed;
  manifest.add_input(data.digest_source, data.digest_bytes);
  manifest.config = {{"methods", methods},
                     {"bootstrap", opt.bootstrap},
                     {"level", opt.level}};
  manifest.outputs = outputs;
  manifest.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(join_path(opt.output, "estimate_manifest.json"));

  std::printf("Estimates for %s (x0 = %lld, B = %d bootstrap)\n",
              data.meta.name.c_str(),
              static_cast<long long>(data.counts.observed_total()), opt.bootstrap);
  std::printf("  %-12s %9s %8s %18s %s\n", "method", "N_hat", "MAE", "CI", "notes");
  for (const auto& row : doc["methods"]) {
    std::string notes;
    if (row.contains("error")) {
      notes = "error: " + row.at("error").get<std::string>();
    } else if (!row.value("feasible", true)) {
      notes = "infeasible";
    }
    if (row.contains("coverage")) {
      notes += (notes.empty() ? "" : "; ");
      notes += "C=" + std::to_string(row.at("coverage").get<double>()).substr(0, 6);
    }
    char ci[64] = "-";
    if (row.contains("ci_low")) {
      std::snprintf(ci, sizeof(ci), "(%.0f, %.0f)", row.at("ci_low").get<double>(),
                    row.at("ci_high").get<double>());
    }
    std::printf("  %-12s %9.0f %8.1f %18s %s\n",
                row.at("method").get<std::string>().c_str(),
                row.value("n_hat", std::nan("")), row.value("mae", std::nan("")),
                ci, notes.c_str());
  }
  std::printf("  wrote %s\n", json_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string preset;
  std::string scenario_file;
  int reps = 0;  // 0: keep scenario default
  std::uint64_t seed = 0;
  std::string estimators;
  std::string output = ".";
};

int cmd_simulate(const SimulateOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  trs::Scenario scenario;
  std::string input_source, input_bytes;
  if (!opt.preset.empty()) {
    scenario = trs::scenario_by_name(opt.preset);
    input_source = "preset:" + opt.preset;
    input_bytes = scenario.to_json().dump();
  } else if (!opt.scenario_file.empty()) {
    input_bytes = trs::read_file(opt.scenario_file);
    scenario = trs::Scenario::from_json(json::parse(input_bytes));
    input_source = "file:" + opt.scenario_file;
  } else {
    throw std::invalid_argument("simulate needs --preset or --scenario");
  }
  if (opt.reps > 0) scenario.replications = opt.reps;
  if (!opt.estimators.empty()) scenario.estimators = split_csv_list(opt.estimators);
  scenario.validate();

  const trs::SimReport report = trs::run_replications(scenario, opt.seed);
  const ordered_json doc = report.to_json();

  std::vector<std::string> outputs;
  const std::string json_path = join_path(opt.output, "simreport.json");
  trs::atomic_write_file(json_path, doc.dump(2) + "\n");
  outputs.push_back(json_path);
  const std::string csv_path = join_path(opt.output, "simreport.csv");
  trs::atomic_write_file(csv_path, report.to_csv());
  outputs.push_back(csv_path);

  trs::RunManifest manifest;
  manifest.command = "simulate";
  manifest.argv = {"simulate", "--seed", std::to_string(opt.seed),
                   "--output", opt.output};
  if (!opt.preset.empty()) {
    manifest.argv.push_back("--preset");
    manifest.argv.push_back(opt.preset);
  } else {
    manifest.argv.push_back("--scenario");
    manifest.argv.push_back(opt.scenario_file);
  }
  if (opt.reps > 0) {
    manifest.argv.push_back("--reps");
    manifest.argv.push_back(std::to_string(opt.reps));
  }
  if (!opt.estimators.empty()) {
    manifest.argv.push_back("--estimators");
    manifest.argv.push_back(opt.estimators);
  }
  manifest.seed = opt.seed;
  manifest.add_input(input_source, input_bytes);
  manifest.config = scenario.to_json();
  manifest.outputs = outputs;
  manifest.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(join_path(opt.output, "simulate_manifest.json"));

  std::printf("Scenario %s: true N = %lld, %d replications (%s effects)\n",
              report.scenario_name.c_str(), (long long)report.true_n,
              report.replications, report.granularity.c_str());
  std::printf("  %-12s %10s %8s %18s %9s %8s\n", "method", "mean_est", "RMAE",
              "mean CI", "coverage", "dropped");
  for (const auto& er : report.estimators) {
    char ci[64];
    std::snprintf(ci, sizeof(ci), "(%.0f, %.0f)", er.mean_ci_low, er.mean_ci_high);
    std::printf("  %-12s %10.1f %8.4f %18s %8.0f%% %8d\n", er.method.c_str(),
                er.mean_estimate, er.rmae, ci, er.coverage_percent,
                er.failures + er.infeasible);
  }
  std::printf("  wrote %s\n", json_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportOptions {
  std::vector<std::string> fits;
  std::string output = ".";
};

int cmd_report(const ReportOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.fits.empty()) throw std::invalid_argument("report needs fit_summary.json paths");

  ordered_json doc;
  doc["strata"] = ordered_json::array();
  double strata_sum = 0.0;
  std::optional<double> pooled;
  std::string pooled_name;
  std::vector<std::pair<std::string, std::string>> inputs;

  for (const auto& path : opt.fits) {
    const std::string bytes = trs::read_file(path);
    inputs.emplace_back("file:" + path, bytes);
    const json fit = json::parse(bytes);
    const std::string stratum = fit.value("stratum", "all");
    const double median = fit.at("N").at("median").get<double>();
    if (stratum == "all") {
      pooled = median;
      pooled_name = fit.value("data", path);
      continue;
    }
    ordered_json row;
    row["stratum"] = stratum;
    row["data"] = fit.value("data", path);
    row["x0"] = fit.at("x0").get<std::int64_t>();
    row["n_median"] = median;
    row["mae"] = fit.at("N").at("mae").get<double>();
    row["hpd_low"] = fit.at("N").at("hpd_low").get<double>();
    row["hpd_high"] = fit.at("N").at("hpd_high").get<double>();
    row["ur_percent"] = fit.at("ur_percent").get<double>();
    if (fit.contains("ir_per_100k")) {
      row["ir_per_100k"] = fit.at("ir_per_100k").get<double>();
    }
    strata_sum += median;
    doc["strata"].push_back(std::move(row));
  }
  if (doc["strata"].size() > 1) {
    doc["sum_of_strata"] = strata_sum;
    if (pooled) {
      doc["pooled"] = {{"data", pooled_name}, {"n_median", *pooled}};
    }
  }

  std::vector<std::string> outputs;
  const std::string json_path = join_path(opt.output, "report.json");
  trs::atomic_write_file(json_path, doc.dump(2) + "\n");
  outputs.push_back(json_path);

  trs::RunManifest manifest;
  manifest.command = "report";
  manifest.argv = {"report", "--output", opt.output};
  for (const auto& f : opt.fits) manifest.argv.push_back(f);
  for (const auto& [src, bytes] : inputs) manifest.add_input(src, bytes);
  manifest.outputs = outputs;
  manifest.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.write(join_path(opt.output, "report_manifest.json"));

  std::printf("%-8s %6s %9s %7s %18s %7s %7s\n", "stratum", "x0", "N_median",
              "MAE", "95% HPD", "UR%", "IR");
  for (const auto& row : doc["strata"]) {
    char ci[64];
    std::snprintf(ci, sizeof(ci), "(%.0f, %.0f)", row.at("hpd_low").get<double>(),
                  row.at("hpd_high").get<double>());
    std::printf("%-8s %6lld %9.0f %7.1f %18s %7.1f %7s\n",
                row.at("stratum").get<std::string>().c_str(),
                row.at("x0").get<long long>(), row.at("n_median").get<double>(),
                row.at("mae").get<double>(), ci, row.at("ur_percent").get<double>(),
                row.contains("ir_per_100k")
                    ? std::to_string(row.at("ir_per_100k").get<double>()).substr(0, 5).c_str()
                    : "-");
  }
  if (doc.contains("sum_of_strata")) {
    std::printf("sum of strata medians: %.0f", doc["sum_of_strata"].get<double>());
    if (doc.contains("pooled")) {
      std::printf("   pooled (%s): %.0f",
                  doc["pooled"]["data"].get<std::string>().c_str(),
                  doc["pooled"]["n_median"].get<double>());
    }
    std::printf("\n");
  }
  std::printf("wrote %s\n", json_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& argv);

int cmd_replay(const std::string& manifest_path) {
  const trs::RunManifest manifest =
      trs::RunManifest::from_json(json::parse(trs::read_file(manifest_path)));
  std::printf("replaying: trs");
  for (const auto& a : manifest.argv) std::printf(" %s", a.c_str());
  std::printf("\n");
  return dispatch(manifest.argv);
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"Population-size estimation from triple-record-system counts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", trs::kVersion);

  auto* datasets = app.add_subcommand("datasets", "List the bundled datasets");
  std::string datasets_format = "table";
  datasets->add_option("--format", datasets_format, "table or json");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Gibbs fit of the heterogeneous "
                                            "dependence model");
  fit_cmd->add_option("--data", fit.data, "builtin name or counts file")->required();
  fit_cmd->add_option("--prior", fit.prior, "jeffreys or informative");
  fit_cmd->add_option("--alpha-prior", fit.alpha_prior,
                      "Dirichlet hyperparameters b1..b5")->expected(5);
  fit_cmd->add_option("--delta-prior", fit.delta_prior,
                      "gamma/scale pairs g1 l1 g2 l2 g3 l3")->expected(6);
  fit_cmd->add_option("--iters", fit.iters, "Gibbs iterations");
  fit_cmd->add_option("--burnin", fit.burnin, "burn-in (default 10% of iters)");
  fit_cmd->add_option("--thin", fit.thin, "thinning stride");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--pin-alpha", fit.pin_alpha,
                      "pin alpha_s to zero (indices 1..4, repeatable)");
  fit_cmd->add_option("--output", fit.output, "output directory");
  fit_cmd->add_option("--format", fit.format, "json (default) or svg to add plots");

  EstimateOptions est;
  auto* est_cmd = app.add_subcommand("estimate", "Classical estimators with "
                                                 "bootstrap intervals");
  est_cmd->add_option("--data", est.data, "builtin name or counts file")->required();
  est_cmd->add_option("--methods", est.methods, "comma list of sc,llm,independent,qsm,pqsm,mtb");
  est_cmd->add_option("--bootstrap", est.bootstrap, "bootstrap replicates");
  est_cmd->add_option("--level", est.level, "confidence level");
  est_cmd->add_option("--seed", est.seed, "RNG seed");
  est_cmd->add_option("--output", est.output, "output directory");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Replication study on synthetic data");
  sim_cmd->add_option("--preset", sim.preset, "catalog name, e.g. P3:delta5:N500");
  sim_cmd->add_option("--scenario", sim.scenario_file, "scenario JSON file");
  sim_cmd->add_option("--reps", sim.reps, "replication count override");
  sim_cmd->add_option("--seed", sim.seed, "root seed");
  sim_cmd->add_option("--estimators", sim.estimators, "comma list override");
  sim_cmd->add_option("--output", sim.output, "output directory");

  ReportOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Combine stratified fit outputs");
  rep_cmd->add_option("fits", rep.fits, "fit_summary.json paths")->required();
  rep_cmd->add_option("--output", rep.output, "output directory");

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded manifest");
  replay_cmd->add_option("manifest", replay_path, "manifest JSON path")->required();

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  if (datasets->parsed()) {
    const auto rows = datasets_json();
    if (datasets_format == "json") {
      std::printf("%s\n", rows.dump(2).c_str());
    } else {
      render_datasets(rows);
    }
    return 0;
  }
  if (fit_cmd->parsed()) return cmd_fit(fit);
  if (est_cmd->parsed()) return cmd_estimate(est);
  if (sim_cmd->parsed()) return cmd_simulate(sim);
  if (rep_cmd->parsed()) return cmd_report(rep);
  if (replay_cmd->parsed()) return cmd_replay(replay_path);
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
