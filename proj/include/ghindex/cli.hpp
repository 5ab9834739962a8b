#pragma once

// Command-line front end: build, metrics, order, tail, fit, synth.
//
// Every subcommand is a pure function of its flags and --seed. Output goes to
// --out (written through a temporary file and renamed into place) or stdout.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghindex/curve.hpp"
#include "ghindex/ingest.hpp"
#include "ghindex/metrics.hpp"
#include "ghindex/stats.hpp"
#include "ghindex/synth.hpp"
#include "ghindex/tree.hpp"
#include "ghindex/tree_io.hpp"

#ifndef GHINDEX_VERSION
#define GHINDEX_VERSION "0.0.0"
#endif

namespace ghindex {

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string attrs;
  std::string delimiter = ",";
  std::string keep_missing = "drop";
  std::string normalize = "minmax";
  std::string sample_file;
  std::size_t bucket = 1;
  std::vector<std::size_t> bucket_sweep;
  std::string scheme = "ring";
  std::uint64_t seed = 42;
  std::string out;
  std::string report;
  std::string format;
  std::string tail_source = "static-cells";
  unsigned max_bits = kDefaultMaxBits;
  std::size_t replicates = 1000;
  SynthSpec synth;
  std::string distribution = "uniform";
};

namespace cli_detail {

/// Writes path atomically: temp file in the same directory, then rename.
inline void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + temp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + temp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

inline void emit(const RunConfig& config, const std::string& content, std::ostream& out) {
  if (config.out.empty()) {
    out << content;
  } else {
    write_file(config.out, content);
  }
}

inline std::vector<Scheme> schemes(const RunConfig& config, bool allow_both) {
  if (config.scheme == "both") {
    if (!allow_both) throw std::invalid_argument("--scheme both is only valid for metrics");
    return {Scheme::Bubble, Scheme::Ring};
  }
  return {parse_scheme(config.scheme)};
}

inline char delimiter(const RunConfig& config) {
  if (config.delimiter == "\\t" || config.delimiter == "tab") return '\t';
  if (config.delimiter.size() != 1) throw std::invalid_argument("delimiter must be a single character");
  return config.delimiter[0];
}

inline IngestResult load(const RunConfig& config) {
  if (config.input.empty()) throw std::invalid_argument("--input is required");
  IngestOptions options;
  options.delimiter = delimiter(config);
  options.seed = config.seed;
  options.missing = parse_missing_policy(config.keep_missing);
  options.normalize = parse_normalization(config.normalize);
  return load_csv_file(config.input, parse_attribute_specs(config.attrs), options);
}

/// One value per line, or the first column of a CSV; a non-numeric first line
/// is taken as a header.
inline std::vector<double> load_sample(const std::string& path, char delim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<double> values;
  std::vector<std::string> fields;
  std::size_t line = 0;
  while (read_csv_record(in, delim, fields)) {
    ++line;
    if (fields.empty() || detail::trim(fields[0]).empty()) continue;
    const auto value = parse_number(fields[0]);
    if (!value) {
      if (line == 1) continue;
      throw std::runtime_error("sample line " + std::to_string(line) + ": cannot parse '" + fields[0] + "'");
    }
    values.push_back(*value);
  }
  if (values.empty()) throw std::runtime_error("sample file '" + path + "' holds no values");
  return values;
}

/// The sample whose tail is analysed: a sample file, or occupancies of the
/// static cell grid at k = static_k (default) or of the scaled tree's leaves.
inline std::vector<double> occupancy_sample(const RunConfig& config, nlohmann::ordered_json& meta) {
  if (!config.sample_file.empty()) {
    meta["source"] = "sample-file";
    return load_sample(config.sample_file, delimiter(config));
  }
  const auto ingest = load(config);
  const auto& cloud = ingest.cloud;
  const Scheme scheme = schemes(config, false).front();
  std::vector<std::uint64_t> occupancies;
  meta["source"] = config.tail_source;
  meta["n"] = cloud.dimension();
  meta["points"] = cloud.size();
  meta["s"] = config.bucket;
  meta["scheme"] = to_string(scheme);
  if (config.tail_source == "static-cells") {
    const unsigned k = static_k(cloud.size(), config.bucket, cloud.dimension());
    meta["k"] = k;
    occupancies = static_profile(cloud, k, scheme, config.bucket).occupancies;
  } else if (config.tail_source == "scaled-leaves") {
    occupancies = leaf_occupancies(build_scaled(cloud, config.bucket, scheme, config.max_bits));
  } else {
    throw std::invalid_argument("unknown tail source '" + config.tail_source + "'");
  }
  return {occupancies.begin(), occupancies.end()};
}

inline nlohmann::ordered_json fit_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  if (fit.model == Model::PowerLaw) {
    j["alpha"] = fit.alpha;
    j["xmin"] = fit.xmin;
  } else {
    j["mu"] = fit.mu;
    j["sigma"] = fit.sigma;
  }
  j["n_tail"] = fit.n_tail;
  j["log_likelihood"] = fit.log_likelihood;
  j["ks"] = fit.ks;
  j["gof_p"] = fit.gof_p ? nlohmann::ordered_json(*fit.gof_p) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace cli_detail

inline int cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto ingest = cli_detail::load(config);
  const Scheme scheme = cli_detail::schemes(config, false).front();
  const auto tree = build_scaled(ingest.cloud, config.bucket, scheme, config.max_bits);
  std::ostringstream body;
  const std::string format = config.format.empty() ? "json" : config.format;
  if (format == "json") {
    write_tree_json(body, tree);
  } else if (format == "dot") {
    write_tree_dot(body, tree);
  } else {
    throw std::invalid_argument("build writes json or dot, not '" + format + "'");
  }
  cli_detail::emit(config, body.str(), out);
  if (!config.report.empty()) cli_detail::write_file(config.report, report_json(ingest.report).dump(2) + "\n");
  const auto counts = tree.leaf_counts();
  auto& summary = config.out.empty() ? err : out;
  summary << "points " << ingest.cloud.size() << " dropped " << ingest.report.rows_dropped << " nodes "
          << tree.nodes().size() << " leaves " << counts.total << " non_empty " << counts.non_empty << " overfilled "
          << counts.overfilled << '\n';
  return 0;
}

inline int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto ingest = cli_detail::load(config);
  const auto buckets = config.bucket_sweep.empty() ? std::vector<std::size_t>{config.bucket} : config.bucket_sweep;
  const std::string format = config.format.empty() ? "csv" : config.format;
  if (format != "csv" && format != "json") throw std::invalid_argument("metrics writes csv or json");
  std::string body = format == "csv" ? std::string(kMetricsCsvHeader) + "\n" : std::string();
  auto rows = nlohmann::ordered_json::array();
  int status = 0;
  for (std::size_t s : buckets) {
    for (Scheme scheme : cli_detail::schemes(config, true)) {
      const auto m = compute_metrics(ingest.cloud, s, scheme, config.max_bits);
      if (m.diagnostic) {
        err << "diagnostic (s=" << s << ", " << to_string(scheme) << "): " << *m.diagnostic << '\n';
        status = 2;
      }
      if (format == "csv") {
        body += metrics_csv_row(m) + "\n";
      } else {
        rows.push_back(metrics_json(m));
      }
    }
  }
  if (format == "json") body = rows.dump(2) + "\n";
  cli_detail::emit(config, body, out);
  return status;
}

inline int cmd_order(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto ingest = cli_detail::load(config);
  const Scheme scheme = cli_detail::schemes(config, false).front();
  const auto order = preorder_index(build_scaled(ingest.cloud, config.bucket, scheme, config.max_bits));
  std::string body;
  const bool csv = config.format == "csv";
  if (!config.format.empty() && !csv) throw std::invalid_argument("order writes plain ids or csv");
  if (csv) body = "id,leaf\n";
  for (const auto& p : order) {
    body += std::to_string(p.id);
    if (csv) body += "," + std::to_string(p.leaf);
    body += '\n';
  }
  cli_detail::emit(config, body, out);
  return 0;
}

inline int cmd_tail(const RunConfig& config, std::ostream& out, std::ostream&) {
  nlohmann::ordered_json meta;
  const auto sample = cli_detail::occupancy_sample(config, meta);
  const auto tail = tail_ccdf(sample);
  std::string body = "x,ccdf\n";
  for (std::size_t i = 0; i < tail.x.size(); ++i) {
    body += format_number(tail.x[i]) + "," + format_number(tail.ccdf[i]) + "\n";
  }
  cli_detail::emit(config, body, out);
  return 0;
}

inline int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.replicates != 0 && config.replicates < kMinReplicates) {
    throw std::invalid_argument("--replicates must be 0 (skip) or at least " + std::to_string(kMinReplicates));
  }
  nlohmann::ordered_json j;
  const auto sample = cli_detail::occupancy_sample(config, j);
  j["sample_size"] = sample.size();
  auto powerlaw = fit_powerlaw(sample);
  auto lognormal = fit_lognormal(sample);
  if (config.replicates > 0) {
    powerlaw.gof_p = gof_bootstrap(sample, powerlaw, config.replicates, derive_seed(config.seed, 1));
    if (lognormal.sigma > 0) {
      lognormal.gof_p = gof_bootstrap(sample, lognormal, config.replicates, derive_seed(config.seed, 2));
    }
  }
  const auto comparison = compare_models(sample, lognormal, powerlaw);
  j["replicates"] = config.replicates;
  j["seed"] = config.seed;
  j["powerlaw"] = cli_detail::fit_json(powerlaw);
  j["lognormal"] = cli_detail::fit_json(lognormal);
  j["comparison"] = {{"log_likelihood_ratio", comparison.log_likelihood_ratio},
                     {"normalized_ratio", comparison.normalized_ratio},
                     {"p_value", comparison.p_value},
                     {"n_tail", comparison.n_tail},
                     {"preferred", comparison.log_likelihood_ratio > 0   ? "lognormal"
                                   : comparison.log_likelihood_ratio < 0 ? "powerlaw"
                                                                         : "neither"}};
  cli_detail::emit(config, j.dump(2) + "\n", out);
  return 0;
}

inline int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream&) {
  auto spec = config.synth;
  spec.distribution = parse_distribution(config.distribution);
  spec.seed = config.seed;
  std::ostringstream body;
  write_cloud_csv(body, generate(spec));
  cli_detail::emit(config, body.str(), out);
  return 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig config;
  CLI::App app{"Gray-Hilbert curve index: build, measure and order point clouds"};
  app.name("ghindex");
  app.set_version_flag("--version", std::string("ghindex ") + GHINDEX_VERSION);
  app.require_subcommand(1, 1);

  const auto scheme_check = CLI::IsMember({"bubble", "ring", "both"});
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "seed for all randomness")->capture_default_str();
    sub->add_option("--out", config.out, "output file (default: stdout)");
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "CSV file with a header row");
    sub->add_option("--attrs", config.attrs, "selected columns, e.g. a,b:cat,c:date (default: all but id)");
    sub->add_option("--delimiter", config.delimiter, "field delimiter; 'tab' for tabs")->capture_default_str();
    sub->add_option("--keep-missing", config.keep_missing, "drop | impute-zero")
        ->check(CLI::IsMember({"drop", "impute-zero"}))
        ->capture_default_str();
    sub->add_option("--normalize", config.normalize, "minmax | none")
        ->check(CLI::IsMember({"minmax", "none"}))
        ->capture_default_str();
  };
  auto add_tree = [&](CLI::App* sub) {
    sub->add_option("--bucket", config.bucket, "bucket capacity s")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--scheme", config.scheme, "bubble | ring | both")->check(scheme_check)->capture_default_str();
    sub->add_option("--max-bits", config.max_bits, "depth limit in bits per coordinate")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
  };
  auto add_tail = [&](CLI::App* sub) {
    sub->add_option("--tail-source", config.tail_source, "static-cells | scaled-leaves")
        ->check(CLI::IsMember({"static-cells", "scaled-leaves"}))
        ->capture_default_str();
    sub->add_option("--sample-file", config.sample_file, "analyse these values instead of a cloud");
  };

  auto* build = app.add_subcommand("build", "build the scaled tree and export it");
  add_input(build);
  add_tree(build);
  add_common(build);
  build->add_option("--format", config.format, "json | dot")->check(CLI::IsMember({"json", "dot"}));
  build->add_option("--report", config.report, "write the ingest report JSON here");

  auto* metrics = app.add_subcommand("metrics", "capacity ratio, sparsity and related measures");
  add_input(metrics);
  add_tree(metrics);
  add_common(metrics);
  metrics->add_option("--bucket-sweep", config.bucket_sweep, "list of capacities, e.g. 1,2,4")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  metrics->add_option("--format", config.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* order = app.add_subcommand("order", "point ids in curve order");
  add_input(order);
  add_tree(order);
  add_common(order);
  order->add_option("--format", config.format, "csv for id,leaf pairs")->check(CLI::IsMember({"csv"}));

  auto* tail = app.add_subcommand("tail", "tail distribution P(X >= x) of occupancies");
  add_input(tail);
  add_tree(tail);
  add_tail(tail);
  add_common(tail);

  auto* fit = app.add_subcommand("fit", "log-normal and power-law fits with model comparison");
  add_input(fit);
  add_tree(fit);
  add_tail(fit);
  add_common(fit);
  fit->add_option("--replicates", config.replicates, "bootstrap replicates (0 skips the bootstrap)")
      ->capture_default_str();

  auto* synth = app.add_subcommand("synth", "generate a synthetic cloud as CSV");
  add_common(synth);
  synth->add_option("--distribution", config.distribution, "uniform | lognormal-cluster | pareto-cluster | mixture")
      ->check(CLI::IsMember({"uniform", "lognormal-cluster", "pareto-cluster", "mixture"}))
      ->capture_default_str();
  synth->add_option("--n", config.synth.n, "dimension")->capture_default_str();
  synth->add_option("--count", config.synth.count, "number of points")->capture_default_str();
  synth->add_option("--mu", config.synth.mu, "log-normal radius log-mean")->capture_default_str();
  synth->add_option("--sigma", config.synth.sigma, "log-normal radius log-deviation")->capture_default_str();
  synth->add_option("--alpha", config.synth.alpha, "Pareto radius exponent")->capture_default_str();
  synth->add_option("--xmin", config.synth.xmin, "Pareto radius scale")->capture_default_str();
  synth->add_option("--clusters", config.synth.clusters, "cluster count")->capture_default_str();
  synth->add_option("--mixture-weight", config.synth.mixture_weight, "clustered share of a mixture")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const auto* chosen = app.get_subcommands().front();
    config.subcommand = chosen->get_name();
    if (chosen == build) return cmd_build(config, out, err);
    if (chosen == metrics) return cmd_metrics(config, out, err);
    if (chosen == order) return cmd_order(config, out, err);
    if (chosen == tail) return cmd_tail(config, out, err);
    if (chosen == fit) return cmd_fit(config, out, err);
    return cmd_synth(config, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ghindex
