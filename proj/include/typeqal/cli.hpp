#pragma once

// Command-line front end: typeqal strip|sim|check|score.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "typeqal/attrdb.hpp"
#include "typeqal/bundled_attrdb.hpp"
#include "typeqal/checker.hpp"
#include "typeqal/curation.hpp"
#include "typeqal/errors.hpp"
#include "typeqal/harvest.hpp"
#include "typeqal/parallel.hpp"
#include "typeqal/stripper.hpp"

namespace typeqal {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kPartial = 1;
inline constexpr int kUsage = 2;
inline constexpr int kMissingTool = 3;
inline constexpr int kTimeout = 4;
}  // namespace exit_code

struct CliConfig {
  std::string subcommand;
  unsigned jobs = default_jobs();

  // strip
  std::filesystem::path src, dst;
  std::optional<std::filesystem::path> strip_report;

  // sim
  std::filesystem::path truth_repo, stub_dir;
  std::optional<std::filesystem::path> attr_db;
  std::size_t rare_threshold = 1;
  bool full_name = false;
  std::optional<std::filesystem::path> sim_report, sim_csv;

  // check
  std::filesystem::path repo;
  std::string checker_command = std::string(kDefaultCheckerCommand);
  std::vector<std::string> whitelist;
  double timeout_seconds = 900;
  std::optional<std::filesystem::path> check_report, tree;

  // score
  std::filesystem::path meta_json;
  CurationWeights weights;
  FilterLimits limits;
  std::optional<std::filesystem::path> score_out;
};

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  write_text_file(p, j.dump(2) + "\n");
}

inline void print_warnings(std::ostream& err, const std::vector<Warning>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w.path << ": " << w.message << '\n';
}

inline int cmd_strip(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto summary = strip_repo(c.src, c.dst, c.jobs);
  nlohmann::json j;
  j["files"] = summary.files;
  j["edits"] = summary.edits;
  j["edits_by_reason"] = summary.edits_by_reason;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : summary.failures) {
    j["failures"].push_back({{"path", f.path}, {"error", f.error}});
    err << "error: " << f.path << ": " << f.error << '\n';
  }
  if (c.strip_report) write_json(*c.strip_report, j);
  out << "files=" << summary.files << " edits=" << summary.edits << " failures=" << summary.failures.size() << '\n';
  return summary.failures.empty() ? exit_code::kOk : exit_code::kPartial;
}

inline int cmd_sim(const CliConfig& c, std::ostream& out, std::ostream& err) {
  AttributeDatabase db;
  try {
    db = c.attr_db ? load_attrdb(*c.attr_db) : parse_attrdb(kBundledAttrDb);
  } catch (const std::exception& e) {
    err << "error: attribute database: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  const auto truth = harvest_truth(c.truth_repo, c.jobs);
  const auto stubs = parse_stub_dir(c.stub_dir, c.jobs);
  print_warnings(err, truth.warnings);
  print_warnings(err, stubs.warnings);
  const auto eval = evaluate(truth.cases, stubs.predictions, db, c.rare_threshold, truth.function_count,
                             c.full_name ? NameMatch::FullName : NameMatch::LastSegment);
  std::vector<Warning> warnings = truth.warnings;
  warnings.insert(warnings.end(), stubs.warnings.begin(), stubs.warnings.end());
  if (c.sim_report) write_json(*c.sim_report, report_json(c.truth_repo.generic_string(), eval, warnings));
  if (c.sim_csv) write_text_file(*c.sim_csv, report_csv(eval));
  const auto& m = eval.metrics;
  out << "typesim=" << fixed3(m.typesim_overall) << " wo_missing=" << fixed3(m.typesim_wo_missing)
      << " missing=" << fixed3(m.missing_rate) << '\n';
  if (m.case_count == 0) {
    err << "error: no annotated cases found in " << c.truth_repo.string() << '\n';
    return exit_code::kPartial;
  }
  return exit_code::kOk;
}

inline std::filesystem::path scratch_dir() {
  std::mt19937_64 rng(std::random_device{}());
  return std::filesystem::temp_directory_path() / ("typeqal-check-" + std::to_string(rng()));
}

inline int cmd_check(const CliConfig& c, std::ostream& out, std::ostream& err) {
  CheckerConfig config;
  config.command = c.checker_command;
  if (!c.whitelist.empty()) config.whitelist = {c.whitelist.begin(), c.whitelist.end()};
  config.timeout = std::chrono::milliseconds(static_cast<long long>(c.timeout_seconds * 1000));

  const std::filesystem::path tree = c.tree ? *c.tree : scratch_dir();
  struct Cleanup {
    std::filesystem::path p;
    bool active;
    ~Cleanup() {
      std::error_code ec;
      if (active) std::filesystem::remove_all(p, ec);
    }
  } cleanup{tree, !c.tree};

  const auto applied = apply_stubs(c.repo, c.stub_dir, tree);
  print_warnings(err, applied.warnings);
  CheckReport report;
  try {
    report = run_typecheck(tree, config);
  } catch (const CheckerNotFound& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kMissingTool;
  } catch (const CheckerCrashed& e) {
    err << "error: " << e.what() << '\n' << e.output();
    return exit_code::kPartial;
  }
  auto j = check_report_json(report, config.whitelist);
  j["repo"] = c.repo.generic_string();
  j["stubs_applied"] = applied.applied;
  if (c.check_report) write_json(*c.check_report, j);
  if (report.timed_out) {
    out << "typecheck=N/A\n";
    err << "error: checker timed out after " << c.timeout_seconds << " s\n";
    return exit_code::kTimeout;
  }
  out << "typecheck=" << report.counted << '\n';
  return exit_code::kOk;
}

inline int cmd_score(const CliConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<RepoMetadata> metas;
  try {
    metas = parse_metadata(read_text_file(c.meta_json));
    validate(c.weights);
  } catch (const SchemaError& e) {
    err << "error: " << c.meta_json.string() << ": " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  for (const auto& m : metas) {
    const auto f = filter_candidate(m, c.limits);
    if (f.accepted) continue;
    err << "filtered: " << m.name << ':';
    for (const auto& r : f.reasons) err << ' ' << r;
    err << '\n';
  }
  const std::string csv = ranked_csv(rank_candidates(metas, c.limits, c.weights));
  if (c.score_out) {
    write_text_file(*c.score_out, csv);
  } else {
    out << csv;
  }
  return exit_code::kOk;
}

}  // namespace detail

/// Parses arguments and runs one subcommand; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Evaluate Python type inference: strip annotations, score predicted stubs, type-check, curate."};
  app.name("typeqal");
  app.require_subcommand(1);
  app.add_option("-j,--jobs", c.jobs, "Worker threads for per-file work")->check(CLI::PositiveNumber);

  auto* strip = app.add_subcommand("strip", "Remove type annotations from a repository");
  strip->add_option("src", c.src, "Typed source repository")->required()->check(CLI::ExistingDirectory);
  strip->add_option("dst", c.dst, "Output directory")->required();
  strip->add_option("--report", c.strip_report, "Summary JSON path");

  auto* sim = app.add_subcommand("sim", "Score predicted stubs against the original annotations");
  sim->add_option("truth_repo", c.truth_repo, "Typed source repository")->required()->check(CLI::ExistingDirectory);
  sim->add_option("stub_dir", c.stub_dir, "Directory of predicted .pyi files")->required()->check(CLI::ExistingDirectory);
  sim->add_option("--attr-db", c.attr_db, "Attribute database JSON (default: bundled snapshot)")->check(CLI::ExistingFile);
  sim->add_option("--rare-threshold", c.rare_threshold, "Max occurrences for a truth type to count as rare")
      ->capture_default_str();
  sim->add_flag("--full-name", c.full_name, "Compare qualified names in full instead of by last segment");
  sim->add_option("--report", c.sim_report, "Report JSON path");
  sim->add_option("--csv", c.sim_csv, "Per-case CSV path");

  auto* check = app.add_subcommand("check", "Type-check a repository with predicted stubs applied");
  check->add_option("repo", c.repo, "Repository (stripped or original)")->required()->check(CLI::ExistingDirectory);
  check->add_option("stub_dir", c.stub_dir, "Directory of predicted .pyi files")->required()->check(CLI::ExistingDirectory);
  check->add_option("--checker-cmd", c.checker_command, "Checker command; {tree} expands to the checked tree")
      ->capture_default_str();
  check->add_option("--whitelist", c.whitelist, "Counted error codes (comma separated)")->delimiter(',');
  check->add_option("--timeout", c.timeout_seconds, "Checker timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  check->add_option("--tree", c.tree, "Keep the checked tree in this directory");
  check->add_option("--out", c.check_report, "Report JSON path");

  auto* score = app.add_subcommand("score", "Filter and rank candidate repositories");
  score->add_option("meta_json", c.meta_json, "JSON array of repository metadata")->required()->check(CLI::ExistingFile);
  score->add_option("--alpha", c.weights.alpha, "Coverage weight")->capture_default_str();
  score->add_option("--beta", c.weights.beta, "Popularity weight")->capture_default_str();
  score->add_option("--gamma", c.weights.gamma, "Complexity weight")->capture_default_str();
  score->add_option("--max-tokens", c.limits.max_tokens)->capture_default_str();
  score->add_option("--min-files", c.limits.min_files)->capture_default_str();
  score->add_option("--min-typed-ratio", c.limits.min_typed_ratio)->capture_default_str();
  score->add_option("--out", c.score_out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    if (strip->parsed()) return detail::cmd_strip(c, out, err);
    if (sim->parsed()) return detail::cmd_sim(c, out, err);
    if (check->parsed()) return detail::cmd_check(c, out, err);
    return detail::cmd_score(c, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kPartial;
  }
}

}  // namespace typeqal
