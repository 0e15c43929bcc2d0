// gqm: GQM security-measurement CLI
//
// Subcommands cover the measurement workflow: lint (plan definition),
// ingest (data collection), measure/report/trend (interpretation), and a
// self-contained demo pipeline.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gqm/bundled.hpp"
#include "gqm/engine.hpp"
#include "gqm/lint.hpp"
#include "gqm/plan.hpp"
#include "gqm/report.hpp"
#include "gqm/store.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;  // lint/validation errors, strict-mode failures
constexpr int kExitIo = 2;        // I/O or store errors
constexpr int kExitParse = 3;     // plan/formula/evidence parse errors, usage

struct Options {
  bool strict = false;
  bool quiet = false;
};

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return std::nullopt;
  }
  return buffer.str();
}

bool write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return false;
  }
  out << content;
  out.flush();
  return static_cast<bool>(out);
}

// Loads and parses a plan document; on failure prints diagnostics and
// returns the exit code, 0 otherwise.
int load_plan(const std::filesystem::path& path, gqm::MeasurementPlan& out) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read plan file " << path << "\n";
    return kExitIo;
  }
  gqm::PlanParse parsed = gqm::parse_plan(*text);
  if (!parsed.ok()) {
    for (const gqm::ParseError& error : parsed.errors) {
      std::cerr << "parse error: " << error.to_string() << "\n";
    }
    return kExitParse;
  }
  out = std::move(*parsed.plan);
  return kExitOk;
}

int require_valid_structure(const gqm::MeasurementPlan& plan) {
  std::vector<gqm::StructureError> errors = gqm::validate_structure(plan);
  for (const gqm::StructureError& error : errors) {
    std::cerr << "structure error: " << error.to_string() << "\n";
  }
  return errors.empty() ? kExitOk : kExitFindings;
}

int emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return kExitOk;
  }
  if (!write_file(out_path, content)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_lint(const std::string& plan_path, const std::string& format_name, const Options& opt) {
  gqm::MeasurementPlan plan;
  if (int rc = load_plan(plan_path, plan); rc != kExitOk) {
    return rc;
  }
  if (int rc = require_valid_structure(plan); rc != kExitOk) {
    return rc;
  }
  std::vector<gqm::Finding> findings = gqm::lint_plan(plan);
  gqm::CriterionMatrix matrix = gqm::criterion_matrix(findings);
  if (format_name == "machine") {
    std::cout << gqm::serialize_findings(findings);
  } else if (format_name != "text") {
    std::cerr << "error: unknown format '" << format_name << "'\n";
    return kExitParse;
  } else if (!opt.quiet) {
    std::cout << gqm::render_findings(findings);
    std::cout << gqm::render_matrix(matrix);
  }
  bool failed = false;
  for (const gqm::Finding& finding : findings) {
    failed = failed || finding.severity == gqm::Severity::error ||
             (opt.strict && finding.severity == gqm::Severity::warning);
  }
  return failed ? kExitFindings : kExitOk;
}

int run_ingest(const std::string& plan_path, const std::string& store_dir,
               const std::string& evidence_path, const Options& opt) {
  gqm::MeasurementPlan plan;
  if (int rc = load_plan(plan_path, plan); rc != kExitOk) {
    return rc;
  }
  std::ifstream evidence(evidence_path, std::ios::binary);
  if (!evidence) {
    std::cerr << "error: cannot read evidence file " << evidence_path << "\n";
    return kExitIo;
  }
  gqm::EvidenceStore store = gqm::EvidenceStore::open(store_dir, /*create=*/true);
  gqm::IngestSummary summary = store.ingest(evidence, plan.period_policy);
  for (const std::string& warning : summary.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  for (const auto& [line, reason] : summary.rejected) {
    std::cerr << "rejected line " << line << ": " << reason << "\n";
  }
  if (!opt.quiet) {
    std::cout << "accepted " << summary.accepted << ", rejected " << summary.rejected.size()
              << "\n";
  }
  return kExitOk;
}

int run_measure(const std::string& plan_path, const std::string& store_dir,
                const std::string& period, const std::string& out_path, const Options& opt) {
  gqm::MeasurementPlan plan;
  if (int rc = load_plan(plan_path, plan); rc != kExitOk) {
    return rc;
  }
  if (int rc = require_valid_structure(plan); rc != kExitOk) {
    return rc;
  }
  if (!gqm::period_id_valid(period, plan.period_policy.granularity)) {
    std::cerr << "error: period '" << period << "' does not match the plan's "
              << gqm::granularity_name(plan.period_policy.granularity) << " granularity\n";
    return kExitParse;
  }
  gqm::EvidenceStore store = gqm::EvidenceStore::open(store_dir);
  gqm::MeasurementRun run = gqm::run_measurement(plan, store, period);
  std::string path = out_path.empty() ? plan.plan_id + "." + period + ".run.json" : out_path;
  if (!write_file(path, gqm::serialize_run(run))) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitIo;
  }
  if (!opt.quiet) {
    std::cout << "wrote " << path << "\n";
    for (const auto& [goal_id, status] : run.goal_statuses) {
      std::cout << goal_id << ": " << gqm::status_name(status) << "\n";
    }
  }
  if (opt.strict) {
    for (const gqm::MetricResult& result : run.metric_results) {
      if (result.verdict == gqm::HypothesisVerdict::rejected) {
        std::cerr << "hypothesis rejected for " << result.metric_id << "\n";
        return kExitFindings;
      }
    }
  }
  return kExitOk;
}

int run_report(const std::string& run_path, const std::string& plan_path,
               const std::string& format_name, const std::string& out_path) {
  auto run_text = read_file(run_path);
  if (!run_text) {
    std::cerr << "error: cannot read run file " << run_path << "\n";
    return kExitIo;
  }
  gqm::RunParse run = gqm::parse_run(*run_text);
  if (!run.ok()) {
    std::cerr << "parse error: " << run.error << " in " << run_path << "\n";
    return kExitParse;
  }
  gqm::MeasurementPlan plan;
  if (int rc = load_plan(plan_path, plan); rc != kExitOk) {
    return rc;
  }
  auto format = gqm::report_format_from_name(format_name);
  if (!format) {
    std::cerr << "error: unknown format '" << format_name << "'\n";
    return kExitParse;
  }
  return emit(gqm::render_construct(*run.run, plan, *format), out_path);
}

int run_trend(const std::string& plan_path, const std::string& store_dir,
              const std::vector<std::string>& periods, const std::string& format_name,
              const std::string& out_path) {
  gqm::MeasurementPlan plan;
  if (int rc = load_plan(plan_path, plan); rc != kExitOk) {
    return rc;
  }
  if (int rc = require_valid_structure(plan); rc != kExitOk) {
    return rc;
  }
  for (const std::string& period : periods) {
    if (!gqm::period_id_valid(period, plan.period_policy.granularity)) {
      std::cerr << "error: period '" << period << "' does not match the plan's "
                << gqm::granularity_name(plan.period_policy.granularity) << " granularity\n";
      return kExitParse;
    }
  }
  auto format = gqm::report_format_from_name(format_name);
  if (!format) {
    std::cerr << "error: unknown format '" << format_name << "'\n";
    return kExitParse;
  }
  gqm::EvidenceStore store = gqm::EvidenceStore::open(store_dir);
  // trend series require strictly increasing periods
  std::vector<std::string> ordered = periods;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  std::vector<gqm::MeasurementRun> runs;
  for (const std::string& period : ordered) {
    runs.push_back(gqm::run_measurement(plan, store, period));
  }
  std::vector<gqm::TrendSeries> series;
  for (const gqm::Metric& metric : plan.metrics) {
    series.push_back(gqm::trend(runs, plan, metric.metric_id));
  }
  return emit(gqm::render_trend(series, *format), out_path);
}

int run_demo(const std::string& out_dir, const Options& opt) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
    return kExitIo;
  }
  fs::path base(out_dir);
  if (!write_file(base / "table2.plan.json", gqm::bundled::kReferencePlan) ||
      !write_file(base / "demo_evidence.ndjson", gqm::bundled::kDemoEvidence)) {
    std::cerr << "error: cannot write demo inputs into " << out_dir << "\n";
    return kExitIo;
  }

  gqm::PlanParse parsed = gqm::parse_plan(gqm::bundled::kReferencePlan);
  if (!parsed.ok()) {
    std::cerr << "error: bundled plan does not parse\n";
    return kExitParse;
  }
  gqm::MeasurementPlan plan = std::move(*parsed.plan);
  if (int rc = require_valid_structure(plan); rc != kExitOk) {
    return rc;
  }

  std::vector<gqm::Finding> findings = gqm::lint_plan(plan);
  if (!opt.quiet) {
    std::cout << gqm::render_findings(findings);
    std::cout << gqm::render_matrix(gqm::criterion_matrix(findings));
  }

  gqm::EvidenceStore store = gqm::EvidenceStore::open(base / "store", /*create=*/true);
  std::istringstream evidence{std::string(gqm::bundled::kDemoEvidence)};
  gqm::IngestSummary summary = store.ingest(evidence, plan.period_policy);
  if (!opt.quiet) {
    std::cout << "accepted " << summary.accepted << ", rejected " << summary.rejected.size()
              << "\n";
  }

  std::vector<gqm::MeasurementRun> runs;
  for (const std::string& period : store.period_ids()) {
    gqm::MeasurementRun run = gqm::run_measurement(plan, store, period);
    std::string stem = plan.plan_id + "." + period;
    if (!write_file(base / (stem + ".run.json"), gqm::serialize_run(run)) ||
        !write_file(base / (stem + ".report.md"),
                    gqm::render_construct(run, plan, gqm::ReportFormat::markdown))) {
      std::cerr << "error: cannot write demo outputs into " << out_dir << "\n";
      return kExitIo;
    }
    if (!opt.quiet) {
      std::cout << "measured " << period << "\n";
    }
    runs.push_back(std::move(run));
  }

  std::vector<gqm::TrendSeries> series;
  for (const gqm::Metric& metric : plan.metrics) {
    series.push_back(gqm::trend(runs, plan, metric.metric_id));
  }
  if (!write_file(base / (plan.plan_id + ".trend.md"),
                  gqm::render_trend(series, gqm::ReportFormat::markdown))) {
    std::cerr << "error: cannot write demo outputs into " << out_dir << "\n";
    return kExitIo;
  }
  if (!opt.quiet) {
    std::cout << "demo pipeline complete in " << out_dir << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GQM-based security measurement engine"};
  app.require_subcommand(1);

  Options opt;
  app.add_flag("--strict", opt.strict, "treat warnings and rejected hypotheses as failures");
  app.add_flag("--quiet", opt.quiet, "suppress human-readable summaries");

  std::string plan_path, store_dir, evidence_path, period, run_path, out_path, out_dir;
  std::string format_name = "markdown";
  std::string lint_format = "text";
  std::vector<std::string> periods;

  CLI::App* lint = app.add_subcommand("lint", "validate a plan and check the ESM criteria");
  lint->add_option("plan", plan_path, "plan document")->required();
  lint->add_option("--format", lint_format, "text or machine")->default_val("text");

  CLI::App* ingest = app.add_subcommand("ingest", "ingest newline-delimited evidence records");
  ingest->add_option("plan", plan_path, "plan document")->required();
  ingest->add_option("store_dir", store_dir, "evidence store directory")->required();
  ingest->add_option("evidence", evidence_path, "evidence .ndjson file")->required();

  CLI::App* measure = app.add_subcommand("measure", "compute a measurement run for one period");
  measure->add_option("plan", plan_path, "plan document")->required();
  measure->add_option("store_dir", store_dir, "evidence store directory")->required();
  measure->add_option("period", period, "period id (YYYY-MM or YYYY-Qn)")->required();
  measure->add_option("--out", out_path, "run document path (default <plan>.<period>.run.json)");

  CLI::App* report = app.add_subcommand("report", "render a measurement-construct report");
  report->add_option("run", run_path, "run document")->required();
  report->add_option("plan", plan_path, "plan document")->required();
  report->add_option("--format", format_name, "markdown or machine")
      ->default_val("markdown");
  report->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* trend = app.add_subcommand("trend", "cross-period trend table");
  trend->add_option("plan", plan_path, "plan document")->required();
  trend->add_option("store_dir", store_dir, "evidence store directory")->required();
  trend->add_option("periods", periods, "period ids, oldest first")->required()->expected(-1);
  trend->add_option("--format", format_name, "markdown or machine")->default_val("markdown");
  trend->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* demo = app.add_subcommand("demo", "run the bundled example end to end");
  demo->add_option("out_dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return kExitParse;
  }

  try {
    if (lint->parsed()) {
      return run_lint(plan_path, lint_format, opt);
    }
    if (ingest->parsed()) {
      return run_ingest(plan_path, store_dir, evidence_path, opt);
    }
    if (measure->parsed()) {
      return run_measure(plan_path, store_dir, period, out_path, opt);
    }
    if (report->parsed()) {
      return run_report(run_path, plan_path, format_name, out_path);
    }
    if (trend->parsed()) {
      return run_trend(plan_path, store_dir, periods, format_name, out_path);
    }
    if (demo->parsed()) {
      return run_demo(out_dir, opt);
    }
  } catch (const gqm::StoreError& e) {
    std::cerr << "store error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFindings;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitParse;
}
