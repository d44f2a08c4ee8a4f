// Command-line harness around the ocp library.
//
// Verbs:
//   init       write a config template with every default explicit
//   run        execute the online loop, audit the transcript, emit artifacts
//   audit      audit an existing transcript CSV without running a learner
//   sweep-eta  one run per learning rate, convergence time per group
//   trace      re-run a config and emit the (t, ||theta_t||_inf, envelope) trace
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 a theorem
// check failed and --strict was set.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocp/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitTheorem = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool strict = false;
};

ocp::RunConfig load_with_overrides(const CommonOpts& opts) {
  ocp::RunConfig c = ocp::load_config(opts.config_path);
  if (opts.seed) {
    c.seed = *opts.seed;
    c.stream.seed = *opts.seed;
    c.learner.seed = *opts.seed + 1;
  }
  if (!opts.out_dir.empty()) c.output_dir = opts.out_dir;
  return c;
}

int finish_audit(const ocp::RunConfig& c, const ocp::AuditResults& audits,
                 const CommonOpts& opts) {
  ocp::write_audit_files(c.output_dir, audits);
  if (!opts.quiet) {
    if (audits.marginal) {
      std::printf("coverage %.6f (target %.4f)\n", *audits.marginal, c.learner.q);
    }
    for (const auto& t : audits.theorems) {
      std::printf("check %-28s %s\n", ocp::theorem_name(t.id),
                  t.all_pass() ? "pass" : "FAIL");
    }
    std::printf("wrote %s/audit.json, %s/audit.csv\n", c.output_dir.c_str(),
                c.output_dir.c_str());
  }
  for (const auto& t : audits.theorems) {
    if (t.any_failure() && opts.strict) return kExitTheorem;
  }
  return kExitOk;
}

int cmd_init(const CommonOpts& opts) {
  const ocp::RunConfig defaults;
  std::ofstream os(opts.config_path);
  if (!os) {
    throw ocp::DataError("cannot open '" + opts.config_path + "' for writing");
  }
  os << ocp::to_json(defaults).dump(2) << "\n";
  if (!opts.quiet) std::printf("wrote template %s\n", opts.config_path.c_str());
  return kExitOk;
}

int cmd_run(const CommonOpts& opts) {
  const ocp::RunConfig c = load_with_overrides(opts);
  const ocp::RunResult res = ocp::run(c);
  ocp::ensure_dir(c.output_dir);
  ocp::write_transcript_csv(c.output_dir + "/transcript.csv", res.transcript);
  if (res.has_theta) {
    ocp::write_trace_csv(c.output_dir + "/trace.csv", res);
  }
  ocp::write_coverage_curves_csv(c.output_dir + "/coverage_curves.csv",
                                 res.transcript, res.group_names);
  {
    std::ofstream os(c.output_dir + "/summary.json");
    os << ocp::run_summary_json(c, res).dump(2) << "\n";
  }
  if (!opts.quiet) {
    std::printf("ran %zu rounds, wrote %s/transcript.csv\n", res.transcript.size(),
                c.output_dir.c_str());
  }
  const auto groups = ocp::stored_groups(res.transcript, res.group_names);
  const ocp::AuditResults audits =
      ocp::run_audits(res.transcript, groups, c.audit, c.learner.eta);
  return finish_audit(c, audits, opts);
}

int cmd_audit(const CommonOpts& opts, const std::string& transcript_flag) {
  const ocp::RunConfig c = load_with_overrides(opts);
  const std::string path =
      transcript_flag.empty() ? c.audit.transcript : transcript_flag;
  if (path.empty()) {
    throw ocp::ConfigError("audit requires --transcript or audit.transcript");
  }
  const ocp::ParsedTranscript parsed = ocp::csv_ingest(path);
  const ocp::Transcript tr = parsed.to_transcript(c.learner.q);
  const auto groups = ocp::stored_groups(tr);
  const ocp::AuditResults audits = ocp::run_audits(tr, groups, c.audit, c.learner.eta);
  return finish_audit(c, audits, opts);
}

int cmd_sweep(const CommonOpts& opts, const std::vector<double>& etas,
              std::optional<double> epsilon) {
  const ocp::RunConfig c = load_with_overrides(opts);
  if (etas.empty()) throw ocp::ConfigError("sweep-eta requires --etas");
  const double eps = epsilon.value_or(c.audit.epsilon);
  const auto rows = ocp::sweep_eta(c, etas, eps);
  ocp::ensure_dir(c.output_dir);
  ocp::write_convergence_csv(c.output_dir + "/convergence.csv", rows);
  if (!opts.quiet) {
    for (const auto& e : rows) {
      std::printf("eta %-8g group %-12s ", e.eta, e.group.c_str());
      if (e.step) {
        std::printf("converged at step %lld\n", static_cast<long long>(*e.step));
      } else {
        std::printf("never converged\n");
      }
    }
    std::printf("wrote %s/convergence.csv\n", c.output_dir.c_str());
  }
  return kExitOk;
}

int cmd_trace(const CommonOpts& opts) {
  const ocp::RunConfig c = load_with_overrides(opts);
  const ocp::RunResult res = ocp::run(c);
  if (!res.has_theta) {
    throw ocp::ConfigError("trace requires a parameter-vector learner "
                           "(group_aci, aci, or ftrl)");
  }
  ocp::ensure_dir(c.output_dir);
  ocp::write_norms_csv(c.output_dir + "/norms.csv", res);
  if (!opts.quiet) std::printf("wrote %s/norms.csv\n", c.output_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online conformal prediction runs and transcript audits"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string transcript_flag;
  std::vector<double> etas;
  std::optional<double> epsilon;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* o = sub->add_option("--config", opts.config_path, "config JSON path");
    if (needs_config) o->required();
    sub->add_option("--out", opts.out_dir, "output directory override");
    sub->add_option("--seed", opts.seed, "seed override (stream and learner)");
    sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    sub->add_flag("--strict", opts.strict, "exit 3 when a theorem check fails");
  };

  auto* init = app.add_subcommand("init", "write a config template");
  add_common(init);
  auto* runv = app.add_subcommand("run", "run a configured experiment");
  add_common(runv);
  auto* audit = app.add_subcommand("audit", "audit a transcript CSV");
  add_common(audit);
  audit->add_option("--transcript", transcript_flag, "transcript CSV to audit");
  auto* sweep = app.add_subcommand("sweep-eta", "convergence time per learning rate");
  add_common(sweep);
  sweep->add_option("--etas", etas, "learning rates to sweep")->delimiter(',');
  sweep->add_option("--epsilon", epsilon, "convergence tolerance");
  auto* trace = app.add_subcommand("trace", "emit the iterate norm trace");
  add_common(trace);

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) return cmd_init(opts);
    if (runv->parsed()) return cmd_run(opts);
    if (audit->parsed()) return cmd_audit(opts, transcript_flag);
    if (sweep->parsed()) return cmd_sweep(opts, etas, epsilon);
    if (trace->parsed()) return cmd_trace(opts);
  } catch (const ocp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ocp::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const ocp::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
