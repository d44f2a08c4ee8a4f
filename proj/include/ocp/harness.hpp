#pragma once

// Run orchestration: compose a stream, a group family, and a learner into
// an online run; audit the resulting transcript; sweep learning rates for
// convergence times; emit figure-ready CSV and JSON artifacts. One JSON
// config document describes an experiment end to end.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocp/auditors.hpp"
#include "ocp/core.hpp"
#include "ocp/environments.hpp"
#include "ocp/learners.hpp"
#include "ocp/reports.hpp"
#include "ocp/transcript_io.hpp"

namespace ocp {

struct StreamConfig {
  std::string kind = "iid";  // iid|example1|example2|lower_bound|two_phase_shift|csv
  long long T = 10000;
  std::uint64_t seed = 1;
  Distribution dist = uniform_dist(0.0, 1.0);
  Distribution dist2 = uniform_dist(0.0, 1.0);
  double split = 0.5;
  std::string path;
};

struct GroupConfig {
  std::string kind = "all";  // all | modular | stream
  std::size_t k = 1;
};

struct LearnerConfig {
  std::string kind = "group_aci";  // group_aci|aci|ftrl|swap|scripted
  std::size_t k = 0;               // expected group count; 0 = derive from groups
  double q = 0.9;
  double eta = 1.0;
  std::string regularizer = "euclidean";  // ftrl: euclidean | entropic
  int n = 20;                             // swap grid resolution
  std::uint64_t seed = 2;
  bool horizon_rate = false;  // swap: rate sqrt(ln(n+1)/T) instead of anytime
};

struct AuditConfig {
  int grid_n = 20;
  int r = 0;  // smoothness resolution; 0 -> grid_n
  double epsilon = 0.01;
  std::vector<std::string> reports = {"coverage", "groups", "calibrated",
                                      "external", "swap"};
  std::vector<std::string> theorems = {"ftrl_group_coverage"};
  std::string transcript;  // audit verb input; empty -> run in this config
};

struct RunConfig {
  std::uint64_t seed = 1;
  StreamConfig stream;
  GroupConfig groups;
  LearnerConfig learner;
  AuditConfig audit;
  std::string output_dir = "out";
};

// ---------------------------------------------------------------------------
// JSON round trip. The template carries every default explicitly.

inline json to_json(const Distribution& d) {
  switch (d.kind) {
    case DistKind::uniform:
      return json{{"name", "uniform"}, {"a", d.a}, {"b", d.b}};
    case DistKind::beta:
      return json{{"name", "beta"}, {"alpha", d.a}, {"beta", d.b}};
    case DistKind::atoms:
      return json{{"name", "atoms"}, {"x", d.atom_x}, {"w", d.atom_w}};
  }
  throw ConfigError("unknown distribution kind");
}

inline Distribution distribution_from_json(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "uniform") {
    return uniform_dist(j.at("a").get<double>(), j.at("b").get<double>());
  }
  if (name == "beta") {
    return beta_dist(j.at("alpha").get<double>(), j.at("beta").get<double>());
  }
  if (name == "atoms") {
    return atom_dist(j.at("x").get<std::vector<double>>(),
                     j.at("w").get<std::vector<double>>());
  }
  throw ConfigError("unknown distribution '" + name + "'");
}

inline json to_json(const RunConfig& c) {
  return json{
      {"seed", c.seed},
      {"stream",
       {{"kind", c.stream.kind},
        {"T", c.stream.T},
        {"seed", c.stream.seed},
        {"dist", to_json(c.stream.dist)},
        {"dist2", to_json(c.stream.dist2)},
        {"split", c.stream.split},
        {"path", c.stream.path}}},
      {"groups", {{"kind", c.groups.kind}, {"k", c.groups.k}}},
      {"learner",
       {{"kind", c.learner.kind},
        {"k", c.learner.k},
        {"q", c.learner.q},
        {"eta", c.learner.eta},
        {"regularizer", c.learner.regularizer},
        {"n", c.learner.n},
        {"seed", c.learner.seed},
        {"horizon_rate", c.learner.horizon_rate}}},
      {"audit",
       {{"grid_n", c.audit.grid_n},
        {"r", c.audit.r},
        {"epsilon", c.audit.epsilon},
        {"reports", c.audit.reports},
        {"theorems", c.audit.theorems},
        {"transcript", c.audit.transcript}}},
      {"output", {{"dir", c.output_dir}}},
  };
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("stream")) {
      const json& s = j.at("stream");
      if (s.contains("kind")) c.stream.kind = s.at("kind").get<std::string>();
      if (s.contains("T")) c.stream.T = s.at("T").get<long long>();
      if (s.contains("seed")) c.stream.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("dist")) c.stream.dist = distribution_from_json(s.at("dist"));
      if (s.contains("dist2")) c.stream.dist2 = distribution_from_json(s.at("dist2"));
      if (s.contains("split")) c.stream.split = s.at("split").get<double>();
      if (s.contains("path")) c.stream.path = s.at("path").get<std::string>();
    }
    if (j.contains("groups")) {
      const json& g = j.at("groups");
      if (g.contains("kind")) c.groups.kind = g.at("kind").get<std::string>();
      if (g.contains("k")) c.groups.k = g.at("k").get<std::size_t>();
    }
    if (j.contains("learner")) {
      const json& l = j.at("learner");
      if (l.contains("kind")) c.learner.kind = l.at("kind").get<std::string>();
      if (l.contains("k")) c.learner.k = l.at("k").get<std::size_t>();
      if (l.contains("q")) c.learner.q = l.at("q").get<double>();
      if (l.contains("eta")) c.learner.eta = l.at("eta").get<double>();
      if (l.contains("regularizer")) {
        c.learner.regularizer = l.at("regularizer").get<std::string>();
      }
      if (l.contains("n")) c.learner.n = l.at("n").get<int>();
      if (l.contains("seed")) c.learner.seed = l.at("seed").get<std::uint64_t>();
      if (l.contains("horizon_rate")) {
        c.learner.horizon_rate = l.at("horizon_rate").get<bool>();
      }
    }
    if (j.contains("audit")) {
      const json& a = j.at("audit");
      if (a.contains("grid_n")) c.audit.grid_n = a.at("grid_n").get<int>();
      if (a.contains("r")) c.audit.r = a.at("r").get<int>();
      if (a.contains("epsilon")) c.audit.epsilon = a.at("epsilon").get<double>();
      if (a.contains("reports")) {
        c.audit.reports = a.at("reports").get<std::vector<std::string>>();
      }
      if (a.contains("theorems")) {
        c.audit.theorems = a.at("theorems").get<std::vector<std::string>>();
      }
      if (a.contains("transcript")) {
        c.audit.transcript = a.at("transcript").get<std::string>();
      }
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      if (o.contains("dir")) c.output_dir = o.at("dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Run loop.

struct TraceRow {
  long long t = 0;
  double norm_inf = 0.0;
  double envelope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> theta;
};

struct GroupCounter {
  std::string name;
  double size = 0.0;     // running weighted membership
  double covered = 0.0;  // running weighted coverage count
};

struct RunResult {
  Transcript transcript{1, 0.5};
  std::vector<std::string> group_names;
  std::vector<TraceRow> trace;  // theta-based learners only
  std::vector<double> final_theta;
  long long marginal_covered = 0;
  std::vector<GroupCounter> group_counters;
  bool has_theta = false;
  double eta = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct PreparedStream {
  std::size_t k = 0;
  std::vector<std::string> group_names;
  std::vector<GroupSpec> group_specs;            // empty when materialized
  std::optional<ScriptedStream> scripted;        // example/lower_bound/csv
  std::unique_ptr<ScoreStream> scores;           // iid / two_phase
};

inline PreparedStream prepare_stream(const RunConfig& c) {
  PreparedStream out;
  const auto& s = c.stream;
  if (s.T < 1) throw ConfigError("stream.T must be >= 1");
  const bool stream_groups = c.groups.kind == "stream";

  if (s.kind == "iid" || s.kind == "two_phase_shift") {
    if (stream_groups) {
      throw ConfigError("groups.kind 'stream' is only valid for streams that "
                        "carry their own groups (example1, example2, "
                        "lower_bound, csv)");
    }
    if (c.groups.kind == "all") {
      if (c.groups.k != 1) {
        throw ConfigError("groups.kind 'all' is the single all-rounds group; "
                          "set groups.k to 1");
      }
      out.group_specs.push_back(all_rounds_group());
    } else if (c.groups.kind == "modular") {
      out.group_specs = modular_groups(c.groups.k);
    } else {
      throw ConfigError("unknown groups.kind '" + c.groups.kind + "'");
    }
    out.k = out.group_specs.size();
    for (const auto& g : out.group_specs) out.group_names.push_back(g.name);
    if (s.kind == "iid") {
      out.scores = std::make_unique<IidStream>(s.dist, s.seed);
    } else {
      out.scores = std::make_unique<TwoPhaseStream>(s.T, s.split, s.dist, s.dist2, s.seed);
    }
    return out;
  }

  if (!stream_groups) {
    throw ConfigError("stream kind '" + s.kind + "' carries its own groups; "
                      "set groups.kind to 'stream'");
  }
  if (s.kind == "example1") {
    out.scripted = example1_stream(s.T);
  } else if (s.kind == "example2") {
    out.scripted = example2_stream(s.T, s.seed);
  } else if (s.kind == "lower_bound") {
    out.scripted = lower_bound_stream(s.T);
  } else if (s.kind == "csv") {
    const ParsedTranscript parsed = csv_ingest(s.path);
    ScriptedStream ss;
    ss.group_names.reserve(parsed.k);
    for (std::size_t i = 1; i <= parsed.k; ++i) {
      ss.group_names.push_back("g_" + std::to_string(i));
      ss.group_kinds.push_back(GroupKind::weighted);
    }
    for (const Round& r : parsed.rounds) {
      ss.g.push_back(r.g);
      ss.tau.push_back(r.tau);
      if (parsed.has_predictions) ss.tau_hat.push_back(r.tau_hat);
    }
    out.scripted = std::move(ss);
  } else {
    throw ConfigError("unknown stream.kind '" + s.kind + "'");
  }
  out.k = out.scripted->k();
  out.group_names = out.scripted->group_names;
  return out;
}

}  // namespace detail

inline RunResult run(const RunConfig& c) {
  detail::PreparedStream st = detail::prepare_stream(c);
  const auto& lc = c.learner;
  require_rate(lc.q, "learner.q");
  if (lc.k != 0 && lc.k != st.k) {
    throw ConfigError("learner.k = " + std::to_string(lc.k) +
                      " does not match the configured group count " +
                      std::to_string(st.k));
  }

  const long long T = st.scripted
                          ? static_cast<long long>(st.scripted->size())
                          : c.stream.T;

  std::unique_ptr<GroupAciLearner> gd;
  std::unique_ptr<FtrlLearner> ftrl;
  std::unique_ptr<SwapLearner> swap;
  bool scripted_predictor = false;

  if (lc.kind == "group_aci") {
    gd = std::make_unique<GroupAciLearner>(st.k, lc.q, lc.eta);
  } else if (lc.kind == "aci") {
    if (st.k != 1) {
      throw ConfigError("learner 'aci' requires a single all-rounds group (k=1)");
    }
    gd = std::make_unique<GroupAciLearner>(1, lc.q, lc.eta);
  } else if (lc.kind == "ftrl") {
    Regularizer reg;
    if (lc.regularizer == "euclidean") {
      reg = euclidean_regularizer(lc.eta);
    } else if (lc.regularizer == "entropic") {
      reg = entropic_regularizer(lc.eta);
    } else {
      throw ConfigError("unknown regularizer '" + lc.regularizer + "'");
    }
    ftrl = std::make_unique<FtrlLearner>(st.k, lc.q, std::move(reg));
  } else if (lc.kind == "swap") {
    swap = std::make_unique<SwapLearner>(
        Grid(lc.n), lc.q, lc.seed,
        lc.horizon_rate ? std::optional<long long>(T) : std::nullopt);
  } else if (lc.kind == "scripted") {
    if (!st.scripted || st.scripted->tau_hat.size() != st.scripted->size()) {
      throw ConfigError("learner 'scripted' requires a stream with scripted "
                        "predictions (example1, example2, or a csv with tau_hat)");
    }
    scripted_predictor = true;
  } else {
    throw ConfigError("unknown learner.kind '" + lc.kind + "'");
  }

  RunResult out;
  out.transcript = Transcript(st.k, lc.q);
  out.group_names = st.group_names;
  out.has_theta = gd != nullptr || ftrl != nullptr;
  out.eta = lc.eta;
  out.group_counters.resize(st.k);
  for (std::size_t i = 0; i < st.k; ++i) out.group_counters[i].name = st.group_names[i];
  if (out.has_theta) out.trace.reserve(static_cast<std::size_t>(T));

  for (long long t = 1; t <= T; ++t) {
    // Receive g_t (prediction-independent: evaluated against the past only).
    std::vector<double> g;
    if (st.scripted) {
      g = st.scripted->g[static_cast<std::size_t>(t - 1)];
    } else {
      g.reserve(st.group_specs.size());
      for (const auto& spec : st.group_specs) {
        g.push_back(spec.evaluate(t, out.transcript));
      }
    }

    // Predict.
    double tau_hat = 0.0;
    if (gd) {
      tau_hat = gd->predict(g);
    } else if (ftrl) {
      tau_hat = dot(ftrl->theta(), g);
    } else if (swap) {
      tau_hat = swap->predict_value();
    } else if (scripted_predictor) {
      tau_hat = st.scripted->tau_hat[static_cast<std::size_t>(t - 1)];
    }

    // Trace theta_t, the iterate used for this prediction.
    if (out.has_theta) {
      TraceRow row;
      row.t = t;
      row.theta = gd ? gd->theta() : ftrl->theta();
      for (double v : row.theta) row.norm_inf = std::max(row.norm_inf, std::abs(v));
      if (gd) {
        row.envelope = gd->norm_envelope(t);
      } else if (ftrl->regularizer().name == "euclidean") {
        const double m = std::max(lc.q, 1.0 - lc.q);
        row.envelope = std::sqrt(static_cast<double>(t) * lc.eta *
                                 (lc.eta * static_cast<double>(st.k) * m * m +
                                  2.0 * lc.q));
      }
      out.trace.push_back(std::move(row));
    }

    // Receive tau_t and update.
    const double tau = st.scripted ? st.scripted->tau[static_cast<std::size_t>(t - 1)]
                                   : st.scores->next();
    if (gd) {
      gd->update(g, tau);
    } else if (ftrl) {
      ftrl->step(g, tau);
    } else if (swap) {
      swap->update(tau);
    }

    // In-loop accounting, kept in the same order the auditors use.
    const bool covered = tau_hat >= tau;
    if (covered) ++out.marginal_covered;
    for (std::size_t i = 0; i < st.k; ++i) {
      out.group_counters[i].size += g[i];
      if (covered) out.group_counters[i].covered += g[i];
    }
    out.transcript.append(std::move(g), tau, tau_hat);
  }

  if (gd) out.final_theta = gd->theta();
  if (ftrl) out.final_theta = ftrl->theta();
  return out;
}

// ---------------------------------------------------------------------------
// Convergence time: the earliest within-group step s such that the
// coverage of the group's remaining subsequence (from s to the end) is
// within epsilon of q. Steps count positions inside the subsequence of
// rounds with positive weight; weighted groups use weighted coverage.

inline std::optional<long long> convergence_step(std::span<const double> w,
                                                 const std::vector<bool>& covered,
                                                 double q, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("convergence_step: epsilon must be > 0");
  std::vector<double> wv;
  std::vector<double> cv;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (w[t] > 0.0) {
      wv.push_back(w[t]);
      cv.push_back(covered[t] ? w[t] : 0.0);
    }
  }
  const std::size_t m = wv.size();
  if (m == 0) return std::nullopt;
  // Backward suffix sums, then the first step whose suffix sits in band.
  std::vector<double> wsuf(m + 1, 0.0);
  std::vector<double> csuf(m + 1, 0.0);
  for (std::size_t j = m; j-- > 0;) {
    wsuf[j] = wsuf[j + 1] + wv[j];
    csuf[j] = csuf[j + 1] + cv[j];
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(csuf[j] / wsuf[j] - q) <= epsilon) {
      return static_cast<long long>(j) + 1;
    }
  }
  return std::nullopt;
}

struct ConvergenceEntry {
  double eta = 0.0;
  std::string group;
  std::optional<long long> step;
};

inline std::vector<ConvergenceEntry> convergence_times(const RunResult& res,
                                                       double epsilon) {
  const Transcript& tr = res.transcript;
  std::vector<bool> covered(tr.size());
  for (std::size_t t = 0; t < tr.size(); ++t) covered[t] = tr[t].covered();
  std::vector<ConvergenceEntry> out;
  for (std::size_t i = 0; i < tr.k(); ++i) {
    std::vector<double> w(tr.size());
    for (std::size_t t = 0; t < tr.size(); ++t) w[t] = tr[t].g[i];
    ConvergenceEntry e;
    e.eta = res.eta;
    e.group = res.group_names[i];
    e.step = convergence_step(w, covered, tr.q(), epsilon);
    out.push_back(std::move(e));
  }
  return out;
}

// One run per eta (identical seeds); rows eta x group.
inline std::vector<ConvergenceEntry> sweep_eta(const RunConfig& base,
                                               std::span<const double> etas,
                                               double epsilon) {
  std::vector<ConvergenceEntry> rows;
  for (double eta : etas) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ConfigError("sweep_eta: every eta must lie in (0,1]");
    }
    RunConfig c = base;
    c.learner.eta = eta;
    const RunResult res = run(c);
    for (auto& e : convergence_times(res, epsilon)) rows.push_back(std::move(e));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Audits over a finished transcript.

struct AuditResults {
  std::optional<double> marginal;
  std::optional<CoverageReport> groups;
  std::optional<CoverageReport> calibrated;
  std::optional<CoverageReport> multivalid;
  std::optional<RegretReport> external;
  std::optional<RegretReport> swap;
  std::optional<RegretReport> group_external;
  std::optional<RegretReport> group_swap;
  std::vector<TheoremReport> theorems;

  bool any_theorem_failure() const {
    for (const auto& t : theorems) {
      if (t.any_failure()) return true;
    }
    return false;
  }
};

inline AuditResults run_audits(const Transcript& tr,
                               std::span<const MaterializedGroup> groups,
                               const AuditConfig& ac, double eta) {
  const Grid grid(ac.grid_n);
  TheoremInputs inputs;
  inputs.eta = eta;
  inputs.r = ac.r;
  AuditResults out;
  for (const std::string& r : ac.reports) {
    if (r == "coverage") {
      out.marginal = coverage(tr);
    } else if (r == "groups") {
      out.groups = group_coverage(tr, groups);
    } else if (r == "calibrated") {
      out.calibrated = threshold_calibrated_coverage(tr, grid);
    } else if (r == "multivalid") {
      out.multivalid = multivalid_coverage(tr, groups, grid);
    } else if (r == "external") {
      out.external = external_regret(tr, grid);
    } else if (r == "swap") {
      out.swap = swap_regret(tr, grid);
    } else if (r == "group_external") {
      out.group_external =
          group_conditional_regret(tr, groups, grid, RegretKind::group_external);
    } else if (r == "group_swap") {
      out.group_swap =
          group_conditional_regret(tr, groups, grid, RegretKind::group_swap);
    } else {
      throw ConfigError("unknown audit report '" + r + "'");
    }
  }
  for (const std::string& name : ac.theorems) {
    const auto id = theorem_from_name(name);
    if (!id) throw ConfigError("unknown theorem check '" + name + "'");
    out.theorems.push_back(check_theorem_bounds(tr, groups, grid, *id, inputs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifact writers.

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "'");
}

inline void write_trace_csv(const std::string& path, const RunResult& res) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "t,norm_inf,envelope";
  const std::size_t k = res.final_theta.size();
  for (std::size_t i = 1; i <= k; ++i) os << ",theta_" << i;
  os << "\n";
  for (const TraceRow& row : res.trace) {
    os << row.t << ',' << format_double(row.norm_inf) << ','
       << format_double(row.envelope);
    for (double v : row.theta) os << ',' << format_double(v);
    os << "\n";
  }
}

inline void write_norms_csv(const std::string& path, const RunResult& res) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "t,norm_inf,envelope\n";
  for (const TraceRow& row : res.trace) {
    os << row.t << ',' << format_double(row.norm_inf) << ','
       << format_double(row.envelope) << "\n";
  }
}

// Figure-ready running-coverage curves: for each group, the cumulative
// within-group coverage after every group step. Windowed variants are
// possible but not emitted.
inline void write_coverage_curves_csv(const std::string& path, const Transcript& tr,
                                      std::span<const std::string> names) {
  if (names.size() != tr.k()) {
    throw ConfigError("write_coverage_curves_csv: name count mismatch");
  }
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "group,step,t,coverage\n";
  for (std::size_t i = 0; i < tr.k(); ++i) {
    double wsum = 0.0;
    double wcov = 0.0;
    long long step = 0;
    for (const Round& r : tr) {
      const double w = r.g[i];
      if (w <= 0.0) continue;
      wsum += w;
      if (r.covered()) wcov += w;
      ++step;
      os << names[i] << ',' << step << ',' << r.t << ','
         << format_double(wcov / wsum) << "\n";
    }
  }
}

inline void write_convergence_csv(const std::string& path,
                                  std::span<const ConvergenceEntry> rows) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "eta,group,convergence_step\n";
  for (const auto& e : rows) {
    os << format_double(e.eta) << ',' << e.group << ',';
    if (e.step) {
      os << *e.step;
    } else {
      os << "never";
    }
    os << "\n";
  }
}

inline json run_summary_json(const RunConfig& c, const RunResult& res) {
  json groups = json::array();
  for (const auto& gc : res.group_counters) {
    groups.push_back(json{{"name", gc.name},
                          {"size", gc.size},
                          {"covered", gc.covered}});
  }
  json j{{"config", to_json(c)},
         {"rounds", res.transcript.size()},
         {"marginal_covered", res.marginal_covered},
         {"group_counters", std::move(groups)}};
  if (res.has_theta) j["final_theta"] = res.final_theta;
  return j;
}

inline json audits_json(const AuditResults& a) {
  json j = json::object();
  if (a.marginal) j["coverage"] = *a.marginal;
  if (a.groups) j["groups"] = to_json(*a.groups);
  if (a.calibrated) j["calibrated"] = to_json(*a.calibrated);
  if (a.multivalid) j["multivalid"] = to_json(*a.multivalid);
  if (a.external) j["external"] = to_json(*a.external);
  if (a.swap) j["swap"] = to_json(*a.swap);
  if (a.group_external) j["group_external"] = to_json(*a.group_external);
  if (a.group_swap) j["group_swap"] = to_json(*a.group_swap);
  json checks = json::array();
  for (const auto& t : a.theorems) checks.push_back(to_json(t));
  j["theorems"] = std::move(checks);
  return j;
}

inline void write_audit_files(const std::string& dir, const AuditResults& a) {
  ensure_dir(dir);
  const std::string base = dir + "/";
  {
    std::ofstream os(base + "audit.json");
    if (!os) throw DataError("cannot open audit.json for writing");
    os << audits_json(a).dump(2) << "\n";
  }
  std::ofstream os(base + "audit.csv");
  if (!os) throw DataError("cannot open audit.csv for writing");
  write_csv_header(os);
  if (a.groups) write_csv_rows(os, *a.groups);
  if (a.calibrated) write_csv_rows(os, *a.calibrated);
  if (a.multivalid) write_csv_rows(os, *a.multivalid);
  if (a.external) write_csv_rows(os, *a.external);
  if (a.swap) write_csv_rows(os, *a.swap);
  if (a.group_external) write_csv_rows(os, *a.group_external);
  if (a.group_swap) write_csv_rows(os, *a.group_swap);
  for (const auto& t : a.theorems) write_csv_rows(os, t);
}

}  // namespace ocp
