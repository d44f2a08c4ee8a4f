#pragma once

// Score and group stream generators: i.i.d. distributions, the scripted
// adversarial constructions that separate regret from coverage, the
// square-root lower-bound stream for real-valued weights, synthetic
// two-phase distribution shift, modular time-step groups, and CSV
// ingestion of externally computed scores.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ocp/core.hpp"
#include "ocp/transcript_io.hpp"

namespace ocp {

enum class DistKind { uniform, beta, atoms };

// A score distribution on [0,1]. Beta draws are rejection-sampled into
// [0,1] (a no-op for genuine beta parameters; it guards the invariant once
// shapes or numerics put a draw on the boundary of the range).
struct Distribution {
  DistKind kind = DistKind::uniform;
  double a = 0.0;  // uniform lower bound / beta alpha
  double b = 1.0;  // uniform upper bound / beta beta
  std::vector<double> atom_x;
  std::vector<double> atom_w;

  void validate() const {
    switch (kind) {
      case DistKind::uniform:
        if (!(a >= 0.0 && a < b && b <= 1.0)) {
          throw ConfigError("uniform distribution requires 0 <= a < b <= 1");
        }
        break;
      case DistKind::beta:
        if (!(a > 0.0 && b > 0.0)) {
          throw ConfigError("beta distribution requires positive shape parameters");
        }
        break;
      case DistKind::atoms: {
        if (atom_x.empty() || atom_x.size() != atom_w.size()) {
          throw ConfigError("atom distribution requires matching nonempty x/w lists");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < atom_x.size(); ++i) {
          if (!(atom_x[i] >= 0.0 && atom_x[i] <= 1.0)) {
            throw ConfigError("atom location outside [0,1]");
          }
          if (!(atom_w[i] >= 0.0)) throw ConfigError("negative atom weight");
          total += atom_w[i];
        }
        if (!(total > 0.0)) throw ConfigError("atom weights must sum to > 0");
        break;
      }
    }
  }

  double sample(std::mt19937_64& rng) const {
    switch (kind) {
      case DistKind::uniform:
        return std::uniform_real_distribution<double>(a, b)(rng);
      case DistKind::beta: {
        std::gamma_distribution<double> ga(a, 1.0);
        std::gamma_distribution<double> gb(b, 1.0);
        for (;;) {
          const double x = ga(rng);
          const double y = gb(rng);
          const double v = x / (x + y);
          if (v >= 0.0 && v <= 1.0 && std::isfinite(v)) return v;
        }
      }
      case DistKind::atoms: {
        double total = 0.0;
        for (double w : atom_w) total += w;
        double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        for (std::size_t i = 0; i < atom_x.size(); ++i) {
          u -= atom_w[i];
          if (u <= 0.0) return atom_x[i];
        }
        return atom_x.back();
      }
    }
    throw ConfigError("unknown distribution kind");
  }

  // Analytic q-quantile where a closed form exists.
  double quantile(double q) const {
    require_rate(q, "Distribution::quantile");
    switch (kind) {
      case DistKind::uniform:
        return a + q * (b - a);
      case DistKind::atoms: {
        double total = 0.0;
        for (double w : atom_w) total += w;
        std::vector<std::size_t> order(atom_x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return atom_x[i] < atom_x[j]; });
        double cum = 0.0;
        for (std::size_t i : order) {
          cum += atom_w[i] / total;
          if (cum >= q) return atom_x[i];
        }
        return atom_x[order.back()];
      }
      case DistKind::beta:
        throw ConfigError("beta quantile has no closed form here");
    }
    throw ConfigError("unknown distribution kind");
  }
};

inline Distribution uniform_dist(double a, double b) {
  Distribution d;
  d.kind = DistKind::uniform;
  d.a = a;
  d.b = b;
  d.validate();
  return d;
}

inline Distribution beta_dist(double alpha, double beta) {
  Distribution d;
  d.kind = DistKind::beta;
  d.a = alpha;
  d.b = beta;
  d.validate();
  return d;
}

inline Distribution atom_dist(std::vector<double> x, std::vector<double> w) {
  Distribution d;
  d.kind = DistKind::atoms;
  d.atom_x = std::move(x);
  d.atom_w = std::move(w);
  d.validate();
  return d;
}

// Sequential score source; one call per round.
class ScoreStream {
 public:
  virtual ~ScoreStream() = default;
  virtual double next() = 0;
};

class IidStream final : public ScoreStream {
 public:
  IidStream(Distribution d, std::uint64_t seed) : d_(std::move(d)), rng_(seed) {
    d_.validate();
  }
  double next() override { return d_.sample(rng_); }

 private:
  Distribution d_;
  std::mt19937_64 rng_;
};

// First ceil(split*T) rounds from d1, the remainder from d2.
class TwoPhaseStream final : public ScoreStream {
 public:
  TwoPhaseStream(long long T, double split, Distribution d1, Distribution d2,
                 std::uint64_t seed)
      : d1_(std::move(d1)), d2_(std::move(d2)), rng_(seed) {
    if (T < 1) throw ConfigError("TwoPhaseStream: T must be >= 1");
    if (!(split > 0.0 && split < 1.0)) {
      throw ConfigError("TwoPhaseStream: split must lie in (0,1)");
    }
    d1_.validate();
    d2_.validate();
    cut_ = static_cast<long long>(std::ceil(split * static_cast<double>(T)));
  }

  double next() override {
    ++t_;
    return t_ <= cut_ ? d1_.sample(rng_) : d2_.sample(rng_);
  }

 private:
  Distribution d1_;
  Distribution d2_;
  std::mt19937_64 rng_;
  long long cut_ = 0;
  long long t_ = 0;
};

// A fully materialized stream: per-round group weights and scores, plus a
// scripted prediction sequence when the construction pins one down.
struct ScriptedStream {
  std::vector<std::string> group_names;
  std::vector<GroupKind> group_kinds;
  std::vector<std::vector<double>> g;  // [round][group]
  std::vector<double> tau;
  std::vector<double> tau_hat;  // empty when nothing is scripted

  std::size_t k() const { return group_names.size(); }
  std::size_t size() const { return tau.size(); }

  // The scripted transcript (requires tau_hat).
  Transcript to_transcript(double q) const {
    if (tau_hat.size() != tau.size()) {
      throw ConfigError("ScriptedStream has no scripted predictions");
    }
    Transcript tr(k(), q);
    for (std::size_t t = 0; t < tau.size(); ++t) tr.append(g[t], tau[t], tau_hat[t]);
    return tr;
  }
};

// Alternating adversary with a scripted hedging predictor: tau = 0.5 on
// odd rounds and 1.0 on even rounds, predictions 0.4 / 0.9. The predictor
// never covers, yet no fixed threshold beats it on pinball loss at q=0.5.
inline ScriptedStream example1_stream(long long T) {
  if (T < 1) throw ConfigError("example1_stream: T must be >= 1");
  ScriptedStream s;
  s.group_names = {"all"};
  s.group_kinds = {GroupKind::binary};
  s.g.reserve(static_cast<std::size_t>(T));
  for (long long t = 1; t <= T; ++t) {
    s.g.push_back({1.0});
    if (t % 2 == 1) {
      s.tau.push_back(0.5);
      s.tau_hat.push_back(0.4);
    } else {
      s.tau.push_back(1.0);
      s.tau_hat.push_back(0.9);
    }
  }
  return s;
}

// Contextual version of the alternating construction: contexts A/B drawn
// uniformly, scores 0.5 on A and 1.0 on B, scripted predictions 0.4 / 0.9.
// Contexts are exposed as two disjoint binary groups plus the all-rounds
// group, so g = [all, A, B].
inline ScriptedStream example2_stream(long long T, std::uint64_t seed) {
  if (T < 1) throw ConfigError("example2_stream: T must be >= 1");
  ScriptedStream s;
  s.group_names = {"all", "A", "B"};
  s.group_kinds = {GroupKind::binary, GroupKind::binary, GroupKind::binary};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (long long t = 1; t <= T; ++t) {
    const bool is_a = u(rng) < 0.5;
    s.g.push_back({1.0, is_a ? 1.0 : 0.0, is_a ? 0.0 : 1.0});
    s.tau.push_back(is_a ? 0.5 : 1.0);
    s.tau_hat.push_back(is_a ? 0.4 : 0.9);
  }
  return s;
}

// Real-valued weight stream forcing Omega(sqrt(T)) iterate growth:
// g_1 = 0, g_t = 1/(2 sqrt(t-1)) for t >= 2, scores identically 1, so
// update A fires every round. No scripted predictions.
inline ScriptedStream lower_bound_stream(long long T) {
  if (T < 2) throw ConfigError("lower_bound_stream: T must be >= 2");
  ScriptedStream s;
  s.group_names = {"signal"};
  s.group_kinds = {GroupKind::weighted};
  for (long long t = 1; t <= T; ++t) {
    const double w = t == 1 ? 0.0 : 1.0 / (2.0 * std::sqrt(static_cast<double>(t - 1)));
    s.g.push_back({w});
    s.tau.push_back(1.0);
  }
  return s;
}

// Binary groups G_1..G_k with G_i active at round t iff t % i == 0.
inline std::vector<GroupSpec> modular_groups(std::size_t k) {
  if (k == 0) throw ConfigError("modular_groups: k must be >= 1");
  std::vector<GroupSpec> out;
  out.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    GroupSpec g;
    g.name = "mod_" + std::to_string(i);
    g.kind = GroupKind::binary;
    g.weight = [i](long long t, const Transcript&) {
      return t % static_cast<long long>(i) == 0 ? 1.0 : 0.0;
    };
    out.push_back(std::move(g));
  }
  return out;
}

inline GroupSpec all_rounds_group(std::string name = "all") {
  GroupSpec g;
  g.name = std::move(name);
  g.kind = GroupKind::binary;
  g.weight = [](long long, const Transcript&) { return 1.0; };
  return g;
}

// Rounds from a transcript CSV, in file order. Files without a tau_hat
// column are score streams awaiting predictions; files with one are
// audit-only transcripts.
inline ParsedTranscript csv_ingest(const std::string& path) {
  return read_transcript_csv(path);
}

}  // namespace ocp
