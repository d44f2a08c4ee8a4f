#pragma once

// Core vocabulary for online conformal prediction streams: transcripts of
// (group weights, score, predicted threshold) rounds, group membership
// generators, discretized prediction grids, and the pinball loss.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ocp {

// Invalid parameters or configuration (bad q, eta, grid size, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or out-of-contract data (CSV parse failures, out-of-range
// scores, dimension mismatches).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed to converge.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_rate(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ConfigError(std::string(what) + ": coverage rate q must lie in (0,1)");
  }
}

// Pinball loss p_q(tau_hat, tau): q*(tau - tau_hat) when tau >= tau_hat,
// (q-1)*(tau - tau_hat) otherwise. Nonnegative, zero iff tau_hat == tau,
// and minimized in expectation at the q-quantile.
inline double pinball_loss(double tau_hat, double tau, double q) {
  require_rate(q, "pinball_loss");
  return tau >= tau_hat ? q * (tau - tau_hat) : (q - 1.0) * (tau - tau_hat);
}

// Subgradient of p_q in its first argument. The tie tau == tau_hat counts
// as covered and takes the (1-q) branch, matching the ">=" coverage
// indicator used throughout.
inline double pinball_subgradient(double tau_hat, double tau, double q) {
  require_rate(q, "pinball_subgradient");
  return tau > tau_hat ? -q : 1.0 - q;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Skip exact-zero weights so an infinite coordinate (possible with the
    // entropic mirror map) never turns into 0 * inf = NaN.
    if (b[i] != 0.0) s += a[i] * b[i];
  }
  return s;
}

// One observed round: 1-based index, group membership weights in [0,1]^k,
// realized score tau in [0,1], and the predicted threshold tau_hat
// (deliberately unbounded; learners may predict outside [0,1]).
struct Round {
  long long t = 0;
  std::vector<double> g;
  double tau = 0.0;
  double tau_hat = 0.0;

  bool covered() const { return tau_hat >= tau; }
};

// Append-only record of a prediction stream. All rounds share the group
// count k and the target rate q; indices run 1..size(). Once a transcript
// stops growing it is an immutable value and safe to share across threads.
class Transcript {
 public:
  Transcript(std::size_t k, double q) : k_(k), q_(q) {
    if (k == 0) throw ConfigError("Transcript: group count k must be >= 1");
    require_rate(q, "Transcript");
  }

  void append(std::vector<double> g, double tau, double tau_hat) {
    if (g.size() != k_) {
      throw DataError("Transcript::append: weight vector has dimension " +
                      std::to_string(g.size()) + ", expected " + std::to_string(k_));
    }
    for (double w : g) {
      if (!(w >= 0.0 && w <= 1.0)) {
        throw DataError("Transcript::append: group weight " + std::to_string(w) +
                        " outside [0,1]");
      }
    }
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw DataError("Transcript::append: score " + std::to_string(tau) +
                      " outside [0,1]");
    }
    if (std::isnan(tau_hat)) {
      throw DataError("Transcript::append: prediction is NaN");
    }
    Round r;
    r.t = static_cast<long long>(rounds_.size()) + 1;
    r.g = std::move(g);
    r.tau = tau;
    r.tau_hat = tau_hat;
    rounds_.push_back(std::move(r));
  }

  std::size_t k() const { return k_; }
  double q() const { return q_; }
  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  const Round& operator[](std::size_t i) const { return rounds_[i]; }
  const std::vector<Round>& rounds() const { return rounds_; }
  auto begin() const { return rounds_.begin(); }
  auto end() const { return rounds_.end(); }

 private:
  std::size_t k_;
  double q_;
  std::vector<Round> rounds_;
};

enum class GroupKind { binary, weighted };

// A named per-round membership weight generator. Generators see only the
// round index and the past transcript, never the current prediction, so
// every GroupSpec is prediction-independent by construction.
struct GroupSpec {
  std::string name;
  GroupKind kind = GroupKind::binary;
  std::function<double(long long t, const Transcript& past)> weight;

  double evaluate(long long t, const Transcript& past) const {
    const double w = weight(t, past);
    if (!(w >= 0.0 && w <= 1.0)) {
      throw DataError("group '" + name + "' emitted weight " + std::to_string(w) +
                      " outside [0,1] at t=" + std::to_string(t));
    }
    if (kind == GroupKind::binary && w != 0.0 && w != 1.0) {
      throw DataError("binary group '" + name + "' emitted non-binary weight " +
                      std::to_string(w) + " at t=" + std::to_string(t));
    }
    return w;
  }
};

// Discretized action set {0, 1/n, ..., 1} of n+1 evenly spaced levels.
class Grid {
 public:
  explicit Grid(int n) : n_(n) {
    if (n < 1) throw ConfigError("Grid: n must be >= 1");
  }

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) + 1; }
  double level(int i) const { return static_cast<double>(i) / n_; }

  std::vector<double> levels() const {
    std::vector<double> out(size());
    for (int i = 0; i <= n_; ++i) out[static_cast<std::size_t>(i)] = level(i);
    return out;
  }

  // Nearest level index for an arbitrary real prediction; ties round down
  // and out-of-range values clamp to the end levels.
  int bin(double x) const {
    if (std::isnan(x)) throw DataError("Grid::bin: NaN prediction");
    const double idx = std::ceil(x * n_ - 0.5);
    if (idx < 0.0) return 0;
    if (idx > n_) return n_;
    return static_cast<int>(idx);
  }

 private:
  int n_;
};

// Empirical smoothness of a score sample at resolution r: every closed
// interval of width 1/r carries mass in [alpha, rho].
struct SmoothnessProfile {
  int r = 1;
  double alpha = 0.0;
  double rho = 1.0;
};

}  // namespace ocp
