#pragma once

// Online threshold learners:
//   - GroupAciLearner: per-group additive updates on the pinball
//     subgradient of <theta, g> (online gradient descent).
//   - FtrlLearner: follow-the-regularized-leader with a pluggable strictly
//     convex regularizer, played through its mirror map.
//   - AciLearner: the 1-D, context-free special case (k=1, g=[1]).
//   - SwapLearner: a swap-regret meta-learner over a discretized grid,
//     built from multiplicative-weights sub-learners, one per grid level.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ocp/core.hpp"

namespace ocp {

// Online gradient descent on pinball loss of <theta, g>. theta starts at
// the zero vector; round t applies
//   theta += eta * q * g           when <theta, g> <  tau   (update A)
//   theta -= eta * (1 - q) * g     when <theta, g> >= tau   (update B)
// so after T rounds theta_i = eta * sum_t g_{t,i} * (q - 1[tau_t <= tau_hat_t]).
class GroupAciLearner {
 public:
  GroupAciLearner(std::size_t k, double q, double eta)
      : q_(q), eta_(eta), theta_(k, 0.0) {
    if (k == 0) throw ConfigError("GroupAciLearner: k must be >= 1");
    require_rate(q, "GroupAciLearner");
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ConfigError("GroupAciLearner: step size eta must lie in (0,1]");
    }
  }

  double predict(std::span<const double> g) const {
    check_dim(g.size());
    return dot(theta_, g);
  }

  void update(std::span<const double> g, double tau) {
    check_dim(g.size());
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw DataError("GroupAciLearner::update: score outside [0,1]");
    }
    const double pred = dot(theta_, g);
    const double step = pred < tau ? q_ : q_ - 1.0;
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      theta_[i] += eta_ * step * g[i];
    }
    ++t_;
  }

  const std::vector<double>& theta() const { return theta_; }
  std::size_t k() const { return theta_.size(); }
  double q() const { return q_; }
  double eta() const { return eta_; }
  long long round() const { return t_; }

  double norm_inf() const {
    double m = 0.0;
    for (double v : theta_) m = std::max(m, std::abs(v));
    return m;
  }

  // Proven iterate envelope: ||theta_{t}||_2^2 <= (t-1)*eta*(eta*k*max{q,1-q}^2 + 2q).
  double norm_envelope(long long t) const {
    const double m = std::max(q_, 1.0 - q_);
    return std::sqrt(static_cast<double>(t) * eta_ *
                     (eta_ * static_cast<double>(k()) * m * m + 2.0 * q_));
  }

 private:
  void check_dim(std::size_t n) const {
    if (n != theta_.size()) {
      throw DataError("GroupAciLearner: weight vector has dimension " +
                      std::to_string(n) + ", expected " + std::to_string(theta_.size()));
    }
  }

  double q_;
  double eta_;
  long long t_ = 1;
  std::vector<double> theta_;
};

// A strictly convex regularizer R together with its gradient and the
// inverse (mirror) map. domain_sample draws points inside R's domain for
// the round-trip probe run at learner construction.
struct Regularizer {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::function<std::vector<double>(std::span<const double>)> gradient_inverse;
  std::function<std::vector<double>(std::mt19937_64&, std::size_t)> domain_sample;
};

// R(theta) = ||theta||^2 / (2 eta); gradient theta/eta, inverse eta*z.
// FTRL with this regularizer is exactly GroupAciLearner.
inline Regularizer euclidean_regularizer(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("euclidean_regularizer: eta must lie in (0,1]");
  }
  Regularizer r;
  r.name = "euclidean";
  r.value = [eta](std::span<const double> th) {
    double s = 0.0;
    for (double v : th) s += v * v;
    return s / (2.0 * eta);
  };
  r.gradient = [eta](std::span<const double> th) {
    std::vector<double> out(th.begin(), th.end());
    for (double& v : out) v /= eta;
    return out;
  };
  r.gradient_inverse = [eta](std::span<const double> z) {
    std::vector<double> out(z.begin(), z.end());
    for (double& v : out) v *= eta;
    return out;
  };
  r.domain_sample = [](std::mt19937_64& rng, std::size_t k) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> out(k);
    for (double& v : out) v = n(rng);
    return out;
  };
  return r;
}

// Negative-entropy regularizer R(theta) = (1/eta) * sum(theta_i ln theta_i
// - theta_i) on the positive orthant; gradient (1/eta) ln theta, inverse
// exp(eta z). Initial iterate is the all-ones vector.
inline Regularizer entropic_regularizer(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("entropic_regularizer: eta must lie in (0,1]");
  }
  Regularizer r;
  r.name = "entropic";
  r.value = [eta](std::span<const double> th) {
    double s = 0.0;
    for (double v : th) s += v * std::log(v) - v;
    return s / eta;
  };
  r.gradient = [eta](std::span<const double> th) {
    std::vector<double> out(th.begin(), th.end());
    for (double& v : out) v = std::log(v) / eta;
    return out;
  };
  r.gradient_inverse = [eta](std::span<const double> z) {
    std::vector<double> out(z.begin(), z.end());
    for (double& v : out) v = std::exp(eta * v);
    return out;
  };
  r.domain_sample = [](std::mt19937_64& rng, std::size_t k) {
    std::normal_distribution<double> n(0.0, 0.5);
    std::vector<double> out(k);
    for (double& v : out) v = std::exp(n(rng));
    return out;
  };
  return r;
}

// Follow the regularized leader on the linear surrogate of pinball loss.
// The argmin is taken in closed form through the mirror map: with G the
// accumulated subgradient sum, theta_t = grad_inverse(-G), which makes the
// first-order condition grad R(theta_t) = sum_{s<t} g_s (q - 1[tau_s <= tau_hat_s])
// hold exactly.
class FtrlLearner {
 public:
  FtrlLearner(std::size_t k, double q, Regularizer reg)
      : q_(q), reg_(std::move(reg)), grad_sum_(k, 0.0) {
    if (k == 0) throw ConfigError("FtrlLearner: k must be >= 1");
    require_rate(q, "FtrlLearner");
    probe_mirror_map(k);
  }

  // Predicts <theta_t, g> with theta_t = grad_inverse(-G_{t-1}), then
  // folds the round's pinball subgradient into G.
  double step(std::span<const double> g, double tau) {
    check_dim(g.size());
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw DataError("FtrlLearner::step: score outside [0,1]");
    }
    const std::vector<double> th = theta();
    const double pred = dot(th, g);
    const double slope = tau > pred ? -q_ : 1.0 - q_;
    for (std::size_t i = 0; i < grad_sum_.size(); ++i) {
      grad_sum_[i] += slope * g[i];
    }
    ++t_;
    return pred;
  }

  std::vector<double> theta() const {
    std::vector<double> neg(grad_sum_.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -grad_sum_[i];
    return reg_.gradient_inverse(neg);
  }

  // grad R(theta_{t}) componentwise; equals -G by construction.
  std::vector<double> regularizer_gradient_at_iterate() const {
    std::vector<double> out(grad_sum_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -grad_sum_[i];
    return out;
  }

  std::size_t k() const { return grad_sum_.size(); }
  double q() const { return q_; }
  long long round() const { return t_; }
  const Regularizer& regularizer() const { return reg_; }

 private:
  void check_dim(std::size_t n) const {
    if (n != grad_sum_.size()) {
      throw DataError("FtrlLearner: weight vector has dimension " +
                      std::to_string(n) + ", expected " + std::to_string(grad_sum_.size()));
    }
  }

  // Round-trip check grad_inverse(gradient(theta)) == theta on a few draws
  // from the regularizer's domain; a failure means the mirror map is not a
  // usable inverse (e.g. a constant or non-strictly-convex R).
  void probe_mirror_map(std::size_t k) const {
    if (!reg_.gradient || !reg_.gradient_inverse) {
      throw ConfigError("FtrlLearner: regularizer '" + reg_.name +
                        "' must supply gradient and gradient_inverse");
    }
    std::mt19937_64 rng(0x5eedf7a1u);
    for (int probe = 0; probe < 8; ++probe) {
      std::vector<double> th = reg_.domain_sample
                                   ? reg_.domain_sample(rng, k)
                                   : std::vector<double>(k, 0.25 * (probe + 1));
      const std::vector<double> back = reg_.gradient_inverse(reg_.gradient(th));
      if (back.size() != th.size()) {
        throw ConfigError("FtrlLearner: regularizer '" + reg_.name +
                          "' mirror map changed dimension");
      }
      for (std::size_t i = 0; i < th.size(); ++i) {
        if (!(std::abs(back[i] - th[i]) <= 1e-9)) {
          throw ConfigError("FtrlLearner: regularizer '" + reg_.name +
                            "' failed the mirror round-trip check; it is not "
                            "strictly convex or its inverse is wrong");
        }
      }
    }
  }

  double q_;
  Regularizer reg_;
  long long t_ = 1;
  std::vector<double> grad_sum_;
};

// 1-D adaptive threshold tracking: GroupAciLearner with k=1 and unit weight.
class AciLearner {
 public:
  AciLearner(double q, double eta) : inner_(1, q, eta) {}

  double predict() const { return inner_.predict(kUnit); }

  double step(double tau) {
    const double pred = inner_.predict(kUnit);
    inner_.update(kUnit, tau);
    return pred;
  }

  double theta() const { return inner_.theta()[0]; }
  const GroupAciLearner& inner() const { return inner_; }

 private:
  static constexpr double kUnit[1] = {1.0};
  GroupAciLearner inner_;
};

// Swap-regret meta-learner over the grid A_n. One multiplicative-weights
// sub-learner per level; the played distribution p is the fixed point of
// the row-stochastic matrix Q whose row a is sub-learner a's distribution,
// and each sub-learner receives the full pinball loss vector scaled by its
// own stationary mass p_a. Sub-learner rate is sqrt(ln(n+1)/T) when a
// horizon T is given and the anytime rate sqrt(ln(n+1)/t) otherwise.
class SwapLearner {
 public:
  SwapLearner(Grid grid, double q, std::uint64_t seed,
              std::optional<long long> horizon = std::nullopt)
      : grid_(grid),
        q_(q),
        horizon_(horizon),
        rng_(seed),
        weights_(grid.size(), std::vector<double>(grid.size(), 1.0 / grid.size())),
        p_(grid.size(), 1.0 / grid.size()) {
    require_rate(q, "SwapLearner");
    if (horizon_ && *horizon_ < 1) {
      throw ConfigError("SwapLearner: horizon must be >= 1");
    }
  }

  // Samples a level index from the stationary distribution. Deterministic
  // given the seed and the history of updates.
  int predict() {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double cum = 0.0;
    for (std::size_t a = 0; a < p_.size(); ++a) {
      cum += p_[a];
      if (u <= cum) return static_cast<int>(a);
    }
    return grid_.n();
  }

  double predict_value() { return grid_.level(predict()); }

  void update(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw DataError("SwapLearner::update: score outside [0,1]");
    }
    const std::size_t m = grid_.size();
    std::vector<double> loss(m);
    for (std::size_t b = 0; b < m; ++b) {
      loss[b] = pinball_loss(grid_.level(static_cast<int>(b)), tau, q_);
    }
    const double eps = rate();
    for (std::size_t a = 0; a < m; ++a) {
      auto& row = weights_[a];
      const double scale = eps * p_[a];
      double sum = 0.0;
      for (std::size_t b = 0; b < m; ++b) {
        row[b] *= std::exp(-scale * loss[b]);
        sum += row[b];
      }
      for (double& w : row) w /= sum;
    }
    ++t_;
    solve_fixed_point();
  }

  const std::vector<double>& stationary() const { return p_; }
  const std::vector<std::vector<double>>& expert_weights() const { return weights_; }
  const Grid& grid() const { return grid_; }
  double q() const { return q_; }
  long long round() const { return t_; }

  // L1 residual ||p - pQ||_1 of the current fixed point.
  double stationarity_residual() const {
    std::vector<double> next = multiply(p_);
    double res = 0.0;
    for (std::size_t b = 0; b < p_.size(); ++b) res += std::abs(next[b] - p_[b]);
    return res;
  }

 private:
  double rate() const {
    const double num = std::log(static_cast<double>(grid_.size()));
    const double den = horizon_ ? static_cast<double>(*horizon_)
                                : static_cast<double>(t_);
    return std::sqrt(num / den);
  }

  std::vector<double> multiply(const std::vector<double>& p) const {
    std::vector<double> next(p.size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double pa = p[a];
      if (pa == 0.0) continue;
      const auto& row = weights_[a];
      for (std::size_t b = 0; b < p.size(); ++b) next[b] += pa * row[b];
    }
    return next;
  }

  // Power iteration for p = pQ, warm-started at the previous fixed point.
  void solve_fixed_point() {
    constexpr int kMaxIters = 10000;
    constexpr double kTol = 1e-10;
    double res = 0.0;
    for (int it = 0; it < kMaxIters; ++it) {
      std::vector<double> next = multiply(p_);
      double sum = 0.0;
      for (double v : next) sum += v;
      for (double& v : next) v /= sum;
      res = 0.0;
      for (std::size_t b = 0; b < p_.size(); ++b) res += std::abs(next[b] - p_[b]);
      p_ = std::move(next);
      if (res <= kTol) return;
    }
    throw NumericError("SwapLearner: fixed point failed to converge after " +
                       std::to_string(kMaxIters) + " iterations (residual " +
                       std::to_string(res) + ", n=" + std::to_string(grid_.n()) +
                       ", t=" + std::to_string(t_) + ")");
  }

  Grid grid_;
  double q_;
  std::optional<long long> horizon_;
  long long t_ = 1;
  std::mt19937_64 rng_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> p_;
};

}  // namespace ocp
