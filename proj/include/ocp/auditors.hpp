#pragma once

// Pure audits over completed transcripts: marginal / group / threshold /
// group-by-threshold coverage, external and swap regret against a grid of
// comparator actions, empirical smoothness of score samples, and
// executable checks of the coverage-regret bounds these quantities obey.
//
// Regret audits snap predictions to the nearest grid level first so the
// realized sequence and every comparator act on the same discrete action
// set; this keeps external regret <= swap regret by comparator-class
// nesting on any transcript.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocp/core.hpp"

namespace ocp {

// A group with its per-round weights evaluated against a transcript.
struct MaterializedGroup {
  std::string name;
  bool binary = true;
  std::vector<double> w;
};

inline MaterializedGroup materialize(const GroupSpec& spec, const Transcript& tr) {
  MaterializedGroup out;
  out.name = spec.name;
  out.binary = spec.kind == GroupKind::binary;
  out.w.reserve(tr.size());
  // Generators may read only the past, so evaluate against a growing copy.
  Transcript past(tr.k(), tr.q());
  for (const Round& r : tr) {
    out.w.push_back(spec.evaluate(r.t, past));
    past.append(r.g, r.tau, r.tau_hat);
  }
  return out;
}

// The transcript's stored weight columns as groups named g_1..g_k (or the
// provided names).
inline std::vector<MaterializedGroup> stored_groups(
    const Transcript& tr, std::vector<std::string> names = {}) {
  if (!names.empty() && names.size() != tr.k()) {
    throw ConfigError("stored_groups: " + std::to_string(names.size()) +
                      " names for " + std::to_string(tr.k()) + " columns");
  }
  std::vector<MaterializedGroup> out(tr.k());
  for (std::size_t i = 0; i < tr.k(); ++i) {
    out[i].name = names.empty() ? "g_" + std::to_string(i + 1) : names[i];
    out[i].binary = true;
    out[i].w.reserve(tr.size());
  }
  for (const Round& r : tr) {
    for (std::size_t i = 0; i < tr.k(); ++i) {
      const double w = r.g[i];
      if (w != 0.0 && w != 1.0) out[i].binary = false;
      out[i].w.push_back(w);
    }
  }
  return out;
}

struct CoverageEntry {
  std::string entity;
  double size = 0.0;       // weighted membership count T_G
  double coverage = std::numeric_limits<double>::quiet_NaN();
  double deviation = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;    // false when T_G == 0
};

struct CoverageReport {
  double q = 0.0;
  std::vector<CoverageEntry> entries;

  const CoverageEntry* find(const std::string& entity) const {
    for (const auto& e : entries) {
      if (e.entity == entity) return &e;
    }
    return nullptr;
  }
};

inline double coverage(const Transcript& tr) {
  if (tr.empty()) throw DataError("coverage: empty transcript");
  double covered = 0.0;
  for (const Round& r : tr) covered += r.covered() ? 1.0 : 0.0;
  return covered / static_cast<double>(tr.size());
}

namespace detail {

inline CoverageEntry weighted_coverage_entry(const Transcript& tr,
                                             std::string entity,
                                             std::span<const double> w) {
  CoverageEntry e;
  e.entity = std::move(entity);
  double cov = 0.0;
  for (std::size_t t = 0; t < tr.size(); ++t) {
    e.size += w[t];
    if (tr[t].covered()) cov += w[t];
  }
  if (e.size > 0.0) {
    e.defined = true;
    e.coverage = cov / e.size;
    e.deviation = std::abs(e.coverage - tr.q());
  }
  return e;
}

inline std::string level_label(const Grid& grid, int level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", grid.level(level));
  return buf;
}

inline std::vector<int> binned_predictions(const Transcript& tr, const Grid& grid) {
  std::vector<int> out;
  out.reserve(tr.size());
  for (const Round& r : tr) out.push_back(grid.bin(r.tau_hat));
  return out;
}

}  // namespace detail

inline CoverageReport group_coverage(const Transcript& tr,
                                     std::span<const MaterializedGroup> groups) {
  if (tr.empty()) throw DataError("group_coverage: empty transcript");
  CoverageReport rep;
  rep.q = tr.q();
  for (const auto& g : groups) {
    if (g.w.size() != tr.size()) {
      throw DataError("group '" + g.name + "' has " + std::to_string(g.w.size()) +
                      " weights for " + std::to_string(tr.size()) + " rounds");
    }
    rep.entries.push_back(detail::weighted_coverage_entry(tr, g.name, g.w));
  }
  return rep;
}

// Coverage conditioned on the predicted level: one entry per grid level,
// over the rounds whose prediction bins there. Unpopulated levels are
// flagged undefined, never reported as zero coverage.
inline CoverageReport threshold_calibrated_coverage(const Transcript& tr,
                                                    const Grid& grid) {
  if (tr.empty()) throw DataError("threshold_calibrated_coverage: empty transcript");
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  CoverageReport rep;
  rep.q = tr.q();
  for (int a = 0; a <= grid.n(); ++a) {
    std::vector<double> w(tr.size(), 0.0);
    for (std::size_t t = 0; t < tr.size(); ++t) w[t] = bin[t] == a ? 1.0 : 0.0;
    rep.entries.push_back(
        detail::weighted_coverage_entry(tr, detail::level_label(grid, a), w));
  }
  return rep;
}

// Coverage conditioned jointly on group membership and predicted level;
// entities serialize as "group@level".
inline CoverageReport multivalid_coverage(const Transcript& tr,
                                          std::span<const MaterializedGroup> groups,
                                          const Grid& grid) {
  if (tr.empty()) throw DataError("multivalid_coverage: empty transcript");
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  CoverageReport rep;
  rep.q = tr.q();
  for (const auto& g : groups) {
    if (g.w.size() != tr.size()) {
      throw DataError("group '" + g.name + "' has wrong weight count");
    }
    for (int a = 0; a <= grid.n(); ++a) {
      std::vector<double> w(tr.size(), 0.0);
      for (std::size_t t = 0; t < tr.size(); ++t) {
        w[t] = bin[t] == a ? g.w[t] : 0.0;
      }
      rep.entries.push_back(detail::weighted_coverage_entry(
          tr, g.name + "@" + detail::level_label(grid, a), w));
    }
  }
  return rep;
}

enum class RegretKind { external, swap, group_external, group_swap };

struct RegretEntry {
  std::string entity;
  double size = 0.0;
  double regret = 0.0;
  int best_action = -1;        // external kinds: argmin grid index
  std::vector<int> swap_map;   // swap kinds: level -> level, identity when no gain
};

struct RegretReport {
  int grid_n = 0;
  RegretKind kind = RegretKind::external;
  std::vector<RegretEntry> entries;
};

namespace detail {

// Weighted pinball loss totals per comparator action over a subsequence.
inline std::vector<double> action_losses(const Transcript& tr, const Grid& grid,
                                         std::span<const double> w) {
  std::vector<double> L(grid.size(), 0.0);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    if (w[t] == 0.0) continue;
    for (int b = 0; b <= grid.n(); ++b) {
      L[static_cast<std::size_t>(b)] +=
          w[t] * pinball_loss(grid.level(b), tr[t].tau, tr.q());
    }
  }
  return L;
}

inline RegretEntry external_entry(const Transcript& tr, const Grid& grid,
                                  std::string entity, std::span<const double> w,
                                  std::span<const int> bin) {
  RegretEntry e;
  e.entity = std::move(entity);
  double realized = 0.0;
  for (std::size_t t = 0; t < tr.size(); ++t) {
    e.size += w[t];
    if (w[t] != 0.0) {
      realized += w[t] * pinball_loss(grid.level(bin[t]), tr[t].tau, tr.q());
    }
  }
  const std::vector<double> L = action_losses(tr, grid, w);
  std::size_t best = 0;
  for (std::size_t b = 1; b < L.size(); ++b) {
    if (L[b] < L[best]) best = b;
  }
  e.best_action = static_cast<int>(best);
  e.regret = realized - L[best];
  return e;
}

inline RegretEntry swap_entry(const Transcript& tr, const Grid& grid,
                              std::string entity, std::span<const double> w,
                              std::span<const int> bin) {
  RegretEntry e;
  e.entity = std::move(entity);
  e.swap_map.resize(grid.size());
  for (std::size_t a = 0; a < e.swap_map.size(); ++a) {
    e.swap_map[a] = static_cast<int>(a);
  }
  // Per-level comparator loss totals in one pass.
  std::vector<std::vector<double>> L(grid.size(),
                                     std::vector<double>(grid.size(), 0.0));
  std::vector<double> played(grid.size(), 0.0);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    e.size += w[t];
    if (w[t] == 0.0) continue;
    auto& row = L[static_cast<std::size_t>(bin[t])];
    for (int b = 0; b <= grid.n(); ++b) {
      row[static_cast<std::size_t>(b)] +=
          w[t] * pinball_loss(grid.level(b), tr[t].tau, tr.q());
    }
    played[static_cast<std::size_t>(bin[t])] += w[t];
  }
  // Best response per level; phi(a) stays a when nothing improves.
  double total = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    if (played[a] == 0.0) continue;
    std::size_t best = a;
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (L[a][b] < L[a][best]) best = b;
    }
    const double gain = L[a][a] - L[a][best];
    if (gain > 0.0) {
      e.swap_map[a] = static_cast<int>(best);
      total += gain;
    }
  }
  e.regret = total;
  return e;
}

}  // namespace detail

inline RegretReport external_regret(const Transcript& tr, const Grid& grid) {
  if (tr.empty()) throw DataError("external_regret: empty transcript");
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  const std::vector<double> ones(tr.size(), 1.0);
  RegretReport rep;
  rep.grid_n = grid.n();
  rep.kind = RegretKind::external;
  rep.entries.push_back(detail::external_entry(tr, grid, "all", ones, bin));
  return rep;
}

// Sum over levels of the best per-level improvement: for each grid level
// a, the loss of playing a on the rounds binned at a minus the loss of the
// best alternative level there, floored at zero by keeping phi(a) = a.
inline RegretReport swap_regret(const Transcript& tr, const Grid& grid) {
  if (tr.empty()) throw DataError("swap_regret: empty transcript");
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  const std::vector<double> ones(tr.size(), 1.0);
  RegretReport rep;
  rep.grid_n = grid.n();
  rep.kind = RegretKind::swap;
  rep.entries.push_back(detail::swap_entry(tr, grid, "all", ones, bin));
  return rep;
}

inline RegretReport group_conditional_regret(const Transcript& tr,
                                             std::span<const MaterializedGroup> groups,
                                             const Grid& grid, RegretKind kind) {
  if (tr.empty()) throw DataError("group_conditional_regret: empty transcript");
  if (kind != RegretKind::external && kind != RegretKind::swap &&
      kind != RegretKind::group_external && kind != RegretKind::group_swap) {
    throw ConfigError("group_conditional_regret: unknown kind");
  }
  const bool swap_kind = kind == RegretKind::swap || kind == RegretKind::group_swap;
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  RegretReport rep;
  rep.grid_n = grid.n();
  rep.kind = swap_kind ? RegretKind::group_swap : RegretKind::group_external;
  for (const auto& g : groups) {
    if (g.w.size() != tr.size()) {
      throw DataError("group '" + g.name + "' has wrong weight count");
    }
    if (swap_kind && !g.binary) {
      throw ConfigError(
          "group_conditional_regret: swap kind requires binary groups; group '" +
          g.name + "' is weighted. Per-level best responses are only defined on "
          "unweighted subsequences.");
    }
    rep.entries.push_back(swap_kind
                              ? detail::swap_entry(tr, grid, g.name, g.w, bin)
                              : detail::external_entry(tr, grid, g.name, g.w, bin));
  }
  return rep;
}

// Exact empirical smoothness at resolution r: rho is the largest mass any
// closed width-1/r interval carries, alpha the smallest over intervals
// that fit inside [0,1]. Both are attained in the limit at windows whose
// left endpoint sits at (or just above) a sample point, so a sorted sweep
// over those candidates suffices. Interval edges are matched with a 1e-12
// absolute tolerance so samples specified as decimals (0.05, 0.15, ...)
// behave as written rather than as their rounded binary neighbors.
inline SmoothnessProfile smoothness_estimate(std::span<const double> samples, int r) {
  if (r < 1) throw ConfigError("smoothness_estimate: r must be >= 1");
  if (samples.empty()) throw DataError("smoothness_estimate: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DataError("smoothness_estimate: sample outside [0,1]");
    }
  }
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  const double width = 1.0 / r;
  constexpr double kEdge = 1e-12;

  auto count_closed = [&](double lo, double hi_v) {
    return static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), hi_v + kEdge) -
                                    std::lower_bound(s.begin(), s.end(), lo - kEdge));
  };

  // rho: count in [s_i, s_i + width], maximized over left endpoints.
  std::size_t rho_count = 0;
  for (double si : s) rho_count = std::max(rho_count, count_closed(si, si + width));

  // alpha: infimum of the count in [p, p + width] over p in [0, 1 - width].
  // Between consecutive samples the count is nondecreasing in p, so the
  // infimum is attained at p = 0, p = 1 - width, or just above a sample
  // (the limit window (s_i, s_i + width]).
  const double pmax = 1.0 - width;
  std::size_t alpha_count = count_closed(0.0, width);
  alpha_count = std::min(alpha_count, count_closed(pmax, 1.0));
  for (double si : s) {
    if (si >= pmax - kEdge) break;
    const auto lo = std::upper_bound(s.begin(), s.end(), si + kEdge);
    const auto hi = std::upper_bound(s.begin(), s.end(), si + width + kEdge);
    alpha_count = std::min(alpha_count, static_cast<std::size_t>(hi - lo));
  }

  SmoothnessProfile out;
  out.r = r;
  out.alpha = static_cast<double>(alpha_count) / n;
  out.rho = static_cast<double>(rho_count) / n;
  return out;
}

// ---------------------------------------------------------------------------
// Executable bound checks. Every inequality is evaluated with all
// quantities measured from the transcript itself; probabilistic slack
// terms are set to zero wherever the realized quantity is available.

enum class TheoremId {
  marginal_from_external,      // iid + external regret -> marginal coverage
  calibrated_from_swap,        // swap regret -> per-level coverage
  swap_from_calibrated,        // per-level coverage -> swap regret
  multivalid_from_group_swap,  // group swap regret -> group-by-level coverage
  group_swap_from_multivalid,  // group-by-level coverage -> group swap regret
  ftrl_group_coverage,         // first-order-condition coverage bound
  ogd_group_coverage,          // gradient-descent coverage identity (needs eta)
  quantile_loss_gap,           // pinball-gap lower bound around the quantile
};

inline const char* theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::marginal_from_external: return "marginal_from_external";
    case TheoremId::calibrated_from_swap: return "calibrated_from_swap";
    case TheoremId::swap_from_calibrated: return "swap_from_calibrated";
    case TheoremId::multivalid_from_group_swap: return "multivalid_from_group_swap";
    case TheoremId::group_swap_from_multivalid: return "group_swap_from_multivalid";
    case TheoremId::ftrl_group_coverage: return "ftrl_group_coverage";
    case TheoremId::ogd_group_coverage: return "ogd_group_coverage";
    case TheoremId::quantile_loss_gap: return "quantile_loss_gap";
  }
  return "unknown";
}

inline std::optional<TheoremId> theorem_from_name(const std::string& name) {
  for (TheoremId id : {TheoremId::marginal_from_external, TheoremId::calibrated_from_swap,
                       TheoremId::swap_from_calibrated, TheoremId::multivalid_from_group_swap,
                       TheoremId::group_swap_from_multivalid, TheoremId::ftrl_group_coverage,
                       TheoremId::ogd_group_coverage, TheoremId::quantile_loss_gap}) {
    if (name == theorem_name(id)) return id;
  }
  return std::nullopt;
}

// One audited inequality lhs <= rhs with slack = rhs - lhs. Vacuous checks
// (alpha = 0 or an undefined entity) are reported as such, never as passes.
struct BoundCheck {
  std::string entity;
  double size = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool vacuous = false;
  std::string note;
};

struct TheoremReport {
  TheoremId id = TheoremId::ftrl_group_coverage;
  std::vector<BoundCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.vacuous && !c.pass) return false;
    }
    return true;
  }
  bool any_failure() const { return !all_pass(); }
};

struct TheoremInputs {
  double eta = std::numeric_limits<double>::quiet_NaN();  // ogd identity
  int r = 0;                                              // smoothness resolution; 0 -> grid n
};

namespace detail {

inline double empirical_quantile(std::vector<double> s, double q) {
  std::sort(s.begin(), s.end());
  const double pos = std::ceil(q * static_cast<double>(s.size()));
  const std::size_t idx =
      static_cast<std::size_t>(std::max(1.0, std::min(pos, static_cast<double>(s.size()))));
  return s[idx - 1];
}

inline double mean_pinball(std::span<const double> taus, double at, double q) {
  double s = 0.0;
  for (double tau : taus) s += pinball_loss(at, tau, q);
  return s / static_cast<double>(taus.size());
}

// Signed coverage defect sum v_i = sum_t w_{t,i} (q - 1[tau <= tau_hat])
// for the stored weight columns; equals grad R(theta_{T+1}) for any
// regularized-leader run on these groups.
inline std::vector<double> coverage_defect(const Transcript& tr,
                                           std::span<const MaterializedGroup> groups) {
  std::vector<double> v(groups.size(), 0.0);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    const double ind = tr[t].covered() ? 1.0 : 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      v[i] += groups[i].w[t] * (tr.q() - ind);
    }
  }
  return v;
}

inline BoundCheck make_check(std::string entity, double size, double lhs, double rhs,
                             std::string note = {}) {
  BoundCheck c;
  c.entity = std::move(entity);
  c.size = size;
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.pass = lhs <= rhs + 1e-12;
  c.note = std::move(note);
  return c;
}

inline BoundCheck vacuous_check(std::string entity, double size, std::string note) {
  BoundCheck c;
  c.entity = std::move(entity);
  c.size = size;
  c.vacuous = true;
  c.note = std::move(note);
  return c;
}

}  // namespace detail

// External regret + smoothness -> marginal coverage, evaluated on realized
// quantities: gamma is the realized regret against the empirical
// q-quantile (floored at zero) and the probabilistic slack is zero.
inline TheoremReport check_marginal_from_external(const Transcript& tr, int r) {
  if (tr.empty()) throw DataError("check_marginal_from_external: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::marginal_from_external;
  std::vector<double> taus;
  taus.reserve(tr.size());
  for (const Round& rd : tr) taus.push_back(rd.tau);
  const double tau_star = detail::empirical_quantile(taus, tr.q());
  double realized = 0.0;
  for (const Round& rd : tr) realized += pinball_loss(rd.tau_hat, rd.tau, tr.q());
  const double best = detail::mean_pinball(taus, tau_star, tr.q()) *
                      static_cast<double>(tr.size());
  const double gamma = std::max(0.0, realized - best);
  const SmoothnessProfile sp = smoothness_estimate(taus, r);
  const double T = static_cast<double>(tr.size());
  if (sp.alpha == 0.0) {
    rep.checks.push_back(detail::vacuous_check("all", T, "alpha = 0 at r=" +
                                               std::to_string(r)));
    return rep;
  }
  const double bound = std::sqrt(2.0 * sp.rho * gamma / (T * sp.alpha));
  rep.checks.push_back(detail::make_check(
      "all", T, std::abs(coverage(tr) - tr.q()), bound,
      "gamma=" + std::to_string(gamma) + " alpha=" + std::to_string(sp.alpha) +
          " rho=" + std::to_string(sp.rho)));
  return rep;
}

// Swap regret -> threshold-calibrated coverage: per populated level,
// |Cov - q| <= rho/2 + rho*r/n + sqrt(2 gamma / (T_level * alpha * r))
// with (alpha, rho) from that level's conditional score sample.
inline TheoremReport check_calibrated_from_swap(const Transcript& tr, const Grid& grid,
                                                int r) {
  if (tr.empty()) throw DataError("check_calibrated_from_swap: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::calibrated_from_swap;
  const double gamma = swap_regret(tr, grid).entries[0].regret;
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  for (int a = 0; a <= grid.n(); ++a) {
    std::vector<double> taus;
    double covered = 0.0;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      if (bin[t] != a) continue;
      taus.push_back(tr[t].tau);
      if (tr[t].covered()) covered += 1.0;
    }
    if (taus.empty()) continue;
    const std::string label = detail::level_label(grid, a);
    const double Tl = static_cast<double>(taus.size());
    const SmoothnessProfile sp = smoothness_estimate(taus, r);
    if (sp.alpha == 0.0) {
      rep.checks.push_back(detail::vacuous_check(label, Tl, "alpha = 0"));
      continue;
    }
    const double bound = sp.rho / 2.0 +
                         sp.rho * static_cast<double>(r) / grid.n() +
                         std::sqrt(2.0 * gamma / (Tl * sp.alpha * r));
    rep.checks.push_back(detail::make_check(label, Tl,
                                            std::abs(covered / Tl - tr.q()), bound));
  }
  return rep;
}

// Threshold-calibrated coverage error -> swap regret bound
// T * gamma^2 * rho / (alpha^2 * r), with gamma the worst populated-level
// deviation and (alpha, rho) the worst per-level smoothness.
inline TheoremReport check_swap_from_calibrated(const Transcript& tr, const Grid& grid,
                                                int r) {
  if (tr.empty()) throw DataError("check_swap_from_calibrated: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::swap_from_calibrated;
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  double gamma = 0.0;
  double alpha = 1.0;
  double rho = 0.0;
  for (int a = 0; a <= grid.n(); ++a) {
    std::vector<double> taus;
    double covered = 0.0;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      if (bin[t] != a) continue;
      taus.push_back(tr[t].tau);
      if (tr[t].covered()) covered += 1.0;
    }
    if (taus.empty()) continue;
    gamma = std::max(gamma, std::abs(covered / static_cast<double>(taus.size()) - tr.q()));
    const SmoothnessProfile sp = smoothness_estimate(taus, r);
    alpha = std::min(alpha, sp.alpha);
    rho = std::max(rho, sp.rho);
  }
  const double T = static_cast<double>(tr.size());
  if (alpha == 0.0) {
    rep.checks.push_back(detail::vacuous_check("all", T, "alpha = 0 on some level"));
    return rep;
  }
  const double bound = T * gamma * gamma * rho / (alpha * alpha * r);
  rep.checks.push_back(detail::make_check("all", T,
                                          swap_regret(tr, grid).entries[0].regret, bound,
                                          "gamma=" + std::to_string(gamma)));
  return rep;
}

// Group-conditional swap regret -> multivalid coverage, per populated
// group-by-level entity with its own conditional smoothness.
inline TheoremReport check_multivalid_from_group_swap(
    const Transcript& tr, std::span<const MaterializedGroup> groups, const Grid& grid,
    int r) {
  if (tr.empty()) throw DataError("check_multivalid_from_group_swap: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::multivalid_from_group_swap;
  const RegretReport rr =
      group_conditional_regret(tr, groups, grid, RegretKind::group_swap);
  double gamma = 0.0;
  for (const auto& e : rr.entries) gamma = std::max(gamma, e.regret);
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  for (const auto& g : groups) {
    for (int a = 0; a <= grid.n(); ++a) {
      std::vector<double> taus;
      double covered = 0.0;
      for (std::size_t t = 0; t < tr.size(); ++t) {
        if (g.w[t] == 0.0 || bin[t] != a) continue;
        taus.push_back(tr[t].tau);
        if (tr[t].covered()) covered += 1.0;
      }
      if (taus.empty()) continue;
      const std::string label = g.name + "@" + detail::level_label(grid, a);
      const double Tl = static_cast<double>(taus.size());
      const SmoothnessProfile sp = smoothness_estimate(taus, r);
      if (sp.alpha == 0.0) {
        rep.checks.push_back(detail::vacuous_check(label, Tl, "alpha = 0"));
        continue;
      }
      const double bound = sp.rho / 2.0 +
                           sp.rho * static_cast<double>(r) / grid.n() +
                           std::sqrt(2.0 * gamma / (Tl * sp.alpha * r));
      rep.checks.push_back(detail::make_check(label, Tl,
                                              std::abs(covered / Tl - tr.q()), bound));
    }
  }
  return rep;
}

// Multivalid coverage error -> per-group swap regret bound.
inline TheoremReport check_group_swap_from_multivalid(
    const Transcript& tr, std::span<const MaterializedGroup> groups, const Grid& grid,
    int r) {
  if (tr.empty()) throw DataError("check_group_swap_from_multivalid: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::group_swap_from_multivalid;
  const CoverageReport mv = multivalid_coverage(tr, groups, grid);
  double gamma = 0.0;
  for (const auto& e : mv.entries) {
    if (e.defined) gamma = std::max(gamma, e.deviation);
  }
  const std::vector<int> bin = detail::binned_predictions(tr, grid);
  const RegretReport rr =
      group_conditional_regret(tr, groups, grid, RegretKind::group_swap);
  const double T = static_cast<double>(tr.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    double alpha = 1.0;
    double rho = 0.0;
    bool populated = false;
    for (int a = 0; a <= grid.n(); ++a) {
      std::vector<double> taus;
      for (std::size_t t = 0; t < tr.size(); ++t) {
        if (g.w[t] != 0.0 && bin[t] == a) taus.push_back(tr[t].tau);
      }
      if (taus.empty()) continue;
      populated = true;
      const SmoothnessProfile sp = smoothness_estimate(taus, r);
      alpha = std::min(alpha, sp.alpha);
      rho = std::max(rho, sp.rho);
    }
    if (!populated) {
      rep.checks.push_back(detail::vacuous_check(g.name, 0.0, "empty group"));
      continue;
    }
    if (alpha == 0.0) {
      rep.checks.push_back(detail::vacuous_check(g.name, rr.entries[gi].size,
                                                 "alpha = 0 on some level"));
      continue;
    }
    const double bound = T * gamma * gamma * rho / (alpha * alpha * r);
    rep.checks.push_back(detail::make_check(g.name, rr.entries[gi].size,
                                            rr.entries[gi].regret, bound,
                                            "gamma=" + std::to_string(gamma)));
  }
  return rep;
}

// Regularized-leader coverage bound: with v the signed coverage defect sum
// (which the first-order condition makes equal to grad R(theta_{T+1})),
// every group satisfies |Cov(G_i) - q| <= ||v||_inf / T_i. This is an
// identity-derived bound and holds on any transcript.
inline TheoremReport check_ftrl_group_coverage(const Transcript& tr,
                                               std::span<const MaterializedGroup> groups) {
  if (tr.empty()) throw DataError("check_ftrl_group_coverage: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::ftrl_group_coverage;
  const std::vector<double> v = detail::coverage_defect(tr, groups);
  double vinf = 0.0;
  for (double x : v) vinf = std::max(vinf, std::abs(x));
  const CoverageReport cov = group_coverage(tr, groups);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& e = cov.entries[i];
    if (!e.defined) {
      rep.checks.push_back(detail::vacuous_check(e.entity, e.size, "empty group"));
      continue;
    }
    rep.checks.push_back(
        detail::make_check(e.entity, e.size, e.deviation, vinf / e.size));
  }
  return rep;
}

// Gradient-descent specialization: theta_{T+1,i} = eta * v_i, so the
// deviation of every group equals |theta_{T+1,i}| / (T_i * eta) exactly.
// Checked as an identity with tolerance 1e-9.
inline TheoremReport check_ogd_group_coverage(const Transcript& tr,
                                              std::span<const MaterializedGroup> groups,
                                              double eta) {
  if (tr.empty()) throw DataError("check_ogd_group_coverage: empty transcript");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("check_ogd_group_coverage: eta must lie in (0,1]");
  }
  TheoremReport rep;
  rep.id = TheoremId::ogd_group_coverage;
  const std::vector<double> v = detail::coverage_defect(tr, groups);
  const CoverageReport cov = group_coverage(tr, groups);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& e = cov.entries[i];
    if (!e.defined) {
      rep.checks.push_back(detail::vacuous_check(e.entity, e.size, "empty group"));
      continue;
    }
    const double theta_i = eta * v[i];
    BoundCheck c = detail::make_check(e.entity, e.size, e.deviation,
                                      std::abs(theta_i) / (e.size * eta), "identity");
    c.pass = std::abs(c.lhs - c.rhs) <= 1e-9;
    rep.checks.push_back(c);
  }
  return rep;
}

// Pinball-gap lower bound around the empirical q-quantile tau*: for each
// grid level tau' at least 1/r away from tau*,
// alpha*r*(tau* - tau')^2 / 2 <= mean p_q(tau') - mean p_q(tau*).
// Gaps below the resolution 1/r carry no smoothness-backed mass guarantee
// (the alpha condition only covers intervals of width >= 1/r), so those
// levels are reported vacuous.
inline TheoremReport check_quantile_loss_gap(const Transcript& tr, const Grid& grid,
                                             int r) {
  if (tr.empty()) throw DataError("check_quantile_loss_gap: empty transcript");
  TheoremReport rep;
  rep.id = TheoremId::quantile_loss_gap;
  std::vector<double> taus;
  taus.reserve(tr.size());
  for (const Round& rd : tr) taus.push_back(rd.tau);
  const double tau_star = detail::empirical_quantile(taus, tr.q());
  const double base = detail::mean_pinball(taus, tau_star, tr.q());
  const SmoothnessProfile sp = smoothness_estimate(taus, r);
  const double T = static_cast<double>(tr.size());
  for (int i = 0; i <= grid.n(); ++i) {
    const double tp = grid.level(i);
    const double gap = tau_star - tp;
    if (std::abs(gap) < 1.0 / r) {
      rep.checks.push_back(detail::vacuous_check(detail::level_label(grid, i), T,
                                                 "gap below smoothness resolution"));
      continue;
    }
    rep.checks.push_back(detail::make_check(
        detail::level_label(grid, i), T, sp.alpha * r * gap * gap / 2.0,
        detail::mean_pinball(taus, tp, tr.q()) - base));
  }
  return rep;
}

inline TheoremReport check_theorem_bounds(const Transcript& tr,
                                          std::span<const MaterializedGroup> groups,
                                          const Grid& grid, TheoremId which,
                                          const TheoremInputs& in = {}) {
  const int r = in.r > 0 ? in.r : grid.n();
  switch (which) {
    case TheoremId::marginal_from_external:
      return check_marginal_from_external(tr, r);
    case TheoremId::calibrated_from_swap:
      return check_calibrated_from_swap(tr, grid, r);
    case TheoremId::swap_from_calibrated:
      return check_swap_from_calibrated(tr, grid, r);
    case TheoremId::multivalid_from_group_swap:
      return check_multivalid_from_group_swap(tr, groups, grid, r);
    case TheoremId::group_swap_from_multivalid:
      return check_group_swap_from_multivalid(tr, groups, grid, r);
    case TheoremId::ftrl_group_coverage:
      return check_ftrl_group_coverage(tr, groups);
    case TheoremId::ogd_group_coverage:
      if (std::isnan(in.eta)) {
        throw ConfigError("ogd_group_coverage check requires eta");
      }
      return check_ogd_group_coverage(tr, groups, in.eta);
    case TheoremId::quantile_loss_gap:
      return check_quantile_loss_gap(tr, grid, r);
  }
  throw ConfigError("unknown theorem id");
}

}  // namespace ocp
