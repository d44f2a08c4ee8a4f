#pragma once

// Report serialization: nested per-entity JSON and the flat CSV layout
// `entity,size,value,bound,slack` shared by all report kinds (coverage and
// regret rows leave bound/slack empty).

#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ocp/auditors.hpp"
#include "ocp/core.hpp"
#include "ocp/transcript_io.hpp"

namespace ocp {

using nlohmann::json;

inline json to_json(const CoverageReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json j{{"entity", e.entity}, {"size", e.size}, {"defined", e.defined}};
    if (e.defined) {
      j["coverage"] = e.coverage;
      j["deviation"] = e.deviation;
    }
    entries.push_back(std::move(j));
  }
  return json{{"kind", "coverage"}, {"q", rep.q}, {"entries", std::move(entries)}};
}

inline const char* regret_kind_name(RegretKind kind) {
  switch (kind) {
    case RegretKind::external: return "external";
    case RegretKind::swap: return "swap";
    case RegretKind::group_external: return "group_external";
    case RegretKind::group_swap: return "group_swap";
  }
  return "unknown";
}

inline json to_json(const RegretReport& rep) {
  json entries = json::array();
  const bool swap_kind =
      rep.kind == RegretKind::swap || rep.kind == RegretKind::group_swap;
  for (const auto& e : rep.entries) {
    json j{{"entity", e.entity}, {"size", e.size}, {"regret", e.regret}};
    if (swap_kind) {
      j["swap_map"] = e.swap_map;
    } else {
      j["best_action"] = e.best_action;
    }
    entries.push_back(std::move(j));
  }
  return json{{"kind", "regret"},
              {"regret_kind", regret_kind_name(rep.kind)},
              {"grid_n", rep.grid_n},
              {"entries", std::move(entries)}};
}

inline json to_json(const TheoremReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json j{{"entity", c.entity}, {"size", c.size}, {"vacuous", c.vacuous}};
    if (!c.vacuous) {
      j["lhs"] = c.lhs;
      j["rhs"] = c.rhs;
      j["slack"] = c.slack;
      j["pass"] = c.pass;
    }
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  return json{{"kind", "theorem"},
              {"theorem", theorem_name(rep.id)},
              {"all_pass", rep.all_pass()},
              {"checks", std::move(checks)}};
}

inline void write_csv_header(std::ostream& os) { os << "entity,size,value,bound,slack\n"; }

inline void write_csv_rows(std::ostream& os, const CoverageReport& rep) {
  for (const auto& e : rep.entries) {
    os << e.entity << ',' << format_double(e.size) << ',';
    if (e.defined) os << format_double(e.coverage);
    os << ",,\n";
  }
}

inline void write_csv_rows(std::ostream& os, const RegretReport& rep) {
  for (const auto& e : rep.entries) {
    os << e.entity << ',' << format_double(e.size) << ',' << format_double(e.regret)
       << ",,\n";
  }
}

inline void write_csv_rows(std::ostream& os, const TheoremReport& rep) {
  for (const auto& c : rep.checks) {
    os << theorem_name(rep.id) << ':' << c.entity << ',' << format_double(c.size) << ',';
    if (!c.vacuous) {
      os << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
         << format_double(c.slack);
    } else {
      os << ",,";
    }
    os << "\n";
  }
}

template <typename Report>
void write_report_csv(const std::string& path, const Report& rep) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_csv_header(os);
  write_csv_rows(os, rep);
}

}  // namespace ocp
