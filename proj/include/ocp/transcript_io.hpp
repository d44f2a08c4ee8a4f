#pragma once

// Transcript CSV format: header `t,tau,tau_hat,g_1,...,g_k`, one row per
// round, '.' decimal separator, floats at 17 significant digits so emitted
// files re-ingest bit-identically. The tau_hat column may be absent, in
// which case the file is a score stream still awaiting predictions.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ocp/core.hpp"

namespace ocp {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_transcript_csv(std::ostream& os, const Transcript& tr) {
  os << "t,tau,tau_hat";
  for (std::size_t i = 1; i <= tr.k(); ++i) os << ",g_" << i;
  os << "\n";
  for (const Round& r : tr) {
    os << r.t << ',' << format_double(r.tau) << ',' << format_double(r.tau_hat);
    for (double w : r.g) os << ',' << format_double(w);
    os << "\n";
  }
}

inline void write_transcript_csv(const std::string& path, const Transcript& tr) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_transcript_csv(os, tr);
}

// Parsed CSV contents; rounds carry tau_hat = 0 when the column is absent
// and has_predictions is false.
struct ParsedTranscript {
  std::size_t k = 0;
  bool has_predictions = false;
  std::vector<Round> rounds;

  Transcript to_transcript(double q) const {
    if (!has_predictions) {
      throw DataError("transcript CSV has no tau_hat column; it is a score "
                      "stream, not an auditable transcript");
    }
    Transcript tr(k, q);
    for (const Round& r : rounds) tr.append(r.g, r.tau, r.tau_hat);
    return tr;
  }
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view cell, std::size_t line_no) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric cell '" +
                    std::string(cell) + "'");
  }
  return value;
}

}  // namespace detail

inline ParsedTranscript read_transcript_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = detail::split_csv(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "tau") {
    throw DataError("line 1: header must start with 't,tau'");
  }
  std::size_t col = 2;
  bool has_tau_hat = false;
  if (col < header.size() && header[col] == "tau_hat") {
    has_tau_hat = true;
    ++col;
  }
  const std::size_t first_group_col = col;
  std::size_t k = 0;
  for (; col < header.size(); ++col) {
    const std::string expected = "g_" + std::to_string(col - first_group_col + 1);
    if (header[col] != expected) {
      throw DataError("line 1: expected column '" + expected + "', found '" +
                      std::string(header[col]) + "'");
    }
    ++k;
  }
  if (k == 0) throw DataError("line 1: no group columns g_1,...,g_k");

  ParsedTranscript out;
  out.k = k;
  out.has_predictions = has_tau_hat;

  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    Round r;
    r.t = static_cast<long long>(detail::parse_double(cells[0], line_no));
    r.tau = detail::parse_double(cells[1], line_no);
    if (!(r.tau >= 0.0 && r.tau <= 1.0)) {
      throw DataError("line " + std::to_string(line_no) + ": tau " +
                      format_double(r.tau) + " outside [0,1]");
    }
    if (has_tau_hat) r.tau_hat = detail::parse_double(cells[2], line_no);
    r.g.reserve(k);
    for (std::size_t i = first_group_col; i < cells.size(); ++i) {
      const double w = detail::parse_double(cells[i], line_no);
      if (!(w >= 0.0 && w <= 1.0)) {
        throw DataError("line " + std::to_string(line_no) + ": group weight " +
                        format_double(w) + " outside [0,1]");
      }
      r.g.push_back(w);
    }
    const long long expected_t = static_cast<long long>(out.rounds.size()) + 1;
    if (r.t != expected_t) {
      throw DataError("line " + std::to_string(line_no) + ": round index " +
                      std::to_string(r.t) + ", expected " + std::to_string(expected_t));
    }
    out.rounds.push_back(std::move(r));
  }
  return out;
}

inline ParsedTranscript read_transcript_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path + "' for reading");
  return read_transcript_csv(is);
}

}  // namespace ocp
