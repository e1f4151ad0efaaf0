#pragma once

// Text formats: structure files, contact-map files, Ising export, and the
// JSON / CSV reports written by the command-line tool.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hpdesign/anneal.hpp"
#include "hpdesign/design.hpp"
#include "hpdesign/enumeration.hpp"
#include "hpdesign/error.hpp"
#include "hpdesign/ising.hpp"
#include "hpdesign/lattice.hpp"
#include "hpdesign/noise.hpp"

namespace hpdesign {

namespace detail {

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  return in;
}

}  // namespace detail

/// Round-trip decimal text for a double (shortest representation).
inline std::string format_double(double v) {
  // Shortest form that parses back to the same value.
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct StructureFile {
  LatticeStructure structure;
  std::optional<HpSequence> sequence;
};

/// Line 1: move-string (may be empty for a single bead, written as "-").
/// Optional line 2: H/P sequence.
inline StructureFile read_structure(std::istream& in) {
  auto lines = detail::content_lines(in);
  if (lines.empty()) throw Error(Errc::ParseError, "structure file is empty");
  StructureFile f;
  f.structure = LatticeStructure::parse(lines[0] == "-" ? std::string() : lines[0]);
  if (lines.size() > 1) {
    f.sequence = HpSequence::parse(lines[1]);
    if (f.sequence->size() != static_cast<int>(f.structure.size())) {
      throw Error(Errc::LengthMismatch, "sequence and structure lengths differ");
    }
  }
  return f;
}

inline StructureFile read_structure_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_structure(in);
}

/// Line 1: n. Following lines: "i j" (0-based).
inline ContactMap read_contact_map(std::istream& in) {
  auto lines = detail::content_lines(in);
  if (lines.empty()) throw Error(Errc::ParseError, "contact-map file is empty");
  int n = 0;
  {
    std::istringstream head(lines[0]);
    if (!(head >> n)) throw Error(Errc::ParseError, "first line must be the bead count");
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::istringstream row(lines[k]);
    int i = 0, j = 0;
    if (!(row >> i >> j)) throw Error(Errc::ParseError, "bad contact line: " + lines[k], static_cast<std::int64_t>(k));
    pairs.emplace_back(i, j);
  }
  return ContactMap(n, std::move(pairs));
}

inline ContactMap read_contact_map_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_contact_map(in);
}

/// "h i v" for every field, "J i j v" for every nonzero coupler, "offset v".
/// Values are exact (decimal where possible, p/q otherwise).
inline void write_ising(std::ostream& out, const IsingProblem& p) {
  for (int i = 0; i < p.n; ++i) out << "h " << i << ' ' << to_string(p.h[static_cast<std::size_t>(i)]) << '\n';
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      const auto& v = p.coupler(i, j);
      if (v != Rational(0)) out << "J " << i << ' ' << j << ' ' << to_string(v) << '\n';
    }
  }
  out << "offset " << to_string(p.offset) << '\n';
}

inline IsingProblem read_ising(std::istream& in) {
  struct Term {
    int i, j;
    Rational v;
  };
  std::vector<Term> fields, couplers;
  Rational offset{0};
  int n = 0;
  auto lines = detail::content_lines(in);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    std::istringstream row(lines[k]);
    std::string tag, value;
    row >> tag;
    if (tag == "h") {
      int i = -1;
      if (!(row >> i >> value) || i < 0) throw Error(Errc::ParseError, "bad field line: " + lines[k], static_cast<std::int64_t>(k));
      fields.push_back({i, i, parse_rational(value)});
      n = std::max(n, i + 1);
    } else if (tag == "J") {
      int i = -1, j = -1;
      if (!(row >> i >> j >> value) || i < 0 || j < 0 || i == j) {
        throw Error(Errc::ParseError, "bad coupler line: " + lines[k], static_cast<std::int64_t>(k));
      }
      couplers.push_back({i, j, parse_rational(value)});
      n = std::max({n, i + 1, j + 1});
    } else if (tag == "offset") {
      if (!(row >> value)) throw Error(Errc::ParseError, "bad offset line", static_cast<std::int64_t>(k));
      offset = parse_rational(value);
    } else {
      throw Error(Errc::ParseError, "unknown line: " + lines[k], static_cast<std::int64_t>(k));
    }
  }
  IsingProblem p(n);
  for (const auto& t : fields) p.h[static_cast<std::size_t>(t.i)] = t.v;
  for (const auto& t : couplers) p.coupler(t.i, t.j) = t.v;
  p.offset = offset;
  return p;
}

inline IsingProblem read_ising_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_ising(in);
}

inline nlohmann::json to_json(const FoldResult& f) {
  nlohmann::json moves = nlohmann::json::array();
  for (const auto& s : f.ground_states) moves.push_back(s.moves());
  return {{"min_ehp", f.min_ehp}, {"unique", f.unique}, {"ground_state_moves", moves}};
}

inline nlohmann::json to_json(const DesignReport& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    nlohmann::json entry = {{"sequence", c.sequence.str()}, {"ehp", c.ehp}, {"verdict", verdict_name(c.verdict)}};
    if (c.evidence) entry["fold"] = to_json(*c.evidence);
    cands.push_back(std::move(entry));
  }
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& s : r.flagged) flagged.push_back(s.str());
  return {{"target", r.target},
          {"n_h", r.n_h},
          {"lambda", to_string(r.lambda)},
          {"solver", solver_name(r.solver)},
          {"oracle_min_ehp", r.oracle_min_ehp},
          {"oracle_degeneracy", r.oracle_degeneracy},
          {"candidates", cands},
          {"flagged", flagged}};
}

inline void write_databank_csv(std::ostream& out, const std::vector<DesignabilityRecord>& records) {
  out << "canonical_moves,designability_count\n";
  for (const auto& r : records) out << r.moves << ',' << r.count << '\n';
}

struct NoiseRow {
  std::string system_id;
  int n = 0;
  int n_h = 0;
  Rational lambda{0};
  NoiseEnsembleResult result;
};

inline void write_noise_csv(std::ostream& out, const std::vector<NoiseRow>& rows) {
  out << "system_id,n,n_h,lambda,x,k,j_cs,samples,successes,p_g,ci95\n";
  for (const auto& r : rows) {
    out << r.system_id << ',' << r.n << ',' << r.n_h << ',' << to_string(r.lambda) << ','
        << format_double(r.result.spec.x) << ',' << r.result.spec.k << ',' << format_double(r.result.spec.j_cs) << ','
        << r.result.samples << ',' << r.result.successes << ',' << format_double(r.result.p_g) << ','
        << format_double(r.result.ci95()) << '\n';
  }
}

inline void write_trace_header(std::ostream& out) { out << "t,norm,P_g,subspace_leak\n"; }

inline void write_trace_row(std::ostream& out, const TracePoint& p) {
  out << format_double(p.t) << ',' << format_double(p.norm) << ',' << format_double(p.p_g) << ','
      << format_double(p.subspace_leak) << '\n';
}

}  // namespace hpdesign
