// Copyright 2026 The fogweave Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// \file lp_format.hpp
///
/// CPLEX LP text for MilpModel, a reader for the subset the writer emits,
/// and a CSV manifest of the variables.
///
/// The writer lists every objective coefficient, zeros included, so the
/// order of first appearance in the objective is the variable index order
/// and parsing recovers the model exactly. Numbers use the shortest
/// round-trip decimal form.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "fogweave/milp.hpp"

namespace fogweave {

class LpParseError : public std::runtime_error {
 public:
  LpParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string format_coef(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr std::size_t kTermsPerLine = 6;

inline void write_terms(std::ostream& os, const std::vector<Term>& terms,
                        const std::vector<Variable>& vars) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0 && k % kTermsPerLine == 0) os << "\n  ";
    const double c = terms[k].coef;
    const bool neg = std::signbit(c);
    if (k == 0) {
      os << (neg ? " - " : " ");
    } else {
      os << (neg ? " - " : " + ");
    }
    os << format_coef(std::abs(c)) << ' ' << vars[terms[k].var].name;
  }
}

}  // namespace detail

inline void write_lp(std::ostream& os, const MilpModel& model) {
  const auto& vars = model.variables;
  os << "\\ fogweave placement model: " << vars.size() << " variables, " << model.rows.size()
     << " rows\n";
  os << "Minimize\n obj:";
  std::vector<Term> obj;
  obj.reserve(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) obj.push_back({j, model.objective[j]});
  detail::write_terms(os, obj, vars);
  os << "\nSubject To\n";
  for (const auto& row : model.rows) {
    os << ' ' << row.name << ':';
    detail::write_terms(os, row.terms, vars);
    os << ' ' << to_string(row.sense) << ' ' << detail::format_coef(row.rhs) << '\n';
  }
  bool any_continuous = false;
  for (const auto& v : vars) any_continuous = any_continuous || !v.binary;
  if (any_continuous) {
    os << "Bounds\n";
    for (const auto& v : vars) {
      if (!v.binary) os << ' ' << v.name << " >= 0\n";
    }
  }
  os << "Binaries\n";
  for (const auto& v : vars) {
    if (v.binary) os << ' ' << v.name << '\n';
  }
  os << "End\n";
}

inline std::string to_lp(const MilpModel& model) {
  std::ostringstream os;
  write_lp(os, model);
  return os.str();
}

namespace detail {

inline VarFamily family_of(const std::string& name) {
  const std::string head = name.substr(0, name.find('.'));
  for (auto f : {VarFamily::deploy, VarFamily::assign, VarFamily::edge, VarFamily::device,
                 VarFamily::pair, VarFamily::par_max}) {
    if (head == to_string(f)) return f;
  }
  return VarFamily::deploy;
}

class LpReader {
 public:
  explicit LpReader(std::istream& is) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
      ++n;
      if (const auto c = line.find('\\'); c != std::string::npos) line.erase(c);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, n});
    }
  }

  MilpModel read() {
    MilpModel m;
    expect("Minimize");
    expect("obj:");
    for (const auto& t : terms(m, true)) {
      if (t.var != m.objective.size()) fail("objective must list variables in index order");
      m.objective.push_back(t.coef);
    }
    expect("Subject");
    expect("To");
    while (!at("Bounds") && !at("Binaries") && !at("End")) {
      Row row;
      std::string label = next().text;
      if (label.empty() || label.back() != ':') fail("expected a row label, got '" + label + "'");
      label.pop_back();
      row.name = label;
      row.terms = terms(m, false);
      const std::string sense = next().text;
      if (sense == "<=") {
        row.sense = Sense::le;
      } else if (sense == ">=") {
        row.sense = Sense::ge;
      } else if (sense == "=") {
        row.sense = Sense::eq;
      } else {
        fail("expected <=, >= or =, got '" + sense + "'");
      }
      row.rhs = number(next().text);
      m.rows.push_back(std::move(row));
    }
    for (auto& v : m.variables) v.binary = false;
    if (at("Bounds")) {
      next();
      while (!at("Binaries") && !at("End")) {
        const std::string name = next().text;
        if (next().text != ">=" || number(next().text) != 0.0) fail("only 'name >= 0' bounds are supported");
        index(m, name, false);
      }
    }
    if (at("Binaries")) {
      next();
      while (!at("End")) m.variables[index(m, next().text, false)].binary = true;
    }
    expect("End");
    return m;
  }

 private:
  struct Token {
    std::string text;
    std::size_t line;
  };

  [[noreturn]] void fail(const std::string& what) const {
    const std::size_t line = pos_ < tokens_.size() ? tokens_[pos_].line
                             : tokens_.empty()     ? 0
                                                   : tokens_.back().line;
    throw LpParseError(line, what);
  }

  bool at(std::string_view s) const { return pos_ < tokens_.size() && tokens_[pos_].text == s; }

  const Token& next() {
    if (pos_ >= tokens_.size()) fail("unexpected end of input");
    return tokens_[pos_++];
  }

  void expect(std::string_view s) {
    if (!at(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  double number(const std::string& s) const {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("bad number '" + s + "'");
    return v;
  }

  std::size_t index(MilpModel& m, const std::string& name, bool create) {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    if (!create) fail("unknown variable '" + name + "'");
    ids_.emplace(name, m.variables.size());
    m.variables.push_back({name, true, family_of(name)});
    return m.variables.size() - 1;
  }

  static bool is_sense(const std::string& s) { return s == "<=" || s == ">=" || s == "="; }

  std::vector<Term> terms(MilpModel& m, bool create) {
    std::vector<Term> out;
    // An empty expression is written as a lone 0.
    if (at("0") && pos_ + 1 < tokens_.size() &&
        (is_sense(tokens_[pos_ + 1].text) || tokens_[pos_ + 1].text == "Subject")) {
      ++pos_;
      return out;
    }
    bool first = true;
    while (pos_ < tokens_.size()) {
      const std::string& t = tokens_[pos_].text;
      if (is_sense(t) || t == "Subject") break;
      double sign = 1.0;
      if (t == "+" || t == "-") {
        sign = t == "-" ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        fail("expected '+' or '-', got '" + t + "'");
      }
      const double coef = number(next().text);
      const std::string name = next().text;
      out.push_back({index(m, name, create), sign * coef});
      first = false;
    }
    return out;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, std::size_t> ids_;
};

}  // namespace detail

inline MilpModel read_lp(std::istream& is) { return detail::LpReader(is).read(); }

inline MilpModel parse_lp(const std::string& text) {
  std::istringstream is(text);
  return read_lp(is);
}

/// index,name,family,kind,objective
inline void write_manifest_csv(std::ostream& os, const MilpModel& model) {
  os << "index,name,family,kind,objective\n";
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto& v = model.variables[j];
    os << j << ',' << v.name << ',' << to_string(v.family) << ',' << (v.binary ? "binary" : "continuous")
       << ',' << detail::format_coef(model.objective[j]) << '\n';
  }
}

}  // namespace fogweave
