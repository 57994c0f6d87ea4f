// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#include "pqc/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pqc {

std::optional<Clause> Clause::make(std::span<const Lit> lits) {
  std::vector<Lit> sorted(lits.begin(), lits.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Lit> out;
  out.reserve(sorted.size());
  for (Lit l : sorted) {
    if (!out.empty() && out.back().var() == l.var()) {
      if (out.back() == l) continue;        // duplicate, merge
      return std::nullopt;                  // complementary pair: tautology
    }
    out.push_back(l);
  }
  Clause c;
  c.lits_ = std::move(out);
  return c;
}

std::optional<Clause> Clause::make(std::initializer_list<Lit> lits) {
  std::vector<Lit> v(lits);
  return make(std::span<const Lit>(v));
}

std::optional<Clause> Clause::make(std::initializer_list<std::int32_t> codes) {
  std::vector<std::int32_t> v(codes);
  return make_from_codes(v);
}

std::optional<Clause> Clause::make_from_codes(std::span<const std::int32_t> codes) {
  std::vector<Lit> lits;
  lits.reserve(codes.size());
  for (std::int32_t c : codes) lits.push_back(Lit::from_code(c));
  return make(lits);
}

bool Clause::contains(Lit l) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), l);
  return it != lits_.end() && *it == l;
}

std::optional<bool> Clause::polarity_of(Var v) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), Lit(v, false));
  if (it != lits_.end() && it->var() == v) return it->positive();
  return std::nullopt;
}

bool Clause::subsumes(const Clause& other) const {
  if (size() > other.size()) return false;
  return std::includes(other.lits_.begin(), other.lits_.end(), lits_.begin(), lits_.end());
}

std::string Clause::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < lits_.size(); ++i) {
    if (i) os << ' ';
    os << lits_[i].code();
  }
  os << ')';
  return os.str();
}

bool operator<(const Clause& a, const Clause& b) {
  return std::lexicographical_compare(a.lits_.begin(), a.lits_.end(), b.lits_.begin(),
                                      b.lits_.end());
}

Assignment::Assignment(std::initializer_list<std::pair<Var, bool>> init) {
  for (auto& [v, b] : init) set(v, b);
}

void Assignment::set(Var v, bool value) {
  if (v < 1) throw usage_error("assignment variable must be >= 1");
  vals_[v] = value;
}

std::optional<bool> Assignment::value(Var v) const {
  auto it = vals_.find(v);
  if (it == vals_.end()) return std::nullopt;
  return it->second;
}

bool Assignment::consistent_with(const Assignment& other) const {
  const Assignment* small = this;
  const Assignment* big = &other;
  if (small->size() > big->size()) std::swap(small, big);
  for (auto& [v, b] : *small) {
    auto o = big->value(v);
    if (o.has_value() && *o != b) return false;
  }
  return true;
}

bool Assignment::contains(const Assignment& sub) const {
  for (auto& [v, b] : sub) {
    auto o = value(v);
    if (!o.has_value() || *o != b) return false;
  }
  return true;
}

Assignment Assignment::merged_with(const Assignment& other) const {
  if (!consistent_with(other)) throw usage_error("merging inconsistent assignments");
  Assignment out = *this;
  for (auto& [v, b] : other) out.set(v, b);
  return out;
}

std::string Assignment::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto& [v, b] : vals_) {
    if (!first) os << ' ';
    first = false;
    os << v << '=' << (b ? 1 : 0);
  }
  os << '}';
  return os.str();
}

void CnfFormula::add_clause(Clause c) {
  if (c.max_var() > num_vars_) num_vars_ = c.max_var();
  clauses_.push_back(std::move(c));
}

Clause CnfFormula::take_clause(std::size_t idx) {
  if (idx >= clauses_.size()) throw usage_error("clause index out of range");
  Clause c = std::move(clauses_[idx]);
  clauses_.erase(clauses_.begin() + static_cast<std::ptrdiff_t>(idx));
  return c;
}

void CnfFormula::set_num_vars(Var n) {
  if (n < 0) throw usage_error("negative variable bound");
  for (const Clause& c : clauses_)
    if (c.max_var() > n) throw usage_error("variable bound below occurring variable");
  num_vars_ = n;
}

bool CnfFormula::has_empty_clause() const {
  for (const Clause& c : clauses_)
    if (c.empty()) return true;
  return false;
}

std::set<Var> CnfFormula::vars() const {
  std::set<Var> out;
  for (const Clause& c : clauses_)
    for (Lit l : c.lits()) out.insert(l.var());
  return out;
}

void CnfFormula::append(const CnfFormula& other) {
  for (const Clause& c : other.clauses()) add_clause(c);
  if (other.num_vars() > num_vars_) num_vars_ = other.num_vars();
}

bool CnfFormula::contains_clause(const Clause& c) const {
  return std::find(clauses_.begin(), clauses_.end(), c) != clauses_.end();
}

std::optional<Clause> resolve(const Clause& c1, const Clause& c2, Var v) {
  auto p1 = c1.polarity_of(v);
  auto p2 = c2.polarity_of(v);
  if (!p1.has_value() || !p2.has_value())
    throw usage_error("resolution pivot absent from a clause");
  if (*p1 == *p2) throw usage_error("resolution pivot has the same polarity in both clauses");
  std::vector<Lit> lits;
  lits.reserve(c1.size() + c2.size());
  for (Lit l : c1.lits())
    if (l.var() != v) lits.push_back(l);
  for (Lit l : c2.lits())
    if (l.var() != v) lits.push_back(l);
  return Clause::make(lits);
}

std::optional<bool> clause_status(const Clause& c, const Assignment& a) {
  bool all_false = true;
  for (Lit l : c.lits()) {
    auto v = a.value(l.var());
    if (!v.has_value()) {
      all_false = false;
      continue;
    }
    if (*v == l.positive()) return true;
  }
  if (all_false) return false;
  return std::nullopt;
}

std::optional<Clause> cofactor(const Clause& c, const Assignment& a) {
  std::vector<Lit> kept;
  for (Lit l : c.lits()) {
    auto v = a.value(l.var());
    if (!v.has_value()) {
      kept.push_back(l);
      continue;
    }
    if (*v == l.positive()) return std::nullopt;  // satisfied
  }
  auto out = Clause::make(kept);
  return *out;  // subset of a clause, cannot be tautological
}

CnfFormula cofactor(const CnfFormula& f, const Assignment& a) {
  CnfFormula out;
  out.set_num_vars(f.num_vars());
  for (const Clause& c : f.clauses()) {
    auto r = cofactor(c, a);
    if (r.has_value()) out.add_clause(*r);
  }
  return out;
}

Clause rename(const Clause& c, const std::map<Var, Var>& mapping) {
  std::vector<Lit> lits;
  lits.reserve(c.size());
  for (Lit l : c.lits()) {
    auto it = mapping.find(l.var());
    Var nv = it == mapping.end() ? l.var() : it->second;
    lits.emplace_back(nv, l.positive());
  }
  auto out = Clause::make(lits);
  if (!out.has_value()) throw usage_error("renaming is not injective over occurring variables");
  if (out->size() != c.size())
    throw usage_error("renaming is not injective over occurring variables");
  return *out;
}

CnfFormula rename(const CnfFormula& f, const std::map<Var, Var>& mapping) {
  // Injectivity over *all* occurring vars, including across clauses.
  std::map<Var, Var> seen;
  for (Var v : f.vars()) {
    auto it = mapping.find(v);
    Var nv = it == mapping.end() ? v : it->second;
    for (auto& [ov, tv] : seen)
      if (tv == nv && ov != v)
        throw usage_error("renaming is not injective over occurring variables");
    seen[v] = nv;
  }
  CnfFormula out;
  for (const Clause& c : f.clauses()) out.add_clause(rename(c, mapping));
  if (out.num_vars() < f.num_vars()) out.set_num_vars(f.num_vars());
  return out;
}

Clause rename_shift(const Clause& c, std::int32_t offset) {
  std::vector<Lit> lits;
  lits.reserve(c.size());
  for (Lit l : c.lits()) {
    Var nv = l.var() + offset;
    if (nv < 1) throw usage_error("shift renames a variable below 1");
    lits.emplace_back(nv, l.positive());
  }
  return *Clause::make(lits);
}

CnfFormula rename_shift(const CnfFormula& f, std::int32_t offset) {
  CnfFormula out;
  for (const Clause& c : f.clauses()) out.add_clause(rename_shift(c, offset));
  Var bound = f.num_vars() + offset;
  if (bound > out.num_vars()) out.set_num_vars(bound);
  return out;
}

bool evaluate(const CnfFormula& f, const Assignment& a) {
  for (const Clause& c : f.clauses()) {
    bool sat = false;
    for (Lit l : c.lits()) {
      auto v = a.value(l.var());
      if (!v.has_value()) throw usage_error("evaluate requires a total assignment over formula vars");
      if (*v == l.positive()) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

Clause longest_falsified_clause(const Assignment& s) {
  std::vector<Lit> lits;
  for (auto& [v, b] : s) lits.emplace_back(v, !b);
  return *Clause::make(lits);
}

namespace {

struct Token {
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize_skipping_comments(std::string_view text, char comment_char) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    int col = 1;
    std::size_t eol = text.find('\n', i);
    std::string_view ln = text.substr(i, eol == std::string_view::npos ? text.size() - i : eol - i);
    std::size_t j = 0;
    while (j < ln.size() && std::isspace(static_cast<unsigned char>(ln[j]))) ++j;
    if (j < ln.size() && ln[j] != comment_char) {
      while (j < ln.size()) {
        while (j < ln.size() && std::isspace(static_cast<unsigned char>(ln[j]))) ++j;
        if (j >= ln.size()) break;
        std::size_t start = j;
        while (j < ln.size() && !std::isspace(static_cast<unsigned char>(ln[j]))) ++j;
        col = static_cast<int>(start) + 1;
        out.push_back({std::string(ln.substr(start, j - start)), line, col});
      }
    }
    if (eol == std::string_view::npos) break;
    i = eol + 1;
    ++line;
  }
  return out;
}

std::int64_t parse_int(const Token& t) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(t.text, &pos);
    if (pos != t.text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected integer, got '" + t.text + "'", t.line, t.col);
  }
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  auto toks = tokenize_skipping_comments(text, 'c');
  std::size_t i = 0;
  auto need = [&](const char* what) -> const Token& {
    if (i >= toks.size()) throw parse_error(std::string("unexpected end of input, expected ") + what,
                                            toks.empty() ? 1 : toks.back().line, 1);
    return toks[i];
  };
  if (need("'p'").text != "p") throw parse_error("expected 'p' header", toks[i].line, toks[i].col);
  ++i;
  if (need("'cnf'").text != "cnf") throw parse_error("expected 'cnf' header", toks[i].line, toks[i].col);
  ++i;
  std::int64_t nvars = parse_int(need("variable count"));
  ++i;
  std::int64_t nclauses = parse_int(need("clause count"));
  ++i;
  if (nvars < 0 || nclauses < 0) throw parse_error("negative header counts", toks[0].line, 1);

  CnfFormula f;
  f.set_num_vars(static_cast<Var>(nvars));
  std::vector<std::int32_t> cur;
  while (i < toks.size()) {
    std::int64_t v = parse_int(toks[i]);
    if (v == 0) {
      auto c = Clause::make_from_codes(cur);
      if (!c.has_value())
        throw parse_error("tautological clause", toks[i].line, toks[i].col);
      if (c->max_var() > nvars)
        throw parse_error("literal exceeds declared variable count", toks[i].line, toks[i].col);
      f.add_clause(*c);
      cur.clear();
    } else {
      if (v > nvars || v < -nvars)
        throw parse_error("literal exceeds declared variable count", toks[i].line, toks[i].col);
      cur.push_back(static_cast<std::int32_t>(v));
    }
    ++i;
  }
  if (!cur.empty())
    throw parse_error("unterminated clause", toks.back().line, toks.back().col);
  if (static_cast<std::int64_t>(f.size()) != nclauses)
    throw parse_error("clause count mismatch with header", toks.empty() ? 1 : toks.back().line, 1);
  return f;
}

std::string write_dimacs(const CnfFormula& f) {
  std::ostringstream os;
  os << "p cnf " << f.num_vars() << ' ' << f.size() << '\n';
  for (const Clause& c : f.clauses()) {
    for (Lit l : c.lits()) os << l.code() << ' ';
    os << "0\n";
  }
  return os.str();
}

}  // namespace pqc
