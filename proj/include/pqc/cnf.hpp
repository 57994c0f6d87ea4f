// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqc/errors.hpp"

namespace pqc {

// Variables are 1-based global integers.  Time frames are realized purely by
// renaming with fixed offsets, so variable identity carries no structure.
using Var = std::int32_t;

// A literal in signed integer encoding: +v or -v, never 0.
class Lit {
public:
  Lit(Var v, bool positive) : code_(positive ? v : -v) {
    if (v < 1) throw usage_error("literal variable must be >= 1");
  }
  static Lit from_code(std::int32_t code) {
    if (code == 0) throw usage_error("literal code must be nonzero");
    return Lit(code < 0 ? -code : code, code > 0);
  }

  Var var() const { return code_ < 0 ? -code_ : code_; }
  bool positive() const { return code_ > 0; }
  std::int32_t code() const { return code_; }
  Lit negated() const { return from_code(-code_); }

  friend bool operator==(Lit a, Lit b) { return a.code_ == b.code_; }
  friend bool operator!=(Lit a, Lit b) { return a.code_ != b.code_; }
  // Canonical order: by variable, negative literal first within a variable.
  friend bool operator<(Lit a, Lit b) {
    if (a.var() != b.var()) return a.var() < b.var();
    return a.code_ < b.code_;
  }

private:
  std::int32_t code_;
};

// A clause is a set of literals, at most one per variable, kept sorted by
// variable id.  Tautologies are unrepresentable: construction of a clause
// containing both v and -v yields nullopt.  Duplicate literals are merged.
class Clause {
public:
  Clause() = default;  // the empty clause (constant false)

  static std::optional<Clause> make(std::span<const Lit> lits);
  static std::optional<Clause> make(std::initializer_list<Lit> lits);
  static std::optional<Clause> make(std::initializer_list<std::int32_t> codes);
  static std::optional<Clause> make_from_codes(std::span<const std::int32_t> codes);

  const std::vector<Lit>& lits() const { return lits_; }
  bool empty() const { return lits_.empty(); }
  std::size_t size() const { return lits_.size(); }

  bool contains(Lit l) const;
  bool contains_var(Var v) const { return polarity_of(v).has_value(); }
  // true = v occurs positively, false = negatively, nullopt = absent.
  std::optional<bool> polarity_of(Var v) const;
  Var max_var() const { return lits_.empty() ? 0 : lits_.back().var(); }

  // Subset-of-literals test (reflexive).
  bool subsumes(const Clause& other) const;

  std::string str() const;  // e.g. "(1 -3 4)"

  friend bool operator==(const Clause& a, const Clause& b) { return a.lits_ == b.lits_; }
  friend bool operator!=(const Clause& a, const Clause& b) { return !(a == b); }
  friend bool operator<(const Clause& a, const Clause& b);

private:
  std::vector<Lit> lits_;
};

// A (possibly partial) assignment of truth values to variables.  Used both
// for subspaces and for total states / trace points.
class Assignment {
public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<Var, bool>> init);

  void set(Var v, bool value);
  void unset(Var v) { vals_.erase(v); }
  std::optional<bool> value(Var v) const;
  bool defines(Var v) const { return vals_.count(v) != 0; }
  std::size_t size() const { return vals_.size(); }
  bool empty() const { return vals_.empty(); }

  auto begin() const { return vals_.begin(); }
  auto end() const { return vals_.end(); }

  // No variable assigned opposite values in the two assignments.
  bool consistent_with(const Assignment& other) const;
  // Every binding of `sub` present with the same value here.
  bool contains(const Assignment& sub) const;
  // Union; conflicting bindings raise usage_error.
  Assignment merged_with(const Assignment& other) const;

  std::string str() const;  // e.g. "{1=0 4=1}"

  friend bool operator==(const Assignment& a, const Assignment& b) { return a.vals_ == b.vals_; }

private:
  std::map<Var, bool> vals_;
};

// A CNF formula: a sequence of clauses plus a variable bound.  No clauses
// means constant true; containing the empty clause means constant false.
class CnfFormula {
public:
  CnfFormula() = default;
  explicit CnfFormula(Var num_vars) : num_vars_(num_vars) {}

  void add_clause(Clause c);
  // Removes and returns the clause at `idx`, preserving the order of the rest.
  Clause take_clause(std::size_t idx);

  void set_num_vars(Var n);
  Var num_vars() const { return num_vars_; }

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }  // empty formula == constant true
  bool has_empty_clause() const;

  std::set<Var> vars() const;  // variables actually occurring

  // Conjunction: appends the other formula's clauses.
  void append(const CnfFormula& other);

  bool contains_clause(const Clause& c) const;

  friend bool operator==(const CnfFormula& a, const CnfFormula& b) {
    return a.clauses_ == b.clauses_;
  }

private:
  std::vector<Clause> clauses_;
  Var num_vars_ = 0;
};

// --- core operations ---------------------------------------------------

// Resolvent of c1 and c2 on v; nullopt if it would be a tautology.
// v must occur positively in one clause and negatively in the other.
std::optional<Clause> resolve(const Clause& c1, const Clause& c2, Var v);

// Clause status under a partial assignment: true = satisfied,
// false = falsified, nullopt = undetermined.
std::optional<bool> clause_status(const Clause& c, const Assignment& a);

// Restriction of a clause: nullopt if satisfied, otherwise the clause with
// falsified literals removed.
std::optional<Clause> cofactor(const Clause& c, const Assignment& a);

// Restriction of a formula: satisfied clauses dropped, falsified literals
// removed.  May contain the empty clause afterwards.
CnfFormula cofactor(const CnfFormula& f, const Assignment& a);

// Variable renaming; `mapping` must be injective over the occurring vars.
// Variables absent from the mapping are left unchanged.
CnfFormula rename(const CnfFormula& f, const std::map<Var, Var>& mapping);
Clause rename(const Clause& c, const std::map<Var, Var>& mapping);

// Uniform renaming v -> v + offset (offset may be negative; results must
// stay >= 1).
CnfFormula rename_shift(const CnfFormula& f, std::int32_t offset);
Clause rename_shift(const Clause& c, std::int32_t offset);

// Total evaluation; every variable occurring in f must be assigned.
bool evaluate(const CnfFormula& f, const Assignment& a);

// The longest clause falsified by a total assignment s: one literal per
// assigned variable, opposite to its value.
Clause longest_falsified_clause(const Assignment& s);

// --- DIMACS ------------------------------------------------------------

CnfFormula parse_dimacs(std::string_view text);
std::string write_dimacs(const CnfFormula& f);

}  // namespace pqc
