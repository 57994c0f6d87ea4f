// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqc/cnf.hpp"

namespace pqc {

struct SatStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;

  void accumulate(const SatStats& o) {
    decisions += o.decisions;
    conflicts += o.conflicts;
    propagations += o.propagations;
    restarts += o.restarts;
  }
};

struct SatConfig {
  std::uint64_t seed = 0;
  // Conflicts allowed per top-level call; exceeding it yields Kind::timeout.
  std::int64_t conflict_budget = 4'000'000;
  // Drop-one retests allowed when shrinking an unsat core (0 disables).
  int core_shrink_retries = 64;
};

struct SatResult {
  enum class Kind { sat, unsat, timeout };
  Kind kind = Kind::unsat;
  Assignment model;        // total over 1..num_vars when sat
  std::vector<Lit> core;   // subset of the assumptions when unsat
  SatStats stats;

  bool is_sat() const { return kind == Kind::sat; }
  bool is_unsat() const { return kind == Kind::unsat; }
  bool is_timeout() const { return kind == Kind::timeout; }
};

// Complete CDCL decision procedure.  Deterministic for a fixed seed.
SatResult solve(const CnfFormula& f, const SatConfig& cfg = {});

// Satisfiability of f under unit assumptions.  On unsat, `core` is a subset
// of the assumptions whose conjunction with f is unsatisfiable; the negation
// of the core is a clause implied by f.
SatResult solve_assuming(const CnfFormula& f, std::span<const Lit> assumptions,
                         const SatConfig& cfg = {});

// true iff f implies c, i.e. f /\ ~c is unsatisfiable.
// Throws timeout_error if the budget is exhausted.
bool implies(const CnfFormula& f, const Clause& c, const SatConfig& cfg = {});

}  // namespace pqc
