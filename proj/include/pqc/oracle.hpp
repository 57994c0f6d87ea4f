// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "pqc/transition.hpp"

namespace pqc {

// Exhaustive reachability result.  States are bit-packed: variable i occupies
// bit i-1.  Level i holds the states first reachable in exactly i transitions.
struct ReachReport {
  std::vector<std::vector<std::uint32_t>> levels;
  int diameter = 0;  // largest non-empty level index

  std::string str() const;  // "level <i>: <count>" lines
};

// Breadth-first exploration over states x input valuations.  Complete and
// exact; requires k + m <= 24.
ReachReport reach_bfs(const TransitionSystem& ts);

// Reachability diameter of a stuttered system (levels are cumulative-monotone
// there, so this equals the BFS diameter).
int exact_diameter(const TransitionSystem& ts);

// Ground-truth verdict: a shortest counterexample trace when a bad state is
// reachable, Holds with the exact diameter otherwise.  Deterministic
// (lexicographic tie-break on state bit-strings).
Verdict check_property_bf(const TransitionSystem& ts);

// Truth-table check of the PQE contract, pointwise over assignments to the
// free variables: exists W [a AND b] == a_star AND exists W [b].
bool pqe_check(const CnfFormula& a, const CnfFormula& b, const std::set<Var>& w,
               const CnfFormula& a_star);

// Reference quantifier elimination by free-point enumeration: the result is
// equivalent to exists W [f].
CnfFormula qe_enum(const CnfFormula& f, const std::set<Var>& w);

}  // namespace pqc
