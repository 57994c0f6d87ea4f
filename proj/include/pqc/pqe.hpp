// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string_view>

#include "pqc/cnf.hpp"
#include "pqc/sat.hpp"

namespace pqc {

// Partial quantifier elimination instance: take A out of the scope of the
// quantifiers in exists W [A /\ B], producing A*(V) with
//   exists W [A /\ B]  ==  A* /\ exists W [B].
struct PqeProblem {
  CnfFormula a;
  CnfFormula b;
  std::set<Var> quantified;  // W
  std::set<Var> free_vars;   // V

  // Checks the structural invariants; throws usage_error on violation.
  void validate() const;
};

// A record asserting that a clause of the current A-side store is redundant
// within the subspace given by a partial assignment; an empty subspace means
// unconditional redundancy.
struct DSequent {
  Assignment subspace;
  std::size_t clause_id = 0;
};

struct DerivationStats {
  std::uint64_t branches = 0;
  std::uint64_t joins = 0;
  std::uint64_t resolvents_added = 0;
  std::uint64_t passes = 0;
};

struct PqeSolution {
  CnfFormula a_star;  // over free variables only
  DerivationStats derivation_stats;
};

struct PqeConfig {
  std::uint64_t max_branch_nodes = 10'000'000;
  bool prefer_w_branching = true;
  // Condition (c) scoping: whether clauses currently covered by a D-sequent
  // stop counting as resolution partners.
  bool redundant_blocks_partners = true;
  SatConfig sat;  // used for noise checks in is_redundant
};

// --- engine-level clause store and micro-operations ----------------------
//
// These expose the building blocks of the branching engine for direct use
// and testing; take_out runs them internally on its own optimized state.

class ClauseStore {
public:
  struct Entry {
    Clause clause;
    bool from_a = false;    // original A clause or resolvent with an A ancestor
    bool redundant = false; // currently covered by a D-sequent
  };

  std::size_t add(Clause c, bool from_a);
  // Resolves two stored clauses on `pivot` and appends the resolvent, which
  // inherits A-ancestry from either parent.
  std::size_t add_conflict_resolvent(std::size_t c0, std::size_t c1, Var pivot);

  const Entry& operator[](std::size_t i) const { return entries_.at(i); }
  Entry& at(std::size_t i) { return entries_.at(i); }
  std::size_t size() const { return entries_.size(); }

private:
  std::vector<Entry> entries_;
};

// Trivial redundancy of a stored clause in a subspace: (a) satisfied there,
// (b) implied by another active clause, or (c) some unassigned quantified
// literal has no active resolution partner.  Returns the D-sequent with the
// responsible sub-assignment, or nullopt.
std::optional<DSequent> detect_trivial_redundancy(std::size_t target,
                                                  const Assignment& subspace,
                                                  const ClauseStore& store,
                                                  const std::set<Var>& quantified);

// Join of two D-sequents for the same clause at a variable assigned 0 in d0
// and 1 in d1; the result does not mention the variable.
DSequent join(const DSequent& d0, const DSequent& d1, Var v);

// --- solvers --------------------------------------------------------------

// D-sequent branching engine.  Throws timeout_error when the node budget is
// exhausted.
PqeSolution take_out(const PqeProblem& problem, const PqeConfig& cfg = {});

// true iff exists W [A /\ B] == exists W [B]; i.e. take_out's result is
// equivalent to true modulo clauses implied by B.  When false and `witness`
// is non-null, stores a clause implied by A /\ B with B /\ ~witness
// satisfiable.
bool is_redundant(const PqeProblem& problem, const PqeConfig& cfg = {},
                  Clause* witness = nullptr);

// Reference solver: enumerates free-variable points (at most 24 occurring
// free variables) and covers the difference with one clause per point.
PqeSolution take_out_enum(const PqeProblem& problem, const SatConfig& sat = {});

// --- .pqe file format ------------------------------------------------------
//
//   p pqe <nvars> <nA> <nB>
//   e w1 w2 ... 0
//   <nA clauses> <nB clauses>     (DIMACS style, 0-terminated)
PqeProblem parse_pqe(std::string_view text);

}  // namespace pqc
