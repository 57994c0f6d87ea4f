// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors
//
// Branching PQE engine based on dependency sequents.  Proof obligations are
// the quantified clauses of the A side (originals plus resolvent descendants
// with an A ancestor).  Within a branch an obligation is discharged when it
// is satisfied, subsumed by an active clause, blocked on a quantified
// literal, or resolved out on one of its quantified literals; branch results
// are merged by joining D-sequents at the decision variable.  Obligations
// discovered during a pass (resolvent descendants that contain quantified
// variables) are discharged by subsequent passes.

#include "pqc/pqe.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace pqc {

void PqeProblem::validate() const {
  for (Var v : quantified)
    if (free_vars.count(v)) throw usage_error("quantified and free variable sets overlap");
  for (Var v : a.vars())
    if (!quantified.count(v) && !free_vars.count(v))
      throw usage_error("A mentions a variable outside the declared sets");
  for (Var v : b.vars())
    if (!quantified.count(v) && !free_vars.count(v))
      throw usage_error("B mentions a variable outside the declared sets");
}

// --- public clause store and micro-operations ------------------------------

std::size_t ClauseStore::add(Clause c, bool from_a) {
  entries_.push_back(Entry{std::move(c), from_a, false});
  return entries_.size() - 1;
}

std::size_t ClauseStore::add_conflict_resolvent(std::size_t c0, std::size_t c1, Var pivot) {
  const Clause& a = entries_.at(c0).clause;
  const Clause& b = entries_.at(c1).clause;
  auto r = resolve(a, b, pivot);
  if (!r.has_value()) throw usage_error("conflict resolvent is tautological");
  bool from_a = entries_[c0].from_a || entries_[c1].from_a;
  return add(*r, from_a);
}

std::optional<DSequent> detect_trivial_redundancy(std::size_t target,
                                                  const Assignment& subspace,
                                                  const ClauseStore& store,
                                                  const std::set<Var>& quantified) {
  const Clause& c = store[target].clause;

  // (a) satisfied in the branch: responsibility is the satisfying variable.
  for (Lit l : c.lits()) {
    auto v = subspace.value(l.var());
    if (v.has_value() && *v == l.positive()) {
      DSequent d;
      d.clause_id = target;
      d.subspace.set(l.var(), *v);
      return d;
    }
  }

  // (b) implied by another active clause (strict subsumption).
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (i == target || store[i].redundant) continue;
    if (store[i].clause.size() < c.size() && store[i].clause.subsumes(c))
      return DSequent{Assignment{}, target};
  }

  // (c) an unassigned quantified literal with no active resolution partner.
  for (Lit l : c.lits()) {
    if (!quantified.count(l.var()) || subspace.defines(l.var())) continue;
    Lit opp = l.negated();
    bool blocked = true;
    Assignment responsible;
    for (std::size_t i = 0; i < store.size() && blocked; ++i) {
      if (i == target || store[i].redundant) continue;
      if (!store[i].clause.contains(opp)) continue;
      bool satisfied = false;
      for (Lit pl : store[i].clause.lits()) {
        auto v = subspace.value(pl.var());
        if (v.has_value() && *v == pl.positive()) {
          satisfied = true;
          responsible.set(pl.var(), *v);
          break;
        }
      }
      if (!satisfied) blocked = false;
    }
    if (blocked) return DSequent{responsible, target};
  }
  return std::nullopt;
}

DSequent join(const DSequent& d0, const DSequent& d1, Var v) {
  if (d0.clause_id != d1.clause_id)
    throw usage_error("join requires D-sequents for the same clause");
  auto v0 = d0.subspace.value(v);
  auto v1 = d1.subspace.value(v);
  if (!v0.has_value() || *v0 != false || !v1.has_value() || *v1 != true)
    throw usage_error("join variable must be assigned 0 and 1 in the two subspaces");
  for (auto& [var, val] : d0.subspace) {
    if (var == v) continue;
    auto o = d1.subspace.value(var);
    if (o.has_value() && *o != val)
      throw usage_error("joined subspaces disagree on a shared variable");
  }
  DSequent out;
  out.clause_id = d0.clause_id;
  Assignment rest = d1.subspace;
  rest.unset(v);
  out.subspace = d0.subspace.merged_with(rest);
  out.subspace.unset(v);
  return out;
}

// --- internal engine --------------------------------------------------------

namespace {

using ILits = std::vector<std::int32_t>;  // signed-var encoding, sorted by |lit|

struct GlobalUnsat {
  bool a_ancestry;
};
struct AbortedByHook {};
// A previously proved clause was re-derived twice: the obligation cascade is
// cycling through a loop of B-side resolutions and will not settle.
struct CycleDetected {};

inline Var var_of(std::int32_t l) { return l < 0 ? -l : l; }

ILits to_ilits(const Clause& c) {
  ILits out;
  out.reserve(c.size());
  for (Lit l : c.lits()) out.push_back(l.code());
  return out;
}

Clause from_ilits(const ILits& lits) { return *Clause::make_from_codes(lits); }

// Resolvent of two sorted clauses on `pivot`; nullopt if tautological.
std::optional<ILits> resolve_ilits(const ILits& c0, const ILits& c1, Var pivot) {
  ILits out;
  out.reserve(c0.size() + c1.size());
  std::size_t i = 0, j = 0;
  while (i < c0.size() || j < c1.size()) {
    std::int32_t pick;
    if (i == c0.size())
      pick = c1[j++];
    else if (j == c1.size())
      pick = c0[i++];
    else if (var_of(c0[i]) < var_of(c1[j]))
      pick = c0[i++];
    else if (var_of(c0[i]) > var_of(c1[j]))
      pick = c1[j++];
    else {
      std::int32_t x = c0[i++];
      std::int32_t y = c1[j++];
      if (var_of(x) == pivot) continue;
      if (x != y) return std::nullopt;  // complementary pair away from the pivot
      out.push_back(x);
      continue;
    }
    if (var_of(pick) == pivot) continue;
    out.push_back(pick);
  }
  return out;
}

class DsPqeEngine {
public:
  DsPqeEngine(const PqeProblem& problem, const PqeConfig& cfg) : cfg_(cfg) {
    problem.validate();
    nv_ = 0;
    for (Var v : problem.quantified) nv_ = std::max(nv_, v);
    for (Var v : problem.free_vars) nv_ = std::max(nv_, v);
    nv_ = std::max({nv_, problem.a.num_vars(), problem.b.num_vars()});
    is_w_.assign(static_cast<std::size_t>(nv_) + 1, 0);
    for (Var v : problem.quantified) is_w_[static_cast<std::size_t>(v)] = 1;

    val_.assign(static_cast<std::size_t>(nv_) + 1, 0);
    reason_.assign(static_cast<std::size_t>(nv_) + 1, -1);
    level_of_.assign(static_cast<std::size_t>(nv_) + 1, 0);
    trail_pos_.assign(static_cast<std::size_t>(nv_) + 1, -1);
    occ_pos_.assign(static_cast<std::size_t>(nv_) + 1, {});
    occ_neg_.assign(static_cast<std::size_t>(nv_) + 1, {});

    seed_a_ = problem.a;
    seed_b_ = problem.b;
  }

  // Called for every free-vars-only clause with A ancestry; returning true
  // aborts the run (used by is_redundant to stop at a witness).
  std::function<bool(const Clause&)> on_astar_clause;

  PqeSolution run() {
    PqeSolution sol;
    try {
      seed();
      while (true) {
        collect_pass_obligations();
        if (pass_obligations_.empty()) break;
        if (stats_.passes >= kPassCap) throw CycleDetected{};
        ++stats_.passes;
        run_pass();
      }
    } catch (const GlobalUnsat& g) {
      sol.derivation_stats = stats_;
      if (g.a_ancestry) {
        CnfFormula f;
        f.add_clause(Clause{});
        sol.a_star = f;
      } else {
        sol.a_star = collect_a_star();
      }
      return sol;
    } catch (const AbortedByHook&) {
      sol.derivation_stats = stats_;
      sol.a_star = collect_a_star();
      return sol;
    } catch (const CycleDetected&) {
      // The derivation is looping; finish with the grounded procedure.  The
      // clauses collected so far are implied by A /\ B and remain valid.
      try {
        sol.a_star = grounded_take_out();
      } catch (const AbortedByHook&) {
        sol.a_star = collect_a_star();
      }
      sol.derivation_stats = stats_;
      return sol;
    }
    sol.a_star = collect_a_star();
    sol.derivation_stats = stats_;
    return sol;
  }

private:
  struct EC {
    ILits lits;
    bool from_a = false;
    bool w_clause = false;
  };

  struct Sub {
    std::vector<std::pair<Var, bool>> v;  // sorted (decision var, value) pairs

    bool mentions(Var var) const {
      for (auto& [x, b] : v)
        if (x == var) return true;
      return false;
    }
    void merge(const Sub& o) {
      v.insert(v.end(), o.v.begin(), o.v.end());
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      for (std::size_t i = 1; i < v.size(); ++i)
        assert(v[i].first != v[i - 1].first && "inconsistent subspace merge");
    }
    Sub without(Var var) const {
      Sub out;
      for (auto& p : v)
        if (p.first != var) out.v.push_back(p);
      return out;
    }
  };

  enum class Status { ok, conflict };
  struct Result {
    Status status = Status::ok;
    int conflict_clause = -1;
  };

  // --- clause management ---

  int add_clause(ILits lits, bool from_a, bool count_resolvent) {
    if (lits.empty()) throw GlobalUnsat{from_a};
    auto it = dedupe_.find(lits);
    if (it != dedupe_.end() && !proved_[static_cast<std::size_t>(it->second)]) return it->second;
    if (it != dedupe_.end() && from_a && ++rederived_[lits] >= 2) throw CycleDetected{};
    if (count_resolvent && ++stats_.resolvents_added > cfg_.max_branch_nodes)
      throw timeout_error("PQE resolvent budget exhausted");
    int id = static_cast<int>(clauses_.size());
    EC ec;
    ec.lits = lits;
    ec.from_a = from_a;
    for (std::int32_t l : ec.lits)
      if (is_w_[static_cast<std::size_t>(var_of(l))]) ec.w_clause = true;
    clauses_.push_back(ec);
    proved_.push_back(0);
    mark_.emplace_back();
    is_obligation_.push_back(0);  // never an obligation within the current pass
    for (std::int32_t l : lits) {
      if (l > 0)
        occ_pos_[static_cast<std::size_t>(l)].push_back(id);
      else
        occ_neg_[static_cast<std::size_t>(-l)].push_back(id);
    }
    dedupe_[lits] = id;
    new_clauses_.push_back(id);
    if (from_a && !ec.w_clause && on_astar_clause) {
      Clause witness = from_ilits(lits);
      if (on_astar_clause(witness)) throw AbortedByHook{};
    }
    return id;
  }

  void seed() {
    for (const Clause& c : seed_a_.clauses()) add_clause(to_ilits(c), true, false);
    for (const Clause& c : seed_b_.clauses()) add_clause(to_ilits(c), false, false);
  }

  void collect_pass_obligations() {
    pass_obligations_.clear();
    is_obligation_.assign(clauses_.size(), 0);
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      if (clauses_[i].from_a && clauses_[i].w_clause && !proved_[i]) {
        is_obligation_[i] = 1;
        pass_obligations_.push_back(static_cast<int>(i));
      }
    }
  }

  // --- assignment / trail ---

  std::int8_t lit_value(std::int32_t l) const {
    std::int8_t v = val_[static_cast<std::size_t>(var_of(l))];
    if (v == 0) return 0;
    return (l > 0) == (v > 0) ? 1 : -1;
  }

  int current_level() const { return static_cast<int>(trail_lim_.size()); }

  void assign(std::int32_t lit, int reason) {
    Var v = var_of(lit);
    assert(val_[static_cast<std::size_t>(v)] == 0);
    val_[static_cast<std::size_t>(v)] = lit > 0 ? 1 : -1;
    reason_[static_cast<std::size_t>(v)] = reason;
    level_of_[static_cast<std::size_t>(v)] = current_level();
    trail_pos_[static_cast<std::size_t>(v)] = static_cast<int>(trail_.size());
    trail_.push_back(lit);
  }

  void push_level() {
    trail_lim_.push_back(trail_.size());
    mark_undo_.emplace_back();
  }

  void pop_level() {
    assert(!trail_lim_.empty());
    for (int cid : mark_undo_.back()) mark_[static_cast<std::size_t>(cid)].reset();
    mark_undo_.pop_back();
    std::size_t bound = trail_lim_.back();
    trail_lim_.pop_back();
    while (trail_.size() > bound) {
      Var v = var_of(trail_.back());
      val_[static_cast<std::size_t>(v)] = 0;
      reason_[static_cast<std::size_t>(v)] = -1;
      trail_pos_[static_cast<std::size_t>(v)] = -1;
      trail_.pop_back();
    }
    qhead_ = std::min(qhead_, trail_.size());
  }

  void reset_search_state() {
    std::fill(val_.begin(), val_.end(), 0);
    std::fill(reason_.begin(), reason_.end(), -1);
    std::fill(level_of_.begin(), level_of_.end(), 0);
    std::fill(trail_pos_.begin(), trail_pos_.end(), -1);
    trail_.clear();
    trail_lim_.clear();
    qhead_ = 0;
    for (auto& m : mark_) m.reset();
    mark_undo_.clear();
    new_clauses_.clear();
    for (std::size_t i = 0; i < clauses_.size(); ++i)
      if (!proved_[i]) new_clauses_.push_back(static_cast<int>(i));
  }

  void set_mark(int cid, Sub q) {
    int lvl = 0;
    for (auto& [v, b] : q.v) lvl = std::max(lvl, level_of_[static_cast<std::size_t>(v)]);
    mark_[static_cast<std::size_t>(cid)] = std::move(q);
    if (lvl > 0) mark_undo_[static_cast<std::size_t>(lvl - 1)].push_back(cid);
  }

  bool skipped(int cid) const {
    return proved_[static_cast<std::size_t>(cid)] != 0 ||
           mark_[static_cast<std::size_t>(cid)].has_value();
  }

  // Expands variables to the decision assignments responsible for them.
  Sub expand_to_decisions(std::vector<Var> vars) const {
    Sub out;
    std::vector<char> seen(static_cast<std::size_t>(nv_) + 1, 0);
    while (!vars.empty()) {
      Var v = vars.back();
      vars.pop_back();
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      assert(val_[static_cast<std::size_t>(v)] != 0);
      int r = reason_[static_cast<std::size_t>(v)];
      if (r == -1) {
        if (level_of_[static_cast<std::size_t>(v)] > 0)
          out.v.emplace_back(v, val_[static_cast<std::size_t>(v)] > 0);
      } else {
        for (std::int32_t l : clauses_[static_cast<std::size_t>(r)].lits)
          if (var_of(l) != v) vars.push_back(var_of(l));
      }
    }
    std::sort(out.v.begin(), out.v.end());
    return out;
  }

  // --- propagation and conflicts ---

  int propagate() {
    while (true) {
      if (!new_clauses_.empty()) {
        int cid = new_clauses_.back();
        new_clauses_.pop_back();
        if (skipped(cid) || is_obligation_[static_cast<std::size_t>(cid)]) continue;
        int r = scan_clause(cid);
        if (r != -1) return r;
        continue;
      }
      if (qhead_ >= trail_.size()) return -1;
      std::int32_t lit = trail_[qhead_++];
      Var v = var_of(lit);
      const std::vector<int>& occ =
          lit > 0 ? occ_neg_[static_cast<std::size_t>(v)] : occ_pos_[static_cast<std::size_t>(v)];
      // Copy: propagation may append clauses and invalidate the list.
      std::vector<int> watchers(occ);
      for (int cid : watchers) {
        if (skipped(cid) || is_obligation_[static_cast<std::size_t>(cid)]) continue;
        int r = scan_clause(cid);
        if (r != -1) return r;
      }
    }
  }

  // Scans one clause: enqueues a unit, or returns the id when falsified.
  int scan_clause(int cid) {
    const EC& c = clauses_[static_cast<std::size_t>(cid)];
    std::int32_t unassigned = 0;
    int n_unassigned = 0;
    for (std::int32_t l : c.lits) {
      std::int8_t v = lit_value(l);
      if (v == 1) return -1;  // satisfied
      if (v == 0) {
        ++n_unassigned;
        unassigned = l;
        if (n_unassigned > 1) return -1;
      }
    }
    if (n_unassigned == 0) return cid;
    assign(unassigned, cid);
    return -1;
  }

  // Resolves the falsified clause backwards through propagated literals until
  // it is falsified by decisions alone.  Returns the (possibly new) clause id.
  int analyze_conflict(int cid) {
    ILits cur = clauses_[static_cast<std::size_t>(cid)].lits;
    bool anc = clauses_[static_cast<std::size_t>(cid)].from_a;
    while (true) {
      Var pick = 0;
      int best_pos = -1;
      for (std::int32_t l : cur) {
        Var v = var_of(l);
        if (reason_[static_cast<std::size_t>(v)] != -1 &&
            trail_pos_[static_cast<std::size_t>(v)] > best_pos) {
          best_pos = trail_pos_[static_cast<std::size_t>(v)];
          pick = v;
        }
      }
      if (pick == 0) break;
      int r = reason_[static_cast<std::size_t>(pick)];
      anc = anc || clauses_[static_cast<std::size_t>(r)].from_a;
      auto res = resolve_ilits(cur, clauses_[static_cast<std::size_t>(r)].lits, pick);
      assert(res.has_value());  // both falsified under one assignment
      cur = std::move(*res);
    }
    if (cur == clauses_[static_cast<std::size_t>(cid)].lits) return cid;
    return add_clause(std::move(cur), anc, true);
  }

  // --- trivial redundancy and the resolve-out rule ---

  struct ClauseView {
    std::int32_t sat_lit = 0;  // first satisfied literal (by var order)
    int n_unassigned = 0;
    std::int32_t first_unassigned = 0;
  };

  ClauseView view(int cid) const {
    ClauseView out;
    for (std::int32_t l : clauses_[static_cast<std::size_t>(cid)].lits) {
      std::int8_t v = lit_value(l);
      if (v == 1 && out.sat_lit == 0) out.sat_lit = l;
      if (v == 0) {
        ++out.n_unassigned;
        if (out.first_unassigned == 0) out.first_unassigned = l;
      }
    }
    return out;
  }

  // Discharges obligation K by resolving it out on the quantified literal
  // `lit`: every active partner clause containing ~lit is resolved with K
  // (the resolvents stay in the store); partners that are satisfied through
  // another variable, or covered by a D-sequent not mentioning the pivot,
  // contribute their deactivation witnesses to K's D-sequent subspace.
  void resolve_out(int K, std::int32_t lit) {
    Var pv = var_of(lit);
    Sub q;
    std::vector<Var> witness_vars;
    const std::vector<int>& occ =
        lit > 0 ? occ_neg_[static_cast<std::size_t>(pv)] : occ_pos_[static_cast<std::size_t>(pv)];
    std::vector<int> partners(occ);  // resolution appends to occurrence lists
    for (int cid : partners) {
      if (cid == K || proved_[static_cast<std::size_t>(cid)]) continue;
      const auto& m = mark_[static_cast<std::size_t>(cid)];
      if (m.has_value() && cfg_.redundant_blocks_partners && !m->mentions(pv)) {
        q.merge(*m);
        continue;
      }
      if (!m.has_value()) {
        std::int32_t t = 0;
        for (std::int32_t l : clauses_[static_cast<std::size_t>(cid)].lits) {
          if (var_of(l) != pv && lit_value(l) == 1) {
            t = l;
            break;
          }
        }
        if (t != 0) {
          witness_vars.push_back(var_of(t));
          continue;
        }
      }
      auto res = resolve_ilits(clauses_[static_cast<std::size_t>(K)].lits,
                               clauses_[static_cast<std::size_t>(cid)].lits, pv);
      if (!res.has_value()) continue;  // tautological resolvent
      add_clause(std::move(*res), true, true);
    }
    if (!witness_vars.empty()) q.merge(expand_to_decisions(std::move(witness_vars)));
    set_mark(K, std::move(q));
  }

  // One pass over the outstanding obligations: conditions (a) and (b), the
  // resolve-out rule for unit/falsified obligations, and condition (c).
  // Returns a falsified clause id if propagation conflicts, else -1.
  int sweep() {
    bool changed = true;
    while (changed) {
      changed = false;
      int confl = propagate();
      if (confl != -1) return confl;
      for (int K : pass_obligations_) {
        if (skipped(K)) continue;
        ClauseView cv = view(K);
        if (cv.sat_lit != 0) {  // (a)
          set_mark(K, expand_to_decisions({var_of(cv.sat_lit)}));
          changed = true;
          continue;
        }
        if (find_subsumer(K)) {  // (b)
          set_mark(K, Sub{});
          changed = true;
          continue;
        }
        if (cv.n_unassigned <= 1) {
          resolve_out(K, pick_interface_lit(K, cv));
          changed = true;
          continue;
        }
        std::int32_t blocked = find_blocked_lit(K);  // (c)
        if (blocked != 0) {
          resolve_out(K, blocked);  // no active partners: witness-only discharge
          changed = true;
          continue;
        }
      }
    }
    return -1;
  }

  bool find_subsumer(int K) const {
    const ILits& kl = clauses_[static_cast<std::size_t>(K)].lits;
    auto lit_less = [](std::int32_t x, std::int32_t y) {
      return var_of(x) != var_of(y) ? var_of(x) < var_of(y) : x < y;
    };
    for (std::int32_t l : kl) {
      Var v = var_of(l);
      const std::vector<int>& occ =
          l > 0 ? occ_pos_[static_cast<std::size_t>(v)] : occ_neg_[static_cast<std::size_t>(v)];
      for (int cid : occ) {
        if (cid == K || skipped(cid)) continue;
        const ILits& cl = clauses_[static_cast<std::size_t>(cid)].lits;
        if (cl.size() >= kl.size()) continue;
        if (std::includes(kl.begin(), kl.end(), cl.begin(), cl.end(), lit_less)) return true;
      }
    }
    return false;
  }

  std::int32_t pick_interface_lit(int K, const ClauseView& cv) const {
    if (cv.n_unassigned == 1 && is_w_[static_cast<std::size_t>(var_of(cv.first_unassigned))])
      return cv.first_unassigned;
    for (std::int32_t l : clauses_[static_cast<std::size_t>(K)].lits)
      if (is_w_[static_cast<std::size_t>(var_of(l))] && lit_value(l) != 1) return l;
    assert(false && "obligation without a quantified literal");
    return clauses_[static_cast<std::size_t>(K)].lits.front();
  }

  // Condition (c): an unassigned quantified literal of K such that every
  // clause containing its negation is satisfied, covered, or proved.
  std::int32_t find_blocked_lit(int K) const {
    for (std::int32_t l : clauses_[static_cast<std::size_t>(K)].lits) {
      Var v = var_of(l);
      if (!is_w_[static_cast<std::size_t>(v)] || lit_value(l) != 0) continue;
      const std::vector<int>& occ =
          l > 0 ? occ_neg_[static_cast<std::size_t>(v)] : occ_pos_[static_cast<std::size_t>(v)];
      bool blocked = true;
      for (int cid : occ) {
        if (cid == K || proved_[static_cast<std::size_t>(cid)]) continue;
        if (mark_[static_cast<std::size_t>(cid)].has_value()) {
          if (cfg_.redundant_blocks_partners) continue;
          blocked = false;
          break;
        }
        bool satisfied = false;
        for (std::int32_t pl : clauses_[static_cast<std::size_t>(cid)].lits) {
          if (var_of(pl) != v && lit_value(pl) == 1) {
            satisfied = true;
            break;
          }
        }
        if (!satisfied) {
          blocked = false;
          break;
        }
      }
      if (blocked) return l;
    }
    return 0;
  }

  // --- branching ---

  Var pick_branch_var() const {
    std::map<Var, int> count_w, count_v;
    for (int K : pass_obligations_) {
      if (skipped(K)) continue;
      for (std::int32_t l : clauses_[static_cast<std::size_t>(K)].lits) {
        Var v = var_of(l);
        if (val_[static_cast<std::size_t>(v)] != 0) continue;
        if (is_w_[static_cast<std::size_t>(v)])
          ++count_w[v];
        else
          ++count_v[v];
      }
    }
    const std::map<Var, int>& pool = (cfg_.prefer_w_branching && !count_w.empty()) ? count_w
                                     : !count_v.empty()                            ? count_v
                                                                                   : count_w;
    Var best = 0;
    int best_count = -1;
    for (auto& [v, n] : pool) {
      if (n > best_count) {
        best = v;
        best_count = n;
      }
    }
    return best;
  }

  bool all_obligations_discharged() const {
    for (int K : pass_obligations_)
      if (!skipped(K)) return false;
    return true;
  }

  // The assignment falsifying every literal of the clause (sign-derived, so
  // it stays meaningful after backtracking).
  Sub falsifying_assignment(int cid) const {
    Sub out;
    for (std::int32_t l : clauses_[static_cast<std::size_t>(cid)].lits)
      out.v.emplace_back(var_of(l), l < 0);
    std::sort(out.v.begin(), out.v.end());
    return out;
  }

  bool clause_mentions(int cid, Var v) const {
    for (std::int32_t l : clauses_[static_cast<std::size_t>(cid)].lits)
      if (var_of(l) == v) return true;
    return false;
  }

  Result search() {
    if (++stats_.branches > cfg_.max_branch_nodes)
      throw timeout_error("PQE branch-node budget exhausted");
    int confl = sweep();
    if (confl != -1) return Result{Status::conflict, analyze_conflict(confl)};
    if (all_obligations_discharged()) return Result{Status::ok, -1};

    Var y = pick_branch_var();
    assert(y != 0 && "outstanding obligation without unassigned variables");

    Result r[2];
    std::map<int, Sub> snap[2];
    for (int b = 0; b < 2; ++b) {
      push_level();
      assign(b == 0 ? -y : y, -1);
      r[b] = search();
      if (r[b].status == Status::ok) {
        for (int K : pass_obligations_) {
          const auto& m = mark_[static_cast<std::size_t>(K)];
          if (m.has_value() && m->mentions(y)) snap[b][K] = *m;
        }
      }
      pop_level();
      if (r[b].status == Status::conflict && !clause_mentions(r[b].conflict_clause, y))
        return r[b];
    }

    if (r[0].status == Status::conflict && r[1].status == Status::conflict) {
      auto res = resolve_ilits(clauses_[static_cast<std::size_t>(r[0].conflict_clause)].lits,
                               clauses_[static_cast<std::size_t>(r[1].conflict_clause)].lits, y);
      assert(res.has_value());
      bool anc = clauses_[static_cast<std::size_t>(r[0].conflict_clause)].from_a ||
                 clauses_[static_cast<std::size_t>(r[1].conflict_clause)].from_a;
      int cid = add_clause(std::move(*res), anc, true);
      return Result{Status::conflict, cid};
    }

    // Merge: join the per-obligation D-sequents of the two branches at y.
    // A conflicted branch covers every obligation within the falsifying
    // assignment of its conflict clause.
    for (int K : pass_obligations_) {
      if (skipped(K)) continue;
      Sub q0 = r[0].status == Status::ok ? snap[0].at(K)
                                         : falsifying_assignment(r[0].conflict_clause);
      Sub q1 = r[1].status == Status::ok ? snap[1].at(K)
                                         : falsifying_assignment(r[1].conflict_clause);
      Sub joined = q0.without(y);
      joined.merge(q1.without(y));
      ++stats_.joins;
      set_mark(K, std::move(joined));
    }
    return Result{Status::ok, -1};
  }

  void run_pass() {
    reset_search_state();
    Result r = search();
    if (r.status == Status::conflict) {
      // A conflict surviving to the root is falsified by zero decisions,
      // i.e. an input-level empty clause situation.
      throw GlobalUnsat{clauses_[static_cast<std::size_t>(r.conflict_clause)].from_a};
    }
    for (int K : pass_obligations_) {
      assert(mark_[static_cast<std::size_t>(K)].has_value() &&
             mark_[static_cast<std::size_t>(K)]->v.empty() && "pass left a conditional mark");
      proved_[static_cast<std::size_t>(K)] = 1;
    }
  }

  // Model-guided completion used when the resolution cascade cycles: find
  // free-variable points where A /\ B lost satisfiability relative to B and
  // cover each with a core clause.  Every iteration excludes the candidate
  // point from the search formula, so the loop terminates.
  CnfFormula grounded_take_out() {
    CnfFormula a_star = collect_a_star();
    CnfFormula ab = seed_a_;
    ab.append(seed_b_);
    std::vector<Var> free_occ;
    {
      std::set<Var> occ = seed_a_.vars();
      for (Var v : seed_b_.vars()) occ.insert(v);
      for (Var v : occ)
        if (!is_w_[static_cast<std::size_t>(v)]) free_occ.push_back(v);
    }
    CnfFormula query = seed_b_;
    for (const Clause& c : a_star.clauses()) query.add_clause(c);

    while (true) {
      if (++stats_.branches > cfg_.max_branch_nodes)
        throw timeout_error("PQE grounded-completion budget exhausted");
      SatResult cand = solve(query, cfg_.sat);
      if (cand.is_timeout()) throw timeout_error("PQE grounded completion: SAT budget");
      if (cand.is_unsat()) break;
      std::vector<Lit> assumptions;
      for (Var v : free_occ) assumptions.emplace_back(v, *cand.model.value(v));
      SatResult probe = solve_assuming(ab, assumptions, cfg_.sat);
      if (probe.is_timeout()) throw timeout_error("PQE grounded completion: SAT budget");
      if (probe.is_unsat()) {
        std::vector<Lit> lits;
        for (Lit l : probe.core) lits.push_back(l.negated());
        Clause c = *Clause::make(lits);
        a_star.add_clause(c);
        query.add_clause(c);
        if (on_astar_clause && on_astar_clause(c)) throw AbortedByHook{};
        if (c.empty()) break;
      } else {
        query.add_clause(good_point_blocker(ab, probe.model, free_occ));
      }
    }

    // Same syntactic cleanup as the main path.
    CnfFormula out;
    const auto& in = a_star.clauses();
    std::vector<bool> drop(in.size(), false);
    for (std::size_t i = 0; i < in.size(); ++i)
      for (std::size_t j = 0; j < in.size(); ++j) {
        if (i == j || drop[i] || drop[j]) continue;
        if (in[j] == in[i]) {
          if (j < i) drop[i] = true;
        } else if (in[j].subsumes(in[i])) {
          drop[i] = true;
        }
      }
    for (std::size_t i = 0; i < in.size(); ++i)
      if (!drop[i]) out.add_clause(in[i]);
    return out;
  }

  // A clause excluding the free-variable cube around a verified-good model:
  // keeps only the free literals needed to support clauses not already
  // satisfied through quantified literals.
  Clause good_point_blocker(const CnfFormula& ab, const Assignment& model,
                            const std::vector<Var>& free_occ) const {
    std::set<Var> needed;
    for (const Clause& c : ab.clauses()) {
      bool w_sat = false;
      bool covered = false;
      Var first_v = 0;
      for (Lit l : c.lits()) {
        auto v = model.value(l.var());
        if (!v.has_value() || *v != l.positive()) continue;
        if (is_w_[static_cast<std::size_t>(l.var())]) {
          w_sat = true;
          break;
        }
        if (needed.count(l.var())) covered = true;
        if (first_v == 0) first_v = l.var();
      }
      if (!w_sat && !covered) {
        assert(first_v != 0 && "model does not satisfy a clause");
        needed.insert(first_v);
      }
    }
    std::vector<Lit> lits;
    for (Var v : free_occ)
      if (needed.count(v)) lits.emplace_back(v, !*model.value(v));
    return *Clause::make(lits);
  }

  CnfFormula collect_a_star() const {
    std::vector<Clause> picked;
    for (const EC& c : clauses_)
      if (c.from_a && !c.w_clause) picked.push_back(from_ilits(c.lits));
    // Syntactic dedup plus subsumption; no semantic minimization.
    std::vector<bool> drop(picked.size(), false);
    for (std::size_t i = 0; i < picked.size(); ++i)
      for (std::size_t j = 0; j < picked.size(); ++j) {
        if (i == j || drop[i] || drop[j]) continue;
        if (picked[j] == picked[i]) {
          if (j < i) drop[i] = true;
        } else if (picked[j].subsumes(picked[i])) {
          drop[i] = true;
        }
      }
    CnfFormula out;
    for (std::size_t i = 0; i < picked.size(); ++i)
      if (!drop[i]) out.add_clause(picked[i]);
    return out;
  }

  PqeConfig cfg_;
  Var nv_ = 0;
  CnfFormula seed_a_, seed_b_;
  std::vector<char> is_w_;

  static constexpr std::uint64_t kPassCap = 64;

  std::vector<EC> clauses_;
  std::map<ILits, int> dedupe_;
  std::map<ILits, int> rederived_;
  std::vector<std::vector<int>> occ_pos_, occ_neg_;
  std::vector<char> proved_;
  std::vector<std::optional<Sub>> mark_;
  std::vector<char> is_obligation_;
  std::vector<int> pass_obligations_;

  std::vector<std::int8_t> val_;
  std::vector<int> reason_;
  std::vector<int> level_of_;
  std::vector<int> trail_pos_;
  std::vector<std::int32_t> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<int> new_clauses_;
  std::vector<std::vector<int>> mark_undo_;

  DerivationStats stats_;
};

}  // namespace

PqeSolution take_out(const PqeProblem& problem, const PqeConfig& cfg) {
  DsPqeEngine engine(problem, cfg);
  return engine.run();
}

bool is_redundant(const PqeProblem& problem, const PqeConfig& cfg, Clause* witness) {
  DsPqeEngine engine(problem, cfg);
  bool found = false;
  Clause found_clause;
  engine.on_astar_clause = [&](const Clause& c) {
    // A non-noise witness: implied by A /\ B but not by B alone.
    if (!implies(problem.b, c, cfg.sat)) {
      found = true;
      found_clause = c;
      return true;
    }
    return false;
  };
  engine.run();
  if (found && witness != nullptr) *witness = found_clause;
  return !found;
}

PqeSolution take_out_enum(const PqeProblem& problem, const SatConfig& sat) {
  problem.validate();
  std::vector<Var> free_occurring;
  {
    std::set<Var> occ = problem.a.vars();
    for (Var v : problem.b.vars()) occ.insert(v);
    for (Var v : occ)
      if (problem.free_vars.count(v)) free_occurring.push_back(v);
  }
  if (free_occurring.size() > 24)
    throw usage_error("take_out_enum bound exceeded (<= 24 occurring free variables)");

  CnfFormula ab = problem.a;
  ab.append(problem.b);

  PqeSolution sol;
  int nf = static_cast<int>(free_occurring.size());
  for (std::uint64_t p = 0; p < (1ull << nf); ++p) {
    Assignment point;
    for (int i = 0; i < nf; ++i)
      point.set(free_occurring[static_cast<std::size_t>(i)], (p >> i) & 1u);
    CnfFormula b_cof = cofactor(problem.b, point);
    if (b_cof.has_empty_clause()) continue;
    if (!b_cof.empty() && !solve(b_cof, sat).is_sat()) continue;
    CnfFormula ab_cof = cofactor(ab, point);
    bool ab_sat = !ab_cof.has_empty_clause() && (ab_cof.empty() || solve(ab_cof, sat).is_sat());
    if (!ab_sat) sol.a_star.add_clause(longest_falsified_clause(point));
  }
  const auto& in = sol.a_star.clauses();
  std::vector<bool> drop(in.size(), false);
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < in.size(); ++j)
      if (i != j && !drop[j] && in[j] != in[i] && in[j].subsumes(in[i])) drop[i] = true;
  CnfFormula cleaned;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!drop[i]) cleaned.add_clause(in[i]);
  sol.a_star = cleaned;
  return sol;
}

PqeProblem parse_pqe(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  long nvars = -1, na = -1, nb = -1;
  PqeProblem problem;
  std::vector<std::int32_t> cur;
  bool have_e = false;
  long clause_count = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == 'c') continue;
    if (first == "p") {
      std::string kind;
      if (!(ls >> kind) || kind != "pqe") throw parse_error("expected 'p pqe' header", lineno, 1);
      if (!(ls >> nvars >> na >> nb) || nvars < 0 || na < 0 || nb < 0)
        throw parse_error("bad 'p pqe' header counts", lineno, 1);
      continue;
    }
    if (first == "e") {
      if (nvars < 0) throw parse_error("'e' line before 'p pqe' header", lineno, 1);
      have_e = true;
      long v;
      while (ls >> v) {
        if (v == 0) break;
        if (v < 1 || v > nvars) throw parse_error("quantified variable out of range", lineno, 1);
        problem.quantified.insert(static_cast<Var>(v));
      }
      continue;
    }
    if (nvars < 0) throw parse_error("clause before 'p pqe' header", lineno, 1);
    std::istringstream all(line);
    long v;
    while (all >> v) {
      if (v == 0) {
        auto c = Clause::make_from_codes(cur);
        if (!c.has_value()) throw parse_error("tautological clause", lineno, 1);
        if (c->max_var() > nvars)
          throw parse_error("literal exceeds declared variable count", lineno, 1);
        if (clause_count < na)
          problem.a.add_clause(*c);
        else if (clause_count < na + nb)
          problem.b.add_clause(*c);
        else
          throw parse_error("more clauses than declared", lineno, 1);
        ++clause_count;
        cur.clear();
      } else {
        if (v > nvars || v < -nvars)
          throw parse_error("literal exceeds declared variable count", lineno, 1);
        cur.push_back(static_cast<std::int32_t>(v));
      }
    }
  }
  if (!cur.empty()) throw parse_error("unterminated clause", lineno, 1);
  if (nvars < 0) throw parse_error("missing 'p pqe' header", lineno, 1);
  if (!have_e) throw parse_error("missing 'e' line", lineno, 1);
  if (clause_count != na + nb) throw parse_error("clause count mismatch with header", lineno, 1);
  for (Var v = 1; v <= nvars; ++v)
    if (!problem.quantified.count(v)) problem.free_vars.insert(v);
  problem.a.set_num_vars(static_cast<Var>(nvars));
  problem.b.set_num_vars(static_cast<Var>(nvars));
  problem.validate();
  return problem;
}

}  // namespace pqc
