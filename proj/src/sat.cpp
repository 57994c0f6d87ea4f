// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#include "pqc/sat.hpp"

#include <algorithm>
#include <cassert>

#include "pqc/errors.hpp"

namespace pqc {

namespace {

// Internal literal encoding: variable v (0-based) -> 2v (positive), 2v+1 (negative).
using ILit = std::int32_t;

inline ILit mk_ilit(int var0, bool positive) { return 2 * var0 + (positive ? 0 : 1); }
inline int ivar(ILit l) { return l >> 1; }
inline bool ipos(ILit l) { return (l & 1) == 0; }
inline ILit ineg(ILit l) { return l ^ 1; }

constexpr std::int8_t kUndef = 0, kTrue = 1, kFalse = -1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t luby(std::uint64_t i) {
  std::uint64_t k = 1;
  while ((1ULL << k) - 1 < i + 1) ++k;
  while ((1ULL << k) - 1 != i + 1) {
    --k;
    i = i - ((1ULL << k) - 1);
  }
  return 1ULL << (k - 1);
}

class CdclSolver {
public:
  CdclSolver(const CnfFormula& f, std::span<const Lit> assumptions, const SatConfig& cfg)
      : cfg_(cfg) {
    int nv = f.num_vars();
    for (Lit l : assumptions) nv = std::max<Var>(nv, l.var());
    for (const Clause& c : f.clauses()) nv = std::max<Var>(nv, c.max_var());
    nvars_ = nv;
    assigns_.assign(nvars_, kUndef);
    level_.assign(nvars_, 0);
    reason_.assign(nvars_, -1);
    activity_.assign(nvars_, 0.0);
    phase_.assign(nvars_, 0);
    seen_.assign(nvars_, 0);
    is_assumption_var_.assign(nvars_, 0);
    assumption_lit_of_.assign(nvars_, 0);
    watches_.assign(2 * static_cast<std::size_t>(std::max(nvars_, 1)), {});
    for (int v = 0; v < nvars_; ++v)
      activity_[v] =
          1e-9 * static_cast<double>(splitmix64(cfg.seed * 0x9e3779b9ULL + v) & 0xffffff);
    for (Lit l : assumptions) {
      ILit a = mk_ilit(l.var() - 1, l.positive());
      assumptions_.push_back(a);
      is_assumption_var_[ivar(a)] = 1;
      assumption_lit_of_[ivar(a)] = a;
    }
    ok_ = true;
    for (const Clause& c : f.clauses()) {
      std::vector<ILit> lits;
      lits.reserve(c.size());
      for (Lit l : c.lits()) lits.push_back(mk_ilit(l.var() - 1, l.positive()));
      if (!add_clause(std::move(lits))) {
        ok_ = false;
        break;
      }
    }
  }

  // nullopt when the assumptions are not pairwise contradictory.
  std::optional<std::pair<Lit, Lit>> contradictory_assumptions() const {
    std::vector<std::int8_t> sign(nvars_, 0);
    for (ILit a : assumptions_) {
      std::int8_t s = ipos(a) ? 1 : -1;
      if (sign[ivar(a)] == -s)
        return std::make_pair(Lit(ivar(a) + 1, true), Lit(ivar(a) + 1, false));
      if (sign[ivar(a)] == 0) sign[ivar(a)] = s;
    }
    return std::nullopt;
  }

  SatResult run() {
    SatResult res;
    if (!ok_ || propagate() != -1) {
      res.kind = SatResult::Kind::unsat;  // unsat without any assumption: empty core
      res.stats = stats_;
      return res;
    }
    std::uint64_t restart_round = 0;
    std::int64_t conflicts_left = cfg_.conflict_budget;
    while (true) {
      SearchOutcome out = search(100 * luby(restart_round++), conflicts_left);
      if (out == SearchOutcome::restart) {
        ++stats_.restarts;
        backtrack_to(0);
        continue;
      }
      res.stats = stats_;
      switch (out) {
        case SearchOutcome::sat: {
          res.kind = SatResult::Kind::sat;
          for (int v = 0; v < nvars_; ++v)
            res.model.set(v + 1, assigns_[v] == kTrue);
          return res;
        }
        case SearchOutcome::unsat:
          res.kind = SatResult::Kind::unsat;
          for (ILit l : core_) res.core.push_back(Lit(ivar(l) + 1, ipos(l)));
          return res;
        default:
          res.kind = SatResult::Kind::timeout;
          return res;
      }
    }
  }

private:
  enum class SearchOutcome { sat, unsat, restart, out_of_budget };

  struct Watcher {
    int clause;
  };

  bool add_clause(std::vector<ILit> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    if (lits.empty()) return false;
    if (lits.size() == 1) {
      if (value(lits[0]) == kFalse) return false;
      if (value(lits[0]) == kUndef) enqueue(lits[0], -1);
      return true;
    }
    int id = static_cast<int>(clauses_.size());
    clauses_.push_back(std::move(lits));
    watch(id, 0);
    watch(id, 1);
    return true;
  }

  void watch(int clause, int idx) { watches_[ineg(clauses_[clause][idx])].push_back({clause}); }

  std::int8_t value(ILit l) const {
    std::int8_t a = assigns_[ivar(l)];
    if (a == kUndef) return kUndef;
    return (a == kTrue) == ipos(l) ? kTrue : kFalse;
  }

  void enqueue(ILit l, int reason) {
    assert(value(l) == kUndef);
    assigns_[ivar(l)] = ipos(l) ? kTrue : kFalse;
    level_[ivar(l)] = current_level();
    reason_[ivar(l)] = reason;
    trail_.push_back(l);
  }

  int current_level() const { return static_cast<int>(trail_lim_.size()); }
  void new_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }

  void backtrack_to(int lvl) {
    if (current_level() <= lvl) return;
    int bound = trail_lim_[lvl];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
      int v = ivar(trail_[i]);
      phase_[v] = assigns_[v] == kTrue ? 1 : 0;
      assigns_[v] = kUndef;
      reason_[v] = -1;
    }
    trail_.resize(bound);
    trail_lim_.resize(lvl);
    qhead_ = std::min<int>(qhead_, static_cast<int>(trail_.size()));
  }

  // Returns conflicting clause id, or -1.
  int propagate() {
    while (qhead_ < static_cast<int>(trail_.size())) {
      ILit p = trail_[qhead_++];
      ++stats_.propagations;
      std::vector<Watcher>& ws = watches_[p];
      std::size_t keep = 0;
      int confl = -1;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        if (confl != -1) {
          ws[keep++] = ws[i];
          continue;
        }
        int ci = ws[i].clause;
        std::vector<ILit>& c = clauses_[ci];
        ILit false_lit = ineg(p);
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (value(c[0]) == kTrue) {
          ws[keep++] = ws[i];
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[ineg(c[1])].push_back({ci});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = ws[i];
        if (value(c[0]) == kFalse) {
          confl = ci;
          qhead_ = static_cast<int>(trail_.size());
        } else {
          enqueue(c[0], ci);
        }
      }
      ws.resize(keep);
      if (confl != -1) return confl;
    }
    return -1;
  }

  void bump(int v) {
    activity_[v] += inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      inc_ *= 1e-100;
    }
  }

  // First-UIP learning: returns (learned clause with asserting literal first,
  // backjump level).
  std::pair<std::vector<ILit>, int> analyze(int confl) {
    std::vector<ILit> learnt{0};
    int path = 0;
    ILit p = -1;
    int idx = static_cast<int>(trail_.size()) - 1;
    int cur = confl;
    bool first = true;
    do {
      assert(cur != -1);
      for (ILit q : clauses_[cur]) {
        if (!first && q == p) continue;
        int v = ivar(q);
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          bump(v);
          if (level_[v] >= current_level())
            ++path;
          else
            learnt.push_back(q);
        }
      }
      first = false;
      while (!seen_[ivar(trail_[idx])]) --idx;
      p = trail_[idx];
      cur = reason_[ivar(p)];
      seen_[ivar(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ineg(p);

    int bj = 0;
    if (learnt.size() > 1) {
      std::size_t maxi = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level_[ivar(learnt[i])] > level_[ivar(learnt[maxi])]) maxi = i;
      std::swap(learnt[1], learnt[maxi]);
      bj = level_[ivar(learnt[1])];
    }
    for (std::size_t i = 1; i < learnt.size(); ++i) seen_[ivar(learnt[i])] = 0;
    return {std::move(learnt), bj};
  }

  // Subset of assumptions responsible for the truth of p (which contradicts
  // the next assumption to be placed).
  void analyze_final(ILit p) {
    core_.clear();
    std::fill(seen_.begin(), seen_.end(), 0);
    seen_[ivar(p)] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= 0; --i) {
      int v = ivar(trail_[i]);
      if (!seen_[v]) continue;
      seen_[v] = 0;
      if (reason_[v] == -1) {
        if (level_[v] > 0 && is_assumption_var_[v]) {
          ILit a = assumption_lit_of_[v];
          if (std::find(core_.begin(), core_.end(), a) == core_.end()) core_.push_back(a);
        }
      } else {
        for (ILit q : clauses_[reason_[v]])
          if (ivar(q) != v && level_[ivar(q)] > 0) seen_[ivar(q)] = 1;
      }
    }
  }

  int pick_branch_var() const {
    int best = -1;
    double best_act = -1.0;
    for (int v = 0; v < nvars_; ++v) {
      if (assigns_[v] != kUndef) continue;
      if (activity_[v] > best_act) {
        best_act = activity_[v];
        best = v;
      }
    }
    return best;
  }

  SearchOutcome search(std::uint64_t restart_budget, std::int64_t& conflicts_left) {
    std::uint64_t local_conflicts = 0;
    while (true) {
      int confl = propagate();
      if (confl != -1) {
        ++stats_.conflicts;
        ++local_conflicts;
        if (--conflicts_left <= 0) return SearchOutcome::out_of_budget;
        if (current_level() == 0) {
          core_.clear();
          return SearchOutcome::unsat;
        }
        auto [learnt, bj] = analyze(confl);
        backtrack_to(bj);
        if (learnt.size() == 1) {
          if (value(learnt[0]) == kUndef)
            enqueue(learnt[0], -1);
          else if (value(learnt[0]) == kFalse) {
            core_.clear();
            return SearchOutcome::unsat;
          }
        } else {
          int id = static_cast<int>(clauses_.size());
          clauses_.push_back(learnt);
          watch(id, 0);
          watch(id, 1);
          enqueue(learnt[0], id);
        }
        inc_ *= 1.0 / 0.95;
        if (local_conflicts >= restart_budget && current_level() > 0)
          return SearchOutcome::restart;
        continue;
      }
      if (current_level() < static_cast<int>(assumptions_.size())) {
        ILit a = assumptions_[current_level()];
        if (value(a) == kTrue) {
          new_level();  // empty level keeps "level i <=> first i assumptions placed"
          continue;
        }
        if (value(a) == kFalse) {
          analyze_final(ineg(a));
          ILit al = assumption_lit_of_[ivar(a)];
          if (std::find(core_.begin(), core_.end(), al) == core_.end()) core_.push_back(al);
          return SearchOutcome::unsat;
        }
        new_level();
        enqueue(a, -1);
        continue;
      }
      int v = pick_branch_var();
      if (v == -1) return SearchOutcome::sat;
      ++stats_.decisions;
      new_level();
      enqueue(mk_ilit(v, phase_[v] != 0), -1);
    }
  }

  SatConfig cfg_;
  int nvars_ = 0;
  bool ok_ = true;
  std::vector<ILit> assumptions_;
  std::vector<std::vector<ILit>> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<std::int8_t> phase_;
  std::vector<std::int8_t> seen_;
  std::vector<ILit> trail_;
  std::vector<int> trail_lim_;
  std::vector<ILit> core_;
  std::vector<std::int8_t> is_assumption_var_;
  std::vector<ILit> assumption_lit_of_;
  int qhead_ = 0;
  double inc_ = 1.0;
  SatStats stats_;
};

SatResult run_solver(const CnfFormula& f, std::span<const Lit> assumptions, const SatConfig& cfg) {
  CdclSolver s(f, assumptions, cfg);
  if (auto pair = s.contradictory_assumptions()) {
    SatResult res;
    res.kind = SatResult::Kind::unsat;
    res.core = {pair->first, pair->second};
    return res;
  }
  return s.run();
}

}  // namespace

SatResult solve(const CnfFormula& f, const SatConfig& cfg) { return run_solver(f, {}, cfg); }

SatResult solve_assuming(const CnfFormula& f, std::span<const Lit> assumptions,
                         const SatConfig& cfg) {
  SatResult res = run_solver(f, assumptions, cfg);
  if (!res.is_unsat() || res.core.size() <= 1 || cfg.core_shrink_retries <= 0) return res;

  // Greedy drop-one core minimization, budget-capped.  Unminimized cores are
  // already valid, so stopping early is fine.
  std::vector<Lit> core = res.core;
  int retries = cfg.core_shrink_retries;
  std::size_t i = 0;
  while (i < core.size() && retries > 0 && core.size() > 1) {
    std::vector<Lit> trial;
    trial.reserve(core.size() - 1);
    for (std::size_t j = 0; j < core.size(); ++j)
      if (j != i) trial.push_back(core[j]);
    --retries;
    SatResult sub = run_solver(f, trial, cfg);
    res.stats.accumulate(sub.stats);
    if (sub.is_unsat()) {
      core = sub.core.empty() ? std::move(trial) : std::move(sub.core);
      i = 0;
    } else {
      ++i;
    }
  }
  res.core = std::move(core);
  return res;
}

bool implies(const CnfFormula& f, const Clause& c, const SatConfig& cfg) {
  std::vector<Lit> assumptions;
  assumptions.reserve(c.size());
  for (Lit l : c.lits()) assumptions.push_back(l.negated());
  SatConfig local = cfg;
  local.core_shrink_retries = 0;
  SatResult r = run_solver(f, assumptions, local);
  if (r.is_timeout()) throw timeout_error("implication check exceeded the conflict budget");
  return r.is_unsat();
}

}  // namespace pqc
