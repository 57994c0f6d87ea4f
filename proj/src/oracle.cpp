// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#include "pqc/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pqc {

namespace {

constexpr int kStateSpaceBound = 24;

// Per-clause positive/negative occurrence masks, split by variable section.
struct MaskedClause {
  std::uint32_t s_pos = 0, s_neg = 0;    // present-state part
  std::uint32_t x_pos = 0, x_neg = 0;    // input part
  std::uint32_t n_pos = 0, n_neg = 0;    // next-state part
};

std::vector<MaskedClause> mask_trans(const TransitionSystem& ts) {
  int k = ts.num_state_bits, m = ts.num_inputs;
  std::vector<MaskedClause> out;
  out.reserve(ts.trans.size());
  for (const Clause& c : ts.trans.clauses()) {
    MaskedClause mc;
    for (Lit l : c.lits()) {
      Var v = l.var();
      if (v <= k) {
        (l.positive() ? mc.s_pos : mc.s_neg) |= 1u << (v - 1);
      } else if (v <= k + m) {
        (l.positive() ? mc.x_pos : mc.x_neg) |= 1u << (v - k - 1);
      } else {
        (l.positive() ? mc.n_pos : mc.n_neg) |= 1u << (v - k - m - 1);
      }
    }
    out.push_back(mc);
  }
  return out;
}

std::uint32_t mask_state_clause(const Clause& c, std::uint32_t& pos, std::uint32_t& neg) {
  pos = neg = 0;
  for (Lit l : c.lits()) (l.positive() ? pos : neg) |= 1u << (l.var() - 1);
  return pos | neg;
}

bool state_formula_holds(const CnfFormula& f, std::uint32_t s) {
  for (const Clause& c : f.clauses()) {
    std::uint32_t pos, neg;
    mask_state_clause(c, pos, neg);
    if ((s & pos) == 0 && (~s & neg) == 0) return false;
  }
  return true;
}

Assignment unpack_state(std::uint32_t s, int k, int first_var) {
  Assignment a;
  for (int i = 0; i < k; ++i) a.set(first_var + i, (s >> i) & 1u);
  return a;
}

// Bit string with variable i at character i-1; used for the deterministic
// lexicographic tie-break.
std::string bit_string(std::uint32_t s, int k) {
  std::string out(static_cast<std::size_t>(k), '0');
  for (int i = 0; i < k; ++i)
    if ((s >> i) & 1u) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

struct Predecessor {
  std::uint32_t state = 0;
  std::uint32_t input = 0;
  bool initial = true;
};

struct BfsData {
  ReachReport report;
  std::map<std::uint32_t, Predecessor> parent;  // reached state -> discovery edge
};

BfsData bfs(const TransitionSystem& ts) {
  int k = ts.num_state_bits, m = ts.num_inputs;
  if (k + m > kStateSpaceBound)
    throw usage_error("state space exceeds the explicit-oracle bound (k + m <= 24)");
  auto masks = mask_trans(ts);
  std::uint32_t nstates = 1u << k;
  std::uint32_t ninputs = 1u << m;

  BfsData data;
  std::vector<bool> reached(nstates, false);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t s = 0; s < nstates; ++s) {
    if (state_formula_holds(ts.init, s)) {
      reached[s] = true;
      data.parent[s] = Predecessor{};
      frontier.push_back(s);
    }
  }
  data.report.levels.push_back(frontier);

  std::vector<MaskedClause> pending;
  while (!frontier.empty()) {
    std::vector<std::uint32_t> next_level;
    for (std::uint32_t s : frontier) {
      for (std::uint32_t x = 0; x < ninputs; ++x) {
        pending.clear();
        bool dead = false;
        for (const MaskedClause& mc : masks) {
          bool sat = (s & mc.s_pos) != 0 || (~s & mc.s_neg) != 0 || (x & mc.x_pos) != 0 ||
                     (~x & mc.x_neg) != 0;
          if (sat) continue;
          if (mc.n_pos == 0 && mc.n_neg == 0) {
            dead = true;  // clause over present/input vars only, falsified
            break;
          }
          pending.push_back(mc);
        }
        if (dead) continue;
        for (std::uint32_t t = 0; t < nstates; ++t) {
          if (reached[t]) continue;
          bool ok = true;
          for (const MaskedClause& mc : pending) {
            if ((t & mc.n_pos) == 0 && (~t & mc.n_neg) == 0) {
              ok = false;
              break;
            }
          }
          if (ok) {
            reached[t] = true;
            data.parent[t] = Predecessor{s, x, false};
            next_level.push_back(t);
          }
        }
      }
    }
    if (next_level.empty()) break;
    std::sort(next_level.begin(), next_level.end());
    data.report.levels.push_back(next_level);
    frontier = data.report.levels.back();
  }
  data.report.diameter = static_cast<int>(data.report.levels.size()) - 1;
  while (data.report.diameter > 0 && data.report.levels[data.report.diameter].empty())
    --data.report.diameter;
  return data;
}

}  // namespace

std::string ReachReport::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < levels.size(); ++i)
    os << "level " << i << ": " << levels[i].size() << '\n';
  os << "diameter=" << diameter << '\n';
  return os.str();
}

ReachReport reach_bfs(const TransitionSystem& ts) { return bfs(ts).report; }

int exact_diameter(const TransitionSystem& ts) {
  if (!ts.stuttered) throw usage_error("exact_diameter expects a stuttered system");
  return reach_bfs(ts).diameter;
}

Verdict check_property_bf(const TransitionSystem& ts) {
  BfsData data = bfs(ts);
  int k = ts.num_state_bits;

  for (std::size_t lvl = 0; lvl < data.report.levels.size(); ++lvl) {
    std::vector<std::uint32_t> bad;
    for (std::uint32_t s : data.report.levels[lvl])
      if (!state_formula_holds(ts.property, s)) bad.push_back(s);
    if (bad.empty()) continue;
    std::uint32_t pick = bad[0];
    for (std::uint32_t s : bad)
      if (bit_string(s, k) < bit_string(pick, k)) pick = s;

    // Reconstruct the shortest path backwards through discovery edges.
    std::vector<std::uint32_t> states{pick};
    std::vector<std::uint32_t> inputs;
    std::uint32_t cur = pick;
    while (!data.parent[cur].initial) {
      inputs.push_back(data.parent[cur].input);
      cur = data.parent[cur].state;
      states.push_back(cur);
    }
    std::reverse(states.begin(), states.end());
    std::reverse(inputs.begin(), inputs.end());

    Trace tr;
    tr.inputs.emplace();
    for (std::uint32_t s : states) tr.states.push_back(unpack_state(s, k, 1));
    for (std::uint32_t x : inputs)
      tr.inputs->push_back(unpack_state(x, ts.num_inputs, ts.num_state_bits + 1));
    return Verdict::make_cex(std::move(tr));
  }

  TransitionSystem st = ts.stuttered ? ts : add_stuttering(ts);
  return Verdict::make_holds(exact_diameter(st));
}

namespace {

// Compact evaluator for enumeration: literals as (index-into-vals, sign).
struct IndexedFormula {
  std::vector<std::vector<std::pair<int, bool>>> clauses;

  static IndexedFormula build(const CnfFormula& f, const std::map<Var, int>& index) {
    IndexedFormula out;
    out.clauses.reserve(f.size());
    for (const Clause& c : f.clauses()) {
      std::vector<std::pair<int, bool>> ic;
      ic.reserve(c.size());
      for (Lit l : c.lits()) ic.emplace_back(index.at(l.var()), l.positive());
      out.clauses.push_back(std::move(ic));
    }
    return out;
  }

  bool eval(const std::vector<bool>& vals) const {
    for (const auto& c : clauses) {
      bool sat = false;
      for (auto [idx, pos] : c)
        if (vals[static_cast<std::size_t>(idx)] == pos) {
          sat = true;
          break;
        }
      if (!sat) return false;
    }
    return true;
  }
};

void collect_enum_vars(const CnfFormula& a, const CnfFormula& b, const CnfFormula& a_star,
                       const std::set<Var>& w, std::vector<Var>& free_vars,
                       std::vector<Var>& quant_vars) {
  std::set<Var> all = a.vars();
  for (Var v : b.vars()) all.insert(v);
  for (Var v : a_star.vars()) all.insert(v);
  for (Var v : all) {
    if (w.count(v))
      quant_vars.push_back(v);
    else
      free_vars.push_back(v);
  }
}

}  // namespace

bool pqe_check(const CnfFormula& a, const CnfFormula& b, const std::set<Var>& w,
               const CnfFormula& a_star) {
  for (Var v : a_star.vars())
    if (w.count(v)) throw usage_error("a_star mentions a quantified variable");
  std::vector<Var> free_vars, quant_vars;
  collect_enum_vars(a, b, a_star, w, free_vars, quant_vars);
  if (free_vars.size() + quant_vars.size() > kStateSpaceBound)
    throw usage_error("pqe_check bound exceeded (<= 24 variables)");

  std::map<Var, int> index;
  int nf = static_cast<int>(free_vars.size());
  int nq = static_cast<int>(quant_vars.size());
  for (int i = 0; i < nf; ++i) index[free_vars[static_cast<std::size_t>(i)]] = i;
  for (int i = 0; i < nq; ++i) index[quant_vars[static_cast<std::size_t>(i)]] = nf + i;

  IndexedFormula ia = IndexedFormula::build(a, index);
  IndexedFormula ib = IndexedFormula::build(b, index);
  IndexedFormula istar = IndexedFormula::build(a_star, index);

  std::vector<bool> vals(static_cast<std::size_t>(nf + nq), false);
  for (std::uint64_t p = 0; p < (1ull << nf); ++p) {
    for (int i = 0; i < nf; ++i) vals[static_cast<std::size_t>(i)] = (p >> i) & 1u;
    bool ex_ab = false, ex_b = false;
    for (std::uint64_t q = 0; q < (1ull << nq); ++q) {
      for (int i = 0; i < nq; ++i) vals[static_cast<std::size_t>(nf + i)] = (q >> i) & 1u;
      if (ib.eval(vals)) {
        ex_b = true;
        if (ia.eval(vals)) {
          ex_ab = true;
          break;
        }
      }
    }
    bool lhs = ex_ab;
    bool rhs = istar.eval(vals) && ex_b;
    if (lhs != rhs) return false;
  }
  return true;
}

CnfFormula qe_enum(const CnfFormula& f, const std::set<Var>& w) {
  std::vector<Var> free_vars, quant_vars;
  CnfFormula empty;
  collect_enum_vars(f, empty, empty, w, free_vars, quant_vars);
  if (free_vars.size() + quant_vars.size() > kStateSpaceBound)
    throw usage_error("qe_enum bound exceeded (<= 24 variables)");

  std::map<Var, int> index;
  int nf = static_cast<int>(free_vars.size());
  int nq = static_cast<int>(quant_vars.size());
  for (int i = 0; i < nf; ++i) index[free_vars[static_cast<std::size_t>(i)]] = i;
  for (int i = 0; i < nq; ++i) index[quant_vars[static_cast<std::size_t>(i)]] = nf + i;
  IndexedFormula iform = IndexedFormula::build(f, index);

  CnfFormula out;
  std::vector<bool> vals(static_cast<std::size_t>(nf + nq), false);
  for (std::uint64_t p = 0; p < (1ull << nf); ++p) {
    for (int i = 0; i < nf; ++i) vals[static_cast<std::size_t>(i)] = (p >> i) & 1u;
    bool ex = false;
    for (std::uint64_t q = 0; q < (1ull << nq); ++q) {
      for (int i = 0; i < nq; ++i) vals[static_cast<std::size_t>(nf + i)] = (q >> i) & 1u;
      if (iform.eval(vals)) {
        ex = true;
        break;
      }
    }
    if (!ex) {
      Assignment point;
      for (int i = 0; i < nf; ++i)
        point.set(free_vars[static_cast<std::size_t>(i)], vals[static_cast<std::size_t>(i)]);
      out.add_clause(longest_falsified_clause(point));
    }
  }
  if (out.num_vars() < f.num_vars()) out.set_num_vars(f.num_vars());
  return out;
}

}  // namespace pqc
