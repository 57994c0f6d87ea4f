// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqc/cnf.hpp"

namespace pqc {

// A transition system (I, T, P) over k state bits and m combinational inputs.
// Variable layout (fixed): state 1..k, inputs k+1..k+m, next state
// k+m+1..k+m+k.  I and P are formulas over the state bits only.
struct TransitionSystem {
  int num_state_bits = 0;  // k
  int num_inputs = 0;      // m, includes the stuttering input once added
  CnfFormula init;         // I(S)
  CnfFormula trans;        // T(S, X, S')
  CnfFormula property;     // P(S)
  bool stuttered = false;

  Var state_var(int bit) const { return bit; }
  Var input_var(int bit) const { return num_state_bits + bit; }
  Var next_var(int bit) const { return num_state_bits + num_inputs + bit; }
};

// A sequence of states, optionally with the input valuations driving each
// step.  When inputs are absent, validation quantifies them existentially.
struct Trace {
  std::vector<Assignment> states;                       // total over 1..k each
  std::optional<std::vector<Assignment>> inputs;        // length states.size()-1

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

// Frame variable layout for an unrolled transition relation.  Frame j's state
// bits live at offset j*(k+m); frame j's inputs follow its state bits.
struct FrameMap {
  int k = 0;
  int m = 0;
  int frames = 0;  // number of transition copies; states exist for frames 0..frames

  int frame_width() const { return k + m; }
  Var state_var(int frame, int bit) const { return frame * frame_width() + bit; }
  Var input_var(int frame, int bit) const { return frame * frame_width() + k + bit; }
  Var total_vars() const { return frames * frame_width() + k; }
};

struct Verdict {
  enum class Kind { holds, counterexample };
  Kind kind = Kind::holds;
  int diameter = 0;  // meaningful when kind == holds
  Trace trace;       // meaningful when kind == counterexample

  bool holds() const { return kind == Kind::holds; }
  static Verdict make_holds(int diameter) {
    Verdict v;
    v.kind = Kind::holds;
    v.diameter = diameter;
    return v;
  }
  static Verdict make_cex(Trace t) {
    Verdict v;
    v.kind = Kind::counterexample;
    v.trace = std::move(t);
    return v;
  }
};

// --- parsing and printing ------------------------------------------------

// Parses the .sts model format:
//   sts 1
//   states <k>
//   inputs <m>
//   init      (clauses over 1..k)
//   trans     (clauses over 1..k, k+1..k+m, k+m+1..k+m+k)
//   property  (clauses over 1..k)
//   end
// Clauses are whitespace-separated signed integers, 0-terminated, several per
// line allowed; 'c'-prefixed comment lines anywhere.
TransitionSystem parse_sts(std::string_view text);
std::string write_sts(const TransitionSystem& ts);

// Counterexample format: "cex <n>", then n+1 lines "s <k bits>" alternating
// with n lines "i <m bits>" (bit i of the string is variable i).
std::string write_cex(const TransitionSystem& ts, const Trace& trace);
Trace parse_cex(const TransitionSystem& ts, std::string_view text);

// --- transformations ------------------------------------------------------

// Appends one combinational input v (the new last input) such that the new
// transition relation behaves as before when v=1 and freezes the state when
// v=0.  T'(s,s) = 1 for every s afterwards.  I and P are unchanged.
TransitionSystem add_stuttering(const TransitionSystem& ts);

// T^n: conjunction of n copies of trans over disjoint frame variables.
std::pair<CnfFormula, FrameMap> unroll(const TransitionSystem& ts, int n);

// Renames a formula over state bits 1..k into frame j of the unrolling.
CnfFormula frame_formula(const CnfFormula& f, int frame, const FrameMap& map);

// --- trace semantics -------------------------------------------------------

// Valid iff I(s_0) = 1 and every consecutive pair is a T-step (inputs
// quantified existentially when the trace omits them).
bool validate_trace(const TransitionSystem& ts, const Trace& trace);

// Valid trace whose states are all good except the (bad) last one.
bool is_counterexample(const TransitionSystem& ts, const Trace& trace);

// Like validate_trace/is_counterexample but reports the first violated
// constraint; empty string means the trace is a counterexample.
std::string explain_cex_failure(const TransitionSystem& ts, const Trace& trace);

}  // namespace pqc
