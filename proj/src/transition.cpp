// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#include "pqc/transition.hpp"

#include <cctype>
#include <sstream>

#include "pqc/sat.hpp"

namespace pqc {

namespace {

struct Line {
  std::string text;
  int number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int n = 1;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t eol = text.find('\n', i);
    std::string_view ln =
        text.substr(i, eol == std::string_view::npos ? text.size() - i : eol - i);
    out.push_back({std::string(ln), n});
    if (eol == std::string_view::npos) break;
    i = eol + 1;
    ++n;
  }
  return out;
}

bool is_comment_or_blank(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i == s.size() || s[i] == 'c';
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

}  // namespace

TransitionSystem parse_sts(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t li = 0;
  auto next_content_line = [&]() -> const Line* {
    while (li < lines.size() && is_comment_or_blank(lines[li].text)) ++li;
    if (li >= lines.size()) return nullptr;
    return &lines[li];
  };
  auto expect_keyword_line = [&](const std::string& kw, int nargs) -> std::vector<std::string> {
    const Line* ln = next_content_line();
    if (ln == nullptr)
      throw parse_error("unexpected end of file, expected '" + kw + "'",
                        lines.empty() ? 1 : lines.back().number, 1);
    auto ws = words(ln->text);
    if (ws.empty() || ws[0] != kw)
      throw parse_error("expected '" + kw + "'", ln->number, 1);
    if (static_cast<int>(ws.size()) != 1 + nargs)
      throw parse_error("'" + kw + "' takes " + std::to_string(nargs) + " argument(s)",
                        ln->number, 1);
    ++li;
    return ws;
  };
  auto to_int = [&](const std::string& s, int line) -> long {
    try {
      std::size_t pos = 0;
      long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw parse_error("expected integer, got '" + s + "'", line, 1);
    }
  };

  auto hdr = expect_keyword_line("sts", 1);
  if (hdr[1] != "1") throw parse_error("unsupported sts version '" + hdr[1] + "'", lines[li - 1].number, 1);
  auto st = expect_keyword_line("states", 1);
  long k = to_int(st[1], lines[li - 1].number);
  if (k < 1) throw parse_error("state bit count must be >= 1", lines[li - 1].number, 1);
  auto in = expect_keyword_line("inputs", 1);
  long m = to_int(in[1], lines[li - 1].number);
  if (m < 0) throw parse_error("input count must be >= 0", lines[li - 1].number, 1);

  TransitionSystem ts;
  ts.num_state_bits = static_cast<int>(k);
  ts.num_inputs = static_cast<int>(m);

  static const char* kSections[3] = {"init", "trans", "property"};
  CnfFormula* targets[3] = {&ts.init, &ts.trans, &ts.property};
  long bounds[3] = {k, k + m + k, k};

  for (int sec = 0; sec < 3; ++sec) {
    expect_keyword_line(kSections[sec], 0);
    const char* terminator = sec < 2 ? kSections[sec + 1] : "end";
    std::vector<std::int32_t> cur;
    int cur_line = lines.empty() ? 1 : lines[li == 0 ? 0 : li - 1].number;
    while (true) {
      const Line* ln = next_content_line();
      if (ln == nullptr)
        throw parse_error(std::string("unexpected end of file, expected '") + terminator + "'",
                          lines.back().number, 1);
      auto ws = words(ln->text);
      if (!ws.empty() && ws[0] == terminator) {
        if (!cur.empty()) throw parse_error("unterminated clause", ln->number, 1);
        break;  // terminator consumed by the next expect_keyword_line
      }
      int col = 1;
      for (const std::string& w : ws) {
        long v = to_int(w, ln->number);
        if (v == 0) {
          auto c = Clause::make_from_codes(cur);
          if (!c.has_value()) throw parse_error("tautological clause", ln->number, col);
          targets[sec]->add_clause(*c);
          cur.clear();
        } else {
          if (v > bounds[sec] || v < -bounds[sec])
            throw parse_error(std::string("literal out of range for section '") +
                                  kSections[sec] + "'",
                              ln->number, col);
          cur.push_back(static_cast<std::int32_t>(v));
        }
        ++col;
      }
      cur_line = ln->number;
      ++li;
      (void)cur_line;
    }
  }
  expect_keyword_line("end", 0);
  while (li < lines.size()) {
    if (!is_comment_or_blank(lines[li].text))
      throw parse_error("trailing content after 'end'", lines[li].number, 1);
    ++li;
  }

  ts.init.set_num_vars(ts.num_state_bits);
  ts.property.set_num_vars(ts.num_state_bits);
  ts.trans.set_num_vars(2 * ts.num_state_bits + ts.num_inputs);
  return ts;
}

std::string write_sts(const TransitionSystem& ts) {
  std::ostringstream os;
  os << "sts 1\n";
  os << "states " << ts.num_state_bits << '\n';
  os << "inputs " << ts.num_inputs << '\n';
  const CnfFormula* sections[3] = {&ts.init, &ts.trans, &ts.property};
  static const char* kNames[3] = {"init", "trans", "property"};
  for (int sec = 0; sec < 3; ++sec) {
    os << kNames[sec] << '\n';
    for (const Clause& c : sections[sec]->clauses()) {
      for (Lit l : c.lits()) os << l.code() << ' ';
      os << "0\n";
    }
  }
  os << "end\n";
  return os.str();
}

namespace {

std::string bits_of(const Assignment& a, int n, int first_var, const char* what) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 1; i <= n; ++i) {
    auto v = a.value(first_var + i - 1);
    if (!v.has_value()) throw usage_error(std::string("assignment not total over ") + what);
    s[static_cast<std::size_t>(i - 1)] = *v ? '1' : '0';
  }
  return s;
}

}  // namespace

std::string write_cex(const TransitionSystem& ts, const Trace& trace) {
  if (trace.states.empty()) throw usage_error("trace must contain at least one state");
  std::ostringstream os;
  os << "cex " << trace.steps() << '\n';
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    os << "s " << bits_of(trace.states[i], ts.num_state_bits, 1, "state bits") << '\n';
    if (i + 1 < trace.states.size()) {
      os << 'i';
      if (trace.inputs.has_value()) {
        std::string bits =
            bits_of((*trace.inputs)[i], ts.num_inputs, ts.num_state_bits + 1, "input bits");
        if (!bits.empty()) os << ' ' << bits;
      } else if (ts.num_inputs > 0) {
        throw usage_error("trace omits inputs but the system has inputs");
      }
      os << '\n';
    }
  }
  return os.str();
}

Trace parse_cex(const TransitionSystem& ts, std::string_view text) {
  auto lines = split_lines(text);
  std::size_t li = 0;
  auto next = [&]() -> const Line* {
    while (li < lines.size() && is_comment_or_blank(lines[li].text)) ++li;
    if (li >= lines.size()) return nullptr;
    return &lines[li++];
  };
  const Line* hdr = next();
  if (hdr == nullptr) throw parse_error("empty counterexample", 1, 1);
  auto hw = words(hdr->text);
  if (hw.size() != 2 || hw[0] != "cex")
    throw parse_error("expected 'cex <n>' header", hdr->number, 1);
  long n;
  try {
    n = std::stol(hw[1]);
  } catch (const std::exception&) {
    throw parse_error("expected step count", hdr->number, 1);
  }
  if (n < 0) throw parse_error("negative step count", hdr->number, 1);

  auto parse_bits = [&](const Line* ln, char tag, int count, int first_var) -> Assignment {
    auto ws = words(ln->text);
    std::string expect(1, tag);
    if (ws.empty() || ws[0] != expect)
      throw parse_error(std::string("expected '") + tag + "' line", ln->number, 1);
    std::string bits = ws.size() > 1 ? ws[1] : "";
    if (ws.size() > 2 || static_cast<int>(bits.size()) != count)
      throw parse_error("bit string has wrong length", ln->number, 1);
    Assignment a;
    for (int i = 0; i < count; ++i) {
      char c = bits[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1') throw parse_error("bit string must be 0/1", ln->number, 1);
      a.set(first_var + i, c == '1');
    }
    return a;
  };

  Trace tr;
  tr.inputs.emplace();
  for (long i = 0; i <= n; ++i) {
    const Line* sl = next();
    if (sl == nullptr) throw parse_error("missing state line", lines.back().number, 1);
    tr.states.push_back(parse_bits(sl, 's', ts.num_state_bits, 1));
    if (i < n) {
      const Line* il = next();
      if (il == nullptr) throw parse_error("missing input line", lines.back().number, 1);
      tr.inputs->push_back(parse_bits(il, 'i', ts.num_inputs, ts.num_state_bits + 1));
    }
  }
  if (next() != nullptr) throw parse_error("trailing content after trace", lines[li - 1].number, 1);
  return tr;
}

TransitionSystem add_stuttering(const TransitionSystem& ts) {
  if (ts.stuttered) throw usage_error("stuttering already added");
  int k = ts.num_state_bits;
  int m = ts.num_inputs;
  TransitionSystem out;
  out.num_state_bits = k;
  out.num_inputs = m + 1;
  out.init = ts.init;
  out.property = ts.property;
  out.stuttered = true;

  Var v = k + m + 1;  // the new input, appended after the original inputs
  // Original next-state vars k+m+1..k+m+k shift up by one.
  std::map<Var, Var> shift;
  for (int i = 1; i <= k; ++i) shift[k + m + i] = k + m + 1 + i;

  for (const Clause& c : ts.trans.clauses()) {
    Clause shifted = rename(c, shift);
    std::vector<Lit> lits{Lit(v, false)};
    lits.insert(lits.end(), shifted.lits().begin(), shifted.lits().end());
    out.trans.add_clause(*Clause::make(lits));
  }
  for (int i = 1; i <= k; ++i) {
    Var s = i;
    Var sp = k + m + 1 + i;
    out.trans.add_clause(*Clause::make({Lit(v, true), Lit(s, false), Lit(sp, true)}));
    out.trans.add_clause(*Clause::make({Lit(v, true), Lit(s, true), Lit(sp, false)}));
  }
  out.trans.set_num_vars(2 * k + m + 1);
  out.init.set_num_vars(k);
  out.property.set_num_vars(k);
  return out;
}

std::pair<CnfFormula, FrameMap> unroll(const TransitionSystem& ts, int n) {
  if (n < 1) throw usage_error("unroll requires at least one frame");
  FrameMap map;
  map.k = ts.num_state_bits;
  map.m = ts.num_inputs;
  map.frames = n;
  CnfFormula out;
  for (int j = 0; j < n; ++j) out.append(rename_shift(ts.trans, j * map.frame_width()));
  out.set_num_vars(map.total_vars());
  return {std::move(out), map};
}

CnfFormula frame_formula(const CnfFormula& f, int frame, const FrameMap& map) {
  if (frame < 0 || frame > map.frames) throw usage_error("frame outside the unrolling");
  for (Var v : f.vars())
    if (v > map.k) throw usage_error("frame_formula expects a formula over state bits only");
  return rename_shift(f, frame * map.frame_width());
}

namespace {

bool step_holds(const TransitionSystem& ts, const Assignment& s, const Assignment* input,
                const Assignment& t) {
  int k = ts.num_state_bits;
  Assignment a;
  for (int i = 1; i <= k; ++i) {
    auto sv = s.value(i);
    auto tv = t.value(i);
    if (!sv.has_value() || !tv.has_value()) throw usage_error("trace state not total");
    a.set(i, *sv);
    a.set(k + ts.num_inputs + i, *tv);
  }
  if (input != nullptr) {
    for (int i = 1; i <= ts.num_inputs; ++i) {
      auto xv = input->value(k + i);
      if (!xv.has_value()) throw usage_error("trace input not total");
      a.set(k + i, *xv);
    }
    CnfFormula rest = cofactor(ts.trans, a);
    return !rest.has_empty_clause() && rest.empty();
  }
  // Inputs omitted: quantify them existentially.
  CnfFormula rest = cofactor(ts.trans, a);
  if (rest.empty()) return true;
  if (rest.has_empty_clause()) return false;
  return solve(rest).is_sat();
}

bool state_satisfies(const CnfFormula& f, const Assignment& s) {
  Assignment a;
  for (Var v : f.vars()) {
    auto val = s.value(v);
    if (!val.has_value()) throw usage_error("trace state not total over property/init vars");
    a.set(v, *val);
  }
  return evaluate(f, a);
}

}  // namespace

bool validate_trace(const TransitionSystem& ts, const Trace& trace) {
  if (trace.states.empty()) return false;
  if (trace.inputs.has_value() && trace.inputs->size() != trace.steps())
    throw usage_error("input sequence length must be one less than state count");
  if (!state_satisfies(ts.init, trace.states[0])) return false;
  for (std::size_t i = 0; i + 1 < trace.states.size(); ++i) {
    const Assignment* in =
        trace.inputs.has_value() ? &(*trace.inputs)[i] : nullptr;
    if (!step_holds(ts, trace.states[i], in, trace.states[i + 1])) return false;
  }
  return true;
}

bool is_counterexample(const TransitionSystem& ts, const Trace& trace) {
  return explain_cex_failure(ts, trace).empty();
}

std::string explain_cex_failure(const TransitionSystem& ts, const Trace& trace) {
  if (trace.states.empty()) return "trace has no states";
  if (trace.inputs.has_value() && trace.inputs->size() != trace.steps())
    return "input sequence length must be one less than state count";
  if (!state_satisfies(ts.init, trace.states[0])) return "initial state violates init";
  for (std::size_t i = 0; i + 1 < trace.states.size(); ++i) {
    const Assignment* in = trace.inputs.has_value() ? &(*trace.inputs)[i] : nullptr;
    if (!step_holds(ts, trace.states[i], in, trace.states[i + 1]))
      return "step " + std::to_string(i) + " violates the transition relation";
  }
  for (std::size_t i = 0; i + 1 < trace.states.size(); ++i)
    if (!state_satisfies(ts.property, trace.states[i]))
      return "intermediate state " + std::to_string(i) + " is bad";
  if (state_satisfies(ts.property, trace.states.back()))
    return "final state satisfies the property";
  return "";
}

}  // namespace pqc
