// SPDX-License-Identifier: MIT
// Copyright (c) 2026 The pqecheck authors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pqc {

// Contract violation by the caller (bad arguments, misuse of an operation).
class usage_error : public std::invalid_argument {
public:
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input text (.sts, .pqe, DIMACS, cex files).
class parse_error : public std::runtime_error {
public:
  parse_error(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

// A solver or engine ran out of its configured resource budget.
class timeout_error : public std::runtime_error {
public:
  explicit timeout_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pqc
