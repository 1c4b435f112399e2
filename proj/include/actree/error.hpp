#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a numeric routine (negative time, p > 1, bad epsilon).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// p = 1 has no finite exponential rate.
class RateUndefined : public Error {
 public:
  using Error::Error;
};

class StateSpaceLimit : public Error {
 public:
  StateSpaceLimit(std::size_t limit)
      : Error("reachable state space exceeds the limit of " + std::to_string(limit) + " states"),
        limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

/// Immediate transitions of a composed IMC did not converge to a unique tangible state.
class NonConfluent : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string found, std::vector<std::string> expected)
      : Error(format(line, column, found, expected)),
        line_(line),
        column_(column),
        found_(std::move(found)),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& found() const { return found_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& found,
                            const std::vector<std::string>& expected) {
    std::string msg = std::to_string(line) + ":" + std::to_string(column) + ": syntax error: found " + found;
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += i + 1 == expected.size() ? " or " : ", ";
        msg += expected[i];
      }
    }
    return msg;
  }

  std::size_t line_;
  std::size_t column_;
  std::string found_;
  std::vector<std::string> expected_;
};

}  // namespace actree
