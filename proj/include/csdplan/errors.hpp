#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csdplan {

// A model precondition was violated (cores out of range, sd < 1, nonpositive ratio, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A named workload, host, CSD, measurement or CPU does not exist.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed input text. `locus` is either "line L, column C" or a JSON field path.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string locus, const std::string& what)
      : std::runtime_error(locus.empty() ? what : locus + ": " + what), locus_(std::move(locus)) {}

  const std::string& locus() const noexcept { return locus_; }

 private:
  std::string locus_;
};

// Semantic validation failure; carries every violated invariant, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "calibration invalid (" + std::to_string(issues.size()) + " issue" +
                      (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) out += "\n  - " + i;
    return out;
  }

  std::vector<std::string> issues_;
};

// A request would produce more output than the caller allows (e.g. sweep cell cap).
class TooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Two routes that must agree by contract (closed form vs. oracle) disagreed.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace csdplan
