#pragma once

// Fixed-seed acceptance suite behind `bmot paper-check` and the acceptance
// test binary. One result per criterion 1..10.

#include <functional>
#include <string>
#include <vector>

#include "bmot/io.hpp"

namespace bmot::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// Deterministic numbers only; timings live in `seconds`.
  io::Json metrics;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  /// Empty means all ten.
  std::vector<int> criteria;
  /// Mutation smoke test: solve the Riccati equation with the sign of the
  /// cross terms flipped, A Suu A - A Suv + Svu A = Svv.
  bool inject_nare_sign_fault = false;
};

struct Run {
  std::vector<CriterionResult> results;

  bool pass() const;
  /// Report document; byte-identical across runs with the same options.
  io::Json report() const;
};

inline constexpr int kCriteria = 10;

Run run(const Options& opts, const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  1  title  detail  (1.23 s)".
std::string format_line(const CriterionResult& r);

}  // namespace bmot::acceptance
