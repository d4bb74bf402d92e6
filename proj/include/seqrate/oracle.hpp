#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/profile.hpp"
#include "seqrate/rate_distortion.hpp"

namespace seqrate {

struct OracleOptions {
  double grid_step = 0.05;
  /// Enumerate descriptions as well instead of water-filling (k <= 2 only).
  bool exhaustive = false;
};

struct BruteForceResult {
  double min_distortion = 0.0;
  /// Rate actually sent at each time slot.
  std::vector<double> used;
  /// Description rate of each block.
  std::vector<double> descriptions;
  double grid_step = 0.0;
};

/// Largest state count the search will visit before giving up.
inline constexpr double kMaxOracleStates = 1e8;

/// Grid search over per-slot usage (capped by the increments of G and by the
/// leakage caps L(j/k) on cumulative usage) and per-block description rates
/// (block j may only be described by usage at times >= j). Minimizes the
/// average of D(k * description). Does not use envelopes or effective rate
/// functions.
BruteForceResult brute_force_min_distortion(const CumulativeFunction& g,
                                            const CumulativeFunction& l, const RdCurve& curve,
                                            std::size_t k, const OracleOptions& options = {});

/// Checks the oracle's argmin against the search constraints; returns an
/// empty string when all hold, otherwise the first violated one.
std::string check_oracle_constraints(const BruteForceResult& result, const CumulativeFunction& g,
                                     const CumulativeFunction& l, std::size_t k,
                                     double tol = 1e-12);

enum class ConvexKind { square, exp, hinge };

struct ConvexTest {
  ConvexKind kind = ConvexKind::square;
  double threshold = 0.0;  // hinge only

  static ConvexTest square() { return {ConvexKind::square, 0.0}; }
  static ConvexTest exp() { return {ConvexKind::exp, 0.0}; }
  static ConvexTest hinge(double c) { return {ConvexKind::hinge, c}; }

  double operator()(double x) const;
};

struct MajorizationCheck {
  /// False when x does not majorize y after sorting both in decreasing order.
  bool precondition_ok = false;
  bool holds = false;
  double lhs = 0.0;  // sum f(x_i)
  double rhs = 0.0;  // sum f(y_i)
};

/// sum f(x_i) >= sum f(y_i) - 1e-12 for x majorizing y. Both sequences are
/// compared in decreasing order, the setting in which the inequality holds
/// for every convex f.
MajorizationCheck majorization_property_check(const RateProfile& x, const RateProfile& y,
                                              const ConvexTest& f);

}  // namespace seqrate
