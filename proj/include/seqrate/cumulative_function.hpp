#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqrate/profile.hpp"

namespace seqrate {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Knots closer than this in alpha are rejected as degenerate.
inline constexpr double kMinKnotSpacing = 1e-12;

enum class Side { left, right };

/// A breakpoint of a piecewise-linear cumulative function.
///
/// `post` is the value at `alpha` (functions are right-continuous) and `pre`
/// is the left limit. Between consecutive knots the function interpolates
/// linearly from `post` of the left knot to `pre` of the right knot. The
/// `pre` entry of the knot at alpha = 0 has no left limit to describe and is
/// only required not to exceed `post`.
struct Knot {
  double alpha = 0.0;
  double pre = 0.0;
  double post = 0.0;

  friend bool operator==(const Knot&, const Knot&) = default;
};

/// Rate functions must stay finite; leakage functions may use +inf.
enum class Role { rate, leakage };

enum class Property {
  cumulation,
  zero_initial_value,
  right_continuity,
  domain_coverage,
  finite_values,
};

const char* to_string(Property p);

struct Violation {
  Property property;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(Property p) const;
  std::string summary() const;
};

/// Checks the regularity properties of an arbitrary knot list. Never throws.
ValidationReport validate_regular(std::span<const Knot> knots, Role role = Role::rate);

/// Regular cumulative function on [0, 1]: non-decreasing, right-continuous,
/// zero at the origin, piecewise linear with optional jumps.
///
/// Instances are always valid; the constructor throws InvalidInput with the
/// validation summary otherwise. A leakage function may take the value +inf
/// (including everywhere, meaning "unconstrained"), but only through jumps:
/// a linear segment never climbs to +inf.
class CumulativeFunction {
 public:
  explicit CumulativeFunction(std::vector<Knot> knots, Role role = Role::rate);

  /// slope * alpha.
  static CumulativeFunction line(double slope);
  /// 0 on [0, at), height on [at, 1]. `at` may be 1 (jump at the end).
  static CumulativeFunction step(double at, double height);
  /// +inf everywhere; the "no leakage constraint" leakage function.
  static CumulativeFunction unconstrained();

  std::span<const Knot> knots() const { return knots_; }
  bool finite() const;
  bool unconstrained_everywhere() const;

  /// Right-continuous value F(alpha).
  double operator()(double alpha) const { return evaluate(alpha, Side::right); }
  double evaluate(double alpha, Side side) const;

  double at_end() const { return knots_.back().post; }

  friend bool operator==(const CumulativeFunction&, const CumulativeFunction&) = default;

 private:
  std::vector<Knot> knots_;
};

/// Sorted union of the knot positions of both functions.
std::vector<double> merged_alphas(const CumulativeFunction& a, const CumulativeFunction& b);

/// Pointwise comparison at every knot of either function, both sides.
bool equivalent(const CumulativeFunction& a, const CumulativeFunction& b, double tol = 1e-12);

/// alpha -> max{0, F(alpha) - c}. Knots are inserted where F crosses c.
CumulativeFunction clip_shift(const CumulativeFunction& f, double c);

/// Supremum of G - L over [0, 1], taken over both sides of every knot.
/// Ties resolve to the smallest alpha (left side before right side).
struct Supremum {
  double value = -kInf;
  double alpha = 0.0;
  Side side = Side::right;
};

Supremum sup_difference(const CumulativeFunction& g, const CumulativeFunction& l);

struct LossyMode {};
struct LosslessMode {
  double entropy = 0.0;
};
using EffectiveMode = std::variant<LossyMode, LosslessMode>;

struct EffectiveCrdf {
  CumulativeFunction function;
  /// Amount of rate withheld, max{0, ...}.
  double shift = 0.0;
  /// Where the withheld amount is determined; lossy mode only.
  Supremum supremum;
};

EffectiveCrdf effective_crdf_detail(const CumulativeFunction& g, const CumulativeFunction& l,
                                    EffectiveMode mode = LossyMode{});

CumulativeFunction effective_crdf(const CumulativeFunction& g, const CumulativeFunction& l,
                                  EffectiveMode mode = LossyMode{});

/// Levels of F sampled on the grid j/k; the value on [j/k, (j+1)/k) is
/// levels[j] and the value at 1 is levels[k].
class StepFunction {
 public:
  StepFunction(std::size_t k, std::vector<double> levels);

  std::size_t k() const { return k_; }
  std::span<const double> levels() const { return levels_; }
  double operator()(double alpha) const;

  /// levels[j] - levels[j-1] for j = 1..k.
  RateProfile increments() const;
  /// The same function as knots at every grid point.
  CumulativeFunction to_cumulative() const;

 private:
  std::size_t k_;
  std::vector<double> levels_;
};

StepFunction sample_grid(const CumulativeFunction& f, std::size_t k);

}  // namespace seqrate
