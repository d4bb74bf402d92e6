#include "seqrate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "seqrate/error.hpp"
#include "seqrate/schedule.hpp"

namespace seqrate {

namespace {

constexpr double kSlack = 1e-12;

// Multiples of step in [0, cap], plus cap itself when it is off the grid.
std::vector<double> grid_values(double cap, double step) {
  std::vector<double> out;
  if (cap <= 0.0) return {0.0};
  const auto n = static_cast<std::size_t>(std::floor(cap / step + 1e-9));
  out.reserve(n + 2);
  for (std::size_t m = 0; m <= n; ++m) out.push_back(std::min(cap, static_cast<double>(m) * step));
  if (cap - out.back() > kSlack) out.push_back(cap);
  return out;
}

struct Allocation {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> descriptions;
};

class Search {
 public:
  Search(const RdCurve& curve, std::size_t k, double step)
      : curve_(curve), k_(k), kd_(static_cast<double>(k)), step_(step) {}

  double cost(const std::vector<double>& r) const {
    double sum = 0.0;
    for (double rate : r) sum += curve_.distortion_at_rate(kd_ * rate);
    return sum / kd_;
  }

  static double spread(const std::vector<double>& r) {
    double sum = 0.0;
    for (double v : r) sum += v * v;
    return sum;
  }

  // supply[j] = usage at times >= j.
  static std::vector<double> suffix_supply(const std::vector<double>& used) {
    std::vector<double> supply(used.size() + 1, 0.0);
    for (std::size_t j = used.size(); j-- > 0;) supply[j] = supply[j + 1] + used[j];
    return supply;
  }

  // Continuous water-filling on the nested suffix constraints
  // sum_{i >= j} r_i <= supply[j]. Every block shares the same convex cost, so
  // the most balanced feasible vector is optimal: block j takes the larger of
  // its fair share of what remains and the least average that later suffix
  // caps force onto blocks j..m-1.
  Allocation water_fill(const std::vector<double>& used) const {
    const auto supply = suffix_supply(used);
    std::vector<double> r(k_, 0.0);
    double remaining = supply[0];
    for (std::size_t j = 0; j < k_; ++j) {
      remaining = std::min(remaining, supply[j]);
      double level = remaining / static_cast<double>(k_ - j);
      for (std::size_t m = j + 1; m < k_; ++m)
        level = std::max(level, (remaining - supply[m]) / static_cast<double>(m - j));
      r[j] = std::max(0.0, std::min(level, remaining));
      remaining -= r[j];
    }
    return {cost(r), std::move(r)};
  }

  // Every gridded description vector, chosen from the last block backwards so
  // that each choice only has to respect its own suffix bound.
  Allocation enumerate(const std::vector<double>& used) const {
    const auto supply = suffix_supply(used);
    Allocation best;
    std::vector<double> r(k_, 0.0);
    std::function<void(std::size_t, double)> visit = [&](std::size_t level, double tail) {
      const std::size_t j = level - 1;
      const double cap = supply[j] - tail;
      for (double v : grid_values(std::max(0.0, cap), step_)) {
        r[j] = v;
        if (j == 0) {
          // Ties go to the most balanced vector, matching water_fill.
          const double c = cost(r);
          if (c < best.value - kSlack ||
              (c <= best.value + kSlack && spread(r) < spread(best.descriptions) - kSlack))
            best = {c, r};
        } else {
          visit(j, tail + v);
        }
      }
      r[j] = 0.0;
    };
    visit(k_, 0.0);
    return best;
  }

 private:
  const RdCurve& curve_;
  std::size_t k_;
  double kd_;
  double step_;
};

}  // namespace

BruteForceResult brute_force_min_distortion(const CumulativeFunction& g,
                                            const CumulativeFunction& l, const RdCurve& curve,
                                            std::size_t k, const OracleOptions& options) {
  if (k < 1 || k > 4) throw InvalidInput("oracle supports k in 1..4");
  if (!(options.grid_step >= 0.01)) throw InvalidInput("oracle grid_step must be >= 0.01");
  if (options.exhaustive && k > 2) throw InvalidInput("exhaustive oracle supports k <= 2");
  if (!g.finite()) throw InvalidInput("rate function must be finite");

  const RateProfile available = rate_profile(g, k);
  const double kd = static_cast<double>(k);
  std::vector<double> caps(k);
  for (std::size_t j = 0; j < k; ++j) caps[j] = l(static_cast<double>(j + 1) / kd);

  double states = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double per_slot = std::floor(available[i] / options.grid_step) + 2.0;
    states *= per_slot;
    if (options.exhaustive) states *= per_slot;
  }
  if (states > kMaxOracleStates) throw InvalidInput("oracle search space exceeds 1e8 states");

  const Search search(curve, k, options.grid_step);
  BruteForceResult best;
  best.grid_step = options.grid_step;
  best.min_distortion = std::numeric_limits<double>::infinity();

  std::vector<double> used(k, 0.0);
  std::function<void(std::size_t, double)> visit = [&](std::size_t i, double prefix) {
    if (i == k) {
      Allocation a = options.exhaustive ? search.enumerate(used) : search.water_fill(used);
      if (a.value < best.min_distortion - kSlack) {
        best.min_distortion = a.value;
        best.used = used;
        best.descriptions = std::move(a.descriptions);
      }
      return;
    }
    const double cap = std::min(available[i], caps[i] - prefix);
    if (cap < -kSlack) return;
    for (double v : grid_values(std::max(0.0, cap), options.grid_step)) {
      used[i] = v;
      visit(i + 1, prefix + v);
    }
    used[i] = 0.0;
  };
  visit(0, 0.0);

  if (!std::isfinite(best.min_distortion))
    throw InvalidInput("leakage caps admit no transmission schedule");
  return best;
}

std::string check_oracle_constraints(const BruteForceResult& result, const CumulativeFunction& g,
                                     const CumulativeFunction& l, std::size_t k, double tol) {
  if (result.used.size() != k || result.descriptions.size() != k) return "profile length";
  const RateProfile available = rate_profile(g, k);
  const double kd = static_cast<double>(k);
  double prefix = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (result.used[i] < -tol || result.used[i] > available[i] + tol) return "usage within availability";
    if (result.descriptions[i] < -tol) return "nonnegative description";
    prefix += result.used[i];
    if (prefix > l(static_cast<double>(i + 1) / kd) + tol) return "prefix leakage";
  }
  double supply = 0.0;
  double described = 0.0;
  for (std::size_t j = k; j-- > 0;) {
    supply += result.used[j];
    described += result.descriptions[j];
    if (described > supply + tol) return "causal supply";
  }
  return {};
}

double ConvexTest::operator()(double x) const {
  switch (kind) {
    case ConvexKind::square:
      return x * x;
    case ConvexKind::exp:
      return std::exp(x);
    case ConvexKind::hinge:
      return std::max(0.0, x - threshold);
  }
  return 0.0;
}

MajorizationCheck majorization_property_check(const RateProfile& x, const RateProfile& y,
                                              const ConvexTest& f) {
  if (x.size() != y.size()) throw InvalidInput("profiles differ in length");
  auto descending = [](const RateProfile& p) {
    std::vector<double> v(p.rates().begin(), p.rates().end());
    std::sort(v.begin(), v.end(), std::greater<>());
    return RateProfile(std::move(v));
  };
  MajorizationCheck out;
  out.precondition_ok = majorizes(descending(x), descending(y));
  for (double v : x.rates()) out.lhs += f(v);
  for (double v : y.rates()) out.rhs += f(v);
  out.holds = out.lhs >= out.rhs - 1e-12;
  return out;
}

}  // namespace seqrate
