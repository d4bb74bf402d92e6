#include "seqrate/cumulative_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqrate/error.hpp"

namespace seqrate {

const char* to_string(Property p) {
  switch (p) {
    case Property::cumulation:
      return "cumulation";
    case Property::zero_initial_value:
      return "zero-initial-value";
    case Property::right_continuity:
      return "right-continuity";
    case Property::domain_coverage:
      return "domain-coverage";
    case Property::finite_values:
      return "finite-values";
  }
  return "unknown";
}

bool ValidationReport::has(Property p) const {
  return std::any_of(violations.begin(), violations.end(),
                     [p](const Violation& v) { return v.property == p; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << to_string(violations[i].property) << ": " << violations[i].message;
  }
  return out.str();
}

namespace {

void flag(ValidationReport& report, Property p, std::string msg) {
  report.violations.push_back({p, std::move(msg)});
}

std::string at_knot(std::size_t i) { return " at knot " + std::to_string(i); }

}  // namespace

ValidationReport validate_regular(std::span<const Knot> knots, Role role) {
  ValidationReport report;
  if (knots.size() < 2) {
    flag(report, Property::domain_coverage, "need knots at alpha = 0 and alpha = 1");
    return report;
  }
  if (knots.front().alpha != 0.0)
    flag(report, Property::domain_coverage, "first knot must sit at alpha = 0");
  if (knots.back().alpha != 1.0)
    flag(report, Property::domain_coverage, "last knot must sit at alpha = 1");

  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    if (!std::isfinite(k.alpha)) {
      flag(report, Property::domain_coverage, "non-finite alpha" + at_knot(i));
      continue;
    }
    if (k.alpha < 0.0 || k.alpha > 1.0)
      flag(report, Property::domain_coverage, "alpha outside [0, 1]" + at_knot(i));
    if (i > 0 && !(k.alpha - knots[i - 1].alpha >= kMinKnotSpacing))
      flag(report, Property::domain_coverage,
           "alphas must increase by at least 1e-12" + at_knot(i));
  }

  bool values_ok = true;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    for (double v : {k.pre, k.post}) {
      if (std::isnan(v)) {
        flag(report, Property::finite_values, "NaN value" + at_knot(i));
        values_ok = false;
      } else if (std::isinf(v) && (role == Role::rate || v < 0)) {
        flag(report, Property::finite_values,
             std::string(v < 0 ? "-inf" : "+inf") + " value not allowed" + at_knot(i));
        values_ok = false;
      }
    }
  }
  if (!values_ok) return report;

  const double origin = knots.front().post;
  const bool open_leakage = role == Role::leakage && std::isinf(origin);
  if (origin != 0.0 && !open_leakage)
    flag(report, Property::zero_initial_value, "F(0) must be 0");

  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].pre > knots[i].post)
      flag(report, Property::right_continuity, "pre exceeds post" + at_knot(i));
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double from = knots[i].post;
    const double to = knots[i + 1].pre;
    if (from > to)
      flag(report, Property::cumulation, "decreasing segment after" + at_knot(i));
    else if (std::isinf(to) && !std::isinf(from))
      flag(report, Property::cumulation,
           "linear segment cannot reach +inf; use a jump" + at_knot(i + 1));
  }
  return report;
}

CumulativeFunction::CumulativeFunction(std::vector<Knot> knots, Role role)
    : knots_(std::move(knots)) {
  auto report = validate_regular(knots_, role);
  if (!report.valid()) throw InvalidInput("invalid cumulative function: " + report.summary());
}

CumulativeFunction CumulativeFunction::line(double slope) {
  return CumulativeFunction({{0.0, 0.0, 0.0}, {1.0, slope, slope}});
}

CumulativeFunction CumulativeFunction::step(double at, double height) {
  if (at <= 0.0 || at > 1.0) throw InvalidInput("step position must lie in (0, 1]");
  if (at == 1.0) return CumulativeFunction({{0.0, 0.0, 0.0}, {1.0, 0.0, height}});
  return CumulativeFunction({{0.0, 0.0, 0.0}, {at, 0.0, height}, {1.0, height, height}});
}

CumulativeFunction CumulativeFunction::unconstrained() {
  return CumulativeFunction({{0.0, kInf, kInf}, {1.0, kInf, kInf}}, Role::leakage);
}

bool CumulativeFunction::finite() const {
  return std::all_of(knots_.begin(), knots_.end(), [](const Knot& k) {
    return std::isfinite(k.pre) && std::isfinite(k.post);
  });
}

bool CumulativeFunction::unconstrained_everywhere() const {
  return std::isinf(knots_.front().post);
}

double CumulativeFunction::evaluate(double alpha, Side side) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha outside [0, 1]");
  if (side == Side::left && alpha == 0.0)
    throw InvalidInput("left limit is undefined at alpha = 0");

  auto it = std::lower_bound(knots_.begin(), knots_.end(), alpha,
                             [](const Knot& k, double a) { return k.alpha < a; });
  if (it != knots_.end() && it->alpha == alpha) return side == Side::right ? it->post : it->pre;

  // Strictly inside the segment (it-1, it).
  const Knot& lo = *(it - 1);
  const Knot& hi = *it;
  if (std::isinf(lo.post)) return kInf;
  const double t = (alpha - lo.alpha) / (hi.alpha - lo.alpha);
  return lo.post + t * (hi.pre - lo.post);
}

std::vector<double> merged_alphas(const CumulativeFunction& a, const CumulativeFunction& b) {
  std::vector<double> out;
  out.reserve(a.knots().size() + b.knots().size());
  for (const Knot& k : a.knots()) out.push_back(k.alpha);
  for (const Knot& k : b.knots()) out.push_back(k.alpha);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool equivalent(const CumulativeFunction& a, const CumulativeFunction& b, double tol) {
  auto close = [tol](double x, double y) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::abs(x - y) <= tol;
  };
  for (double alpha : merged_alphas(a, b)) {
    if (!close(a(alpha), b(alpha))) return false;
    if (alpha > 0.0 && !close(a.evaluate(alpha, Side::left), b.evaluate(alpha, Side::left)))
      return false;
  }
  return true;
}

CumulativeFunction clip_shift(const CumulativeFunction& f, double c) {
  if (!(c >= 0.0) || std::isinf(c)) throw InvalidInput("clip offset must be finite and >= 0");
  auto clip = [c](double v) { return std::max(0.0, v - c); };

  const auto knots = f.knots();
  std::vector<Knot> out;
  out.reserve(knots.size() + 1);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    if (i > 0) {
      // Crossing of level c strictly inside the preceding segment.
      const Knot& prev = knots[i - 1];
      const double from = prev.post;
      const double to = k.pre;
      if (std::isfinite(to) && from < c && to > c) {
        const double alpha = prev.alpha + (c - from) / (to - from) * (k.alpha - prev.alpha);
        if (alpha - prev.alpha >= kMinKnotSpacing && k.alpha - alpha >= kMinKnotSpacing)
          out.push_back({alpha, 0.0, 0.0});
      }
    }
    out.push_back({k.alpha, clip(k.pre), clip(k.post)});
  }
  return CumulativeFunction(std::move(out), f.finite() ? Role::rate : Role::leakage);
}

Supremum sup_difference(const CumulativeFunction& g, const CumulativeFunction& l) {
  Supremum best;
  auto consider = [&best](double value, double alpha, Side side) {
    if (std::isnan(value)) throw InvalidInput("undefined difference inf - inf");
    if (value > best.value) best = {value, alpha, side};
  };
  for (double alpha : merged_alphas(g, l)) {
    if (alpha > 0.0)
      consider(g.evaluate(alpha, Side::left) - l.evaluate(alpha, Side::left), alpha, Side::left);
    consider(g(alpha) - l(alpha), alpha, Side::right);
  }
  return best;
}

EffectiveCrdf effective_crdf_detail(const CumulativeFunction& g, const CumulativeFunction& l,
                                    EffectiveMode mode) {
  if (!g.finite()) throw InvalidInput("rate function must be finite");
  if (const auto* lossless = std::get_if<LosslessMode>(&mode)) {
    if (!(lossless->entropy >= 0.0)) throw InvalidInput("entropy must be >= 0");
    const double shift = std::max(0.0, g.at_end() - lossless->entropy);
    return {clip_shift(g, shift), shift, {}};
  }
  const Supremum sup = sup_difference(g, l);
  const double shift = std::max(0.0, sup.value);
  return {clip_shift(g, shift), shift, sup};
}

CumulativeFunction effective_crdf(const CumulativeFunction& g, const CumulativeFunction& l,
                                  EffectiveMode mode) {
  return effective_crdf_detail(g, l, mode).function;
}

StepFunction::StepFunction(std::size_t k, std::vector<double> levels)
    : k_(k), levels_(std::move(levels)) {
  if (k_ == 0) throw InvalidInput("block count k must be >= 1");
  if (levels_.size() != k_ + 1) throw InvalidInput("step function needs k + 1 levels");
  if (levels_.front() != 0.0) throw InvalidInput("step function must start at 0");
  for (std::size_t j = 1; j < levels_.size(); ++j) {
    if (!std::isfinite(levels_[j]) || levels_[j] < levels_[j - 1])
      throw InvalidInput("step levels must be finite and non-decreasing");
  }
}

double StepFunction::operator()(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha outside [0, 1]");
  const auto j = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(k_)));
  return levels_[std::min(j, k_)];
}

RateProfile StepFunction::increments() const {
  std::vector<double> rates(k_);
  for (std::size_t j = 1; j <= k_; ++j) rates[j - 1] = levels_[j] - levels_[j - 1];
  return RateProfile(std::move(rates));
}

CumulativeFunction StepFunction::to_cumulative() const {
  std::vector<Knot> knots;
  knots.reserve(k_ + 1);
  knots.push_back({0.0, 0.0, levels_[0]});
  for (std::size_t j = 1; j <= k_; ++j) {
    const double alpha = static_cast<double>(j) / static_cast<double>(k_);
    knots.push_back({alpha, levels_[j - 1], levels_[j]});
  }
  return CumulativeFunction(std::move(knots));
}

StepFunction sample_grid(const CumulativeFunction& f, std::size_t k) {
  if (k == 0) throw InvalidInput("block count k must be >= 1");
  if (!f.finite()) throw InvalidInput("cannot sample an infinite function");
  std::vector<double> levels(k + 1);
  for (std::size_t j = 0; j <= k; ++j)
    levels[j] = f(static_cast<double>(j) / static_cast<double>(k));
  return StepFunction(k, std::move(levels));
}

RateProfile::RateProfile(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) throw InvalidInput("rate profile needs at least one block");
  for (double r : rates_) {
    if (!std::isfinite(r) || r < 0.0) throw InvalidInput("rates must be finite and >= 0");
  }
}

double RateProfile::total() const {
  double sum = 0.0;
  for (double r : rates_) sum += r;
  return sum;
}

std::vector<double> RateProfile::prefix_sums() const {
  std::vector<double> out(rates_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) out[i] = sum += rates_[i];
  return out;
}

}  // namespace seqrate
