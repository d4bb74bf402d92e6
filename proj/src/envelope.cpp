#include "seqrate/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "seqrate/error.hpp"

namespace seqrate {

namespace {

constexpr double kSlopeMergeTol = 1e-12;

double slope_between(const EnvelopeVertex& a, const EnvelopeVertex& b) {
  return (b.value - a.value) / (b.alpha - a.alpha);
}

// > 0 when `mid` lies strictly below the chord from `lo` to `hi`.
double cross(const EnvelopeVertex& lo, const EnvelopeVertex& mid, const EnvelopeVertex& hi) {
  return (mid.alpha - lo.alpha) * (hi.value - lo.value) -
         (mid.value - lo.value) * (hi.alpha - lo.alpha);
}

bool nearly_equal_slopes(double a, double b) {
  return std::abs(a - b) <= kSlopeMergeTol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

ConcaveEnvelope::ConcaveEnvelope(std::vector<EnvelopeVertex> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2 || vertices_.front().alpha != 0.0 || vertices_.back().alpha != 1.0)
    throw InvalidInput("envelope must span [0, 1]");
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (!(vertices_[i].alpha > vertices_[i - 1].alpha))
      throw InvalidInput("envelope vertices must be strictly increasing in alpha");
    if (!std::isfinite(vertices_[i].value)) throw InvalidInput("envelope values must be finite");
  }
  for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
    if (!(slope_between(vertices_[i - 1], vertices_[i]) >
          slope_between(vertices_[i], vertices_[i + 1])))
      throw InvalidInput("envelope slopes must be strictly decreasing");
  }
}

std::vector<EnvelopeSegment> ConcaveEnvelope::segments() const {
  std::vector<EnvelopeSegment> out;
  out.reserve(vertices_.size() - 1);
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i)
    out.push_back({vertices_[i].alpha, vertices_[i + 1].alpha,
                   slope_between(vertices_[i], vertices_[i + 1])});
  return out;
}

double ConcaveEnvelope::operator()(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha outside [0, 1]");
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), alpha,
                             [](const EnvelopeVertex& v, double a) { return v.alpha < a; });
  if (it->alpha == alpha) return it->value;
  const auto& lo = *(it - 1);
  const auto& hi = *it;
  return lo.value + (alpha - lo.alpha) / (hi.alpha - lo.alpha) * (hi.value - lo.value);
}

double ConcaveEnvelope::slope(double alpha, Side side) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha outside [0, 1]");
  auto it = std::upper_bound(vertices_.begin(), vertices_.end(), alpha,
                             [](double a, const EnvelopeVertex& v) { return a < v.alpha; });
  // it points at the first vertex strictly right of alpha.
  std::size_t seg = static_cast<std::size_t>(it - vertices_.begin());
  seg = seg == 0 ? 0 : seg - 1;
  const bool on_vertex = vertices_[seg].alpha == alpha;
  if (on_vertex && side == Side::left && seg > 0) --seg;
  seg = std::min(seg, vertices_.size() - 2);
  return slope_between(vertices_[seg], vertices_[seg + 1]);
}

CumulativeFunction ConcaveEnvelope::to_cumulative() const {
  std::vector<Knot> knots;
  knots.reserve(vertices_.size());
  for (const auto& v : vertices_) knots.push_back({v.alpha, v.value, v.value});
  return CumulativeFunction(std::move(knots));
}

ConcaveEnvelope concave_envelope(const CumulativeFunction& f) {
  if (!f.finite()) throw InvalidInput("envelope requires a finite function");

  std::vector<EnvelopeVertex> points;
  points.reserve(2 * f.knots().size());
  for (const Knot& k : f.knots()) {
    if (k.alpha > 0.0) points.push_back({k.alpha, k.pre});
    points.push_back({k.alpha, k.post});
  }
  // Knots are already sorted by alpha; for equal alpha only the higher point
  // can be on the upper hull.
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.alpha < b.alpha || (a.alpha == b.alpha && a.value > b.value);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const auto& a, const auto& b) { return a.alpha == b.alpha; }),
               points.end());

  std::vector<EnvelopeVertex> hull;
  hull.reserve(points.size());
  for (const auto& p : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }

  std::vector<EnvelopeVertex> merged;
  merged.reserve(hull.size());
  for (const auto& v : hull) {
    while (merged.size() >= 2 &&
           nearly_equal_slopes(slope_between(merged[merged.size() - 2], merged.back()),
                               slope_between(merged.back(), v)))
      merged.pop_back();
    merged.push_back(v);
  }
  return ConcaveEnvelope(std::move(merged));
}

RateProfile segment_slopes(const ConcaveEnvelope& e, std::size_t k) {
  if (k == 0) throw InvalidInput("block count k must be >= 1");
  std::vector<double> rates(k);
  double prev = e(0.0);
  for (std::size_t i = 1; i <= k; ++i) {
    const double cur = e(static_cast<double>(i) / static_cast<double>(k));
    rates[i - 1] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return RateProfile(std::move(rates));
}

double legendre_value(const CumulativeFunction& f, double alpha, std::size_t slope_points) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  if (slope_points == 0) throw InvalidInput("slope grid is empty");
  if (!f.finite()) throw InvalidInput("conjugate requires a finite function");

  // sup_z (F(z) - a z) over a piecewise-linear F is attained at a knot side.
  std::vector<double> zs;
  std::vector<double> values;
  for (const Knot& k : f.knots()) {
    if (k.alpha > 0.0) {
      zs.push_back(k.alpha);
      values.push_back(k.pre);
    }
    zs.push_back(k.alpha);
    values.push_back(k.post);
  }

  const double a_max = f.at_end() / alpha;
  const double step = slope_points > 1 ? a_max / static_cast<double>(slope_points - 1) : 0.0;
  double best = kInf;
  for (std::size_t i = 0; i < slope_points; ++i) {
    const double a = static_cast<double>(i) * step;
    double b = -kInf;
    for (std::size_t p = 0; p < zs.size(); ++p) b = std::max(b, values[p] - a * zs[p]);
    best = std::min(best, a * alpha + b);
  }
  return best;
}

}  // namespace seqrate
