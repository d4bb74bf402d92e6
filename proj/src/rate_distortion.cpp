#include "seqrate/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqrate/error.hpp"

namespace seqrate {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kPmfTol = 1e-12;

bool uniform(std::span<const double> pmf) {
  const double target = 1.0 / static_cast<double>(pmf.size());
  return std::all_of(pmf.begin(), pmf.end(),
                     [target](double p) { return std::abs(p - target) <= kPmfTol; });
}

// Smallest nonzero gap between finite entries; sets the distortion scale for
// the slope sweep.
double distortion_scale(const DistortionMatrix& m) {
  double scale = kInfinity;
  for (const auto& row : m) {
    for (double a : row) {
      for (double b : row) {
        if (std::isfinite(a) && std::isfinite(b) && a != b)
          scale = std::min(scale, std::abs(a - b));
      }
    }
  }
  return std::isfinite(scale) ? scale : 1.0;
}

}  // namespace

SourceModel::SourceModel(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw InvalidInput("pmf needs at least one letter");
  double sum = 0.0;
  for (double p : pmf_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidInput("pmf entries must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfTol) throw InvalidInput("pmf must sum to 1");
}

bool SourceModel::uniform_binary() const { return pmf_.size() == 2 && uniform(pmf_); }

double entropy(const SourceModel& source) {
  double h = 0.0;
  for (double p : source.pmf()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

DistortionSpec::DistortionSpec(DistortionKind kind, DistortionMatrix values)
    : kind_(kind), values_(std::move(values)) {}

DistortionSpec DistortionSpec::hamming(std::size_t alphabet_size) {
  if (alphabet_size == 0) throw InvalidInput("alphabet must be non-empty");
  DistortionMatrix m(alphabet_size, std::vector<double>(alphabet_size, 1.0));
  for (std::size_t i = 0; i < alphabet_size; ++i) m[i][i] = 0.0;
  return DistortionSpec(DistortionKind::hamming, std::move(m));
}

DistortionSpec DistortionSpec::erasure() {
  return DistortionSpec(DistortionKind::erasure,
                        {{0.0, kInfinity, 1.0}, {kInfinity, 0.0, 1.0}});
}

DistortionSpec DistortionSpec::log_loss() { return DistortionSpec(DistortionKind::log_loss, {}); }

DistortionSpec DistortionSpec::from_matrix(DistortionMatrix values) {
  if (values.empty() || values.front().empty())
    throw InvalidInput("distortion matrix must be non-empty");
  const std::size_t cols = values.front().size();
  for (const auto& row : values) {
    if (row.size() != cols) throw InvalidInput("distortion matrix rows differ in length");
    bool finite_entry = false;
    for (double d : row) {
      if (std::isnan(d) || d < 0.0) throw InvalidInput("distortion entries must be >= 0");
      finite_entry = finite_entry || std::isfinite(d);
    }
    if (!finite_entry) throw InvalidInput("distortion row has no finite entry");
  }
  return DistortionSpec(DistortionKind::matrix, std::move(values));
}

const DistortionMatrix& DistortionSpec::matrix() const {
  if (!has_matrix()) throw InvalidInput("log-loss distortion has no finite matrix");
  return values_;
}

std::size_t DistortionSpec::reconstruction_size() const { return matrix().front().size(); }

namespace {

void check_shapes(const SourceModel& source, const DistortionSpec& spec) {
  if (spec.matrix().size() != source.alphabet_size())
    throw InvalidInput("distortion matrix rows must match the source alphabet");
}

}  // namespace

double zero_rate_distortion(const SourceModel& source, const DistortionSpec& spec) {
  check_shapes(source, spec);
  const auto& m = spec.matrix();
  const auto pmf = source.pmf();
  double best = kInfinity;
  for (std::size_t col = 0; col < spec.reconstruction_size(); ++col) {
    double expected = 0.0;
    for (std::size_t x = 0; x < pmf.size(); ++x) {
      if (pmf[x] > 0.0) expected += pmf[x] * m[x][col];
    }
    best = std::min(best, expected);
  }
  return best;
}

double min_attainable_distortion(const SourceModel& source, const DistortionSpec& spec) {
  check_shapes(source, spec);
  const auto& m = spec.matrix();
  const auto pmf = source.pmf();
  double total = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    if (pmf[x] > 0.0) total += pmf[x] * *std::min_element(m[x].begin(), m[x].end());
  }
  return total;
}

RdCurve RdCurve::linear(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("linear R(D) needs finite c > 0");
  return RdCurve(LinearRd{c}, c);
}

RdCurve RdCurve::binary_hamming(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability outside [0, 1]");
  const double q = std::min(p, 1.0 - p);
  return RdCurve(BinaryHammingRd{q}, q);
}

RdCurve RdCurve::sampled(std::vector<RdPoint> points) {
  if (points.empty()) throw InvalidInput("sampled curve needs at least one point");
  if (points.front().rate != 0.0) throw InvalidInput("sampled curve must start at rate 0");
  for (const auto& p : points) {
    if (!std::isfinite(p.rate) || !std::isfinite(p.distortion) || p.distortion < 0.0)
      throw InvalidInput("sampled curve points must be finite with D >= 0");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].rate > points[i - 1].rate))
      throw InvalidInput("sampled curve rates must be strictly increasing");
    if (points[i].distortion > points[i - 1].distortion)
      throw InvalidInput("sampled curve must be non-increasing");
  }
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    const auto& c = points[i + 1];
    const double s1 = (b.distortion - a.distortion) / (b.rate - a.rate);
    const double s2 = (c.distortion - b.distortion) / (c.rate - b.rate);
    if (s2 < s1 - 1e-9 * std::max(1.0, std::abs(s1)))
      throw InvalidInput("sampled curve must be convex");
  }
  const double d_max = points.front().distortion;
  return RdCurve(SampledRd{std::move(points)}, d_max);
}

double RdCurve::floor() const {
  if (const auto* s = std::get_if<SampledRd>(&form_)) return s->points.back().distortion;
  return 0.0;
}

double RdCurve::distortion_at_rate(double rate) const {
  if (!(rate >= 0.0)) throw InvalidInput("rate must be >= 0");
  if (const auto* lin = std::get_if<LinearRd>(&form_)) return std::max(0.0, lin->c - rate);

  if (const auto* ham = std::get_if<BinaryHammingRd>(&form_)) {
    const double target = binary_entropy(ham->p) - rate;
    if (target <= 0.0) return 0.0;
    // h is increasing on [0, p]; solve h(D) = target.
    double lo = 0.0;
    double hi = ham->p;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (binary_entropy(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const auto& pts = std::get<SampledRd>(form_).points;
  if (rate >= pts.back().rate) return pts.back().distortion;
  auto it = std::upper_bound(pts.begin(), pts.end(), rate,
                             [](double r, const RdPoint& p) { return r < p.rate; });
  const auto& lo = *(it - 1);
  const auto& hi = *it;
  const double t = (rate - lo.rate) / (hi.rate - lo.rate);
  return lo.distortion + t * (hi.distortion - lo.distortion);
}

RdCurve closed_form_curve(ClosedForm kind, const SourceModel& source) {
  switch (kind) {
    case ClosedForm::erasure:
      if (!source.uniform_binary())
        throw InvalidInput("erasure closed form requires a uniform binary source");
      return RdCurve::linear(1.0);
    case ClosedForm::log_loss: {
      const double h = entropy(source);
      if (h <= 0.0) throw InvalidInput("log-loss closed form requires H(X) > 0");
      return RdCurve::linear(h);
    }
    case ClosedForm::hamming_binary:
      if (source.alphabet_size() != 2)
        throw InvalidInput("binary Hamming closed form requires a binary source");
      return RdCurve::binary_hamming(source.pmf()[0]);
  }
  throw InvalidInput("unsupported closed form");
}

namespace {

struct BaRun {
  BaPoint point;
  /// R(D) >= intercept + slope * D for every D, valid at any iteration.
  double intercept = -kInfinity;
  bool converged = false;
};

BaRun run_blahut_arimoto(const SourceModel& source, const DistortionSpec& spec, double slope,
                         std::size_t max_iterations, double tolerance) {
  if (!(slope <= 0.0)) throw InvalidInput("slope parameter must be <= 0");
  check_shapes(source, spec);
  const auto& d = spec.matrix();
  const auto pmf = source.pmf();
  const std::size_t nx = pmf.size();
  const std::size_t ny = spec.reconstruction_size();

  // weight[x][y] = 2^{slope d(x,y)}, zero on excluded (infinite) transitions.
  std::vector<std::vector<double>> weight(nx, std::vector<double>(ny, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      if (std::isfinite(d[x][y])) weight[x][y] = std::exp2(slope * d[x][y]);
    }
  }

  std::vector<double> q(ny, 1.0 / static_cast<double>(ny));
  std::vector<double> z(nx);
  std::vector<double> c(ny);
  BaRun out;
  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    double mean_log_z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      z[x] = 0.0;
      for (std::size_t y = 0; y < ny; ++y) z[x] += q[y] * weight[x][y];
      if (pmf[x] == 0.0) continue;
      if (!(z[x] > 0.0)) throw InvalidInput("source letter has no reachable reconstruction");
      mean_log_z += pmf[x] * std::log2(z[x]);
    }
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      if (pmf[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) c[y] += pmf[x] * weight[x][y] / z[x];
    }

    // Q(y|x) = q(y) w(x,y) / z(x); the new output marginal is q(y) c(y).
    double rate = 0.0;
    double distortion = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (pmf[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        const double cond = q[y] * weight[x][y] / z[x];
        if (cond <= 0.0) continue;
        distortion += pmf[x] * cond * d[x][y];
        rate += pmf[x] * cond * std::log2(cond / (q[y] * c[y]));
      }
    }
    double max_log_c = -kInfinity;
    double mean_log_c = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      if (q[y] <= 0.0 || c[y] <= 0.0) continue;
      const double lc = std::log2(c[y]);
      max_log_c = std::max(max_log_c, lc);
      mean_log_c += q[y] * c[y] * lc;
    }
    // Blahut lower bound; the q-average of c is 1, so max_log_c >= 0 up to rounding.
    out.point = {std::max(0.0, rate), distortion, std::max(0.0, max_log_c - mean_log_c), iter};
    out.intercept = -mean_log_z - std::max(0.0, max_log_c);
    if (out.point.gap <= tolerance) {
      out.converged = true;
      return out;
    }
    for (std::size_t y = 0; y < ny; ++y) q[y] *= c[y];
  }
  return out;
}

// Lower convex interpolation of achievable points at `distortion`.
double achievable_rate_at(const std::vector<RdPoint>& points, double distortion) {
  double best = kInfinity;
  for (const auto& a : points) {
    if (a.distortion > distortion) continue;
    if (a.distortion == distortion) best = std::min(best, a.rate);
    for (const auto& b : points) {
      if (b.distortion <= distortion) continue;
      const double t = (distortion - a.distortion) / (b.distortion - a.distortion);
      best = std::min(best, a.rate + t * (b.rate - a.rate));
    }
  }
  return best;
}

}  // namespace

BaPoint blahut_arimoto_point(const SourceModel& source, const DistortionSpec& spec, double slope,
                             const BaOptions& options) {
  const BaRun run = run_blahut_arimoto(source, spec, slope, options.max_iterations, options.tolerance);
  if (!run.converged) throw ConvergenceError("Blahut-Arimoto did not converge within the iteration cap");
  return run.point;
}

RdPoint blahut_arimoto_at_distortion(const SourceModel& source, const DistortionSpec& spec,
                                     double distortion, const BaOptions& options) {
  const double d_max = zero_rate_distortion(source, spec);
  const double d_min = min_attainable_distortion(source, spec);
  if (!std::isfinite(d_max)) throw InvalidInput("zero-rate distortion is unbounded");
  if (distortion >= d_max) return {0.0, distortion};
  if (distortion < d_min - 1e-12) throw InvalidInput("target distortion is not attainable");

  // Bisection on the slope; D(slope) is non-decreasing. Each run contributes
  // an achievable point and a supporting line, so the answer is bracketed
  // even where a single slope converges slowly (linear pieces of R(D)).
  const std::size_t per_slope = std::min<std::size_t>(options.max_iterations, 20000);
  const double target_gap = std::max(options.tolerance, 1e-9) * 10.0;
  std::vector<RdPoint> points{{0.0, d_max}};
  double lower = 0.0;
  double upper = kInfinity;
  auto evaluate = [&](double slope) {
    const BaRun run = run_blahut_arimoto(source, spec, slope, per_slope, options.tolerance);
    points.push_back({run.point.rate, run.point.distortion});
    lower = std::max(lower, run.intercept + slope * distortion);
    upper = achievable_rate_at(points, distortion);
    return run.point.distortion;
  };

  double slope_lo = -64.0 / distortion_scale(spec.matrix());
  double slope_hi = 0.0;
  if (evaluate(slope_lo) >= distortion) return {points.back().rate, points.back().distortion};
  for (int i = 0; i < 200 && upper - lower > target_gap; ++i) {
    const double mid = 0.5 * (slope_lo + slope_hi);
    (evaluate(mid) < distortion ? slope_lo : slope_hi) = mid;
  }
  if (upper - lower > target_gap)
    throw ConvergenceError("Blahut-Arimoto bisection did not certify the target distortion");
  return {upper, distortion};
}

RdCurve build_rd_curve(const SourceModel& source, const DistortionSpec& spec,
                       std::size_t n_points, const BaOptions& options) {
  if (n_points < 2) throw InvalidInput("need at least two curve points");
  const double d_max = zero_rate_distortion(source, spec);
  if (!std::isfinite(d_max))
    throw InvalidInput("distortion-rate function is unbounded: no single reconstruction "
                       "letter has finite expected distortion");
  if (source.alphabet_size() == 1 || entropy(source) == 0.0)
    return RdCurve::sampled({{0.0, d_max}});

  // Slopes spaced geometrically, from nearly flat to steep enough that the
  // last point sits at the distortion floor.
  const double scale = distortion_scale(spec.matrix());
  const double shallow = 1e-2 / scale;
  const double steep = 64.0 / scale;
  std::vector<RdPoint> raw{{0.0, d_max}};
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double slope = -shallow * std::pow(steep / shallow, t);
    const BaPoint p = blahut_arimoto_point(source, spec, slope, options);
    raw.push_back({p.rate, p.distortion});
  }
  std::sort(raw.begin() + 1, raw.end(), [](const RdPoint& a, const RdPoint& b) {
    return a.rate < b.rate || (a.rate == b.rate && a.distortion < b.distortion);
  });

  // Lower convex hull of the point cloud, truncated at the distortion floor.
  std::vector<RdPoint> hull;
  for (const auto& p : raw) {
    if (!hull.empty() && p.rate - hull.back().rate <= 1e-12) {
      if (p.distortion < hull.back().distortion && hull.size() > 1) hull.back() = p;
      continue;
    }
    if (!hull.empty() && p.distortion >= hull.back().distortion) continue;
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double turn =
          (b.rate - a.rate) * (p.distortion - a.distortion) - (b.distortion - a.distortion) * (p.rate - a.rate);
      if (turn > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return RdCurve::sampled(std::move(hull));
}

}  // namespace seqrate
