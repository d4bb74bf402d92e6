#pragma once

#include <cstddef>
#include <vector>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/profile.hpp"

namespace seqrate {

struct EnvelopeVertex {
  double alpha = 0.0;
  double value = 0.0;

  friend bool operator==(const EnvelopeVertex&, const EnvelopeVertex&) = default;
};

struct EnvelopeSegment {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double slope = 0.0;
};

/// Continuous concave piecewise-linear function on [0, 1], given by its
/// vertices. Adjacent segments always have distinct (strictly decreasing)
/// slopes.
class ConcaveEnvelope {
 public:
  explicit ConcaveEnvelope(std::vector<EnvelopeVertex> vertices);

  const std::vector<EnvelopeVertex>& vertices() const { return vertices_; }
  std::vector<EnvelopeSegment> segments() const;

  double operator()(double alpha) const;
  /// Slope of the segment on the requested side of alpha. At a vertex the
  /// left and right slopes differ; at alpha = 0 (1) only the right (left)
  /// slope exists and is returned regardless of `side`.
  double slope(double alpha, Side side = Side::right) const;

  CumulativeFunction to_cumulative() const;

  friend bool operator==(const ConcaveEnvelope&, const ConcaveEnvelope&) = default;

 private:
  std::vector<EnvelopeVertex> vertices_;
};

/// Upper concave hull of a non-decreasing finite cumulative function.
ConcaveEnvelope concave_envelope(const CumulativeFunction& f);

/// E(i/k) - E((i-1)/k) for i = 1..k.
RateProfile segment_slopes(const ConcaveEnvelope& e, std::size_t k);

inline constexpr std::size_t kDefaultSlopeGridPoints = 10001;

/// Envelope value at alpha computed as min over a >= 0 of a * alpha + b(a),
/// b(a) = sup_z (F(z) - a z), with a restricted to a uniform grid on
/// [0, F(1) / alpha]. Independent of the hull construction; always an upper
/// bound on the exact envelope value.
double legendre_value(const CumulativeFunction& f, double alpha,
                      std::size_t slope_points = kDefaultSlopeGridPoints);

}  // namespace seqrate
