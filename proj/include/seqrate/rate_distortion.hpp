#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace seqrate {

/// Probability mass function over a finite alphabet.
class SourceModel {
 public:
  explicit SourceModel(std::vector<double> pmf);

  std::span<const double> pmf() const { return pmf_; }
  std::size_t alphabet_size() const { return pmf_.size(); }
  bool uniform_binary() const;

 private:
  std::vector<double> pmf_;
};

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const SourceModel& source);

/// h(p) in bits.
double binary_entropy(double p);

enum class DistortionKind { hamming, erasure, log_loss, matrix };

using DistortionMatrix = std::vector<std::vector<double>>;

/// Per-letter distortion d(x, x_hat). Matrix entries may be +inf. Log-loss
/// has a continuous reconstruction alphabet and therefore no matrix.
class DistortionSpec {
 public:
  static DistortionSpec hamming(std::size_t alphabet_size);
  /// Binary source reconstructed over {0, 1, e}: wrong symbol costs +inf,
  /// erasure costs 1.
  static DistortionSpec erasure();
  static DistortionSpec log_loss();
  static DistortionSpec from_matrix(DistortionMatrix values);

  DistortionKind kind() const { return kind_; }
  bool has_matrix() const { return kind_ != DistortionKind::log_loss; }
  const DistortionMatrix& matrix() const;
  std::size_t reconstruction_size() const;

 private:
  DistortionSpec(DistortionKind kind, DistortionMatrix values);

  DistortionKind kind_;
  DistortionMatrix values_;
};

/// Expected distortion of the best constant reconstruction letter.
double zero_rate_distortion(const SourceModel& source, const DistortionSpec& spec);

/// Expected distortion when every letter is mapped to its cheapest
/// reconstruction; the smallest attainable distortion.
double min_attainable_distortion(const SourceModel& source, const DistortionSpec& spec);

struct RdPoint {
  double rate = 0.0;
  double distortion = 0.0;

  friend bool operator==(const RdPoint&, const RdPoint&) = default;
};

/// R(D) = max{0, c - D}.
struct LinearRd {
  double c = 0.0;
};

/// Binary source with Hamming distortion: R(D) = h(p) - h(D) for D <= p.
struct BinaryHammingRd {
  double p = 0.0;
};

/// Tabulated points sorted by rate, starting at (0, d_max), convex and
/// non-increasing in distortion.
struct SampledRd {
  std::vector<RdPoint> points;
};

using RdForm = std::variant<LinearRd, BinaryHammingRd, SampledRd>;

/// Distortion-rate relation D(R), convex and non-increasing, bounded by
/// d_max = D(0).
class RdCurve {
 public:
  static RdCurve linear(double c);
  static RdCurve binary_hamming(double p);
  static RdCurve sampled(std::vector<RdPoint> points);

  const RdForm& form() const { return form_; }
  double d_max() const { return d_max_; }
  /// inf_R D(R).
  double floor() const;

  /// D(R) for R >= 0.
  double distortion_at_rate(double rate) const;

 private:
  RdCurve(RdForm form, double d_max) : form_(std::move(form)), d_max_(d_max) {}

  RdForm form_;
  double d_max_;
};

enum class ClosedForm { erasure, log_loss, hamming_binary };

RdCurve closed_form_curve(ClosedForm kind, const SourceModel& source);

struct BaOptions {
  std::size_t max_iterations = 100000;
  /// Bound on R_Q - R(D_Q) certified by the Blahut lower bound.
  double tolerance = 1e-9;
};

struct BaPoint {
  double rate = 0.0;
  double distortion = 0.0;
  /// Certified upper bound on the distance of `rate` above R(distortion).
  double gap = 0.0;
  std::size_t iterations = 0;
};

/// One point of the R(D) curve via alternating minimization. `slope` is the
/// tangent slope dR/dD in bits per distortion unit and must be <= 0.
/// Transitions with infinite distortion are excluded from the support.
BaPoint blahut_arimoto_point(const SourceModel& source, const DistortionSpec& spec, double slope,
                             const BaOptions& options = {});

/// R at a target distortion, found by bisection on the slope. When the curve
/// has a linear piece the target is reached by time-sharing the two
/// bracketing points.
RdPoint blahut_arimoto_at_distortion(const SourceModel& source, const DistortionSpec& spec,
                                     double distortion, const BaOptions& options = {});

/// Sampled curve from `n_points` slope values, prefixed with (0, d_max).
/// Points breaking convexity or monotonicity are pruned.
RdCurve build_rd_curve(const SourceModel& source, const DistortionSpec& spec,
                       std::size_t n_points, const BaOptions& options = {});

}  // namespace seqrate
