#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/envelope.hpp"
#include "seqrate/rate_distortion.hpp"

namespace seqrate {

/// Slack below this is still treated as achievable.
inline constexpr double kVerdictTol = 1e-9;

struct VerdictDetails {
  /// Rate withheld from G to respect the leakage constraint.
  std::optional<double> shift;
  std::optional<double> shift_alpha;
  std::optional<double> integral;
  std::optional<double> entropy;
  std::vector<EnvelopeVertex> envelope;
  std::vector<std::string> notes;
};

/// Outcome of an achievability test. `margin` is the signed slack of the
/// binding inequality (bits for lossless, distortion units for lossy).
struct Verdict {
  bool achievable = false;
  double margin = 0.0;
  double binding_alpha = 0.0;
  VerdictDetails details;
};

/// G(1) - G(alpha) >= max{(1 - alpha) H(X), H(X) - L(alpha)} on [0, 1].
Verdict check_lossless(const CumulativeFunction& g, const CumulativeFunction& l,
                       const SourceModel& source);

struct SegmentCost {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double slope = 0.0;
  double distortion = 0.0;
};

struct DistortionBreakdown {
  double value = 0.0;
  EffectiveCrdf effective;
  ConcaveEnvelope envelope;
  std::vector<SegmentCost> segments;
};

/// Integral of D(slope of the envelope of G_eff) over [0, 1], evaluated
/// exactly as a sum over envelope segments.
DistortionBreakdown min_distortion_breakdown(const CumulativeFunction& g,
                                             const CumulativeFunction& l, const RdCurve& curve);

double min_distortion(const CumulativeFunction& g, const CumulativeFunction& l,
                      const RdCurve& curve);

/// Achievable iff min_distortion <= dbar (within kVerdictTol).
Verdict check_lossy(const CumulativeFunction& g, const CumulativeFunction& l, const RdCurve& curve,
                    double dbar);

/// Fast path for R(D) = c - D: G_eff(1) - G_eff(alpha) >= (1 - alpha) c - dbar
/// on [0, 1 - dbar / c]. The reported margin is the minimum slack over all of
/// [0, 1], which equals dbar minus the distortion integral.
Verdict check_linear_rd(const CumulativeFunction& g, const CumulativeFunction& l, double c,
                        double dbar);

/// G_eff(1) - (1 - alpha) H(X) >= G_eff(alpha) on [0, 1], using the lossy
/// effective rate function.
Verdict check_zero_distortion_hamming(const CumulativeFunction& g, const CumulativeFunction& l,
                                      const SourceModel& source);

/// True when check_lossless and check_zero_distortion_hamming agree.
bool hamming_consistency(const CumulativeFunction& g, const CumulativeFunction& l,
                         const SourceModel& source);

}  // namespace seqrate
