#include "seqrate/achievability.hpp"

#include <algorithm>
#include <cmath>

#include "seqrate/error.hpp"

namespace seqrate {

namespace {

// Running minimum of a slack function; ties keep the earliest alpha.
struct MinSlack {
  double value = kInf;
  double alpha = 0.0;

  void offer(double slack, double at) {
    if (slack < value) {
      value = slack;
      alpha = at;
    }
  }
};

Verdict make_verdict(const MinSlack& slack) {
  Verdict v;
  v.margin = slack.value;
  v.binding_alpha = slack.alpha;
  v.achievable = slack.value >= -kVerdictTol;
  return v;
}

void require_finite_rate(const CumulativeFunction& g) {
  if (!g.finite()) throw InvalidInput("rate function must be finite");
}

}  // namespace

Verdict check_lossless(const CumulativeFunction& g, const CumulativeFunction& l,
                       const SourceModel& source) {
  require_finite_rate(g);
  const double h = entropy(source);
  const double total = g.at_end();

  // Both sides are linear between knots and the max of two linear terms is
  // convex, so the slack is concave per segment: extrema sit at knots.
  MinSlack slack;
  auto offer = [&](double alpha, Side side) {
    const double need = std::max((1.0 - alpha) * h, h - l.evaluate(alpha, side));
    slack.offer(total - g.evaluate(alpha, side) - need, alpha);
  };
  for (double alpha : merged_alphas(g, l)) {
    if (alpha > 0.0) offer(alpha, Side::left);
    offer(alpha, Side::right);
  }
  Verdict v = make_verdict(slack);
  v.details.entropy = h;
  if (l.at_end() < h) v.details.notes.push_back("L(1) < H(X): no rate function is achievable");
  return v;
}

DistortionBreakdown min_distortion_breakdown(const CumulativeFunction& g,
                                             const CumulativeFunction& l, const RdCurve& curve) {
  require_finite_rate(g);
  if (!std::isfinite(curve.d_max()))
    throw InvalidInput("distortion-rate function must be bounded");

  EffectiveCrdf effective = effective_crdf_detail(g, l, LossyMode{});
  ConcaveEnvelope envelope = concave_envelope(effective.function);
  std::vector<SegmentCost> segments;
  double total = 0.0;
  for (const auto& seg : envelope.segments()) {
    const double d = curve.distortion_at_rate(std::max(0.0, seg.slope));
    segments.push_back({seg.alpha_lo, seg.alpha_hi, seg.slope, d});
    total += (seg.alpha_hi - seg.alpha_lo) * d;
  }
  return {total, std::move(effective), std::move(envelope), std::move(segments)};
}

double min_distortion(const CumulativeFunction& g, const CumulativeFunction& l,
                      const RdCurve& curve) {
  return min_distortion_breakdown(g, l, curve).value;
}

Verdict check_lossy(const CumulativeFunction& g, const CumulativeFunction& l, const RdCurve& curve,
                    double dbar) {
  if (!(dbar >= 0.0)) throw InvalidInput("distortion level must be >= 0");
  const DistortionBreakdown b = min_distortion_breakdown(g, l, curve);
  Verdict v;
  v.margin = dbar - b.value;
  v.achievable = v.margin >= -kVerdictTol;
  v.binding_alpha = b.effective.supremum.alpha;
  v.details.shift = b.effective.shift;
  v.details.shift_alpha = b.effective.supremum.alpha;
  v.details.integral = b.value;
  v.details.envelope = b.envelope.vertices();
  if (std::holds_alternative<SampledRd>(curve.form()))
    v.details.notes.push_back(
        "sampled R(D): integral is an upper bound, verdict may be conservative near the boundary");
  return v;
}

Verdict check_linear_rd(const CumulativeFunction& g, const CumulativeFunction& l, double c,
                        double dbar) {
  require_finite_rate(g);
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("linear R(D) needs finite c > 0");
  if (!(dbar >= 0.0)) throw InvalidInput("distortion level must be >= 0");

  const EffectiveCrdf effective = effective_crdf_detail(g, l, LossyMode{});
  const CumulativeFunction& geff = effective.function;
  const double end = geff.at_end();
  const double limit = 1.0 - dbar / c;

  // Right values dominate: G_eff(alpha-) <= G_eff(alpha) only relaxes the
  // condition, and a segment's interior is linear.
  MinSlack in_window;
  MinSlack overall;
  auto offer = [&](double alpha, double value) {
    const double slack = end - value - (1.0 - alpha) * c + dbar;
    overall.offer(slack, alpha);
    if (alpha <= limit) in_window.offer(slack, alpha);
  };
  for (const Knot& k : geff.knots()) offer(k.alpha, k.post);
  if (limit > 0.0 && limit < 1.0) offer(limit, geff(limit));

  Verdict v;
  v.achievable = limit < 0.0 || in_window.value >= -kVerdictTol;
  v.margin = overall.value;
  v.binding_alpha = overall.alpha;
  v.details.shift = effective.shift;
  v.details.shift_alpha = effective.supremum.alpha;
  if (limit < 0.0) v.details.notes.push_back("dbar >= c: empty check interval");
  return v;
}

Verdict check_zero_distortion_hamming(const CumulativeFunction& g, const CumulativeFunction& l,
                                      const SourceModel& source) {
  require_finite_rate(g);
  const double h = entropy(source);
  const EffectiveCrdf effective = effective_crdf_detail(g, l, LossyMode{});
  const CumulativeFunction& geff = effective.function;
  const double end = geff.at_end();

  MinSlack slack;
  for (const Knot& k : geff.knots()) {
    slack.offer(end - (1.0 - k.alpha) * h - k.post, k.alpha);
    if (k.alpha > 0.0) slack.offer(end - (1.0 - k.alpha) * h - k.pre, k.alpha);
  }
  Verdict v = make_verdict(slack);
  v.details.shift = effective.shift;
  v.details.shift_alpha = effective.supremum.alpha;
  v.details.entropy = h;
  return v;
}

bool hamming_consistency(const CumulativeFunction& g, const CumulativeFunction& l,
                         const SourceModel& source) {
  return check_lossless(g, l, source).achievable ==
         check_zero_distortion_hamming(g, l, source).achievable;
}

}  // namespace seqrate
