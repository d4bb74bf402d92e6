#include "seqrate/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "seqrate/envelope.hpp"
#include "seqrate/error.hpp"

namespace seqrate {

namespace {

double tolerance_for(double total) { return 1e-12 * std::max(1.0, std::abs(total)); }

}  // namespace

RateProfile rate_profile(const CumulativeFunction& g, std::size_t k) {
  return sample_grid(g, k).increments();
}

bool majorizes(const RateProfile& x, const RateProfile& y) {
  if (x.size() != y.size()) throw InvalidInput("profiles differ in length");
  const auto px = x.prefix_sums();
  const auto py = y.prefix_sums();
  const double tol = tolerance_for(std::max(px.back(), py.back()));
  for (std::size_t j = 0; j < px.size(); ++j) {
    if (px[j] < py[j] - tol) return false;
  }
  return std::abs(px.back() - py.back()) <= tol;
}

RateSplitMatrix::RateSplitMatrix(std::size_t k) : k_(k), entries_(k * (k + 1) / 2, 0.0) {
  if (k == 0) throw InvalidInput("block count k must be >= 1");
}

std::size_t RateSplitMatrix::index(std::size_t time, std::size_t block) const {
  if (time >= k_ || block > time) throw InvalidInput("split entry outside the lower triangle");
  return time * (time + 1) / 2 + block;
}

double RateSplitMatrix::at(std::size_t time, std::size_t block) const {
  return entries_[index(time, block)];
}

double& RateSplitMatrix::at(std::size_t time, std::size_t block) {
  return entries_[index(time, block)];
}

double RateSplitMatrix::row_sum(std::size_t time) const {
  double sum = 0.0;
  for (std::size_t j = 0; j <= time; ++j) sum += at(time, j);
  return sum;
}

double RateSplitMatrix::column_sum(std::size_t block) const {
  double sum = 0.0;
  for (std::size_t i = block; i < k_; ++i) sum += at(i, block);
  return sum;
}

RateSplitMatrix split_rates(const RateProfile& descriptions, const RateProfile& transmissions) {
  if (descriptions.size() != transmissions.size())
    throw InvalidInput("profiles differ in length");
  if (!majorizes(descriptions, transmissions))
    throw InvalidInput("description profile must majorize the transmission profile");

  const std::size_t k = descriptions.size();
  const auto& r1 = descriptions;
  const auto& r2 = transmissions;

  // Folding block m into block m+1 carries over surplus[m] = S1_m - S2_m,
  // so the reduced first description rate at level m is r1[m] + surplus[m-1].
  std::vector<double> surplus(k, 0.0);
  std::vector<double> head(k, 0.0);
  double carried = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    head[m] = r1[m] + carried;
    carried = std::max(0.0, head[m] - r2[m]);
    surplus[m] = carried;
  }

  // Level-m weights: the merged first column of level m+1 is shared between
  // block m (the carried surplus) and block m+1 (its own rate). 0/0 -> 0.
  std::vector<double> w_carry(k, 0.0);
  std::vector<double> w_own(k, 0.0);
  for (std::size_t m = 0; m + 1 < k; ++m) {
    const double denom = surplus[m] + r1[m + 1];
    if (denom > 0.0) {
      w_carry[m] = surplus[m] / denom;
      w_own[m] = r1[m + 1] / denom;
    }
  }

  // column[m][i - m] is the merged first column of level m, built from the
  // last block backwards.
  std::vector<std::vector<double>> column(k);
  column[k - 1] = {head[k - 1]};
  for (std::size_t m = k - 1; m-- > 0;) {
    auto& col = column[m];
    col.resize(k - m);
    col[0] = r2[m];
    for (std::size_t i = m + 1; i < k; ++i) col[i - m] = w_carry[m] * column[m + 1][i - m - 1];
  }

  RateSplitMatrix out(k);
  for (std::size_t i = 0; i < k; ++i) out.at(i, 0) = column[0][i];
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = j; i < k; ++i) out.at(i, j) = w_own[j - 1] * column[j][i - j];
  }
  return out;
}

TransmissionPlan transmission_plan(const CumulativeFunction& g, const CumulativeFunction& l,
                                   const RdCurve& curve, std::size_t k) {
  if (k == 0) throw InvalidInput("block count k must be >= 1");
  if (!g.finite()) throw InvalidInput("rate function must be finite");

  const EffectiveCrdf effective = effective_crdf_detail(g, l, LossyMode{});
  const ConcaveEnvelope envelope = concave_envelope(effective.function);
  const RateProfile described = segment_slopes(envelope, k);
  const RateProfile transmitted = rate_profile(effective.function, k);
  const RateProfile available = rate_profile(g, k);

  TransmissionPlan plan;
  plan.k = k;
  plan.split = split_rates(described, transmitted);

  const double kd = static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    TimeSlot slot{i + 1, available[i], transmitted[i], {}};
    for (std::size_t j = 0; j <= i; ++j) {
      const double r = plan.split.at(i, j);
      if (r > 0.0) slot.sent.push_back({j + 1, r});
    }
    plan.slots.push_back(std::move(slot));
  }

  const auto segments = envelope.segments();
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double lo = static_cast<double>(j) / kd;
    const double hi = static_cast<double>(j + 1) / kd;
    double integral = 0.0;
    for (const auto& seg : segments) {
      const double width = std::min(hi, seg.alpha_hi) - std::max(lo, seg.alpha_lo);
      if (width > 0.0) integral += width * curve.distortion_at_rate(std::max(0.0, seg.slope));
    }
    total += integral;
    plan.descriptions.push_back({j + 1, described[j], kd * integral});
  }
  plan.predicted_avg_distortion = total;
  return plan;
}

}  // namespace seqrate
