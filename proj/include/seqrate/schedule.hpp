#pragma once

#include <cstddef>
#include <vector>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/profile.hpp"
#include "seqrate/rate_distortion.hpp"

namespace seqrate {

/// Per-block increments G(i/k) - G((i-1)/k).
RateProfile rate_profile(const CumulativeFunction& g, std::size_t k);

/// Prefix sums of x dominate those of y and the totals agree (within 1e-12,
/// scaled by the total).
bool majorizes(const RateProfile& x, const RateProfile& y);

/// Lower-triangular split of description rates over transmission times:
/// entry (i, j), j <= i, is the part of block j's description sent at time i.
/// Indices are 0-based.
class RateSplitMatrix {
 public:
  explicit RateSplitMatrix(std::size_t k);

  std::size_t k() const { return k_; }
  double at(std::size_t time, std::size_t block) const;
  double& at(std::size_t time, std::size_t block);

  /// Sum over blocks for one time slot.
  double row_sum(std::size_t time) const;
  /// Sum over times for one block.
  double column_sum(std::size_t block) const;

 private:
  std::size_t index(std::size_t time, std::size_t block) const;

  std::size_t k_;
  std::vector<double> entries_;
};

/// Splits `descriptions` (which must majorize `transmissions`) so that column
/// j sums to descriptions[j] and row i sums to transmissions[i].
RateSplitMatrix split_rates(const RateProfile& descriptions, const RateProfile& transmissions);

struct Chunk {
  std::size_t desc_block = 0;  // 1-based
  double rate = 0.0;
};

struct TimeSlot {
  std::size_t time = 0;  // 1-based
  double available = 0.0;
  double transmitted = 0.0;
  std::vector<Chunk> sent;
};

struct BlockDescription {
  std::size_t block = 0;  // 1-based
  double rate = 0.0;
  double predicted_distortion = 0.0;
};

struct TransmissionPlan {
  std::size_t k = 0;
  std::vector<TimeSlot> slots;
  std::vector<BlockDescription> descriptions;
  RateSplitMatrix split{1};
  double predicted_avg_distortion = 0.0;
};

/// Causal schedule: block descriptions follow the envelope of G_eff, time
/// slots transmit the increments of G_eff, and the split routes one onto the
/// other. Per-block distortion is k times the exact integral of D over the
/// envelope slope within the block.
TransmissionPlan transmission_plan(const CumulativeFunction& g, const CumulativeFunction& l,
                                   const RdCurve& curve, std::size_t k);

}  // namespace seqrate
