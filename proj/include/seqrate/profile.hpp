#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seqrate {

/// Per-block rates R_1..R_k, bits per symbol; nonnegative, k >= 1.
class RateProfile {
 public:
  explicit RateProfile(std::vector<double> rates);

  std::size_t size() const { return rates_.size(); }
  std::span<const double> rates() const { return rates_; }
  double operator[](std::size_t i) const { return rates_[i]; }
  double total() const;
  /// prefix[j] = rates[0] + ... + rates[j].
  std::vector<double> prefix_sums() const;

  friend bool operator==(const RateProfile&, const RateProfile&) = default;

 private:
  std::vector<double> rates_;
};

}  // namespace seqrate
