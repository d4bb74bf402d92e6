#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqrate/cumulative_function.hpp"
#include "seqrate/rate_distortion.hpp"
#include "seqrate/serialization.hpp"

namespace seqrate::cli {

enum ExitCode : int { kSuccess = 0, kNotAchievable = 1, kInvalidInput = 2 };

struct ProblemOptions {
  std::size_t rd_points = 64;
  double grid_step = 0.05;
  bool exhaustive = false;
  std::size_t alpha_grid = 101;
};

struct Problem {
  std::optional<SourceModel> source;
  std::optional<DistortionSpec> distortion;
  CumulativeFunction crdf = CumulativeFunction::line(0.0);
  CumulativeFunction cldf = CumulativeFunction::unconstrained();
  std::optional<double> dbar;
  std::optional<std::size_t> k;
  ProblemOptions options;
};

/// Parses a problem document; unknown fields and invalid functions throw
/// InvalidInput.
Problem parse_problem(const Json& doc);

/// Distortion-rate curve for the problem's source and distortion measure:
/// closed forms where known, otherwise a Blahut-Arimoto tabulation.
RdCurve problem_curve(const Problem& problem);

/// Sorted alphas of a uniform grid with `points` entries plus every knot of
/// the given functions.
std::vector<double> table_alphas(std::size_t points, const std::vector<const CumulativeFunction*>& fs);

/// Table with columns alpha,G,L,G_eff,envelope,slope,D_of_slope. The last two
/// columns are empty when no curve is available.
std::string function_table(const Problem& problem, const std::optional<RdCurve>& curve);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqrate::cli
