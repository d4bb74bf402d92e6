#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "seqrate/achievability.hpp"
#include "seqrate/envelope.hpp"
#include "seqrate/error.hpp"
#include "seqrate/oracle.hpp"
#include "seqrate/schedule.hpp"

namespace seqrate::cli {

namespace {

std::size_t positive_count(const Json& j, const char* what) {
  const double v = number_from_json(j, what);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
    throw InvalidInput(std::string(what) + ": expected a positive integer");
  return static_cast<std::size_t>(v);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Flags {
  std::string problem_path;
  std::string csv_path;
  std::string figure;
  bool oracle = false;
  bool lossless = false;
  std::optional<std::size_t> k;
  std::optional<double> grid_step;
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

const SourceModel& need_source(const Problem& p) {
  if (!p.source) throw InvalidInput("problem: field 'source' is required for this command");
  return *p.source;
}

double need_dbar(const Problem& p) {
  if (!p.dbar) throw InvalidInput("problem: field 'dbar' is required for this command");
  return *p.dbar;
}

std::size_t need_k(const Problem& p) {
  if (!p.k) throw InvalidInput("problem: block count 'k' is required (field or --k)");
  return *p.k;
}

BruteForceResult run_oracle(const Problem& p, const RdCurve& curve) {
  return brute_force_min_distortion(p.crdf, p.cldf, curve, need_k(p),
                                    {p.options.grid_step, p.options.exhaustive});
}

// Default instances for figure emission when no problem file is given.
Problem worked_example() {
  Problem p;
  p.source = SourceModel({0.5, 0.5});
  p.distortion = DistortionSpec::erasure();
  p.crdf = CumulativeFunction({{0, 0, 0}, {0.5, 2, 2}, {1, 2, 2}});
  p.cldf = CumulativeFunction({{0, 0, 0}, {0.2, 1, 1}, {1, 1, 1}}, Role::leakage);
  p.dbar = 0.5;
  return p;
}

Problem log_loss_example() {
  Problem p;
  p.source = SourceModel({0.5, 0.25, 0.125, 0.125});
  p.distortion = DistortionSpec::log_loss();
  p.crdf = CumulativeFunction::line(2.0);
  p.cldf = CumulativeFunction({{0, 0, 0}, {0.4, 0, kInf}, {1, kInf, kInf}}, Role::leakage);
  p.dbar = 0.6;
  return p;
}

std::string bound_table(const Problem& p, double unit_rate) {
  const double dbar = need_dbar(p);
  const auto eff = effective_crdf(p.crdf, p.cldf);
  const double top = eff.at_end();
  std::ostringstream os;
  os << "alpha,G_eff,upper_bound\n";
  for (double a : table_alphas(p.options.alpha_grid, {&eff})) {
    const double bound = std::min(a * unit_rate + top - unit_rate + dbar, top);
    os << format_number(a) << ',' << format_number(eff(a)) << ',' << format_number(bound) << '\n';
  }
  return os.str();
}

std::string figure_table(const std::string& name, const std::optional<Problem>& given) {
  if (name == "theorem2") {
    Problem p = given ? *given : worked_example();
    return function_table(p, problem_curve(p));
  }
  if (name == "example1") {
    Problem p = given ? *given : worked_example();
    return bound_table(p, 1.0);
  }
  if (name == "example2") {
    Problem p = given ? *given : log_loss_example();
    return bound_table(p, entropy(need_source(p)));
  }
  throw InvalidInput("unknown figure '" + name + "' (theorem2, example1, example2)");
}

int verdict_exit(const Verdict& v) { return v.achievable ? kSuccess : kNotAchievable; }

int dispatch(const std::string& command, const Flags& flags, std::ostream& out) {
  std::optional<Problem> maybe;
  if (!flags.problem_path.empty()) {
    maybe = parse_problem(read_json_file(flags.problem_path));
    if (flags.k) maybe->k = *flags.k;
    if (flags.grid_step) maybe->options.grid_step = *flags.grid_step;
  }

  if (command == "emit-figure") {
    const std::string table = figure_table(flags.figure, maybe);
    if (flags.csv_path.empty()) {
      out << table;
    } else {
      std::ofstream(flags.csv_path) << table;
    }
    return kSuccess;
  }

  if (!maybe) throw InvalidInput("a problem file is required");
  const Problem& p = *maybe;
  auto curve_if_any = [&]() -> std::optional<RdCurve> {
    if (p.source && p.distortion) return problem_curve(p);
    return std::nullopt;
  };

  if (!flags.csv_path.empty()) {
    std::ofstream csv(flags.csv_path);
    if (!csv) throw InvalidInput("cannot write '" + flags.csv_path + "'");
    csv << function_table(p, curve_if_any());
  }

  Json result;
  int code = kSuccess;
  if (command == "validate") {
    result = {{"valid", true}, {"crdf", to_json(p.crdf)}, {"cldf", to_json(p.cldf)}};
  } else if (command == "effective") {
    EffectiveMode mode = LossyMode{};
    if (flags.lossless) mode = LosslessMode{entropy(need_source(p))};
    const auto eff = effective_crdf_detail(p.crdf, p.cldf, mode);
    result = to_json(eff.function);
    result["shift"] = number_to_json(eff.shift);
    if (!flags.lossless) {
      result["shift_alpha"] = number_to_json(eff.supremum.alpha);
      result["shift_side"] = eff.supremum.side == Side::left ? "left" : "right";
    }
  } else if (command == "envelope") {
    result = to_json(concave_envelope(effective_crdf(p.crdf, p.cldf)));
  } else if (command == "rd-curve") {
    result = to_json(problem_curve(p));
  } else if (command == "check-lossless") {
    const Verdict v = check_lossless(p.crdf, p.cldf, need_source(p));
    result = to_json(v);
    code = verdict_exit(v);
  } else if (command == "check-lossy") {
    const RdCurve curve = problem_curve(p);
    const Verdict v = check_lossy(p.crdf, p.cldf, curve, need_dbar(p));
    result = to_json(v);
    if (flags.oracle) result["oracle"] = to_json(run_oracle(p, curve));
    code = verdict_exit(v);
  } else if (command == "min-distortion") {
    const RdCurve curve = problem_curve(p);
    const auto b = min_distortion_breakdown(p.crdf, p.cldf, curve);
    Json segments = Json::array();
    for (const auto& s : b.segments) {
      segments.push_back({{"alpha_lo", number_to_json(s.alpha_lo)},
                          {"alpha_hi", number_to_json(s.alpha_hi)},
                          {"slope", number_to_json(s.slope)},
                          {"distortion", number_to_json(s.distortion)}});
    }
    result = {{"min_distortion", number_to_json(b.value)},
              {"effective", to_json(b.effective.function)},
              {"segments", std::move(segments)}};
    if (flags.oracle) result["oracle"] = to_json(run_oracle(p, curve));
  } else if (command == "schedule") {
    result = to_json(transmission_plan(p.crdf, p.cldf, problem_curve(p), need_k(p)));
  } else if (command == "oracle") {
    result = to_json(run_oracle(p, problem_curve(p)));
  } else {
    throw InvalidInput("unknown command '" + command + "'");
  }
  out << result.dump(2) << '\n';
  return code;
}

}  // namespace

Problem parse_problem(const Json& doc) {
  require_known_keys(doc, {"source", "distortion", "crdf", "cldf", "dbar", "k", "options"},
                     "problem");
  Problem p;
  if (doc.contains("source")) p.source = source_from_json(doc["source"]);
  if (doc.contains("distortion")) {
    if (!p.source) throw InvalidInput("problem: 'distortion' needs a 'source'");
    p.distortion = distortion_from_json(doc["distortion"], p.source->alphabet_size());
  }
  if (!doc.contains("crdf")) throw InvalidInput("problem: missing field 'crdf'");
  p.crdf = cumulative_from_json(doc["crdf"], Role::rate);
  if (doc.contains("cldf")) p.cldf = cumulative_from_json(doc["cldf"], Role::leakage);
  if (doc.contains("dbar")) {
    const double d = number_from_json(doc["dbar"], "dbar");
    if (!(d >= 0.0) || std::isinf(d)) throw InvalidInput("dbar: must be finite and >= 0");
    p.dbar = d;
  }
  if (doc.contains("k")) p.k = positive_count(doc["k"], "k");
  if (doc.contains("options")) {
    const Json& o = doc["options"];
    require_known_keys(o, {"rd_points", "grid_step", "exhaustive", "alpha_grid"}, "options");
    if (o.contains("rd_points")) p.options.rd_points = positive_count(o["rd_points"], "rd_points");
    if (o.contains("grid_step")) p.options.grid_step = number_from_json(o["grid_step"], "grid_step");
    if (o.contains("exhaustive")) {
      if (!o["exhaustive"].is_boolean()) throw InvalidInput("exhaustive: expected a boolean");
      p.options.exhaustive = o["exhaustive"].get<bool>();
    }
    if (o.contains("alpha_grid")) {
      p.options.alpha_grid = positive_count(o["alpha_grid"], "alpha_grid");
      if (p.options.alpha_grid < 2) throw InvalidInput("alpha_grid: need at least 2 points");
    }
  }
  return p;
}

RdCurve problem_curve(const Problem& problem) {
  const SourceModel& source = need_source(problem);
  if (!problem.distortion) throw InvalidInput("problem: field 'distortion' is required");
  const DistortionSpec& spec = *problem.distortion;
  switch (spec.kind()) {
    case DistortionKind::erasure:
      if (source.uniform_binary()) return closed_form_curve(ClosedForm::erasure, source);
      break;
    case DistortionKind::log_loss:
      return closed_form_curve(ClosedForm::log_loss, source);
    case DistortionKind::hamming:
      if (source.alphabet_size() == 2) return closed_form_curve(ClosedForm::hamming_binary, source);
      break;
    case DistortionKind::matrix:
      break;
  }
  return build_rd_curve(source, spec, problem.options.rd_points);
}

std::vector<double> table_alphas(std::size_t points,
                                 const std::vector<const CumulativeFunction*>& fs) {
  std::vector<double> alphas;
  const std::size_t n = std::max<std::size_t>(points, 2);
  for (std::size_t i = 0; i < n; ++i)
    alphas.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  for (const auto* f : fs)
    for (const auto& knot : f->knots()) alphas.push_back(knot.alpha);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  return alphas;
}

std::string function_table(const Problem& problem, const std::optional<RdCurve>& curve) {
  const auto eff = effective_crdf(problem.crdf, problem.cldf);
  const auto env = concave_envelope(eff);
  const auto env_fn = env.to_cumulative();
  std::ostringstream os;
  os << "alpha,G,L,G_eff,envelope,slope,D_of_slope\n";
  for (double a : table_alphas(problem.options.alpha_grid,
                               {&problem.crdf, &problem.cldf, &eff, &env_fn})) {
    const double slope = env.slope(a, Side::right);
    os << format_number(a) << ',' << format_number(problem.crdf(a)) << ','
       << format_number(problem.cldf(a)) << ',' << format_number(eff(a)) << ','
       << format_number(env(a)) << ',' << format_number(slope) << ',';
    if (curve) os << format_number(curve->distortion_at_rate(std::max(0.0, slope)));
    os << '\n';
  }
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential source coding under rate and leakage schedules"};
  app.name("seqrate");
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub, bool problem_required) {
    auto* opt = sub->add_option("problem", flags.problem_path, "Problem file (JSON)");
    if (problem_required) opt->required();
    sub->add_option("--csv", flags.csv_path, "Write the function table to this CSV file");
    sub->add_option("--k", flags.k, "Number of blocks (overrides the problem file)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--grid-step", flags.grid_step, "Oracle grid step in bits/symbol");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "Check the rate and leakage functions"},
      {"effective", "Print the effective rate function"},
      {"envelope", "Print the concave envelope of the effective rate function"},
      {"rd-curve", "Print the distortion-rate curve"},
      {"check-lossless", "Lossless achievability verdict"},
      {"check-lossy", "Lossy achievability verdict at distortion dbar"},
      {"min-distortion", "Smallest achievable average distortion"},
      {"schedule", "Causal transmission plan for k blocks"},
      {"oracle", "Brute-force minimum distortion for k blocks"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, true);
    if (name == "effective")
      sub->add_flag("--lossless", flags.lossless, "Withhold rate for lossless coding");
    if (name == "check-lossy" || name == "min-distortion")
      sub->add_flag("--oracle", flags.oracle, "Attach the brute-force oracle result");
  }
  auto* figure = app.add_subcommand("emit-figure", "Print figure data as CSV");
  figure->add_option("figure", flags.figure, "theorem2, example1 or example2")->required();
  add_common(figure, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, flags, out);
  } catch (const InvalidInput& e) {
    err << "error: invalid input: " << e.what() << '\n';
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kInvalidInput;
}

}  // namespace seqrate::cli
