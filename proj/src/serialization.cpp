#include "seqrate/serialization.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "seqrate/error.hpp"

namespace seqrate {

namespace {

[[noreturn]] void fail(std::string_view what, std::string_view problem) {
  throw InvalidInput(std::string(what) + ": " + std::string(problem));
}

const Json& field(const Json& j, const char* key, std::string_view what) {
  if (!j.is_object()) fail(what, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(what, std::string("missing field '") + key + "'");
  return *it;
}

Json vertices_to_json(const std::vector<EnvelopeVertex>& vertices) {
  Json out = Json::array();
  for (const auto& v : vertices)
    out.push_back({{"alpha", number_to_json(v.alpha)}, {"value", number_to_json(v.value)}});
  return out;
}

}  // namespace

Json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  if (std::isnan(v)) return Json("nan");
  return Json(v);
}

double number_from_json(const Json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v)) return v;
    fail(what, "unparseable number '" + s + "'");
  }
  fail(what, "expected a number");
}

void require_known_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view what) {
  if (!j.is_object()) fail(what, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto key : allowed) known = known || key == item.key();
    if (!known) fail(what, "unknown field '" + item.key() + "'");
  }
}

Json to_json(const CumulativeFunction& f) {
  Json knots = Json::array();
  for (const auto& k : f.knots()) {
    knots.push_back({{"alpha", number_to_json(k.alpha)},
                     {"pre", number_to_json(k.pre)},
                     {"post", number_to_json(k.post)}});
  }
  return {{"knots", std::move(knots)}};
}

CumulativeFunction cumulative_from_json(const Json& j, Role role) {
  const std::string_view what = role == Role::rate ? "crdf" : "cldf";
  if (j.is_string() && j.get<std::string>() == "unconstrained") {
    if (role != Role::leakage) fail(what, "only a leakage function may be unconstrained");
    return CumulativeFunction::unconstrained();
  }
  require_known_keys(j, {"knots"}, what);
  const Json& list = field(j, "knots", what);
  if (!list.is_array()) fail(what, "knots must be an array");
  std::vector<Knot> knots;
  knots.reserve(list.size());
  for (const auto& item : list) {
    require_known_keys(item, {"alpha", "pre", "post"}, what);
    Knot k;
    k.alpha = number_from_json(field(item, "alpha", what), what);
    k.post = number_from_json(field(item, "post", what), what);
    k.pre = item.contains("pre") ? number_from_json(item["pre"], what) : k.post;
    knots.push_back(k);
  }
  const ValidationReport report = validate_regular(knots, role);
  if (!report.valid()) fail(what, report.summary());
  return CumulativeFunction(std::move(knots), role);
}

Json to_json(const ValidationReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"property", to_string(v.property)}, {"detail", v.message}});
  }
  return {{"valid", report.valid()}, {"violations", std::move(violations)}};
}

Json to_json(const ConcaveEnvelope& e) {
  Json segments = Json::array();
  for (const auto& s : e.segments()) {
    segments.push_back({{"alpha_lo", number_to_json(s.alpha_lo)},
                        {"alpha_hi", number_to_json(s.alpha_hi)},
                        {"slope", number_to_json(s.slope)}});
  }
  Json out = to_json(e.to_cumulative());
  out["vertices"] = vertices_to_json(e.vertices());
  out["segments"] = std::move(segments);
  return out;
}

SourceModel source_from_json(const Json& j) {
  require_known_keys(j, {"pmf"}, "source");
  const Json& pmf = field(j, "pmf", "source");
  if (!pmf.is_array() || pmf.empty()) fail("source", "pmf must be a non-empty array");
  std::vector<double> p;
  for (const auto& v : pmf) p.push_back(number_from_json(v, "source.pmf"));
  return SourceModel(std::move(p));
}

Json to_json(const SourceModel& source) {
  Json pmf = Json::array();
  for (double p : source.pmf()) pmf.push_back(number_to_json(p));
  return {{"pmf", std::move(pmf)}};
}

DistortionSpec distortion_from_json(const Json& j, std::size_t alphabet_size) {
  require_known_keys(j, {"kind", "values"}, "distortion");
  const Json& kind_json = field(j, "kind", "distortion");
  if (!kind_json.is_string()) fail("distortion", "kind must be a string");
  const auto kind = kind_json.get<std::string>();
  if (kind != "matrix" && j.contains("values"))
    fail("distortion", "values are only accepted for kind 'matrix'");
  if (kind == "hamming") return DistortionSpec::hamming(alphabet_size);
  if (kind == "erasure") {
    if (alphabet_size != 2) fail("distortion", "erasure distortion needs a binary source");
    return DistortionSpec::erasure();
  }
  if (kind == "log_loss") return DistortionSpec::log_loss();
  if (kind == "matrix") {
    const Json& rows = field(j, "values", "distortion");
    if (!rows.is_array()) fail("distortion", "values must be an array of rows");
    DistortionMatrix m;
    for (const auto& row : rows) {
      if (!row.is_array()) fail("distortion", "values must be an array of rows");
      auto& out = m.emplace_back();
      for (const auto& v : row) out.push_back(number_from_json(v, "distortion.values"));
    }
    if (m.size() != alphabet_size) fail("distortion", "matrix needs one row per source letter");
    return DistortionSpec::from_matrix(std::move(m));
  }
  fail("distortion", "unknown kind '" + kind + "'");
}

Json to_json(const DistortionSpec& spec) {
  static constexpr const char* kNames[] = {"hamming", "erasure", "log_loss", "matrix"};
  Json out = {{"kind", kNames[static_cast<int>(spec.kind())]}};
  if (spec.has_matrix()) {
    Json rows = Json::array();
    for (const auto& row : spec.matrix()) {
      Json r = Json::array();
      for (double v : row) r.push_back(number_to_json(v));
      rows.push_back(std::move(r));
    }
    out["values"] = std::move(rows);
  }
  return out;
}

Json to_json(const RdCurve& curve) {
  Json out;
  if (const auto* lin = std::get_if<LinearRd>(&curve.form())) {
    out["form"] = "linear";
    out["c"] = number_to_json(lin->c);
  } else if (const auto* ham = std::get_if<BinaryHammingRd>(&curve.form())) {
    out["form"] = "binary_hamming";
    out["p"] = number_to_json(ham->p);
  } else {
    const auto& sampled = std::get<SampledRd>(curve.form());
    out["form"] = "sampled";
    Json points = Json::array();
    for (const auto& p : sampled.points)
      points.push_back({{"rate", number_to_json(p.rate)}, {"distortion", number_to_json(p.distortion)}});
    out["points"] = std::move(points);
  }
  out["d_max"] = number_to_json(curve.d_max());
  out["floor"] = number_to_json(curve.floor());
  return out;
}

Json to_json(const Verdict& verdict) {
  Json details = Json::object();
  const auto& d = verdict.details;
  if (d.shift) details["shift"] = number_to_json(*d.shift);
  if (d.shift_alpha) details["shift_alpha"] = number_to_json(*d.shift_alpha);
  if (d.integral) details["integral"] = number_to_json(*d.integral);
  if (d.entropy) details["entropy"] = number_to_json(*d.entropy);
  if (!d.envelope.empty()) details["envelope"] = vertices_to_json(d.envelope);
  if (!d.notes.empty()) details["notes"] = d.notes;
  return {{"achievable", verdict.achievable},
          {"margin", number_to_json(verdict.margin)},
          {"binding_alpha", number_to_json(verdict.binding_alpha)},
          {"details", std::move(details)}};
}

Json to_json(const TransmissionPlan& plan) {
  Json blocks = Json::array();
  for (const auto& slot : plan.slots) {
    Json sent = Json::array();
    for (const auto& c : slot.sent)
      sent.push_back({{"desc_block", c.desc_block}, {"rate", number_to_json(c.rate)}});
    blocks.push_back({{"time", slot.time},
                      {"available", number_to_json(slot.available)},
                      {"transmitted", number_to_json(slot.transmitted)},
                      {"sent", std::move(sent)}});
  }
  Json descriptions = Json::array();
  for (const auto& d : plan.descriptions) {
    descriptions.push_back({{"block", d.block},
                            {"rate", number_to_json(d.rate)},
                            {"predicted_distortion", number_to_json(d.predicted_distortion)}});
  }
  return {{"k", plan.k},
          {"blocks", std::move(blocks)},
          {"descriptions", std::move(descriptions)},
          {"predicted_avg_distortion", number_to_json(plan.predicted_avg_distortion)}};
}

Json to_json(const BruteForceResult& result) {
  Json used = Json::array();
  for (double v : result.used) used.push_back(number_to_json(v));
  Json desc = Json::array();
  for (double v : result.descriptions) desc.push_back(number_to_json(v));
  return {{"min_distortion", number_to_json(result.min_distortion)},
          {"argmin", {{"used", std::move(used)}, {"descriptions", std::move(desc)}}},
          {"grid_step", number_to_json(result.grid_step)}};
}

}  // namespace seqrate
