#include "sdflow_cli/reports.hpp"

#include <fstream>
#include <stdexcept>

namespace sdflow::cli {

json options_json(const IntegratorOptions& o) {
  return json{{"rtol", o.rtol},
              {"atol", o.atol},
              {"min_step", o.min_step},
              {"max_step", o.max_step},
              {"initial_step", o.initial_step},
              {"slope_ceiling", o.slope_ceiling},
              {"event_tolerance", o.event_tolerance},
              {"sample_spacing", o.sample_spacing},
              {"max_angle_increment", o.max_angle_increment},
              {"triviality_tolerance", o.triviality_tolerance}};
}

json state_json(const ProfileState& s) {
  return json{{"y", s.y}, {"phi", s.phi}, {"psi", s.psi}, {"k", s.k}, {"w", s.w}, {"S", s.S}};
}

json kind_json(const SolitonKind& kind) {
  json j{{"name", std::string(kind_name(kind))}};
  if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
    j["a"] = tw->a;
    j["b"] = tw->b;
  }
  return j;
}

SolitonKind kind_from_json(const json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "steady") return Steady{};
  if (name == "selfsimilar") return SelfSimilar{};
  if (name == "travelling") {
    return TravellingWave{j.at("a").get<double>(), j.at("b").get<double>()};
  }
  throw std::invalid_argument("unknown soliton kind '" + name + "'");
}

json certificate_json(const BreakdownCertificate& c) {
  json detail = json::object();
  switch (c.type) {
    case CertificateType::GraphicalityLoss:
      detail["slope"] = c.slope;
      break;
    case CertificateType::AngleExcess:
      detail["interval"] = {c.interval_begin, c.interval_end};
      detail["turning"] = c.turning;
      break;
    default:
      break;
  }
  return json{{"type", std::string(certificate_name(c.type))},
              {"y_event", c.y_event},
              {"direction", c.direction},
              {"detail", detail}};
}

json classification_json(const ClassificationReport& r, std::optional<std::uint64_t> seed,
                         const IntegratorOptions& opts, double y_budget) {
  json j{{"kind", kind_json(r.kind)},
         {"init", state_json(r.init)},
         {"outcome", std::string(verdict_name(r.verdict))},
         {"y_budget", y_budget},
         {"integrator", options_json(opts)},
         {"max_abs_curvature", r.max_abs_curvature},
         {"total_turning", r.total_turning},
         {"steps", r.forward.steps + r.backward.steps}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["certificate"] = r.certificate ? certificate_json(*r.certificate) : json(nullptr);
  return j;
}

json identity_json(const std::string& identity, double max_residual, double y_at_max,
                   std::size_t samples, const json& thresholds, bool pass) {
  return json{{"identity", identity},   {"max_residual", max_residual}, {"y_at_max", y_at_max},
              {"samples", samples},     {"thresholds", thresholds},    {"pass", pass}};
}

json graph_monitors_json(const GraphMonitors& m) {
  return json{{"max_slope", m.max_slope}, {"total_turning", m.total_turning},
              {"max_abs_w", m.max_abs_w}, {"l2_norm", m.l2_norm},
              {"dirichlet", m.dirichlet}};
}

json curve_monitors_json(const CurveMonitors& m) {
  return json{{"length", m.length},
              {"signed_area", m.signed_area},
              {"max_curvature", m.max_curvature},
              {"diameter", m.diameter}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace sdflow::cli
