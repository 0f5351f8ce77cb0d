#include "kswave/serialize.hpp"

#include <sstream>

#include "kswave/error.hpp"

namespace kswave {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double number_at(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw Error(ErrorCode::ConfigError, path + "." + key + ": missing");
  if (!j.at(key).is_number()) throw Error(ErrorCode::ConfigError, path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

Json complex_pair(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

std::string format_number(double x) { return Json(x).dump(); }

Json to_json(const ChiFunction& chi) {
  return std::visit(overloaded{
                        [](const ChiConstant& k) { return Json{{"type", "constant"}, {"kappa", k.kappa}}; },
                        [](const ChiAffine& a) { return Json{{"type", "affine"}, {"a", a.a}, {"b", a.b}}; },
                        [](const ChiTabulated& t) {
                          Json nodes = Json::array();
                          for (std::size_t i = 0; i < t.v.size(); ++i) nodes.push_back({t.v[i], t.value[i]});
                          return Json{{"type", "tabulated"}, {"nodes", nodes}};
                        },
                    },
                    chi.variant());
}

Json to_json(const ModelParams& p) {
  return Json{{"mu", p.mu}, {"beta", p.beta}, {"D", p.diff}, {"chi", to_json(p.chi)}};
}

Json to_json(const MinSpeedResult& r) {
  return Json{{"c_star", r.c_star}, {"binding", std::string(to_string(r.binding))}};
}

Json to_json(const LiteratureBounds& b) { return Json{{"lower", b.lower}, {"upper", b.upper}}; }

Json to_json(const SpectrumReport& r) {
  Json ev = Json::array();
  for (const auto& z : r.eigenvalues) ev.push_back(complex_pair(z));
  return Json{{"dimension", r.dimension},
              {"classification", std::string(to_string(r.classification))},
              {"eigenvalues", ev}};
}

Json to_json(const FluxReport& r) {
  return Json{{"face", std::string(to_string(r.face))},
              {"samples", r.samples},
              {"worst_margin", r.worst_margin},
              {"worst_point", r.worst_point}};
}

Json to_json(const SurfaceCheck& s) {
  return Json{{"holds", s.holds},
              {"worst_value", s.worst_value},
              {"worst_point", s.worst_point},
              {"condition_inside", s.condition_inside},
              {"condition_origin", s.condition_origin},
              {"samples", s.samples}};
}

Json to_json(const ShootConfig& cfg) {
  return Json{{"epsilon", cfg.epsilon},
              {"convergence_radius", cfg.convergence_radius},
              {"confirm_decay", cfg.confirm_decay},
              {"exit_tol", cfg.exit_tol},
              {"face_tol", cfg.face_tol},
              {"xi_max_factor", cfg.xi_max_factor},
              {"rel_tol", cfg.integrator.rel_tol},
              {"abs_tol", cfg.integrator.abs_tol}};
}

Json to_json(const Grid1D& g) { return Json{{"L", g.length}, {"n", g.n}, {"x0", g.x0}, {"dx", g.dx()}}; }

Json to_json(const OrbitOutcome& o) {
  Json j{{"c", o.c},
         {"dimension", o.dimension},
         {"kind", std::string(to_string(o.kind))},
         {"xi_event", o.xi_event},
         {"xi_ball", o.xi_ball},
         {"steps", o.trajectory.steps_accepted}};
  if (o.face) j["face"] = std::string(to_string(*o.face));
  if (o.component >= 0) j["component"] = o.component;
  return j;
}

ChiFunction chi_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, path + ": expected an object");
  if (!j.contains("type") || !j.at("type").is_string()) {
    throw Error(ErrorCode::ConfigError, path + ".type: expected \"constant\", \"affine\" or \"tabulated\"");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") return ChiFunction::constant(number_at(j, "kappa", path));
  if (type == "affine") return ChiFunction::affine(number_at(j, "a", path), number_at(j, "b", path));
  if (type == "tabulated") {
    if (!j.contains("nodes") || !j.at("nodes").is_array()) {
      throw Error(ErrorCode::ConfigError, path + ".nodes: expected an array of [v, value] pairs");
    }
    std::vector<std::pair<double, double>> nodes;
    std::size_t i = 0;
    for (const auto& node : j.at("nodes")) {
      if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
        throw Error(ErrorCode::ConfigError, path + ".nodes[" + std::to_string(i) + "]: expected [v, value]");
      }
      nodes.emplace_back(node[0].get<double>(), node[1].get<double>());
      ++i;
    }
    return ChiFunction::tabulated(std::move(nodes));
  }
  throw Error(ErrorCode::ConfigError, path + ".type: unknown chi type \"" + type + "\"");
}

ModelParams params_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "params: expected an object");
  ModelParams p;
  if (j.contains("mu")) p.mu = number_at(j, "mu", "params");
  if (j.contains("beta")) p.beta = number_at(j, "beta", "params");
  if (j.contains("D")) p.diff = number_at(j, "D", "params");
  if (j.contains("chi")) p.chi = chi_from_json(j.at("chi"));
  return p;
}

Json profile_json(const TravelingWaveProfile& prof, const ModelParams& p, const ShootConfig& cfg) {
  Json j{{"params", to_json(p)},
         {"speed", prof.speed},
         {"dimension", prof.dimension},
         {"normalization_shift", prof.shift},
         {"points", prof.size()},
         {"tolerances", to_json(cfg)},
         {"checks",
          {{"ordering_violations", prof.checks.ordering_violations},
           {"monotonicity_violations", prof.checks.monotonicity_violations},
           {"max_ordering_excess", prof.checks.max_ordering_excess},
           {"max_increase", prof.checks.max_increase},
           {"left_error", prof.checks.left_error},
           {"right_error", prof.checks.right_error}}},
         {"xi", prof.xi},
         {"U", prof.u}};
  if (!prof.v.empty()) j["V"] = prof.v;
  if (!prof.y.empty()) j["Y"] = prof.y;
  j["W"] = prof.w;
  return j;
}

std::string profile_csv(const TravelingWaveProfile& prof) {
  std::ostringstream out;
  out << "xi,U,V,Y,W\n";
  for (std::size_t i = 0; i < prof.size(); ++i) {
    out << format_number(prof.xi[i]) << ',' << format_number(prof.u[i]) << ',';
    if (!prof.v.empty()) out << format_number(prof.v[i]);
    out << ',';
    if (!prof.y.empty()) out << format_number(prof.y[i]);
    out << ',' << format_number(prof.w[i]) << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const Grid1D& g, const FieldPair& f) {
  std::ostringstream out;
  out << "x,u,v\n";
  for (int i = 0; i < g.n; ++i) {
    out << format_number(g.x(i)) << ',' << format_number(f.u[i]) << ',' << format_number(f.v[i]) << '\n';
  }
  return out.str();
}

}  // namespace kswave
