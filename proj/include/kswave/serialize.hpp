#pragma once

#include <string>

#include "json.hpp"
#include "kswave/heteroclinic.hpp"
#include "kswave/model.hpp"
#include "kswave/pde.hpp"
#include "kswave/regions.hpp"
#include "kswave/spectra.hpp"

namespace kswave {

using Json = nlohmann::ordered_json;

Json to_json(const ChiFunction& chi);
Json to_json(const ModelParams& p);
Json to_json(const MinSpeedResult& r);
Json to_json(const LiteratureBounds& b);
Json to_json(const SpectrumReport& r);
Json to_json(const FluxReport& r);
Json to_json(const SurfaceCheck& s);
Json to_json(const ShootConfig& cfg);
Json to_json(const Grid1D& g);

/// Summary of an outcome without the trajectory.
Json to_json(const OrbitOutcome& o);

/// Parses {"type": "constant" | "affine" | "tabulated", ...}; throws
/// ConfigError naming the offending path (e.g. "chi.kappa").
ChiFunction chi_from_json(const Json& j, const std::string& path = "chi");
/// Parses {"mu", "beta", "D", "chi"}; missing keys take the ModelParams
/// defaults. The result is not validated.
ModelParams params_from_json(const Json& j);

/// Profile metadata and arrays.
Json profile_json(const TravelingWaveProfile& prof, const ModelParams& p, const ShootConfig& cfg);
/// Header "xi,U,V,Y,W"; Y (and V for the reduced system) left empty when absent.
std::string profile_csv(const TravelingWaveProfile& prof);
/// Header "x,u,v".
std::string snapshot_csv(const Grid1D& g, const FieldPair& f);

/// Shortest round-trip decimal form of a double.
std::string format_number(double x);

}  // namespace kswave
