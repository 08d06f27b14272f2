#pragma once

// CSV and JSON artifacts. Numbers use shortest round-trip decimal form.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "photosplit/efficiency.hpp"
#include "photosplit/optimizer.hpp"

namespace photosplit {

using Json = nlohmann::ordered_json;

std::string format_number(double x);
// JSON number, or null for NaN and infinities.
Json json_number(double x);

Json to_json(const MziSetting& setting);
Json to_json(const EfficiencyResult& result);
Json to_json(const PeakResult& peak, const FamilyDescriptor& family);
Json to_json(const ShapeProblem& problem);
Json to_json(const std::vector<ConvergencePoint>& curve);

// Columns: bandwidth, theta, phi_opt, P_S, err (one row per grid point).
void write_surface_csv(std::ostream& out, const EfficiencySurface& surface);
Json surface_to_json(const EfficiencySurface& surface);

// Columns: tau, amplitude.
void write_profile_csv(std::ostream& out, const VecX& alpha, double sigma, double tau_max, int samples);

}  // namespace photosplit
