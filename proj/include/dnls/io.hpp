#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dnls/constants.hpp"
#include "dnls/lattice.hpp"
#include "dnls/nonlinearity.hpp"
#include "dnls/rearrange.hpp"
#include "dnls/solver.hpp"
#include "dnls/threshold.hpp"

namespace dnls
{
using Json = nlohmann::ordered_json;

/// {"dim": N, "side": L, "values": [...]}, row-major with coordinate 1 slowest.
Json field_to_json(const Field& u);
/// Throws UsageError on missing keys, wrong value count or non-finite values.
Field field_from_json(const Json& j);

Field read_field(const std::filesystem::path& path);
void write_field(const std::filesystem::path& path, const Field& u);

/// Parses a JSON file; UsageError on I/O or syntax errors.
Json read_json(const std::filesystem::path& path);
/// Pretty-printed JSON with a trailing newline; parent directories are created.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

Json nonlinearity_to_json(const Nonlinearity& nl);

/// Result record: m, energy, lambda, residual, iterations, converged,
/// box_side, spec, seed, followed by diagnostic extras.
Json outcome_to_json(const MinimizeOutcome& r, const Nonlinearity& nl, const SolveConfig& cfg);
Json threshold_to_json(const ThresholdReport& r, const Nonlinearity& nl);
Json constants_to_json(const ConstantsReport& r);
Json rearrange_to_json(const RearrangeReport& r);

/// Shortest round-trip decimal form of a double ("nan"/"inf" spelled out).
std::string format_double(double v);

/// CSV with header m,energy,converged,box_side.
std::string curve_csv(const EnergyCurve& curve);
/// Self-contained SVG polyline of energy against mass with labelled axes.
std::string curve_svg(const EnergyCurve& curve, const std::string& title);

} // namespace dnls
