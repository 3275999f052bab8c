#pragma once

/**
 * @file serialization.hpp
 * @brief JSON input/output for the CLI surface: polynomial zonotopes, boxes,
 *        output specifications, approximation policies, reachability setups
 *        and reach results.
 *
 * Matrices are stored row-major with explicit dimensions; exponent entries
 * are integers. All writers use insertion-ordered documents so that output
 * bytes are deterministic.
 */

#include "polyzono/enclosure.hpp"
#include "polyzono/pz.hpp"
#include "polyzono/reach.hpp"
#include "polyzono/verify.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace polyzono {

using OrderedJson = nlohmann::ordered_json;

OrderedJson pz_to_json(const PolyZonotope& pz);
PolyZonotope pz_from_json(const nlohmann::json& j);

OrderedJson box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j);

/// {"mode": "prove"|"avoid", "A": [[..]], "b": [..], "input_box": {...}}
struct SpecFile {
    OutputSpec spec;
    Box input_box;
};
SpecFile spec_from_json(const nlohmann::json& j);

OrderedJson policy_to_json(const ApproxPolicy& policy);
ApproxPolicy policy_from_json(const nlohmann::json& j);

/// Reachability setup document; controller file paths resolve relative to
/// base_dir.
ControlSetup setup_from_json(const nlohmann::json& j, const std::string& base_dir);

OrderedJson reach_result_to_json(const ReachResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace polyzono
