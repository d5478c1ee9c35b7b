#pragma once

#include <json.hpp>
#include <string>

#include "ensctrl/scalar_verdict.hpp"
#include "ensctrl/spectral.hpp"
#include "ensctrl/synthesis.hpp"
#include "ensctrl/system.hpp"

namespace ensctrl {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadedSystem {
    EnsembleSystem system;
    AnalysisConfig config;   // defaults merged with the file's tolerance overrides
    std::string input_digest;
};

/// Reads and validates a JSON system description. Schema violations carry a
/// JSON-pointer path; expression errors carry byte offsets.
LoadedSystem load_system(const std::string& path);
LoadedSystem parse_system(const std::string& json_text);

nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json config_to_json(const AnalysisConfig& cfg);
nlohmann::json gramian_to_json(const EnsembleGramian& g);
nlohmann::json schedule_to_json(const ControlSchedule& s);
ControlSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json steering_to_json(const SteeringReport& r);

std::string tool_version();

}  // namespace ensctrl
