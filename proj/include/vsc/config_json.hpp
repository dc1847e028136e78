#pragma once

#include <string>

#include <json.hpp>

#include "vsc/config.hpp"

namespace vsc {

nlohmann::json plan_to_json(const RunPlan& plan);
RunPlan plan_from_json(const nlohmann::json& config, const std::string& source = "<manifest>");

}  // namespace vsc
