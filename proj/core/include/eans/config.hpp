#pragma once

#include <string>

#include "eans/pipeline.hpp"

namespace eans {

std::string config_to_json(const MissionConfig& config);
// Partial documents are fine: absent fields keep their defaults. Unknown
// fields are rejected.
MissionConfig config_from_json(const std::string& text);
MissionConfig load_config(const std::string& path);

}  // namespace eans
