#pragma once

#include <string>

#include "expdol/experiment.hpp"

namespace expdol::cli {

/// Parses the JSON experiment configuration (see README for the schema).
/// Missing keys fall back to the library defaults, which match the paper's
/// synthetic-experiment settings.
ExperimentConfig load_config(const std::string& path);

}  // namespace expdol::cli
