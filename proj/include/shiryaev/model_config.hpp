#pragma once

#include <memory>
#include <string_view>

#include <json.hpp>

#include "shiryaev/observation_models.hpp"

namespace shiryaev {

/// Builds a model from a run-config object such as
/// {"model": "gaussian_shift", "m": 0.23}. Names are matched with '-' and
/// '_' treated alike. Throws std::invalid_argument on unknown names or bad
/// parameters.
std::shared_ptr<const ObservationModel> model_from_json(const nlohmann::json& spec);

/// Inverse of model_from_json for models that have a config form.
nlohmann::json model_to_json(const ObservationModel& model);

/// Canonical registry name, e.g. "gaussian-shift" -> "gaussian_shift".
std::string canonical_model_name(std::string_view name);

}  // namespace shiryaev
