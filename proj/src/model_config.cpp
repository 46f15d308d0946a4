#include "shiryaev/model_config.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace shiryaev {

std::string canonical_model_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

std::shared_ptr<const ObservationModel> model_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("model") || !spec["model"].is_string()) {
    throw std::invalid_argument(R"(model spec must be an object with a string "model" field)");
  }
  const std::string name = canonical_model_name(spec["model"].get<std::string>());
  if (name == "gaussian_shift") {
    if (!spec.contains("m") || !spec["m"].is_number()) {
      throw std::invalid_argument(R"(gaussian_shift model requires a numeric "m")");
    }
    return std::make_shared<GaussianShiftModel>(spec["m"].get<double>());
  }
  throw std::invalid_argument(fmt::format("unknown model \"{}\" (known: gaussian_shift)", name));
}

nlohmann::json model_to_json(const ObservationModel& model) {
  if (const auto* g = dynamic_cast<const GaussianShiftModel*>(&model)) {
    return {{"model", "gaussian_shift"}, {"m", g->shift()}};
  }
  throw std::invalid_argument(fmt::format("model {} has no config form", model.name()));
}

}  // namespace shiryaev
