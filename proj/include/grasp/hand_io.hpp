#pragma once

#include "grasp/hand_model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace grasp {

/// Hand description that violates the schema. The message starts with the
/// JSON path of the offending field, e.g. "fingers[0].joints[1].q_max".
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kHandFormatVersion = 1;

HandModel parse_hand_model(const std::string& json_text);
HandModel load_hand_model(const std::filesystem::path& path);

/// Writes a fully explicit description (every point, normal, and rotation
/// matrix), so load_hand_model(save) reproduces the model exactly.
std::string hand_model_to_json(const HandModel& model);
void save_hand_model(const std::filesystem::path& path, const HandModel& model);

/// Compact procedural description of the bundled three-finger hand.
const std::string& default_hand_description();
HandModel default_hand_model();

}  // namespace grasp
