#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kanfis/data.hpp"
#include "kanfis/network.hpp"

namespace kanfis {

/// Everything needed to apply a trained model to raw CSV rows again.
struct ModelMetadata {
  std::vector<std::string> feature_names;
  Standardizer input_transform;
  std::string target_name;
  std::vector<std::string> class_names;
};

struct SavedModel {
  KanfisModel model;
  ModelMetadata meta;
};

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document with sorted keys and shortest round-trip
/// decimals, so load followed by save is byte-identical.
std::string serialize_model(const KanfisModel& model, const ModelMetadata& meta);
SavedModel parse_model(std::string_view text);

void save_model(const std::filesystem::path& path, const KanfisModel& model, const ModelMetadata& meta);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace kanfis
