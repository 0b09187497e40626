#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gamecat/pipeline.hpp"

namespace gamecat {

// Single JSON document. Doubles are written in shortest round-trip form, so
// a loaded model predicts bit-for-bit like the saved one.
std::string serialize_model(const PipelineModel& model);

// Throws FormatError (with byte offset) on malformed input and VersionError
// when format_version is not supported.
PipelineModel deserialize_model(std::string_view text);

void save_model(const PipelineModel& model, const std::filesystem::path& path);
PipelineModel load_model(const std::filesystem::path& path);

}  // namespace gamecat
