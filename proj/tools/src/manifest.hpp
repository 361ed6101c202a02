#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace catport::cli {

inline constexpr int kManifestSchema = 1;

/// Hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& path);

/// Adds (or replaces) the entries for `outputs` in `manifest.json` next to
/// the first output, together with the resolved configuration.
std::filesystem::path update_manifest(const std::vector<std::filesystem::path>& outputs,
                                      const nlohmann::json& config);

}  // namespace catport::cli
