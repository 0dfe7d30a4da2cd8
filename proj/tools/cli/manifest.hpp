#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cli/config.hpp"

namespace newsflow::cli {

inline constexpr std::string_view kVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view bytes);
// "fnv1a64:<16 hex digits>" of a file's bytes, or "missing".
std::string file_digest(const std::string& path);
std::string config_hash(const PipelineConfig& cfg);

// The manifest is itself a valid config file: the resolved settings as
// key=value lines, preceded by '#' lines naming the subcommand, versions,
// and digests of every input and output.
void write_manifest(const std::string& path, const std::string& subcommand, const PipelineConfig& cfg,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs);

}  // namespace newsflow::cli
