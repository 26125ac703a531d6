// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/params.hpp"

#include <filesystem>
#include <string>

namespace sphmp {

inline constexpr int kCheckpointVersion = 1;

/// Magic line, one-line JSON header (version, config, tensor directory), then the
/// tensors as little-endian float64 in directory order.
std::string serialize_params(const ModelParams& params);
ModelParams deserialize_params(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
/// Config is taken from the file.
ModelParams load_checkpoint(const std::filesystem::path& path);
/// Throws DataError when the file's architecture differs from session.
ModelParams load_checkpoint(const std::filesystem::path& path, const RunConfig& session);

}  // namespace sphmp
