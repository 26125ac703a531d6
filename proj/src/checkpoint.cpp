// SPDX-License-Identifier: Apache-2.0
#include "sphmp/checkpoint.hpp"

#include "sphmp/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace sphmp {
namespace {

constexpr std::string_view kMagic = "SPHMP-CHECKPOINT";

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xFFu));
    bits >>= 8;
  }
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string serialize_params(const ModelParams& params) {
  nlohmann::ordered_json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = to_text(params.config());
  auto tensors = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    tensors.push_back({{"name", params.name(i)}, {"rows", params.value(i).rows()}, {"cols", params.value(i).cols()}});
  }
  header["tensors"] = std::move(tensors);

  std::string out(kMagic);
  out += '\n';
  out += header.dump();
  out += '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat& m = params.value(i);
    for (Eigen::Index k = 0; k < m.size(); ++k) put_le(out, m.data()[k]);
  }
  return out;
}

ModelParams deserialize_params(const std::string& bytes) {
  const auto magic_end = bytes.find('\n');
  if (magic_end == std::string::npos || std::string_view(bytes).substr(0, magic_end) != kMagic) {
    throw DataError("checkpoint: bad magic line");
  }
  const auto header_end = bytes.find('\n', magic_end + 1);
  if (header_end == std::string::npos) throw DataError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(magic_end + 1, header_end - magic_end - 1));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (!header.contains("format_version") || header["format_version"] != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported format version");
  }
  ModelParams params(parse_config(header.at("config").get<std::string>()));
  const auto& tensors = header.at("tensors");
  if (!tensors.is_array() || tensors.size() != params.size()) {
    throw DataError("checkpoint: tensor directory does not match the configured architecture");
  }
  std::size_t offset = header_end + 1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = tensors[i];
    Mat& m = params.value(i);
    if (t.at("name").get<std::string>() != params.name(i) || t.at("rows").get<long>() != m.rows() ||
        t.at("cols").get<long>() != m.cols()) {
      throw DataError("checkpoint: tensor '" + t.at("name").get<std::string>() + "' has unexpected name or shape");
    }
    const std::size_t nbytes = static_cast<std::size_t>(m.size()) * 8;
    if (offset + nbytes > bytes.size()) throw DataError("checkpoint: truncated tensor data");
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = get_le(bytes.data() + offset + 8 * static_cast<std::size_t>(k));
    offset += nbytes;
  }
  if (offset != bytes.size()) throw DataError("checkpoint: trailing bytes after tensor data");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_params(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write checkpoint " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_params(ss.str());
}

ModelParams load_checkpoint(const std::filesystem::path& path, const RunConfig& session) {
  ModelParams params = load_checkpoint(path);
  if (!architecture_matches(params.config(), session)) {
    throw DataError("checkpoint " + path.string() + " was written for a different model configuration");
  }
  return params;
}

}  // namespace sphmp
