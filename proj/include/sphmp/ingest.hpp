// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sphmp {

inline constexpr int kMaxAtomicNumber = 86;
inline constexpr double kMinAtomSeparation = 1e-6;  // Å

/// A 3D graph: element identities plus Cartesian positions (Å) and optional targets.
/// Edges are not stored; they are derived from positions by the geometry module.
struct Graph3D {
  std::string id;
  std::vector<int> atomic_numbers;
  Eigen::MatrixX3d positions;
  std::optional<double> graph_target;
  std::optional<Eigen::MatrixXd> node_targets;

  std::size_t size() const { return atomic_numbers.size(); }
};

/// Throws DataError when the graph violates its invariants (row count, finiteness,
/// element range, duplicate positions).
void validate(const Graph3D& g);

/// Builds and validates a graph.
Graph3D make_graph(std::string id, std::vector<int> atomic_numbers, Eigen::MatrixX3d positions,
                   std::optional<double> target = std::nullopt);

/// Element symbol for Z in [1, 86].
std::string_view element_symbol(int z);
/// Z for a symbol (case-insensitive on the second letter); nullopt when unknown.
std::optional<int> atomic_number(std::string_view symbol);

/// Parses one or more concatenated XYZ frames. The comment line may carry
/// `target=<float>`. Errors name the frame index and the 1-based line number.
std::vector<Graph3D> parse_xyz(std::string_view text, std::string_view id_prefix = "frame");
std::vector<Graph3D> read_xyz_file(const std::filesystem::path& path);

/// Writes frames in the format accepted by parse_xyz, with shortest round-trip floats.
std::string to_xyz(const std::vector<Graph3D>& graphs);

struct ManifestEntry {
  std::filesystem::path file;
  double target = 0.0;
};

/// Reads line-delimited records `{"file": <relative path>, "target": <float>}`.
/// Paths resolve relative to the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base_dir);

/// Loads every manifest entry's structure (first frame of each file) with its target.
std::vector<Graph3D> load_dataset(const std::filesystem::path& manifest);

// Locale-independent numeric parsing of a whole token.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);
/// Shortest representation that reparses to the identical double.
std::string format_double(double v);
/// Fixed 17-significant-digit representation.
std::string format_double17(double v);

}  // namespace sphmp
