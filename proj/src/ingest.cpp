// SPDX-License-Identifier: Apache-2.0
#include "sphmp/ingest.hpp"

#include "sphmp/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sphmp {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void fail_at(std::size_t frame, std::size_t line, const std::string& what) {
  std::ostringstream oss;
  oss << "xyz frame " << frame << ", line " << line << ": " << what;
  throw DataError(oss.str());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void validate(const Graph3D& g) {
  const auto n = g.atomic_numbers.size();
  if (n == 0) throw DataError("graph '" + g.id + "' has no atoms");
  if (static_cast<std::size_t>(g.positions.rows()) != n) {
    throw DataError("graph '" + g.id + "': positions rows do not match atom count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int z = g.atomic_numbers[i];
    if (z < 1 || z > kMaxAtomicNumber) {
      throw DataError("graph '" + g.id + "': atomic number " + std::to_string(z) + " out of range");
    }
    if (!g.positions.row(static_cast<Eigen::Index>(i)).allFinite()) {
      throw DataError("graph '" + g.id + "': non-finite coordinate for atom " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (g.positions.row(static_cast<Eigen::Index>(i)) -
                        g.positions.row(static_cast<Eigen::Index>(j))).norm();
      if (d < kMinAtomSeparation) {
        throw DataError("graph '" + g.id + "': atoms " + std::to_string(i) + " and " +
                        std::to_string(j) + " are closer than 1e-6 Å");
      }
    }
  }
  if (g.graph_target && !std::isfinite(*g.graph_target)) {
    throw DataError("graph '" + g.id + "': non-finite target");
  }
  if (g.node_targets) {
    if (static_cast<std::size_t>(g.node_targets->rows()) != n || !g.node_targets->allFinite()) {
      throw DataError("graph '" + g.id + "': node targets must be finite with one row per atom");
    }
  }
}

Graph3D make_graph(std::string id, std::vector<int> atomic_numbers, Eigen::MatrixX3d positions,
                   std::optional<double> target) {
  Graph3D g{std::move(id), std::move(atomic_numbers), std::move(positions), target, std::nullopt};
  validate(g);
  return g;
}

std::vector<Graph3D> parse_xyz(std::string_view text, std::string_view id_prefix) {
  const auto lines = split_lines(text);
  std::vector<Graph3D> frames;
  std::size_t li = 0;
  while (true) {
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li >= lines.size()) break;

    const std::size_t frame = frames.size();
    const std::size_t count_line = li + 1;
    const auto count = parse_integer(trim(lines[li]));
    if (!count || *count < 1) fail_at(frame, count_line, "malformed atom count '" + std::string(trim(lines[li])) + "'");
    ++li;
    if (li >= lines.size()) fail_at(frame, count_line + 1, "missing comment line");

    Graph3D g;
    g.id = std::string(id_prefix) + ":" + std::to_string(frame);
    for (auto tok : split_ws(lines[li])) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = tok.substr(0, eq);
      const auto val = tok.substr(eq + 1);
      if (key == "target") {
        const auto t = parse_double(val);
        if (!t || !std::isfinite(*t)) fail_at(frame, li + 1, "malformed target '" + std::string(val) + "'");
        g.graph_target = *t;
      } else if (key == "id" && !val.empty()) {
        g.id = std::string(val);
      }
    }
    ++li;

    const auto n = static_cast<std::size_t>(*count);
    g.atomic_numbers.reserve(n);
    g.positions.resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t a = 0; a < n; ++a, ++li) {
      if (li >= lines.size()) {
        fail_at(frame, li + 1, "atom count mismatch: expected " + std::to_string(n) + " atoms, found " +
                                   std::to_string(a));
      }
      const auto toks = split_ws(lines[li]);
      if (toks.size() < 4) {
        fail_at(frame, li + 1, "atom count mismatch or malformed atom line '" + std::string(trim(lines[li])) + "'");
      }
      auto z = atomic_number(toks[0]);
      if (!z) {
        if (auto zi = parse_integer(toks[0]); zi && *zi >= 1 && *zi <= kMaxAtomicNumber) z = static_cast<int>(*zi);
      }
      if (!z) fail_at(frame, li + 1, "unknown element symbol '" + std::string(toks[0]) + "'");
      g.atomic_numbers.push_back(*z);
      for (int c = 0; c < 3; ++c) {
        const auto v = parse_double(toks[static_cast<std::size_t>(c) + 1]);
        if (!v) fail_at(frame, li + 1, "malformed coordinate '" + std::string(toks[static_cast<std::size_t>(c) + 1]) + "'");
        if (!std::isfinite(*v)) fail_at(frame, li + 1, "non-finite coordinate");
        g.positions(static_cast<Eigen::Index>(a), c) = *v;
      }
    }
    try {
      validate(g);
    } catch (const DataError& e) {
      fail_at(frame, count_line, e.what());
    }
    frames.push_back(std::move(g));
  }
  return frames;
}

std::vector<Graph3D> read_xyz_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_xyz(text, path.filename().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string to_xyz(const std::vector<Graph3D>& graphs) {
  std::string out;
  for (const auto& g : graphs) {
    out += std::to_string(g.size()) + "\n";
    out += "id=" + g.id;
    if (g.graph_target) out += " target=" + format_double(*g.graph_target);
    out += "\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      out += element_symbol(g.atomic_numbers[i]);
      for (int c = 0; c < 3; ++c) {
        out += ' ';
        out += format_double(g.positions(static_cast<Eigen::Index>(i), c));
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = "manifest line " + std::to_string(i + 1) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + "invalid record: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("file") || !rec["file"].is_string() || !rec.contains("target")) {
      throw DataError(where + "expected {\"file\": <path>, \"target\": <float>}");
    }
    double target = 0.0;
    const auto& t = rec["target"];
    if (t.is_number()) {
      target = t.get<double>();
    } else if (t.is_string()) {
      const auto v = parse_double(t.get<std::string>());
      if (!v) throw DataError(where + "malformed target");
      target = *v;
    } else {
      throw DataError(where + "target must be a number");
    }
    if (!std::isfinite(target)) throw DataError(where + "non-finite target");

    const std::filesystem::path rel = rec["file"].get<std::string>();
    const std::string id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                          : rel.generic_string();
    if (!seen.insert(id).second) throw DataError(where + "duplicate id '" + id + "'");
    entries.push_back({rel.is_absolute() ? rel : base_dir / rel, target});
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("manifest not found: " + path.string());
  const auto entries = parse_manifest(read_text(path), path.parent_path());
  for (const auto& e : entries) {
    if (!std::filesystem::exists(e.file)) throw DataError("manifest references missing file: " + e.file.string());
  }
  return entries;
}

std::vector<Graph3D> load_dataset(const std::filesystem::path& manifest) {
  std::vector<Graph3D> out;
  for (const auto& e : load_manifest(manifest)) {
    auto frames = read_xyz_file(e.file);
    if (frames.empty()) throw DataError("no frames in " + e.file.string());
    Graph3D g = std::move(frames.front());
    g.id = e.file.filename().string();
    g.graph_target = e.target;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace sphmp
