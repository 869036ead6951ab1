#pragma once

#include "fountain/fountain_geometry.hpp"
#include "fountain/hypothesis_audit.hpp"
#include "fountain/minimax_solver.hpp"
#include "fountain/validation.hpp"

#include <json.hpp>

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace fountain {

using Json = nlohmann::json;

/// JSON text with every float printed to 17 significant digits (non-finite
/// values become null) and keys in sorted order, so equal inputs give equal
/// bytes.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const AuditReport& r);
Json to_json(const CriticalPoint& cp, bool with_samples = true);
Json to_json(const Branch& b);
Json to_json(const BoundednessReport& r);
Json to_json(const ResidualReport& r);
Json to_json(const GeometryReport& g);

std::string sha256_hex(const std::string& bytes);

/// Writes artifacts into one directory, one file at a time; each write goes
/// to a temporary file first and is renamed into place.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return dir_; }
  void write(const std::string& name, const std::string& content);

  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string sha256;
  };
  std::vector<Entry> written() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

}  // namespace fountain
