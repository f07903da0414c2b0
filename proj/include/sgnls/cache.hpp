#pragma once

#include "sgnls/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace sgnls {

inline constexpr int kCacheFormatVersion = 1;
inline constexpr std::string_view kArtifactVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Hash of everything that fixes the order and orientation of basis vectors.
std::string ordering_fingerprint();

// Header line: space separated key=value pairs.
std::map<std::string, std::string> read_cache_header(const std::filesystem::path& path);

void basis_cache_save(const EigenBasis& basis, const std::filesystem::path& path);

/// Throws CacheVersionError, CacheCorruptionError.
BasisPtr basis_cache_load(const std::filesystem::path& path);
/// Additionally throws CacheMismatchError when the file holds another level or bc.
BasisPtr basis_cache_load(const std::filesystem::path& path, int level, BoundaryCondition bc);

/// Loads the cached basis when it matches, otherwise builds and rewrites it.
BasisPtr load_or_build(const std::filesystem::path& path, int level, BoundaryCondition bc, bool* rebuilt = nullptr);

// Content fingerprint of a basis, recorded in reports.
std::string basis_fingerprint(const EigenBasis& basis);

class BasisStore {
 public:
  // Empty directory disables persistence.
  explicit BasisStore(std::filesystem::path dir = {});

  BasisPtr get(int level, BoundaryCondition bc);
  std::filesystem::path file_for(int level, BoundaryCondition bc) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::pair<int, BoundaryCondition>, BasisPtr> memo_;
};

}  // namespace sgnls
