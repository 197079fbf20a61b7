#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "csmon/quantiles.hpp"

namespace csmon {

// File-backed store of computed critical values. Line-oriented, versioned:
//   v1 <shape_key> <alpha> <sided> <grid_n> <n_paths> <seed> <value> <std_error>
// Unknown or malformed lines are skipped on load. Saves replace the file
// atomically (write to a temporary, then rename); a cache is single-writer.
class QuantileCache {
 public:
  explicit QuantileCache(std::filesystem::path file);

  // $CS_CACHE when set, else ./.cs-cache/quantiles.tsv
  static std::filesystem::path default_path();

  std::optional<CriticalValue> lookup(const std::string& shape_key,
                                      double alpha, Sided sided, int grid_n,
                                      std::int64_t n_paths,
                                      std::uint64_t seed) const;

  // Cached value when present; otherwise computes, stores and saves.
  CriticalValue get_or_compute(const BoundaryShape& shape, double alpha,
                               Sided sided, std::int64_t n_paths, int grid_n,
                               std::uint64_t seed, int threads = 0);

  void insert(const CriticalValue& cv);
  void save() const;

  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& path() const { return file_; }

  static std::string format_record(const CriticalValue& cv);
  static std::optional<CriticalValue> parse_record(const std::string& line);

 private:
  void load();

  std::filesystem::path file_;
  std::map<std::string, CriticalValue> entries_;
};

}  // namespace csmon
