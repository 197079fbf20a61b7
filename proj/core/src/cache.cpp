#include "csmon/cache.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace csmon {

namespace {

std::string repr(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string make_key(const std::string& shape_key, double alpha, Sided sided,
                     int grid_n, std::int64_t n_paths, std::uint64_t seed) {
  std::ostringstream os;
  os << shape_key << '\x1f' << repr(alpha) << '\x1f' << to_string(sided)
     << '\x1f' << grid_n << '\x1f' << n_paths << '\x1f' << seed;
  return os.str();
}

}  // namespace

QuantileCache::QuantileCache(std::filesystem::path file)
    : file_(std::move(file)) {
  load();
}

std::filesystem::path QuantileCache::default_path() {
  if (const char* env = std::getenv("CS_CACHE"); env != nullptr && *env != '\0')
    return std::filesystem::path(env);
  return std::filesystem::path(".cs-cache") / "quantiles.tsv";
}

std::string QuantileCache::format_record(const CriticalValue& cv) {
  std::ostringstream os;
  os << "v1 " << cv.shape_key << ' ' << repr(cv.alpha) << ' '
     << to_string(cv.sided) << ' ' << cv.grid_n << ' ' << cv.mc_paths << ' '
     << cv.seed << ' ' << repr(cv.value) << ' ' << repr(cv.std_error);
  return os.str();
}

std::optional<CriticalValue> QuantileCache::parse_record(
    const std::string& line) {
  std::istringstream is(line);
  std::string version;
  CriticalValue cv;
  std::string sided;
  if (!(is >> version)) return std::nullopt;
  if (version != "v1") return std::nullopt;
  if (!(is >> cv.shape_key >> cv.alpha >> sided >> cv.grid_n >> cv.mc_paths >>
        cv.seed >> cv.value >> cv.std_error))
    return std::nullopt;
  try {
    cv.sided = sided_from_string(sided);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  if (!(cv.alpha > 0.0 && cv.alpha < 1.0) || cv.grid_n <= 0 ||
      cv.mc_paths <= 0)
    return std::nullopt;
  return cv;
}

void QuantileCache::load() {
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    const auto cv = parse_record(line);
    if (!cv) continue;
    entries_[make_key(cv->shape_key, cv->alpha, cv->sided, cv->grid_n,
                      cv->mc_paths, cv->seed)] = *cv;
  }
}

std::optional<CriticalValue> QuantileCache::lookup(const std::string& shape_key,
                                                   double alpha, Sided sided,
                                                   int grid_n,
                                                   std::int64_t n_paths,
                                                   std::uint64_t seed) const {
  const auto it =
      entries_.find(make_key(shape_key, alpha, sided, grid_n, n_paths, seed));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

CriticalValue QuantileCache::get_or_compute(const BoundaryShape& shape,
                                            double alpha, Sided sided,
                                            std::int64_t n_paths, int grid_n,
                                            std::uint64_t seed, int threads) {
  if (const auto hit =
          lookup(shape.key(), alpha, sided, grid_n, n_paths, seed);
      hit)
    return *hit;
  const CriticalValue cv =
      critical_value(shape, alpha, sided, n_paths, grid_n, seed, threads);
  insert(cv);
  save();
  return cv;
}

void QuantileCache::insert(const CriticalValue& cv) {
  entries_[make_key(cv.shape_key, cv.alpha, cv.sided, cv.grid_n, cv.mc_paths,
                    cv.seed)] = cv;
}

void QuantileCache::save() const {
  if (file_.has_parent_path())
    std::filesystem::create_directories(file_.parent_path());
  std::filesystem::path tmp = file_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write cache file: " + tmp.string());
    for (const auto& [key, cv] : entries_) out << format_record(cv) << '\n';
  }
  std::filesystem::rename(tmp, file_);
}

}  // namespace csmon
