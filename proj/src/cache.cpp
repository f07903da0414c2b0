#include "sgnls/cache.hpp"

#include "sgnls/errors.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sgnls {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string hexfloat(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_hexfloat(std::string_view tok) {
  bool neg = false;
  if (!tok.empty() && (tok.front() == '-' || tok.front() == '+')) {
    neg = tok.front() == '-';
    tok.remove_prefix(1);
  }
  if (tok.size() >= 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) tok.remove_prefix(2);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, std::chars_format::hex);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CacheCorruptionError("bad hex float '" + std::string(tok) + "'");
  return neg ? -v : v;
}

double parse_decimal(std::string_view tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CacheCorruptionError("bad number '" + std::string(tok) + "'");
  return v;
}

long parse_int(std::string_view tok) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw CacheCorruptionError("bad integer '" + std::string(tok) + "'");
  return v;
}

std::string encode_localized(const std::optional<LocalizedDescriptor>& d) {
  if (!d) return "-";
  return std::to_string(d->j) + ":" + std::to_string(d->junction) + ":" + d->first.str() + ":" + d->second.str();
}

std::optional<LocalizedDescriptor> decode_localized(const std::string& tok) {
  if (tok == "-") return std::nullopt;
  std::vector<std::string> parts;
  std::stringstream ss(tok);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 4) throw CacheCorruptionError("bad localized descriptor '" + tok + "'");
  try {
    return LocalizedDescriptor{static_cast<int>(parse_int(parts[0])), static_cast<int>(parse_int(parts[1])),
                               CellAddress(parts[2]), CellAddress(parts[3])};
  } catch (const DomainError&) {
    throw CacheCorruptionError("bad localized descriptor '" + tok + "'");
  }
}

std::string record_of(const EigenBasis& basis, int i) {
  const auto& m = basis.meta(i);
  std::string out = decimal(m.lambda);
  out += ' ';
  out += std::to_string(m.birth_level);
  out += ' ';
  out += encode_localized(m.localized);
  out += ' ';
  out += std::to_string(m.graph_history.size());
  for (double h : m.graph_history) {
    out += ' ';
    out += hexfloat(h);
  }
  const auto col = basis.functions().col(i);
  for (Eigen::Index r = 0; r < col.size(); ++r) {
    out += ' ';
    out += hexfloat(col[r]);
  }
  out += '\n';
  return out;
}

std::map<std::string, std::string> parse_header(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw CacheCorruptionError("malformed cache header");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw CacheCorruptionError("cache header lacks '" + key + "'");
  return it->second;
}

}  // namespace

std::string ordering_fingerprint() {
  const std::string rule =
      "vertices=birth-level,y,x;eigensolve=dsyevd;measure=quadrature;cluster-tol=1e-9;"
      "localized=junction0,first;rest=dominant-vertex;gram-schmidt=two-pass;sign=max-positive";
  return hex64(fnv1a64(rule));
}

std::map<std::string, std::string> read_cache_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheCorruptionError("cannot open cache " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw CacheCorruptionError("empty cache file " + path.string());
  return parse_header(line);
}

void basis_cache_save(const EigenBasis& basis, const fs::path& path) {
  std::ostringstream header;
  header << "format_version=" << kCacheFormatVersion << " artifact_version=" << kArtifactVersion
         << " level=" << basis.level() << " bc=" << to_string(basis.bc()) << " count=" << basis.size()
         << " vertices=" << basis.vertices() << " ordering_fingerprint=" << ordering_fingerprint() << " checksum=";
  const std::string head = header.str();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache " + tmp.string());
    // checksum is fixed width and patched once the payload is written
    out << head << std::string(16, '0') << '\n';
    std::uint64_t h = fnv1a64({});
    for (int i = 0; i < basis.size(); ++i) {
      const auto rec = record_of(basis, i);
      h = fnv1a64(rec, h);
      out << rec;
    }
    out.seekp(static_cast<std::streamoff>(head.size()));
    out << hex64(h);
    if (!out) throw Error("short write to cache " + tmp.string());
  }
  fs::rename(tmp, path);
}

BasisPtr basis_cache_load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheCorruptionError("cannot open cache " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw CacheCorruptionError("empty cache file " + path.string());
  const auto kv = parse_header(line);

  const auto& version = require(kv, "format_version");
  if (version != std::to_string(kCacheFormatVersion))
    throw CacheVersionError("cache format version " + version + " is not " + std::to_string(kCacheFormatVersion));
  const auto& artifact = require(kv, "artifact_version");
  if (artifact != kArtifactVersion)
    throw CacheVersionError("cache written by version " + artifact + ", this is " + std::string(kArtifactVersion));
  if (require(kv, "ordering_fingerprint") != ordering_fingerprint())
    throw CacheVersionError("cache uses a different basis ordering");

  const int level = static_cast<int>(parse_int(require(kv, "level")));
  const auto bc = parse_boundary_condition(require(kv, "bc"));
  const long count = parse_int(require(kv, "count"));
  const long vertices = parse_int(require(kv, "vertices"));
  if (level < 0 || level > kDefaultMaxLevel || vertices != vertex_count(level) || count <= 0 || count > vertices)
    throw CacheCorruptionError("inconsistent cache header");

  std::vector<EigenMeta> meta;
  meta.reserve(static_cast<std::size_t>(count));
  Eigen::MatrixXd functions(vertices, count);
  std::uint64_t h = fnv1a64({});
  std::string record;
  long row = 0;
  while (std::getline(in, record)) {
    h = fnv1a64(record, h);
    h = fnv1a64("\n", h);
    if (row >= count) throw CacheCorruptionError("extra records in cache");
    std::istringstream rs(record);
    std::string tok;
    auto next = [&]() -> std::string {
      if (!(rs >> tok)) throw CacheCorruptionError("truncated record " + std::to_string(row));
      return tok;
    };
    EigenMeta m;
    m.lambda = parse_decimal(next());
    m.birth_level = static_cast<int>(parse_int(next()));
    m.localized = decode_localized(next());
    const long hist = parse_int(next());
    if (hist < 1 || hist > level + 1) throw CacheCorruptionError("bad history length");
    for (long h = 0; h < hist; ++h) m.graph_history.push_back(parse_hexfloat(next()));
    for (long r = 0; r < vertices; ++r) functions(r, row) = parse_hexfloat(next());
    if (rs >> tok) throw CacheCorruptionError("trailing data in record " + std::to_string(row));
    meta.push_back(std::move(m));
    ++row;
  }
  if (in.bad() || hex64(h) != require(kv, "checksum"))
    throw CacheCorruptionError("checksum mismatch in " + path.string());
  if (row != count) throw CacheCorruptionError("cache holds " + std::to_string(row) + " of " + std::to_string(count) + " records");
  return std::make_shared<const EigenBasis>(level, bc, std::move(meta), std::move(functions));
}

BasisPtr basis_cache_load(const fs::path& path, int level, BoundaryCondition bc) {
  const auto kv = read_cache_header(path);
  auto it_level = kv.find("level");
  auto it_bc = kv.find("bc");
  if (it_level == kv.end() || it_bc == kv.end()) throw CacheCorruptionError("cache header lacks level or bc");
  if (it_level->second != std::to_string(level) || it_bc->second != to_string(bc))
    throw CacheMismatchError("cache holds level " + it_level->second + " " + it_bc->second + ", wanted level " +
                             std::to_string(level) + " " + to_string(bc));
  return basis_cache_load(path);
}

BasisPtr load_or_build(const fs::path& path, int level, BoundaryCondition bc, bool* rebuilt) {
  if (rebuilt) *rebuilt = false;
  if (fs::exists(path)) {
    try {
      return basis_cache_load(path, level, bc);
    } catch (const CacheMismatchError&) {
      // stale entry for another basis
    }
  }
  auto basis = build_basis(level, bc);
  basis_cache_save(*basis, path);
  if (rebuilt) *rebuilt = true;
  return basis;
}

std::string basis_fingerprint(const EigenBasis& basis) {
  std::uint64_t h = fnv1a64({});
  for (int i = 0; i < basis.size(); ++i) h = fnv1a64(record_of(basis, i), h);
  return hex64(h);
}

BasisStore::BasisStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path BasisStore::file_for(int level, BoundaryCondition bc) const {
  return dir_ / ("basis-" + to_string(bc) + "-M" + std::to_string(level) + ".sgb");
}

BasisPtr BasisStore::get(int level, BoundaryCondition bc) {
  const auto key = std::make_pair(level, bc);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  BasisPtr basis = dir_.empty() ? build_basis(level, bc) : load_or_build(file_for(level, bc), level, bc);
  memo_.emplace(key, basis);
  return basis;
}

}  // namespace sgnls
