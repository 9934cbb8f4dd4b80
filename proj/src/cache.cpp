#include "jlab/cache.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

#include <unistd.h>

namespace jlab {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return s;
}

void ByteWriter::u64(std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  buf_.append(b, 8);
}

void ByteWriter::f64(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  u64(u);
}

void ByteWriter::f64s(const std::vector<double>& v) {
  u64(v.size());
  for (double d : v) f64(d);
}

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void ByteReader::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw std::runtime_error("cache record truncated");
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::f64() {
  const std::uint64_t u = u64();
  double d;
  std::memcpy(&d, &u, sizeof d);
  return d;
}

std::vector<double> ByteReader::f64s() {
  const std::uint64_t n = u64();
  if (n > (buf_.size() - pos_) / 8) throw std::runtime_error("cache record truncated");
  std::vector<double> v(n);
  for (auto& d : v) d = f64();
  return v;
}

std::string ByteReader::str() {
  const std::uint64_t n = u64();
  need(n);
  std::string s(buf_.substr(pos_, n));
  pos_ += n;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "JLABCAC1";

std::string frame(std::string_view payload) {
  ByteWriter w;
  std::string out(kMagic);
  w.u64(payload.size());
  out += w.bytes();
  out.append(payload);
  ByteWriter tail;
  tail.u64(fnv1a64(payload));
  out += tail.bytes();
  return out;
}

std::optional<std::string> unframe(const std::string& raw) {
  if (raw.size() < kMagic.size() + 16) return std::nullopt;
  if (std::string_view(raw).substr(0, kMagic.size()) != kMagic) return std::nullopt;
  ByteReader head(std::string_view(raw).substr(kMagic.size(), 8));
  const std::uint64_t n = head.u64();
  if (raw.size() != kMagic.size() + 16 + n) return std::nullopt;
  std::string payload = raw.substr(kMagic.size() + 8, n);
  ByteReader tail(std::string_view(raw).substr(kMagic.size() + 8 + n, 8));
  if (tail.u64() != fnv1a64(payload)) return std::nullopt;
  return payload;
}

std::string temp_name(const std::string& stem) {
  static std::atomic<unsigned long> counter{0};
  std::ostringstream os;
  os << ".tmp." << stem << '.' << ::getpid() << '.'
     << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
  return os.str();
}

}  // namespace

Cache::Cache(fs::path dir, Warn warn) : dir_(std::move(dir)), warn_(std::move(warn)) {
  if (dir_.empty()) return;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cache dir '" + dir_.string() + "' not writable: " + ec.message());
}

fs::path Cache::entry_path(const std::string& key, const std::string& kind) const {
  return dir_ / (key + "." + kind);
}

std::optional<std::string> Cache::load(const std::string& key, const std::string& kind) const {
  if (!enabled()) return std::nullopt;
  const fs::path path = entry_path(key, kind);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  auto payload = unframe(raw);
  if (!payload) {
    if (warn_) warn_("corrupt cache entry " + path.string() + ", recomputing");
    std::error_code ec;
    fs::remove(path, ec);
  }
  return payload;
}

bool Cache::store(const std::string& key, const std::string& kind, std::string_view payload) const {
  if (!enabled()) return false;
  const fs::path final_path = entry_path(key, kind);
  const fs::path tmp = dir_ / temp_name(key + "." + kind);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
    const std::string bytes = frame(payload);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write on cache file " + tmp.string());
  }
  std::error_code ec;
  fs::create_hard_link(tmp, final_path, ec);
  const bool won = !ec;
  if (ec && ec != std::errc::file_exists) {
    // Filesystems without hard links: fall back to rename, which is atomic
    // but lets the last writer win.
    std::error_code ec2;
    fs::rename(tmp, final_path, ec2);
    if (ec2) throw std::runtime_error("cannot publish cache file " + final_path.string());
    return true;
  }
  fs::remove(tmp, ec);
  return won;
}

}  // namespace jlab
