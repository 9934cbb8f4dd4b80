#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jlab {

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
[[nodiscard]] std::string hex64(std::uint64_t v);

/// Flat little-endian record used for cache payloads.
class ByteWriter {
 public:
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(const std::vector<double>& v);
  void str(std::string_view s);
  [[nodiscard]] const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : buf_(bytes) {}
  /// All readers throw std::runtime_error on a short buffer.
  std::uint64_t u64();
  double f64();
  std::vector<double> f64s();
  std::string str();
  [[nodiscard]] bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::string_view buf_;
  std::size_t pos_ = 0;
};

/// Write-once, content-addressed store. Entries are `<dir>/<key>.<kind>` with
/// a magic tag, the payload size and an FNV-1a checksum. Writers publish by
/// hard-linking a private temp file into place, so when two writers race on
/// one key exactly one link succeeds and readers never see a partial file.
class Cache {
 public:
  using Warn = std::function<void(const std::string&)>;

  Cache() = default;  // disabled
  explicit Cache(std::filesystem::path dir, Warn warn = {});

  [[nodiscard]] bool enabled() const { return !dir_.empty(); }
  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

  /// Payload of a valid entry. A corrupt entry is reported through the warn
  /// callback, removed, and treated as missing.
  [[nodiscard]] std::optional<std::string> load(const std::string& key, const std::string& kind) const;

  /// Returns true when this call published the entry, false when an entry
  /// already existed (the existing one is kept).
  bool store(const std::string& key, const std::string& kind, std::string_view payload) const;

  [[nodiscard]] std::filesystem::path entry_path(const std::string& key, const std::string& kind) const;

 private:
  std::filesystem::path dir_;
  Warn warn_;
};

}  // namespace jlab
