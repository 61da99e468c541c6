#pragma once

// Text serialization shared by the drivers: CSV tables (header row,
// '.' decimal separator, RFC-4180 quoting), key=value records, and
// atomic file output.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace potts {

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for
/// non-finite values). Locale independent.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& add(std::string_view s);
    Row& add(const char* s) { return add(std::string_view(s)); }
    Row& add(const std::string& s) { return add(std::string_view(s)); }
    Row& add(double v);
    Row& add(std::int64_t v);
    Row& add(int v) { return add(static_cast<std::int64_t>(v)); }
    Row& add(std::uint64_t v);
    Row& add(bool v) { return add(std::string_view(v ? "true" : "false")); }
    const std::vector<std::string>& cells() const noexcept { return cells_; }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& row();
  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  /// Throws InputError if a row width differs from the header.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Ordered key=value lines.
class KeyValueRecord {
 public:
  KeyValueRecord& set(std::string key, std::string value);
  KeyValueRecord& set(std::string key, double value) { return set(std::move(key), format_double(value)); }
  KeyValueRecord& set(std::string key, std::int64_t value) { return set(std::move(key), std::to_string(value)); }
  KeyValueRecord& set(std::string key, int value) { return set(std::move(key), std::to_string(value)); }
  KeyValueRecord& set(std::string key, std::uint64_t value) { return set(std::move(key), std::to_string(value)); }
  KeyValueRecord& set(std::string key, bool value) { return set(std::move(key), std::string(value ? "true" : "false")); }
  KeyValueRecord& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }

  /// Value for `key`, or empty string.
  std::string get(std::string_view key) const;
  std::string str() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Writes `content` to `path` via a temporary file and rename, so a failed
/// run never leaves a partial file behind.
void write_file_atomic(const std::string& path, std::string_view content);

/// `git describe` of the build, baked in at configure time.
std::string build_version();

}  // namespace potts
