#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ergolab {

inline constexpr const char* kSchemaVersion = "1";

std::string tool_version();

std::uint64_t fnv1a64(std::string_view bytes);

// Hash of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

// Envelope shared by every artifact the tool writes.
nlohmann::json make_artifact(const std::string& command, const nlohmann::json& config, std::uint64_t seed,
                             nlohmann::json results);

// Shortest text that parses back to the same double.
std::string format_double(double value);

// RFC 4180 style CSV with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  // Comment lines carrying artifact metadata, written before the header.
  void meta(const std::string& key, const std::string& value);

  std::string str() const;

  static std::string quote(const std::string& field);

 private:
  std::size_t columns_;
  std::string meta_;
  std::string body_;
};

}  // namespace ergolab
