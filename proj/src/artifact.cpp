#include "ergolab/artifact.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ergolab/error.hpp"

namespace ergolab {

std::string tool_version() { return ERGOLAB_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

nlohmann::json make_artifact(const std::string& command, const nlohmann::json& config, std::uint64_t seed,
                             nlohmann::json results) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "ergolab"},
          {"tool_version", tool_version()},
          {"command", command},
          {"config_hash", config_hash(config)},
          {"seed", seed},
          {"config", config},
          {"results", std::move(results)}};
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (columns_ == 0) throw Error(ErrorKind::kValidation, "CSV needs at least one column");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error(ErrorKind::kValidation, "CSV row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) body_ += ',';
    body_ += quote(fields[i]);
  }
  body_ += '\n';
}

void CsvWriter::meta(const std::string& key, const std::string& value) { meta_ += "# " + key + "=" + value + "\n"; }

std::string CsvWriter::str() const { return meta_ + body_; }

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace ergolab
