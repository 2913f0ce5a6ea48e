/**
 * @file config.hpp
 * @brief Sectioned key-value run configuration.
 *
 * Syntax:
 *
 *     # comment            (also ';')
 *     [section]
 *     key = value
 *
 * Every key must be one of the registered keys (see config_keys()); unknown
 * sections or keys, duplicates and malformed values are ParseErrors with the
 * 1-based line number. Keys not given take their registered defaults.
 * serialize() emits every key in registry order, so parse(serialize(c)) == c.
 */
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace micropolar {

enum class ValueType { Number, Integer, Boolean, Text, NumberOrAuto, NumberList };

struct ConfigKey {
  const char* name;  ///< "section.key"
  ValueType type;
  const char* default_value;
  const char* help;
};

std::span<const ConfigKey> config_keys();

class Config {
 public:
  /// All keys at their defaults.
  Config();

  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  std::string serialize() const;

  /// Throws ValidationError for unknown keys or values of the wrong type.
  void set(const std::string& key, const std::string& value);

  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  /// True when the key holds "auto".
  bool is_auto(const std::string& key) const;

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::map<std::string, std::string> values_;
};

/// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

}  // namespace micropolar
