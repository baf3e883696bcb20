#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avgh/demos.hpp"
#include "avgh/system.hpp"

namespace avgh {

/// Flat key/value text: "[section]" headers prefix the following keys with
/// "section.", "#" and ";" at line start begin comments.
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::istream& is);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  const Entry& at(const std::string& key) const;
  /// Sets or replaces a value (command line overrides use line 0).
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  Mat require_matrix(const std::string& key) const;

  /// Distinct next components of keys below prefix, e.g. "1", "2" for "A.perturbation".
  std::vector<std::string> children(const std::string& prefix) const;
  /// Keys never read by a getter; lets callers reject typos.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  const Entry* find(const std::string& key) const;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::filesystem::path out = "avgh-out";
  std::uint64_t seed = 42;
  DemoProfile profile = DemoProfile::quick;
  bool emit_matrices = false;
  /// Every key of the file after command line overrides, in key order.
  std::map<std::string, std::string> overrides;
};

const std::vector<std::string>& known_commands();
bool needs_system(const std::string& command);

/// Builds the system described by the "dim", "field", "tau", "n_steps", "A.*",
/// "C.*", "B.*" and "constants.*" keys.
SystemSpec system_from_keys(const KeyValueFile& kv);
TimeProfile profile_from_keys(const KeyValueFile& kv, const std::string& prefix);
CoefficientTerm coefficient_from_keys(const KeyValueFile& kv, const std::string& prefix);
SchrodingerSpec schrodinger_from_keys(const KeyValueFile& kv);
WaveSpec wave_from_keys(const KeyValueFile& kv);

struct ParsedConfig {
  RunConfig run;
  KeyValueFile keys;
  std::optional<SystemSpec> system;
};

/// Reads the file, applies command line values where given and validates
/// eagerly. ParseError for malformed text, ValidationError for broken invariants.
ParsedConfig parse_config(const std::filesystem::path& path, const std::optional<std::string>& command = {},
                          const std::optional<std::uint64_t>& seed = {},
                          const std::optional<std::string>& profile = {});
ParsedConfig parse_config_text(const std::string& text, const std::optional<std::string>& command = {},
                               const std::optional<std::uint64_t>& seed = {},
                               const std::optional<std::string>& profile = {});

}  // namespace avgh
