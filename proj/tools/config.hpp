#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace andersonlab::cli {

using json = nlohmann::json;

inline constexpr const char* kSchema = "andersonlab.config/1";
inline constexpr const char* kVersion = "0.1.0";

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

struct DefaultEntry {
  const char* key;
  json value;
  const char* doc;
};

// Every configurable key with its default; the type of the default is the type of the key.
const std::vector<DefaultEntry>& default_table();

struct Preset {
  const char* name;
  const char* command;
  json values;
  const char* doc;
};

const std::vector<Preset>& preset_table();
const Preset* find_preset(const std::string& name);

// Resolution order: defaults < preset < config file < flags.
// Throws ConfigError on unknown keys, type mismatches or a wrong schema tag.
json resolve_config(const std::string& command, const std::string& config_path, const std::string& preset,
                    const std::map<std::string, std::string>& flags);

// Parses a flag string into the type of the key's default.
json parse_flag_value(const std::string& key, const std::string& text);

// Field accessors with the key's declared type.
double get_double(const json& cfg, const char* key);
int get_int(const json& cfg, const char* key);
std::uint64_t get_seed(const json& cfg, const char* key);
bool get_bool(const json& cfg, const char* key);
std::string get_string(const json& cfg, const char* key);
std::vector<int> get_int_list(const json& cfg, const char* key);
// seed0, seed0 + 1, ..., seed0 + count - 1
std::vector<std::uint64_t> seed_list(const json& cfg);

// Markdown table of the defaults, used by `andersonlab defaults`.
std::string defaults_markdown();

}  // namespace andersonlab::cli
