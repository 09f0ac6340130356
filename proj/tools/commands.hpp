#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "andersonlab/strichartz.hpp"
#include "config.hpp"

namespace andersonlab::cli {

// Writes artifacts into one directory through a temporary file and a rename,
// and records name, size and FNV-1a digest of each for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir);
  const std::string& dir() const { return dir_; }
  void write(const std::string& name, const std::string& bytes, const std::string& format);
  void write_json(const std::string& name, const json& j, const std::string& format);
  const json& artifacts() const { return artifacts_; }

 private:
  std::string dir_;
  json artifacts_ = json::array();
};

std::string fnv1a_hex(const std::string& bytes);

struct CommandResult {
  std::vector<std::string> failed;  // names of failed invariants
  std::string summary;              // one line for stdout
};

extern const std::vector<std::string> kCommands;

// Runs one command on a resolved config; artifacts and manifest.json go to cfg["out"].
CommandResult run_command(const std::string& command, const json& cfg);

// Strichartz scaling study described by a resolved config.
ScalingReport run_scaling(const json& cfg);

// Full entry point: argument parsing, dispatch, exit codes.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace andersonlab::cli
