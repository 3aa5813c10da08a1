#pragma once
// Command-line front end: check-class, build-limit, verify <suite>, aut,
// orbits, cosets. Reports are JSON (sorted keys) or a plain text rendering.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "topgal/structure_json.hpp"

namespace topgal::cli {

enum ExitCode { kPass = 0, kFailure = 1, kUsage = 2, kResource = 3 };

struct RunConfig {
  std::string class_name;
  std::string class_file;
  std::string context;  // named discrete context
  std::string input;    // structure or group file
  std::string format = "json";
  // unset bounds take per-command defaults
  std::optional<std::size_t> size, rounds, bound, k, codomain, max_arrows;
  std::size_t jobs = 1;
};

struct CommandResult {
  int code = kPass;
  Json report;
  std::string warning;
};

CommandResult cmd_check_class(const RunConfig& cfg);
CommandResult cmd_build_limit(const RunConfig& cfg);
/// suite: galois | atoms | coherence | imaginaries | discrete | z15
CommandResult cmd_verify(const RunConfig& cfg, const std::string& suite);
CommandResult cmd_aut(const RunConfig& cfg);
CommandResult cmd_orbits(const RunConfig& cfg);
CommandResult cmd_cosets(const RunConfig& cfg);

std::string render_text(const Json& report);

/// Parses args (without the program name), runs the command, prints the
/// report to out and diagnostics to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topgal::cli
