#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace apcf::cli {

// Merged command-line and config-file settings, keyed by flag name without dashes.
using Settings = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment.
Settings parse_config_text(const std::string& text);

// FNV-1a over the canonical "key=value\n" rendering, as 16 hex digits.
std::string config_hash(const std::string& command, const std::string& operand, const Settings& settings);

// Exit status: 0 success, 1 domain or verification failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apcf::cli
