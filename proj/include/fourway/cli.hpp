#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fourway {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 identity failure or internal error, 2 validation
// error (bad flags, config or data), 3 hazard fit failure.
//
// `args` excludes the program name, e.g. {"verify", "--trials", "1000"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace fourway
