#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

namespace liposim::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kRuntimeError = 3;

// The whole command line tool; `in` backs `stats -`.
int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace liposim::cli
