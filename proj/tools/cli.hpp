// The nosig command-line front end, callable in-process.
//
// Exit codes: 0 success / no signal / classified / all checks pass,
// 2 signal / not rank-one preserving / a check failed, 1 input error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nosig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFinding = 2;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nosig::cli
