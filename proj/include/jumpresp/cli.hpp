#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jumpresp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// args excludes the program name. Results go to `out` unless --out is given;
// diagnostics and errors go to `log`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);
int run_cli(int argc, const char* const* argv);

}  // namespace jumpresp
