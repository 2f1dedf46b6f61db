#ifndef SQZROT_TOOLS_CLI_HPP
#define SQZROT_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sqzrot::cli {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_convergence = 3;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "p/q" or a decimal number. Throws std::invalid_argument.
double parse_time(const std::string& text);

/// Comma-separated "m/n" list; empty input gives an empty list.
std::vector<std::pair<int, int>> parse_fractions(const std::string& text);

} // namespace sqzrot::cli

#endif
