#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brightdark/io.hpp"

namespace brightdark::cli {

enum class Subcommand { scan, three_scan, bloch, oracle, dirichlet, slit, g2, spectrum, budget };

std::string to_string(Subcommand s);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; // numeric or guard failure
inline constexpr int kExitUsage = 2;

struct CliConfig {
    Subcommand subcommand = Subcommand::scan;
    std::map<std::string, std::string> params; // flag name (no dashes) -> raw value, defaults included
    std::string output;                         // empty: standard output
    Format format = Format::csv;
    std::optional<std::uint64_t> seed;

    bool has(const std::string& key) const { return params.count(key) != 0; }
};

struct ParseResult {
    std::optional<CliConfig> config; // empty when parsing ended (help or usage error)
    int exit_code = kExitOk;
};

enum class Dimension { time, frequency, length };

/// Number with an optional SI suffix: s/ms/us/ns/ps/fs, Hz/kHz/MHz/GHz/THz,
/// m/mm/um/nm/pm. A bare number is taken in base SI units.
double parse_quantity(std::string_view text, Dimension dim);

/// argv excludes the program name. Help text and usage errors go to `out` / `err`.
ParseResult parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs the subcommand and writes its dataset to config.output or `out`.
int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace brightdark::cli
