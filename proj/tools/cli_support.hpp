#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace lendfair::cli {

enum ExitCode : int
{
    kOk = 0,
    kDomainError = 1,
    kUsageError = 2,
    kNoSolution = 3,
};

/// Shortest decimal text that parses back to the same double.
std::string round_trip(double x);

/*!
 * Registers options on a subcommand and remembers how to print their
 * resolved values, so a manifest can replay the run exactly.
 */
class ParamSet
{
  public:
    explicit ParamSet(CLI::App* app) : app_{app} {}

    CLI::App* app() const { return app_; }

    CLI::Option* add(std::string const& name, double& v, std::string const& desc);
    template<std::integral T>
    CLI::Option* add(std::string const& name, T& v, std::string const& desc)
    {
        printers_.emplace_back(name, [&v] { return std::to_string(v); });
        return app_->add_option("--" + name, v, desc)->capture_default_str();
    }
    CLI::Option* add(std::string const& name, std::string& v, std::string const& desc);
    CLI::Option* add(std::string const& name, std::vector<double>& v, std::string const& desc);
    CLI::Option* add(std::string const& name, std::optional<double>& v, std::string const& desc);
    CLI::Option* flag(std::string const& name, bool& v, std::string const& desc);

    /// key=value pairs in registration order; output paths included.
    std::vector<std::pair<std::string, std::string>> resolved() const;

  private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<std::string()>>> printers_;
};

/// Parses a key=value file; '#' starts a comment line.
std::map<std::string, std::string> read_config(std::filesystem::path const& file);

/*!
 * Folds --config FILE into argv: every key not already given as a flag is
 * appended as --key=value, so flags win over the file and the file over
 * defaults. A "command" key selects the subcommand when argv names none.
 */
std::vector<std::string> merge_config(std::vector<std::string> args,
                                      std::vector<std::string> const& subcommands);

struct Manifest
{
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    double wall_clock_seconds = 0.0;
};

/// Manifest path for an output file: name.csv -> name.manifest.
std::filesystem::path manifest_path_for(std::filesystem::path const& output);

/// Writes the manifest as a config file that replays the run.
void write_manifest(std::filesystem::path const& file, Manifest const& manifest);

}  // namespace lendfair::cli
