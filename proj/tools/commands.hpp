#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace spdc::cli {

// Files written by one run; all of them are removed if the run fails.
class Outputs
{
  public:
    explicit Outputs(std::filesystem::path directory);
    ~Outputs();

    std::ofstream open(std::string const& name, bool binary = false);
    std::vector<std::string> const& names() const { return names_; }
    std::filesystem::path const& directory() const { return directory_; }
    void commit() { committed_ = true; }

  private:
    std::filesystem::path directory_;
    std::vector<std::string> names_;
    bool created_directory_ = false;
    bool committed_ = false;
};

struct CommandResult
{
    json results;
    bool success = true;  // false makes the process exit nonzero after writing outputs
};

using Command = CommandResult (*)(RunConfig const&, Outputs&);

struct CommandInfo
{
    char const* name;
    char const* help;
    Command run;
};

std::vector<CommandInfo> const& commands();

/// Runs `info` and writes the sidecar `<name>.json`. Returns the result.
CommandResult execute(CommandInfo const& info, RunConfig const& config, Outputs& outputs);

}  // namespace spdc::cli
