#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace spdc;
using namespace spdc::cli;

namespace {

struct Options
{
    std::string config;
    std::string out = "out";
    std::string preset;
    std::uint64_t seed = 0;
};

void report_error(char const* kind, std::string const& message)
{
    json err = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SPDC source simulator"};
    app.set_version_flag("--version", SPDC_VERSION);
    app.require_subcommand(1);

    Options opt;
    std::vector<std::pair<CLI::App*, CommandInfo const*>> subs;
    std::vector<CLI::Option*> seed_options;
    for (auto const& info : commands()) {
        auto* sub = app.add_subcommand(info.name, info.help);
        sub->add_option("--config", opt.config, "JSON config file (merge patch over defaults and preset)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--preset", opt.preset, "named preset")
            ->check(CLI::IsMember(preset_names()));
        seed_options.push_back(sub->add_option("--seed", opt.seed, "RNG seed (overrides config)"));
        subs.emplace_back(sub, &info);
    }
    auto* list = app.add_subcommand("presets", "list preset names");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        return app.exit(e);
    }

    if (list->parsed()) {
        for (auto const& name : preset_names())
            std::cout << name << '\n';
        return 0;
    }

    for (std::size_t k = 0; k < subs.size(); ++k) {
        auto [sub, info] = subs[k];
        if (!sub->parsed())
            continue;
        try {
            std::optional<std::string> preset;
            if (!opt.preset.empty())
                preset = opt.preset;
            std::optional<std::filesystem::path> file;
            if (!opt.config.empty())
                file = opt.config;
            std::optional<std::uint64_t> seed;
            if (seed_options[k]->count() > 0)
                seed = opt.seed;
            auto const config = RunConfig::resolve(preset, file, seed);
            Outputs outputs(opt.out);
            auto const result = execute(*info, config, outputs);
            outputs.commit();
            for (auto const& name : outputs.names())
                std::cout << (outputs.directory() / name).string() << '\n';
            return result.success ? 0 : 1;
        } catch (ConfigError const& e) {
            report_error("config", e.what());
            return 2;
        } catch (RangeError const& e) {
            report_error("range", e.what());
            return 3;
        } catch (NumericalError const& e) {
            report_error("numerical", e.what());
            return 4;
        } catch (std::exception const& e) {
            report_error("internal", e.what());
            return 1;
        }
    }
    return 1;
}
