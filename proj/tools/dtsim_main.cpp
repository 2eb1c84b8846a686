#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"

#include "dt/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConstraint = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dtsim: scenario generation, planner runs, and oracle checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    bool timings = false;
    std::uint64_t seed_override = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "JSON config file");
        if (config_required) opt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
        return sub;
    };

    CLI::App* gen = add_common(app.add_subcommand("generate", "write a scenario batch to disk"),
                               true);
    CLI::App* run = add_common(app.add_subcommand("run", "run planners over a scenario batch"),
                               true);
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timings", timings, "record wall-clock times (output no longer byte-stable)");
    CLI::App* oracle = add_common(
        app.add_subcommand("oracle", "compare the beam planner against exhaustive search"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        dt::RunConfig cfg;
        if (!config_path.empty()) cfg = dt::load_config(config_path);
        if (seed_given) cfg.seed = seed_override;
        if (gen->parsed()) {
            dt::cmd_generate(cfg, out_dir);
        } else if (run->parsed()) {
            dt::cmd_run(cfg, out_dir, jobs, timings);
        } else if (oracle->parsed()) {
            return dt::cmd_oracle(cfg, out_dir);
        }
        return kExitOk;
    } catch (const dt::ConstraintViolationError& e) {
        std::fprintf(stderr, "constraint violation: %s\n", e.what());
        return kExitConstraint;
    } catch (const dt::ParamError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const dt::FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
}
