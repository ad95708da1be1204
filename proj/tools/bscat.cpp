// bscat: run, list and validate experiment configs.
//
// Exit codes: 0 success, 2 config error, 3 numerical-contract error, 4 I/O error.

#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "bscat/experiments.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, io_error = 4 };

bscat::cli::ExperimentConfig load(const std::string& path) {
    std::string text;
    try {
        text = bscat::io::read_file(path);
    } catch (const bscat::IoError& e) {
        // an unreadable config is a config problem, not an output problem
        throw bscat::ConfigError(e.what());
    }
    return bscat::cli::parse_config_text(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Born series experiments for multi-center Coulomb potentials"};
    app.require_subcommand(1);

    int threads = 0;
    bool quiet = false;
    std::string output_override;
    app.add_option("--threads", threads, "worker threads (default: hardware parallelism)")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment named in a config");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--output-dir", output_override, "override output_dir from the config");
    run->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    run->add_flag("--quiet", quiet, "suppress progress output");

    auto* list = app.add_subcommand("list", "list registered experiments");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "config file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    bscat::set_thread_count(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()));

    try {
        if (*list) {
            std::cout << bscat::cli::list_experiments();
            return ok;
        }
        const auto cfg = load(config_path);
        if (*validate) {
            const auto& e = bscat::cli::validate(cfg);
            if (!quiet) std::cout << "ok: " << e.name << " (config " << cfg.hash().substr(0, 12) << ")\n";
            return ok;
        }
        const std::string dir = output_override.empty() ? cfg.output_dir : output_override;
        if (!quiet) std::cout << "running " << cfg.experiment << " -> " << dir << std::endl;
        const auto res = bscat::cli::run(cfg, dir);
        if (!quiet) {
            for (const auto& f : res.files) std::cout << "  wrote " << (res.directory / f).string() << "\n";
            std::cout << "done in " << res.wall_seconds << " s\n";
        }
        return ok;
    } catch (const bscat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const bscat::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return numerical_error;
    } catch (const bscat::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io_error;
    }
}
