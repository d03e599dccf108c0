#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "nullpulse/run_config.hpp"
#include "nullpulse/study.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Characteristic evolution of short-pulse semilinear waves"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int threads = 1;
    int checkpoint_every = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")
            ->required();
        sub->add_option("--out", out_dir, "output directory (default: out)");
        sub->add_option("--threads", threads,
                        "worker threads; outputs are kept byte-deterministic, "
                        "so processing currently stays on one thread")
            ->check(CLI::Range(1, 64));
        sub->add_option("--checkpoint-every", checkpoint_every,
                        "write a checkpoint every K levels, 0 disables");
    };

    CLI::App* run =
        app.add_subcommand("run", "evolve one configuration and write diagnostics");
    CLI::App* study =
        app.add_subcommand("study", "pulse-width scan with a verdict table");
    CLI::App* conv =
        app.add_subcommand("convergence", "grid-refinement error orders");
    CLI::App* comp =
        app.add_subcommand("compare", "null versus non-null source comparison");
    for (CLI::App* sub : {run, study, conv, comp}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        nullpulse::RunConfig c = nullpulse::load_run_config(config_path);
        if (checkpoint_every >= 0) c.checkpoint_every = checkpoint_every;
        (void)threads;
        if (run->parsed()) return nullpulse::cmd_run(c, out_dir);
        if (study->parsed()) return nullpulse::cmd_study(c, out_dir);
        if (conv->parsed()) return nullpulse::cmd_convergence(c, out_dir);
        if (comp->parsed()) return nullpulse::cmd_compare(c, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
