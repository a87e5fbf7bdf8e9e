#include "prunebound/commands.hpp"
#include "prunebound/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
    CLI::App app{"Randomized pruning, sketching and generalization bounds"};
    app.require_subcommand(1);
    prunebound::CommandOptions opts;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t limit = 0;

    const char* names[][2] = {{"train", "Train the MLP and write the model"},
                              {"prune", "Prune and discretize the trained model"},
                              {"sketch", "Sketch the discretized layers"},
                              {"bounds", "Compute every generalization bound"},
                              {"verify", "Check closed forms against Monte Carlo"},
                              {"report", "Run the whole chain and the width sweep"}};
    for (const auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config, "Experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "Override the master seed");
        sub->add_option("--out", out, "Override the output directory");
        sub->add_option("--method", opts.methods, "Comma-separated bound methods to report")->delimiter(',');
        sub->add_option("--limit", limit, "Cap the number of train and test samples");
        sub->add_option("--inject-m2-scale", opts.m2_scale)->group("");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out = out;
    if (sub->count("--limit")) opts.limit = limit;

    try {
        return prunebound::run_command(sub->get_name(), opts);
    } catch (const prunebound::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const prunebound::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
