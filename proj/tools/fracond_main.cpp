#include <CLI11.hpp>

#include <iostream>

#include "fracond/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fracond: fractional conductivity laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool deterministic = false;

    // every subcommand selects an experiment; all other parameters come
    // from the config file
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"solve", "forward-solve"},
        {"dn", "dn-assemble"},
        {"verify", "verify-identities"},
        {"reconstruct", "reconstruct"},
        {"stability", "stability"},
        {"counterexample", "counterexample"},
        {"converge", "convergence-study"},
    };
    std::map<const CLI::App*, std::string> experiment_of;
    for (const auto& [name, experiment] : subs) {
        CLI::App* sub = app.add_subcommand(name, "run the " + experiment + " experiment");
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "worker thread cap");
        sub->add_flag("--deterministic", deterministic,
                      "bit-reproducible serial summation order");
        experiment_of[sub] = experiment;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        fracond::ExperimentConfig cfg = fracond::load_experiment_config(config_path);
        cfg.experiment = experiment_of.at(app.get_subcommands().front());
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads > 0) cfg.threads = threads;
        if (deterministic) cfg.deterministic = true;

        fracond::ExperimentReport rep = fracond::run_experiment(cfg);
        fracond::print_report(rep, std::cout);
        return rep.all_pass() ? 0 : 1;
    } catch (const fracond::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
