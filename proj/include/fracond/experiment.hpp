#ifndef FRACOND_EXPERIMENT_HPP
#define FRACOND_EXPERIMENT_HPP

#include <map>

#include "fracond/config.hpp"

namespace fracond {

struct CriterionResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<=" or ">="
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t params_fingerprint = 0;
    unsigned seed = 0;
    std::vector<CriterionResult> criteria;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;

    bool all_pass() const;
};

/// Dispatches on cfg.experiment: forward-solve | dn-assemble |
/// verify-identities | reconstruct | stability | counterexample |
/// convergence-study. Writes report.json plus per-experiment CSV traces
/// into cfg.out_dir. Module errors surface as named failures in the
/// report's criteria, with the message recorded.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

void write_report_json(const ExperimentReport& rep, const std::filesystem::path& path);
void print_report(const ExperimentReport& rep, std::ostream& os);

}  // namespace fracond

#endif
