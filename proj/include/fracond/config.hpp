#ifndef FRACOND_CONFIG_HPP
#define FRACOND_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "fracond/counterex.hpp"

namespace fracond {

/// Line-oriented `key = value` file with `[section]` headers and `#`
/// comments. Keys are addressed as "section.key". Parse and lookup errors
/// carry the file name and line number.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::filesystem::path& path);
    static ConfigFile parse(std::istream& in, const std::string& origin);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// 1D: "lo hi"; 2D: "lox hix loy hiy".
    Box get_box(const std::string& key, int dim) const;

    std::string get_string_or(const std::string& key, const std::string& dflt) const;
    double get_double_or(const std::string& key, double dflt) const;
    int get_int_or(const std::string& key, int dflt) const;
    bool get_bool_or(const std::string& key, bool dflt) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    std::uint64_t content_fingerprint() const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::string origin_;
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;

    [[noreturn]] void missing(const std::string& key) const;
    [[noreturn]] void bad_value(const std::string& key, const std::string& what) const;
};

enum class Recipe { constant, smooth_bump, plateau, counterexample, from_file };

Recipe parse_recipe(const std::string& name);

struct ExperimentConfig {
    std::string experiment;
    int dim = 1;
    double half_width = 1.0;
    int nodes_per_axis = 64;
    double s = 0.45;

    Box omega_box, w1_box, w2_box;
    std::optional<Box> omega_small_box;

    Recipe recipe = Recipe::constant;
    double bump_amplitude = 0.5;
    std::array<double, 2> bump_center{0.0, 0.0};
    double bump_radius = 0.25;
    double plateau_value = 4.0;
    Box plateau_box;
    double plateau_collar = 0.1;
    std::string gamma_file;

    double tol = 1e-12;
    unsigned seed = 1;
    int trials = 10;

    // reconstruct; unset values default to the center / half-extent of W1
    std::optional<std::array<double, 2>> x0;
    std::optional<double> r0;
    int seq_levels = 3;

    // converge
    std::vector<int> n_list{64, 128, 256, 512};

    // counterexample
    int collar_cells = 2;
    CounterexampleMode cex_mode_value() const;
    std::string cex_mode = "direct";

    // stability
    double stability_scale = 1.2;

    std::filesystem::path out_dir = ".";
    int threads = 0;  // 0 = library default
    bool deterministic = false;

    std::uint64_t fingerprint = 0;  // hash of the source config entries
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const ConfigFile& cf);

/// Builds the conductivity named by the recipe. `counterexample` is not
/// handled here (that recipe is produced by its pipeline).
Conductivity make_conductivity(const ExperimentConfig& cfg, const GridSpec& spec);

}  // namespace fracond

#endif
