#include "fracond/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fracond/gridio.hpp"

namespace fracond {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path.string());
    return parse(in, path.string());
}

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
    ConfigFile cf;
    cf.origin_ = origin;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw IoError(origin + ":" + std::to_string(lineno) +
                              ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw IoError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw IoError(origin + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cf.entries_.count(full))
            throw IoError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                          full + "'");
        cf.entries_[full] = value;
        cf.lines_[full] = lineno;
    }
    return cf;
}

void ConfigFile::missing(const std::string& key) const {
    throw IoError(origin_ + ": missing required key '" + key + "'");
}

void ConfigFile::bad_value(const std::string& key, const std::string& what) const {
    const auto it = lines_.find(key);
    const std::string where =
        it == lines_.end() ? origin_ : origin_ + ":" + std::to_string(it->second);
    throw IoError(where + ": key '" + key + "': " + what);
}

std::string ConfigFile::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) missing(key);
    return it->second;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) bad_value(key, "trailing characters in number '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, "expected a number, got '" + v + "'");
    }
}

int ConfigFile::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const int d = std::stoi(v, &pos);
        if (pos != v.size()) bad_value(key, "trailing characters in integer '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, "expected an integer, got '" + v + "'");
    }
}

bool ConfigFile::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, "expected a boolean, got '" + v + "'");
}

Box ConfigFile::get_box(const std::string& key, int dim) const {
    const std::string v = get_string(key);
    std::istringstream ss(v);
    std::vector<double> nums;
    double x;
    while (ss >> x) nums.push_back(x);
    const std::size_t want = dim == 1 ? 2 : 4;
    if (nums.size() != want)
        bad_value(key, "expected " + std::to_string(want) + " numbers for a " +
                           std::to_string(dim) + "D box, got '" + v + "'");
    Box b;
    if (dim == 1) {
        b = Box::interval(nums[0], nums[1]);
    } else {
        b = Box::rect(nums[0], nums[1], nums[2], nums[3]);
    }
    for (int d = 0; d < dim; ++d)
        if (!(b.lo[static_cast<std::size_t>(d)] < b.hi[static_cast<std::size_t>(d)]))
            bad_value(key, "box bounds must satisfy lo < hi per axis");
    return b;
}

std::string ConfigFile::get_string_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? get_string(key) : dflt;
}
double ConfigFile::get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}
int ConfigFile::get_int_or(const std::string& key, int dflt) const {
    return has(key) ? get_int(key) : dflt;
}
bool ConfigFile::get_bool_or(const std::string& key, bool dflt) const {
    return has(key) ? get_bool(key) : dflt;
}

std::uint64_t ConfigFile::content_fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const auto& [k, v] : entries_) {
        mix(k);
        mix(v);
    }
    return h;
}

Recipe parse_recipe(const std::string& name) {
    if (name == "constant") return Recipe::constant;
    if (name == "smooth-bump") return Recipe::smooth_bump;
    if (name == "plateau") return Recipe::plateau;
    if (name == "counterexample") return Recipe::counterexample;
    if (name == "from-file") return Recipe::from_file;
    throw IoError("config: unknown conductivity recipe '" + name + "'");
}

CounterexampleMode ExperimentConfig::cex_mode_value() const {
    if (cex_mode == "direct") return CounterexampleMode::direct;
    if (cex_mode == "collar") return CounterexampleMode::collar;
    throw IoError("config: unknown counterexample mode '" + cex_mode + "'");
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(ConfigFile::parse_file(path));
}

ExperimentConfig parse_experiment_config(const ConfigFile& cf) {
    ExperimentConfig cfg;
    cfg.fingerprint = cf.content_fingerprint();
    cfg.experiment = cf.get_string_or("experiment.name", "");
    cfg.dim = cf.get_int("grid.dim");
    cfg.half_width = cf.get_double("grid.L");
    cfg.nodes_per_axis = cf.get_int("grid.N");
    cfg.s = cf.get_double("grid.s");

    cfg.omega_box = cf.get_box("regions.omega", cfg.dim);
    cfg.w1_box = cf.get_box("regions.w1", cfg.dim);
    cfg.w2_box = cf.get_box("regions.w2", cfg.dim);
    if (cf.has("regions.omega_small"))
        cfg.omega_small_box = cf.get_box("regions.omega_small", cfg.dim);

    cfg.recipe = parse_recipe(cf.get_string_or("conductivity.recipe", "constant"));
    cfg.bump_amplitude = cf.get_double_or("conductivity.amplitude", cfg.bump_amplitude);
    cfg.bump_radius = cf.get_double_or("conductivity.radius", cfg.bump_radius);
    if (cf.has("conductivity.center_x"))
        cfg.bump_center[0] = cf.get_double("conductivity.center_x");
    if (cf.has("conductivity.center_y"))
        cfg.bump_center[1] = cf.get_double("conductivity.center_y");
    cfg.plateau_value = cf.get_double_or("conductivity.value", cfg.plateau_value);
    if (cf.has("conductivity.plateau_box"))
        cfg.plateau_box = cf.get_box("conductivity.plateau_box", cfg.dim);
    cfg.plateau_collar = cf.get_double_or("conductivity.collar", cfg.plateau_collar);
    cfg.gamma_file = cf.get_string_or("conductivity.file", "");

    cfg.tol = cf.get_double_or("experiment.tol", cfg.tol);
    cfg.seed = static_cast<unsigned>(cf.get_int_or("experiment.seed", 1));
    cfg.trials = cf.get_int_or("experiment.trials", cfg.trials);

    if (cf.has("reconstruct.x0")) {
        cfg.x0 = std::array<double, 2>{cf.get_double("reconstruct.x0"),
                                       cf.get_double_or("reconstruct.y0", 0.0)};
    }
    if (cf.has("reconstruct.r0")) cfg.r0 = cf.get_double("reconstruct.r0");
    cfg.seq_levels = cf.get_int_or("reconstruct.levels", cfg.seq_levels);

    if (cf.has("converge.n_list")) {
        std::istringstream ss(cf.get_string("converge.n_list"));
        cfg.n_list.clear();
        int n;
        while (ss >> n) cfg.n_list.push_back(n);
        if (cfg.n_list.empty())
            throw IoError("config: converge.n_list must list at least one N");
    }

    cfg.collar_cells = cf.get_int_or("counterexample.collar_cells", cfg.collar_cells);
    cfg.cex_mode = cf.get_string_or("counterexample.mode", cfg.cex_mode);
    (void)cfg.cex_mode_value();  // validate early

    cfg.stability_scale = cf.get_double_or("stability.scale", cfg.stability_scale);

    cfg.out_dir = cf.get_string_or("experiment.out", ".");
    cfg.threads = cf.get_int_or("experiment.threads", 0);
    cfg.deterministic = cf.get_bool_or("experiment.deterministic", false);
    return cfg;
}

namespace {

// smooth transition: 1 for t <= 0, 0 for t >= 1
double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

}  // namespace

Conductivity make_conductivity(const ExperimentConfig& cfg, const GridSpec& spec) {
    switch (cfg.recipe) {
        case Recipe::constant:
            return Conductivity::constant_one(spec);
        case Recipe::smooth_bump: {
            GridFunction g(spec, 1.0);
            const double r2 = cfg.bump_radius * cfg.bump_radius;
            for (long i = 0; i < g.size(); ++i) {
                auto p = spec.node(i);
                const double d2 = ((p[0] - cfg.bump_center[0]) * (p[0] - cfg.bump_center[0]) +
                                   (p[1] - cfg.bump_center[1]) * (p[1] - cfg.bump_center[1])) / r2;
                if (d2 < 1.0) g[i] += cfg.bump_amplitude * std::exp(-1.0 / (1.0 - d2));
            }
            return Conductivity::from_field(g);
        }
        case Recipe::plateau: {
            GridFunction g(spec, 1.0);
            for (long i = 0; i < g.size(); ++i) {
                auto p = spec.node(i);
                double t = 0.0;  // normalized distance beyond the plateau box
                for (int d = 0; d < spec.dim; ++d) {
                    const auto dd = static_cast<std::size_t>(d);
                    double excess = 0.0;
                    if (p[dd] < cfg.plateau_box.lo[dd]) excess = cfg.plateau_box.lo[dd] - p[dd];
                    if (p[dd] > cfg.plateau_box.hi[dd]) excess = p[dd] - cfg.plateau_box.hi[dd];
                    t = std::max(t, excess / cfg.plateau_collar);
                }
                g[i] = 1.0 + (cfg.plateau_value - 1.0) * smooth_step_down(t);
            }
            return Conductivity::from_field(g);
        }
        case Recipe::from_file: {
            if (cfg.gamma_file.empty())
                throw IoError("config: conductivity.file required for recipe from-file");
            const std::filesystem::path p = cfg.gamma_file;
            GridFunction g = p.extension() == ".csv" ? read_csv(p, spec) : read_binary(p);
            check_same_grid(g.spec, spec, "make_conductivity(from-file)");
            return Conductivity::from_field(g);
        }
        case Recipe::counterexample:
            throw InvalidArgument(
                "make_conductivity: the counterexample recipe is produced by the "
                "counterexample pipeline, not by this builder");
    }
    throw InvalidArgument("make_conductivity: unhandled recipe");
}

}  // namespace fracond
