#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "xsr/explain/dispatch.hpp"
#include "xsr/harness/config.hpp"

namespace xsr::harness {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string cleaned = trim(item);
        if (!cleaned.empty()) items.push_back(cleaned);
    }
    return items;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    return static_cast<int>(to_double(key, value));
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("bad boolean value for '" + key + "': '" + value + "'");
}

void apply_experiment(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "datasets") config.datasets = split_list(value);
    else if (key == "regressors") config.regressors = split_list(value);
    else if (key == "explainers") config.explainers = split_list(value);
    else if (key == "repetitions") config.repetitions = to_int(key, value);
    else if (key == "lambda") config.lambda = to_double(key, value);
    else if (key == "jaccard_k") config.jaccard_k = to_int(key, value);
    else if (key == "neighborhood_samples") config.neighborhood_samples = to_int(key, value);
    else if (key == "explain_points") config.explain_points = to_int(key, value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_double(key, value));
    else if (key == "workers") config.workers = to_int(key, value);
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "manifest") config.manifest = value;
    else if (key == "inject_failure") config.inject_failure = value;
    else throw ConfigError("unknown key '" + key + "' in [experiment]");
}

void apply_explainer(explain::ExplainerConfig& config, const std::string& key,
                     const std::string& value) {
    if (key == "permutation_repeats") config.permutation_repeats = to_int(key, value);
    else if (key == "shap_exact_cutoff") config.shap_exact_cutoff = to_int(key, value);
    else if (key == "shap_samples") config.shap_samples = to_int(key, value);
    else if (key == "lime_samples") config.lime_samples = to_int(key, value);
    else if (key == "lime_kernel_width") config.lime_kernel_width = to_double(key, value);
    else if (key == "ela_neighbors") config.ela_neighbors = to_int(key, value);
    else if (key == "morris_trajectories") config.morris_trajectories = to_int(key, value);
    else if (key == "morris_levels") config.morris_levels = to_int(key, value);
    else if (key == "ig_steps") config.ig_steps = to_int(key, value);
    else if (key == "ig_zero_baseline") config.ig_zero_baseline = to_bool(key, value);
    else if (key == "sage_rows") config.sage_rows = to_int(key, value);
    else if (key == "global_rows") config.global_rows = to_int(key, value);
    else throw ConfigError("unknown key '" + key + "' in [explainer]");
}

void apply_generation(data::GenerateOptions& options, const std::string& key,
                      const std::string& value) {
    if (key == "grid_cap") options.grid_cap = static_cast<std::size_t>(to_double(key, value));
    else if (key == "grid_train_target") options.grid_train_target = to_int(key, value);
    else throw ConfigError("unknown key '" + key + "' in [generation]");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source_name) {
    ExperimentConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section = "experiment";
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string record = trim(line);
        if (record.empty() || record[0] == '#') continue;
        if (record.front() == '[' && record.back() == ']') {
            section = trim(record.substr(1, record.size() - 2));
            continue;
        }
        const std::size_t eq = record.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(std::string(source_name) + ":" + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(record.substr(0, eq));
        const std::string value = trim(record.substr(eq + 1));
        try {
            if (section == "experiment") {
                apply_experiment(config, key, value);
            } else if (section == "explainer") {
                apply_explainer(config.explainer, key, value);
            } else if (section == "generation") {
                apply_generation(config.generation, key, value);
            } else if (section.starts_with("grid.")) {
                const std::string regressor = section.substr(5);
                auto& grid = config.grid_overrides[regressor];
                std::vector<double> values;
                for (const std::string& item : split_list(value)) {
                    values.push_back(to_double(key, item));
                }
                grid.axes.emplace_back(key, std::move(values));
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(source_name) + ":" + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (!(lambda > 0)) throw ConfigError("lambda must be positive");
    if (jaccard_k < 1) throw ConfigError("jaccard_k must be >= 1");
    if (neighborhood_samples < 1) throw ConfigError("neighborhood_samples must be >= 1");
    if (explain_points < 1) throw ConfigError("explain_points must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    explainer.validate();
    for (const auto& id : resolve_regressors()) regress::find_regressor(id);
    for (const auto& id : resolve_explainers()) explain::find_explainer(id);
    resolve_datasets();
}

std::vector<data::GroundTruth> ExperimentConfig::resolve_datasets() const {
    std::vector<data::GroundTruth> all = data::registry();
    if (!manifest.empty()) {
        for (auto& gt : data::load_manifest(manifest)) all.push_back(std::move(gt));
    }
    if (datasets.empty()) return all;
    std::vector<data::GroundTruth> selected;
    for (const auto& name : datasets) {
        selected.push_back(data::find_ground_truth(all, name));
    }
    return selected;
}

std::vector<std::string> ExperimentConfig::resolve_regressors() const {
    if (!regressors.empty()) return regressors;
    std::vector<std::string> ids;
    for (const auto& spec : regress::regressor_registry()) ids.push_back(spec.id);
    return ids;
}

std::vector<std::string> ExperimentConfig::resolve_explainers() const {
    if (!explainers.empty()) return explainers;
    std::vector<std::string> ids;
    for (const auto& spec : explain::explainer_registry()) ids.push_back(spec.id);
    return ids;
}

const regress::HyperGrid& ExperimentConfig::grid_for(const std::string& regressor_id) const {
    const auto it = grid_overrides.find(regressor_id);
    if (it != grid_overrides.end()) return it->second;
    return regress::find_regressor(regressor_id).default_grid;
}

}  // namespace xsr::harness
