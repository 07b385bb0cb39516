#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include "xsr/common/rng.hpp"
#include "xsr/expr/simplify.hpp"
#include "xsr/harness/pipeline.hpp"
#include "xsr/metrics/robustness.hpp"
#include "xsr/regress/trainers.hpp"

namespace xsr::harness {

namespace {

std::uint64_t point_hash(const Eigen::VectorXd& x) {
    return hash_bytes(x.data(), static_cast<std::size_t>(x.size()) * sizeof(double));
}

std::string pair_stem(const std::string& dataset, const std::string& regressor) {
    return dataset + "__" + regressor;
}

struct DatasetBundle {
    data::GroundTruth gt;
    data::Dataset train;
    data::Dataset test;
    std::vector<Eigen::Index> explained_rows;        // local-explanation points
    std::vector<metrics::Neighborhood> neighborhoods;  // shared across regressors
};

// Deterministic per-dataset materialization: the data seed depends only on
// the master seed and the dataset name, so every cell sees identical data.
DatasetBundle make_bundle(const ExperimentConfig& config, const data::GroundTruth& gt) {
    DatasetBundle bundle{gt, {}, {}, {}, {}};
    const std::uint64_t data_seed = derive_seed(config.seed, std::string_view("data"), gt.name);
    auto [train, test] = data::generate(gt, data_seed, config.generation);
    bundle.train = std::move(train);
    bundle.test = std::move(test);

    const Eigen::Index n_test = bundle.test.X.rows();
    const int budget = std::min<int>(config.explain_points, static_cast<int>(n_test));
    Rng rng(derive_seed(config.seed, std::string_view("points"), gt.name));
    std::vector<int> order = rng.permutation(static_cast<int>(n_test));
    order.resize(static_cast<std::size_t>(budget));
    std::sort(order.begin(), order.end());
    bundle.explained_rows.assign(order.begin(), order.end());

    bundle.neighborhoods.reserve(bundle.explained_rows.size());
    for (std::size_t i = 0; i < bundle.explained_rows.size(); ++i) {
        const Eigen::VectorXd x = bundle.test.X.row(bundle.explained_rows[i]).transpose();
        bundle.neighborhoods.push_back(metrics::neighborhood(
            x, bundle.train.X, config.lambda, config.neighborhood_samples,
            derive_seed(config.seed, std::string_view("nbhd"), gt.name, static_cast<std::uint64_t>(i))));
    }
    return bundle;
}

ExplainerCell run_explainer_cell(const ExperimentConfig& config, const DatasetBundle& bundle,
                                 const regress::FittedModel& model,
                                 const regress::FittedModel& truth_model, const std::string& id,
                                 std::uint64_t cell_seed) {
    const explain::ExplainerSpec& spec = explain::find_explainer(id);
    const Eigen::MatrixXd& X = bundle.train.X;
    const Eigen::VectorXd& y = bundle.train.y;
    const std::uint64_t truth_base = derive_seed(config.seed, std::string_view("truth"), bundle.gt.name);

    ExplainerCell cell;
    cell.id = id;

    // Global scope.
    if (!spec.global) {
        cell.global_status = "n/a";
    } else if (const auto reason = explain::incompatibility(spec, model, explain::Scope::Global)) {
        cell.global_status = "skipped";
        cell.global_reason = *reason;
    } else {
        const explain::ExplainRequest request{id, explain::Scope::Global, std::nullopt};
        const explain::Explanation explanation = explain::run_explainer(
            request, model, X, y, config.explainer, derive_seed(cell_seed, id, std::string_view("global")));
        const explain::Explanation truth = explain::run_explainer(
            request, truth_model, X, y, config.explainer,
            derive_seed(truth_base, id, std::string_view("global")));
        cell.global_status = "ok";
        cell.global_values.assign(explanation.values.begin(), explanation.values.end());
        cell.global_seconds = explanation.seconds;
        const metrics::Score cosine = metrics::cosine_quality(truth.values, explanation.values);
        const metrics::Score nmse = metrics::nmse_quality(truth.values, explanation.values);
        cell.global_cosine = cosine.value;
        cell.global_nmse = nmse.value;
        cell.global_cosine_degenerate = cosine.degenerate;
        cell.global_nmse_degenerate = nmse.degenerate;
    }

    // Local scope: explanations at the budgeted test points, robustness over
    // the shared neighborhoods, quality against the truth explanation.
    if (!spec.local) {
        cell.local_status = "n/a";
    } else if (const auto reason = explain::incompatibility(spec, model, explain::Scope::Local)) {
        cell.local_status = "skipped";
        cell.local_reason = *reason;
    } else {
        auto local_fn = [&](const regress::FittedModel& target, std::uint64_t base) {
            return [&, base](const Eigen::VectorXd& z) {
                const explain::ExplainRequest request{id, explain::Scope::Local, z};
                return explain::run_explainer(request, target, X, y, config.explainer,
                                              derive_seed(base, id, point_hash(z)))
                    .values;
            };
        };
        const metrics::LocalExplainer model_explainer = local_fn(model, cell_seed);
        const metrics::LocalExplainer truth_explainer = local_fn(truth_model, truth_base);

        cell.local_status = "ok";
        cell.local_points = static_cast<int>(bundle.explained_rows.size());
        LocalQuality quality;
        double stability_total = 0.0, infidelity_total = 0.0, jaccard_total = 0.0;
        double seconds = 0.0;
        const auto wall_start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < bundle.explained_rows.size(); ++i) {
            const Eigen::VectorXd x = bundle.test.X.row(bundle.explained_rows[i]).transpose();
            const metrics::Neighborhood& nbhd = bundle.neighborhoods[i];

            const Eigen::VectorXd values = model_explainer(x);
            cell.local_values.emplace_back(values.begin(), values.end());

            stability_total += metrics::stability(model_explainer, x, nbhd);
            infidelity_total += metrics::infidelity(model, model_explainer, x, nbhd);
            jaccard_total += metrics::jaccard_stability(model_explainer, x, nbhd, config.jaccard_k);

            const Eigen::VectorXd truth_values = truth_explainer(x);
            const metrics::Score cosine = metrics::cosine_quality(truth_values, values);
            const metrics::Score nmse = metrics::nmse_quality(truth_values, values);
            quality.cosine_mean += cosine.value;
            quality.nmse_mean += nmse.value;
            quality.degenerate_cosine += cosine.degenerate ? 1 : 0;
            quality.degenerate_nmse += nmse.degenerate ? 1 : 0;
        }
        const auto points = static_cast<double>(bundle.explained_rows.size());
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        cell.stability_mean = stability_total / points;
        cell.infidelity_mean = infidelity_total / points;
        cell.jaccard_mean = jaccard_total / points;
        quality.cosine_mean /= points;
        quality.nmse_mean /= points;
        cell.local_quality = quality;
        cell.local_seconds = seconds;
    }
    return cell;
}

RunRecord run_cell(const ExperimentConfig& config, const DatasetBundle& bundle,
                   const std::string& regressor_id, int repetition) {
    RunRecord record;
    record.dataset = bundle.gt.name;
    record.regressor = regressor_id;
    record.repetition = repetition;
    record.seed = derive_seed(config.seed, bundle.gt.name, regressor_id,
                              static_cast<std::uint64_t>(repetition));

    const std::string failure_key =
        bundle.gt.name + ":" + regressor_id + ":" + std::to_string(repetition);
    if (config.inject_failure == failure_key) {
        throw Error("injected failure for cell " + failure_key);
    }

    const nlohmann::json params = tuned_params(config, bundle.gt.name, regressor_id);
    record.hyper_params = params;

    const regress::RegressorSpec& spec = regress::find_regressor(regressor_id);
    const auto fit_start = std::chrono::steady_clock::now();
    const regress::FittedModel model = spec.trainer(bundle.train.X, bundle.train.y, params, record.seed);
    record.fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - fit_start).count();

    const Eigen::VectorXd predictions = model.predict_batch(bundle.test.X);
    record.test_mae = metrics::mae(predictions, bundle.test.y);
    const metrics::Score nmse = metrics::nmse(predictions, bundle.test.y);
    const metrics::Score r2 = metrics::r2(predictions, bundle.test.y);
    record.test_nmse = nmse.value;
    record.test_r2 = r2.value;
    record.nmse_degenerate = nmse.degenerate;
    record.r2_degenerate = r2.degenerate;

    if (model.symbolic_form()) {
        record.expression_size = model.symbolic_form()->size();
        const expr::HitCheck check = expr::check_hit(*model.symbolic_form(), bundle.gt.tree,
                                                     bundle.gt.space.lower, bundle.gt.space.upper);
        record.hit = check.hit();
        record.hit_symbolic = check.symbolic;
        record.hit_numeric = check.numeric;
    }

    const regress::FittedModel truth_model =
        regress::FittedModel::from_tree(bundle.gt.tree, "truth", bundle.gt.space.dimension());
    for (const std::string& id : config.resolve_explainers()) {
        record.explainers.push_back(
            run_explainer_cell(config, bundle, model, truth_model, id, record.seed));
    }
    return record;
}

struct Cell {
    std::size_t dataset_index;
    std::string regressor;
    int repetition;
};

}  // namespace

void cmd_generate(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.data_dir());
    for (const data::GroundTruth& gt : config.resolve_datasets()) {
        const std::uint64_t data_seed = derive_seed(config.seed, std::string_view("data"), gt.name);
        const auto [train, test] = data::generate(gt, data_seed, config.generation);
        data::write_csv(config.data_dir() / (gt.name + ".train.csv"), train);
        data::write_csv(config.data_dir() / (gt.name + ".test.csv"), test);
    }
}

void cmd_tune(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.tuning_dir());
    for (const data::GroundTruth& gt : config.resolve_datasets()) {
        const std::uint64_t data_seed = derive_seed(config.seed, std::string_view("data"), gt.name);
        const auto [train, test] = data::generate(gt, data_seed, config.generation);
        for (const std::string& regressor_id : config.resolve_regressors()) {
            const regress::RegressorSpec& spec = regress::find_regressor(regressor_id);
            const regress::HyperGrid& grid = config.grid_for(regressor_id);
            const std::uint64_t tune_seed =
                derive_seed(config.seed, std::string_view("tune"), gt.name, regressor_id);
            const regress::GridSearchResult result =
                regress::grid_search(spec.trainer, grid, train.X, train.y, tune_seed);

            nlohmann::json doc;
            doc["dataset"] = gt.name;
            doc["regressor"] = regressor_id;
            doc["best_params"] = result.best_params;
            doc["best_index"] = result.best_index;
            nlohmann::json table = nlohmann::json::array();
            for (const auto& row : result.table) {
                table.push_back({{"params", row.params},
                                 {"fold_r2", row.fold_r2},
                                 {"mean_r2", row.mean_r2}});
            }
            doc["cv_table"] = table;

            std::ofstream out(config.tuning_dir() / (pair_stem(gt.name, regressor_id) + ".json"));
            out << doc.dump(2) << '\n';
        }
    }
}

nlohmann::json tuned_params(const ExperimentConfig& config, const std::string& dataset,
                            const std::string& regressor) {
    const auto path = config.tuning_dir() / (pair_stem(dataset, regressor) + ".json");
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        nlohmann::json doc;
        in >> doc;
        return doc.at("best_params");
    }
    if (config.grid_for(regressor).empty()) {
        return nlohmann::json::object();
    }
    throw Error("no tuning result for " + dataset + " x " + regressor +
                "; run the tune step first");
}

int cmd_run(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    std::vector<DatasetBundle> bundles;
    for (const data::GroundTruth& gt : config.resolve_datasets()) {
        bundles.push_back(make_bundle(config, gt));
    }

    std::vector<Cell> cells;
    for (std::size_t b = 0; b < bundles.size(); ++b) {
        for (const std::string& regressor_id : config.resolve_regressors()) {
            const int reps = regress::find_regressor(regressor_id).stochastic ? config.repetitions : 1;
            for (int rep = 0; rep < reps; ++rep) {
                cells.push_back({b, regressor_id, rep});
            }
        }
    }

    std::ofstream out(config.records_path(), std::ios::trunc);
    if (!out) throw Error("cannot open '" + config.records_path().string() + "' for writing");

    // Cells execute concurrently; records are appended in cell order so that
    // the stream is reproducible regardless of scheduling.
    std::vector<std::optional<RunRecord>> results(cells.size());
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};
    int failures = 0;

    auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            const Cell& cell = cells[index];
            RunRecord record;
            try {
                record = run_cell(config, bundles[cell.dataset_index], cell.regressor, cell.repetition);
            } catch (const std::exception& e) {
                record = RunRecord{};
                record.dataset = bundles[cell.dataset_index].gt.name;
                record.regressor = cell.regressor;
                record.repetition = cell.repetition;
                record.seed = derive_seed(config.seed, record.dataset, cell.regressor,
                                          static_cast<std::uint64_t>(cell.repetition));
                record.status = "failed";
                record.error = e.what();
            }
            {
                const std::lock_guard<std::mutex> lock(mutex);
                results[index] = std::move(record);
            }
            ready.notify_all();
        }
    };

    const int worker_count = std::min<int>(config.workers, static_cast<int>(cells.size()));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(std::max(worker_count, 1)));
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);

    for (std::size_t written = 0; written < cells.size(); ++written) {
        std::unique_lock<std::mutex> lock(mutex);
        ready.wait(lock, [&] { return results[written].has_value(); });
        const RunRecord& record = *results[written];
        if (record.status != "ok") ++failures;
        out << record.to_json().dump() << '\n';
        out.flush();
        results[written].reset();
    }
    for (auto& thread : threads) thread.join();
    return failures;
}

}  // namespace xsr::harness
