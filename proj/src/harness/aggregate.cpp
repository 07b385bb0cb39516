#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "xsr/harness/aggregate.hpp"
#include "xsr/stats/stats.hpp"

namespace xsr::harness {

namespace {

std::string format_value(double v) {
    char buffer[64];
    if (v == 0.0 || (std::abs(v) >= 1e-3 && std::abs(v) < 1e5)) {
        std::snprintf(buffer, sizeof(buffer), "%.3f", v);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.2e", v);
    }
    return buffer;
}

std::string format_cell(const std::vector<double>& values) {
    const stats::GroupSummary summary = stats::median_iqr(values);
    return format_value(summary.median) + " \xc2\xb1 " + format_value(summary.iqr);  // m ± iqr
}

// Picks one scalar out of an explainer cell, or nothing when not applicable.
using CellValue = std::function<std::optional<double>(const ExplainerCell&)>;

MeasureTable build_table(const std::string& measure, bool lower_is_better,
                         const std::vector<std::string>& regressors,
                         const std::vector<std::string>& explainers,
                         const std::vector<RunRecord>& records, const CellValue& pick) {
    MeasureTable table;
    table.measure = measure;
    table.lower_is_better = lower_is_better;
    table.regressors = regressors;
    table.explainers = explainers;

    for (const std::string& regressor : regressors) {
        std::vector<std::string> row;
        std::vector<double> medians;
        for (const std::string& explainer : explainers) {
            std::vector<double> values;
            for (const RunRecord& record : records) {
                if (record.status != "ok" || record.regressor != regressor) continue;
                for (const ExplainerCell& cell : record.explainers) {
                    if (cell.id != explainer) continue;
                    if (const auto value = pick(cell); value && std::isfinite(*value)) {
                        values.push_back(*value);
                    }
                }
            }
            if (values.empty()) {
                row.push_back("-");
                medians.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                row.push_back(format_cell(values));
                medians.push_back(stats::median_iqr(values).median);
            }
        }
        // Flag the best cell per row for downstream highlighting.
        std::vector<bool> best_row(explainers.size(), false);
        double best_value = std::numeric_limits<double>::quiet_NaN();
        std::size_t best_index = explainers.size();
        for (std::size_t i = 0; i < medians.size(); ++i) {
            if (std::isnan(medians[i])) continue;
            const bool better = std::isnan(best_value) ||
                                (lower_is_better ? medians[i] < best_value : medians[i] > best_value);
            if (better) {
                best_value = medians[i];
                best_index = i;
            }
        }
        if (best_index < best_row.size()) best_row[best_index] = true;
        table.cells.push_back(std::move(row));
        table.best.push_back(std::move(best_row));
    }
    return table;
}

void write_table_csv(const std::filesystem::path& dir, const MeasureTable& table) {
    std::ofstream out(dir / (table.measure + ".csv"));
    out << "regressor";
    for (const auto& explainer : table.explainers) out << ',' << explainer;
    out << '\n';
    for (std::size_t r = 0; r < table.regressors.size(); ++r) {
        out << table.regressors[r];
        for (const auto& cell : table.cells[r]) out << ",\"" << cell << '"';
        out << '\n';
    }

    std::ofstream best(dir / (table.measure + "_best.csv"));
    best << "regressor,best_explainer\n";
    for (std::size_t r = 0; r < table.regressors.size(); ++r) {
        std::string winner = "-";
        for (std::size_t c = 0; c < table.explainers.size(); ++c) {
            if (table.best[r][c]) winner = table.explainers[c];
        }
        best << table.regressors[r] << ',' << winner << '\n';
    }
}

std::vector<std::string> ordered_values(const std::vector<RunRecord>& records,
                                        const std::function<std::string(const RunRecord&)>& key) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& record : records) {
        const std::string k = key(record);
        if (seen.insert(k).second) out.push_back(k);
    }
    return out;
}

// methods x datasets score matrix of medians; entries without data are
// dropped by requiring full coverage.
std::optional<Eigen::MatrixXd> score_matrix(const std::vector<std::string>& methods,
                                            const std::vector<std::string>& datasets,
                                            const std::function<std::vector<double>(
                                                const std::string&, const std::string&)>& values_of) {
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(methods.size()),
                           static_cast<Eigen::Index>(datasets.size()));
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const std::vector<double> values = values_of(methods[m], datasets[d]);
            if (values.empty()) return std::nullopt;
            scores(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d)) =
                stats::median_iqr(values).median;
        }
    }
    return scores;
}

nlohmann::json rank_table_json(const stats::RankTable& table) {
    nlohmann::json doc;
    doc["methods"] = table.methods;
    doc["average_ranks"] = table.average_ranks;
    doc["significance_threshold"] = table.significance_threshold;
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < table.methods.size(); ++j) {
            pairs.push_back({{"a", table.methods[i]},
                             {"b", table.methods[j]},
                             {"adjusted_p",
                              table.adjusted_p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))}});
        }
    }
    doc["pairwise"] = pairs;
    return doc;
}

void write_rank_csv(const std::filesystem::path& dir, const std::string& name,
                    const stats::RankTable& table) {
    std::ofstream out(dir / (name + ".csv"));
    out << "method,average_rank\n";
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
        out << table.methods[i] << ',' << table.average_ranks[i] << '\n';
    }
    std::ofstream pj(dir / (name + "_pairwise.json"));
    pj << rank_table_json(table).dump(2) << '\n';
}

}  // namespace

AggregateResult cmd_aggregate(const ExperimentConfig& config) {
    const std::vector<RunRecord> records = read_records(config.records_path());
    if (records.empty()) {
        throw Error("no records to aggregate in '" + config.records_path().string() + "'");
    }

    AggregateResult result;
    result.total_records = static_cast<int>(records.size());
    for (const auto& record : records) {
        if (record.status != "ok") ++result.failed_records;
    }
    if (result.total_records == result.failed_records) {
        throw Error("every record failed; nothing to aggregate");
    }

    const std::vector<std::string> regressors =
        ordered_values(records, [](const RunRecord& r) { return r.regressor; });
    const std::vector<std::string> datasets =
        ordered_values(records, [](const RunRecord& r) { return r.dataset; });
    std::vector<std::string> explainers;
    {
        std::set<std::string> seen;
        for (const auto& record : records) {
            for (const auto& cell : record.explainers) {
                if (seen.insert(cell.id).second) explainers.push_back(cell.id);
            }
        }
    }

    struct MeasureSpec {
        std::string name;
        bool lower_is_better;
        CellValue pick;
    };
    const std::vector<MeasureSpec> measure_specs = {
        {"stability", true, [](const ExplainerCell& c) { return c.stability_mean; }},
        {"infidelity", true, [](const ExplainerCell& c) { return c.infidelity_mean; }},
        {"jaccard", false, [](const ExplainerCell& c) { return c.jaccard_mean; }},
        {"cosine_local", false,
         [](const ExplainerCell& c) -> std::optional<double> {
             if (!c.local_quality) return std::nullopt;
             return c.local_quality->cosine_mean;
         }},
        {"nmse_local", true,
         [](const ExplainerCell& c) -> std::optional<double> {
             if (!c.local_quality) return std::nullopt;
             return c.local_quality->nmse_mean;
         }},
        {"cosine_global", false,
         [](const ExplainerCell& c) -> std::optional<double> {
             if (c.global_status != "ok") return std::nullopt;
             return c.global_cosine;
         }},
        {"nmse_global", true,
         [](const ExplainerCell& c) -> std::optional<double> {
             if (c.global_status != "ok") return std::nullopt;
             return c.global_nmse;
         }},
    };
    for (const auto& spec : measure_specs) {
        result.measures.push_back(
            build_table(spec.name, spec.lower_is_better, regressors, explainers, records, spec.pick));
    }

    result.timings.push_back(build_table(
        "timing_global", true, regressors, explainers, records,
        [](const ExplainerCell& c) -> std::optional<double> {
            if (c.global_status != "ok") return std::nullopt;
            return c.global_seconds;
        }));
    result.timings.push_back(build_table(
        "timing_local", true, regressors, explainers, records,
        [](const ExplainerCell& c) -> std::optional<double> {
            if (c.local_status != "ok") return std::nullopt;
            return c.local_seconds;
        }));

    // Accuracy summaries per (dataset x regressor).
    result.accuracy = nlohmann::json::array();
    for (const auto& dataset : datasets) {
        for (const auto& regressor : regressors) {
            std::vector<double> maes, nmses, r2s, sizes;
            int hits = 0, symbolic = 0;
            for (const auto& record : records) {
                if (record.status != "ok" || record.dataset != dataset ||
                    record.regressor != regressor) {
                    continue;
                }
                maes.push_back(record.test_mae);
                nmses.push_back(record.test_nmse);
                r2s.push_back(record.test_r2);
                if (record.expression_size) {
                    sizes.push_back(static_cast<double>(*record.expression_size));
                    ++symbolic;
                    if (record.hit.value_or(false)) ++hits;
                }
            }
            if (maes.empty()) continue;
            nlohmann::json row;
            row["dataset"] = dataset;
            row["regressor"] = regressor;
            row["n"] = maes.size();
            row["mae_median"] = stats::median_iqr(maes).median;
            row["mae_iqr"] = stats::median_iqr(maes).iqr;
            row["nmse_median"] = stats::median_iqr(nmses).median;
            row["nmse_iqr"] = stats::median_iqr(nmses).iqr;
            row["r2_median"] = stats::median_iqr(r2s).median;
            row["r2_iqr"] = stats::median_iqr(r2s).iqr;
            if (!sizes.empty()) {
                row["size_median"] = stats::median_iqr(sizes).median;
                row["hit_rate"] = static_cast<double>(hits) / symbolic;
            }
            result.accuracy.push_back(row);
        }
    }

    // Rank tables: regressors by test NMSE, explainers by each quality measure.
    result.ranks = nlohmann::json::object();
    if (datasets.size() >= 1 && regressors.size() >= 2) {
        const auto matrix = score_matrix(
            regressors, datasets, [&](const std::string& method, const std::string& dataset) {
                std::vector<double> values;
                for (const auto& record : records) {
                    if (record.status == "ok" && record.regressor == method &&
                        record.dataset == dataset) {
                        values.push_back(record.test_nmse);
                    }
                }
                return values;
            });
        if (matrix) {
            result.ranks["regressors_nmse"] =
                rank_table_json(stats::average_ranks(*matrix, regressors, stats::Direction::LowerIsBetter));
        }
    }
    if (datasets.size() >= 1 && explainers.size() >= 2) {
        for (const auto& spec : measure_specs) {
            const auto matrix = score_matrix(
                explainers, datasets, [&](const std::string& method, const std::string& dataset) {
                    std::vector<double> values;
                    for (const auto& record : records) {
                        if (record.status != "ok" || record.dataset != dataset) continue;
                        for (const auto& cell : record.explainers) {
                            if (cell.id != method) continue;
                            if (const auto value = spec.pick(cell); value && std::isfinite(*value)) {
                                values.push_back(*value);
                            }
                        }
                    }
                    return values;
                });
            if (matrix) {
                result.ranks["explainers_" + spec.name] = rank_table_json(stats::average_ranks(
                    *matrix, explainers,
                    spec.lower_is_better ? stats::Direction::LowerIsBetter
                                         : stats::Direction::HigherIsBetter));
            }
        }
    }

    // Persist everything under tables/.
    std::filesystem::create_directories(config.tables_dir());
    for (const auto& table : result.measures) write_table_csv(config.tables_dir(), table);
    for (const auto& table : result.timings) write_table_csv(config.tables_dir(), table);
    {
        std::ofstream out(config.tables_dir() / "accuracy.csv");
        out << "dataset,regressor,n,mae_median,mae_iqr,nmse_median,nmse_iqr,r2_median,r2_iqr,"
               "size_median,hit_rate\n";
        for (const auto& row : result.accuracy) {
            out << row["dataset"].get<std::string>() << ',' << row["regressor"].get<std::string>()
                << ',' << row["n"] << ',' << row["mae_median"] << ',' << row["mae_iqr"] << ','
                << row["nmse_median"] << ',' << row["nmse_iqr"] << ',' << row["r2_median"] << ','
                << row["r2_iqr"] << ',';
            if (row.contains("size_median")) {
                out << row["size_median"] << ',' << row["hit_rate"];
            } else {
                out << "-,-";
            }
            out << '\n';
        }
    }
    for (auto it = result.ranks.begin(); it != result.ranks.end(); ++it) {
        stats::RankTable table;
        table.methods = it.value()["methods"].get<std::vector<std::string>>();
        table.average_ranks = it.value()["average_ranks"].get<std::vector<double>>();
        table.adjusted_p = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(table.methods.size()),
                                                 static_cast<Eigen::Index>(table.methods.size()));
        for (const auto& pair : it.value()["pairwise"]) {
            const auto a = std::find(table.methods.begin(), table.methods.end(),
                                     pair["a"].get<std::string>()) -
                           table.methods.begin();
            const auto b = std::find(table.methods.begin(), table.methods.end(),
                                     pair["b"].get<std::string>()) -
                           table.methods.begin();
            table.adjusted_p(a, b) = table.adjusted_p(b, a) = pair["adjusted_p"].get<double>();
        }
        write_rank_csv(config.tables_dir(), "ranks_" + it.key(), table);
    }

    return result;
}

namespace {

void render_table(std::ostream& out, const MeasureTable& table) {
    out << "## " << table.measure << " (" << (table.lower_is_better ? "smaller" : "greater")
        << " is better; * marks the best cell per row)\n";
    std::size_t label_width = 9;
    for (const auto& r : table.regressors) label_width = std::max(label_width, r.size());
    std::vector<std::size_t> widths(table.explainers.size());
    for (std::size_t c = 0; c < table.explainers.size(); ++c) {
        widths[c] = table.explainers[c].size();
        for (std::size_t r = 0; r < table.regressors.size(); ++r) {
            widths[c] = std::max(widths[c], table.cells[r][c].size() + 2);
        }
    }
    out << std::string(label_width, ' ');
    for (std::size_t c = 0; c < table.explainers.size(); ++c) {
        out << "  " << table.explainers[c]
            << std::string(widths[c] - table.explainers[c].size(), ' ');
    }
    out << '\n';
    for (std::size_t r = 0; r < table.regressors.size(); ++r) {
        out << table.regressors[r] << std::string(label_width - table.regressors[r].size(), ' ');
        for (std::size_t c = 0; c < table.explainers.size(); ++c) {
            std::string cell = table.cells[r][c];
            if (table.best[r][c]) cell += " *";
            out << "  " << cell << std::string(widths[c] - cell.size(), ' ');
        }
        out << '\n';
    }
    out << '\n';
}

}  // namespace

std::string cmd_report(const ExperimentConfig& config) {
    const AggregateResult aggregate = cmd_aggregate(config);
    std::ostringstream out;
    out << "# Benchmark report\n";
    out << "records: " << aggregate.total_records << " (" << aggregate.failed_records
        << " failed)\n\n";

    out << "## accuracy (median over repetitions)\n";
    for (const auto& row : aggregate.accuracy) {
        out << "  " << row["dataset"].get<std::string>() << " / "
            << row["regressor"].get<std::string>() << ": MAE " << format_value(row["mae_median"])
            << " | NMSE " << format_value(row["nmse_median"]) << " | R2 "
            << format_value(row["r2_median"]);
        if (row.contains("size_median")) {
            out << " | size " << format_value(row["size_median"]) << " | hit-rate "
                << format_value(row["hit_rate"]);
        }
        out << '\n';
    }
    out << '\n';

    for (const auto& table : aggregate.measures) render_table(out, table);
    for (const auto& table : aggregate.timings) render_table(out, table);

    if (!aggregate.ranks.empty()) {
        out << "## average ranks\n";
        for (auto it = aggregate.ranks.begin(); it != aggregate.ranks.end(); ++it) {
            out << "  " << it.key() << ":";
            const auto methods = it.value()["methods"].get<std::vector<std::string>>();
            const auto ranks = it.value()["average_ranks"].get<std::vector<double>>();
            for (std::size_t i = 0; i < methods.size(); ++i) {
                out << ' ' << methods[i] << '=' << format_value(ranks[i]);
            }
            out << '\n';
        }
    }

    const std::string text = out.str();
    std::filesystem::create_directories(config.output_dir);
    std::ofstream file(std::filesystem::path(config.output_dir) / "report.txt");
    file << text;
    return text;
}

}  // namespace xsr::harness
