#include <fstream>

#include "xsr/common/error.hpp"
#include "xsr/harness/records.hpp"

namespace xsr::harness {

namespace {

nlohmann::json cell_to_json(const ExplainerCell& cell) {
    nlohmann::json doc;
    doc["id"] = cell.id;
    doc["global"] = {{"status", cell.global_status}};
    if (!cell.global_reason.empty()) doc["global"]["reason"] = cell.global_reason;
    if (cell.global_status == "ok") {
        doc["global"]["values"] = cell.global_values;
        doc["global"]["seconds"] = cell.global_seconds;
        if (cell.global_cosine) doc["global"]["cosine"] = *cell.global_cosine;
        if (cell.global_nmse) doc["global"]["nmse"] = *cell.global_nmse;
        doc["global"]["cosine_degenerate"] = cell.global_cosine_degenerate;
        doc["global"]["nmse_degenerate"] = cell.global_nmse_degenerate;
    }
    doc["local"] = {{"status", cell.local_status}};
    if (!cell.local_reason.empty()) doc["local"]["reason"] = cell.local_reason;
    if (cell.local_status == "ok") {
        doc["local"]["points"] = cell.local_points;
        doc["local"]["values"] = cell.local_values;
        doc["local"]["seconds"] = cell.local_seconds;
        if (cell.stability_mean) doc["local"]["stability"] = *cell.stability_mean;
        if (cell.infidelity_mean) doc["local"]["infidelity"] = *cell.infidelity_mean;
        if (cell.jaccard_mean) doc["local"]["jaccard"] = *cell.jaccard_mean;
        if (cell.local_quality) {
            doc["local"]["quality"] = {{"cosine_mean", cell.local_quality->cosine_mean},
                                       {"nmse_mean", cell.local_quality->nmse_mean},
                                       {"degenerate_cosine", cell.local_quality->degenerate_cosine},
                                       {"degenerate_nmse", cell.local_quality->degenerate_nmse}};
        }
    }
    return doc;
}

ExplainerCell cell_from_json(const nlohmann::json& doc) {
    ExplainerCell cell;
    cell.id = doc.at("id").get<std::string>();
    const auto& global = doc.at("global");
    cell.global_status = global.at("status").get<std::string>();
    if (global.contains("reason")) cell.global_reason = global["reason"].get<std::string>();
    if (cell.global_status == "ok") {
        cell.global_values = global.at("values").get<std::vector<double>>();
        cell.global_seconds = global.at("seconds").get<double>();
        if (global.contains("cosine")) cell.global_cosine = global["cosine"].get<double>();
        if (global.contains("nmse")) cell.global_nmse = global["nmse"].get<double>();
        cell.global_cosine_degenerate = global.at("cosine_degenerate").get<bool>();
        cell.global_nmse_degenerate = global.at("nmse_degenerate").get<bool>();
    }
    const auto& local = doc.at("local");
    cell.local_status = local.at("status").get<std::string>();
    if (local.contains("reason")) cell.local_reason = local["reason"].get<std::string>();
    if (cell.local_status == "ok") {
        cell.local_points = local.at("points").get<int>();
        cell.local_values = local.at("values").get<std::vector<std::vector<double>>>();
        cell.local_seconds = local.at("seconds").get<double>();
        if (local.contains("stability")) cell.stability_mean = local["stability"].get<double>();
        if (local.contains("infidelity")) cell.infidelity_mean = local["infidelity"].get<double>();
        if (local.contains("jaccard")) cell.jaccard_mean = local["jaccard"].get<double>();
        if (local.contains("quality")) {
            LocalQuality quality;
            quality.cosine_mean = local["quality"].at("cosine_mean").get<double>();
            quality.nmse_mean = local["quality"].at("nmse_mean").get<double>();
            quality.degenerate_cosine = local["quality"].at("degenerate_cosine").get<int>();
            quality.degenerate_nmse = local["quality"].at("degenerate_nmse").get<int>();
            cell.local_quality = quality;
        }
    }
    return cell;
}

}  // namespace

nlohmann::json RunRecord::to_json() const {
    nlohmann::json doc;
    doc["dataset"] = dataset;
    doc["regressor"] = regressor;
    doc["hyper_params"] = hyper_params;
    doc["repetition"] = repetition;
    doc["seed"] = seed;
    doc["status"] = status;
    if (!error.empty()) doc["error"] = error;
    if (status == "ok") {
        doc["fit_seconds"] = fit_seconds;
        doc["test_mae"] = test_mae;
        doc["test_nmse"] = test_nmse;
        doc["test_r2"] = test_r2;
        doc["nmse_degenerate"] = nmse_degenerate;
        doc["r2_degenerate"] = r2_degenerate;
        if (expression_size) doc["expression_size"] = *expression_size;
        if (hit) doc["hit"] = *hit;
        if (hit_symbolic) doc["hit_symbolic"] = *hit_symbolic;
        if (hit_numeric) doc["hit_numeric"] = *hit_numeric;
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& cell : explainers) cells.push_back(cell_to_json(cell));
        doc["explainers"] = cells;
    }
    return doc;
}

RunRecord RunRecord::from_json(const nlohmann::json& doc) {
    RunRecord record;
    record.dataset = doc.at("dataset").get<std::string>();
    record.regressor = doc.at("regressor").get<std::string>();
    record.hyper_params = doc.at("hyper_params");
    record.repetition = doc.at("repetition").get<int>();
    record.seed = doc.at("seed").get<std::uint64_t>();
    record.status = doc.at("status").get<std::string>();
    if (doc.contains("error")) record.error = doc["error"].get<std::string>();
    if (record.status == "ok") {
        record.fit_seconds = doc.at("fit_seconds").get<double>();
        record.test_mae = doc.at("test_mae").get<double>();
        record.test_nmse = doc.at("test_nmse").get<double>();
        record.test_r2 = doc.at("test_r2").get<double>();
        record.nmse_degenerate = doc.at("nmse_degenerate").get<bool>();
        record.r2_degenerate = doc.at("r2_degenerate").get<bool>();
        if (doc.contains("expression_size")) record.expression_size = doc["expression_size"].get<int>();
        if (doc.contains("hit")) record.hit = doc["hit"].get<bool>();
        if (doc.contains("hit_symbolic")) record.hit_symbolic = doc["hit_symbolic"].get<bool>();
        if (doc.contains("hit_numeric")) record.hit_numeric = doc["hit_numeric"].get<bool>();
        for (const auto& cell : doc.at("explainers")) {
            record.explainers.push_back(cell_from_json(cell));
        }
    }
    return record;
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open records '" + path.string() + "'");
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(RunRecord::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error("records " + path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace xsr::harness
