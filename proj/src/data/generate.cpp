#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xsr/common/rng.hpp"
#include "xsr/data/dataset.hpp"
#include "xsr/expr/eval.hpp"

namespace xsr::data {

namespace {

FeatureSpace with_bounds(const FeatureSpace& base, double lo, double hi) {
    FeatureSpace space = base;
    space.lower.setConstant(base.dimension(), lo);
    space.upper.setConstant(base.dimension(), hi);
    return space;
}

FeatureSpace effective_space(const FeatureSpace& base, const SamplerSpec& sampler) {
    switch (sampler.kind) {
        case SamplerSpec::Kind::Uniform:
            if (sampler.bounds) return with_bounds(base, sampler.bounds->first, sampler.bounds->second);
            return base;
        case SamplerSpec::Kind::Grid:
            return with_bounds(base, sampler.start, sampler.stop);
        case SamplerSpec::Kind::LatinHypercube:
            return base;
    }
    return base;
}

// Uniform sampling with rejection of rows whose target is non-finite.
Dataset sample_uniform_rejecting(const GroundTruth& gt, const FeatureSpace& space, int target,
                                 std::uint64_t seed) {
    const int d = space.dimension();
    Rng rng(seed);
    Eigen::MatrixXd X(target, d);
    Eigen::VectorXd y(target);
    std::vector<double> row(static_cast<std::size_t>(d));
    long long attempts = 0;
    int kept = 0;
    while (kept < target) {
        ++attempts;
        for (int j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = rng.uniform(space.lower[j], space.upper[j]);
        const double value = expr::evaluate(gt.tree, row);
        if (std::isfinite(value)) {
            for (int j = 0; j < d; ++j) X(kept, j) = row[static_cast<std::size_t>(j)];
            y[kept] = value;
            ++kept;
        }
        if (attempts >= 2LL * target && 2LL * kept < attempts) {
            throw Error("generation starvation for '" + gt.name + "': " +
                        std::to_string(attempts - kept) + " of " + std::to_string(attempts) +
                        " candidate rows rejected");
        }
    }
    return {std::move(X), std::move(y), space, gt.name, seed};
}

Dataset keep_finite_rows(const GroundTruth& gt, const FeatureSpace& space, Eigen::MatrixXd X,
                         std::uint64_t seed) {
    Eigen::VectorXd y = expr::evaluate_batch(gt.tree, X);
    std::vector<Eigen::Index> finite;
    finite.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (std::isfinite(y[i])) finite.push_back(i);
    }
    if (2 * finite.size() < static_cast<std::size_t>(X.rows())) {
        throw Error("generation starvation for '" + gt.name + "': more than half of the grid rows rejected");
    }
    Eigen::MatrixXd Xf(static_cast<Eigen::Index>(finite.size()), X.cols());
    Eigen::VectorXd yf(static_cast<Eigen::Index>(finite.size()));
    for (std::size_t i = 0; i < finite.size(); ++i) {
        Xf.row(static_cast<Eigen::Index>(i)) = X.row(finite[i]);
        yf[static_cast<Eigen::Index>(i)] = y[finite[i]];
    }
    return {std::move(Xf), std::move(yf), space, gt.name, seed};
}

Dataset subsample(Dataset data, int target, std::uint64_t seed) {
    if (data.rows() <= target) return data;
    Rng rng(seed);
    std::vector<int> indices = rng.permutation(data.rows());
    indices.resize(static_cast<std::size_t>(target));
    std::sort(indices.begin(), indices.end());
    Eigen::MatrixXd X(target, data.X.cols());
    Eigen::VectorXd y(target);
    for (int i = 0; i < target; ++i) {
        X.row(i) = data.X.row(indices[static_cast<std::size_t>(i)]);
        y[i] = data.y[indices[static_cast<std::size_t>(i)]];
    }
    data.X = std::move(X);
    data.y = std::move(y);
    return data;
}

// The spec for LHS test sets is stratification over the observed per-feature
// range of the training matrix; degenerate columns fall back to the declared
// domain bounds.
FeatureSpace observed_space(const FeatureSpace& nominal, const Eigen::MatrixXd& train_X) {
    FeatureSpace space = nominal;
    for (int j = 0; j < space.dimension(); ++j) {
        const double lo = train_X.col(j).minCoeff();
        const double hi = train_X.col(j).maxCoeff();
        if (lo < hi) {
            space.lower[j] = lo;
            space.upper[j] = hi;
        }
    }
    return space;
}

}  // namespace

std::pair<Dataset, Dataset> generate(const GroundTruth& gt, std::uint64_t seed,
                                     const GenerateOptions& options) {
    gt.space.validate();
    const std::uint64_t train_seed = derive_seed(seed, std::string_view("train"));
    const std::uint64_t test_seed = derive_seed(seed, std::string_view("test"));

    Dataset train;
    switch (gt.train_sampler.kind) {
        case SamplerSpec::Kind::Uniform: {
            const FeatureSpace space = effective_space(gt.space, gt.train_sampler);
            train = sample_uniform_rejecting(gt, space, gt.train_sampler.count, train_seed);
            break;
        }
        case SamplerSpec::Kind::Grid: {
            const FeatureSpace space = effective_space(gt.space, gt.train_sampler);
            Eigen::MatrixXd X = sample_grid(gt.train_sampler.start, gt.train_sampler.stop,
                                            gt.train_sampler.step, space.dimension(), options.grid_cap);
            train = keep_finite_rows(gt, space, std::move(X), train_seed);
            if (options.grid_train_target > 0) {
                train = subsample(std::move(train), options.grid_train_target, train_seed);
            }
            break;
        }
        case SamplerSpec::Kind::LatinHypercube:
            throw ContractError("latin hypercube is a test-set sampler");
    }

    Dataset test;
    switch (gt.test_sampler.kind) {
        case SamplerSpec::Kind::Uniform: {
            const FeatureSpace space = effective_space(gt.space, gt.test_sampler);
            test = sample_uniform_rejecting(gt, space, gt.test_sampler.count, test_seed);
            break;
        }
        case SamplerSpec::Kind::Grid: {
            const FeatureSpace space = effective_space(gt.space, gt.test_sampler);
            Eigen::MatrixXd X = sample_grid(gt.test_sampler.start, gt.test_sampler.stop,
                                            gt.test_sampler.step, space.dimension(), options.grid_cap);
            test = keep_finite_rows(gt, space, std::move(X), test_seed);
            break;
        }
        case SamplerSpec::Kind::LatinHypercube: {
            const FeatureSpace space = observed_space(gt.space, train.X);
            Eigen::MatrixXd X = latin_hypercube(space, gt.test_sampler.count, test_seed);
            test = keep_finite_rows(gt, space, std::move(X), test_seed);
            break;
        }
    }
    return {std::move(train), std::move(test)};
}

const GroundTruth& find_ground_truth(const std::vector<GroundTruth>& list, std::string_view name) {
    for (const auto& gt : list) {
        if (gt.name == name) return gt;
    }
    throw Error("unknown ground truth '" + std::string(name) + "'");
}

void write_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    for (const auto& name : dataset.space.names) out << name << ',';
    out << "target\n";
    char buffer[40];
    for (int i = 0; i < dataset.rows(); ++i) {
        for (int j = 0; j < dataset.dimension(); ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", dataset.X(i, j));
            out << buffer << ',';
        }
        std::snprintf(buffer, sizeof(buffer), "%.17g", dataset.y[i]);
        out << buffer << '\n';
    }
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV '" + path.string() + "'");

    std::vector<std::string> columns;
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) columns.push_back(cell);
    if (columns.empty() || columns.back() != "target") {
        throw Error("CSV '" + path.string() + "' must end with a 'target' column");
    }
    const int d = static_cast<int>(columns.size()) - 1;

    std::vector<double> values;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        int fields = 0;
        while (std::getline(row, cell, ',')) {
            values.push_back(std::stod(cell));
            ++fields;
        }
        if (fields != d + 1) throw Error("CSV '" + path.string() + "': inconsistent column count");
        ++rows;
    }

    Dataset dataset;
    dataset.X.resize(rows, d);
    dataset.y.resize(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < d; ++j) dataset.X(i, j) = values[static_cast<std::size_t>(i) * (d + 1) + j];
        dataset.y[i] = values[static_cast<std::size_t>(i) * (d + 1) + d];
    }
    dataset.space.names.assign(columns.begin(), columns.end() - 1);
    dataset.space.lower.resize(d);
    dataset.space.upper.resize(d);
    for (int j = 0; j < d; ++j) {
        dataset.space.lower[j] = rows > 0 ? dataset.X.col(j).minCoeff() : 0.0;
        dataset.space.upper[j] = rows > 0 ? dataset.X.col(j).maxCoeff() : 1.0;
    }
    dataset.provenance = path.stem().string();
    return dataset;
}

}  // namespace xsr::data
