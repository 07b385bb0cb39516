#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "xsr/expr/node.hpp"

namespace xsr::data {

struct FeatureSpace {
    std::vector<std::string> names;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int dimension() const { return static_cast<int>(names.size()); }
    void validate() const;
};

struct SamplerSpec {
    enum class Kind { Uniform, Grid, LatinHypercube };
    Kind kind = Kind::Uniform;
    int count = 0;                                     // uniform / lhs
    double start = 0, stop = 0, step = 0;              // grid
    std::optional<std::pair<double, double>> bounds;   // uniform bounds override

    static SamplerSpec uniform(int n) { return {Kind::Uniform, n, 0, 0, 0, std::nullopt}; }
    static SamplerSpec uniform(int n, double lo, double hi) {
        return {Kind::Uniform, n, 0, 0, 0, std::make_pair(lo, hi)};
    }
    static SamplerSpec grid(double start, double stop, double step) {
        return {Kind::Grid, 0, start, stop, step, std::nullopt};
    }
    static SamplerSpec latin_hypercube(int n) { return {Kind::LatinHypercube, n, 0, 0, 0, std::nullopt}; }

    std::string describe() const;
};

struct GroundTruth {
    std::string name;
    expr::ExprTree tree;
    FeatureSpace space;
    SamplerSpec train_sampler;
    SamplerSpec test_sampler;
};

struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    FeatureSpace space;
    std::string provenance;  // ground-truth name
    std::uint64_t seed = 0;

    int rows() const { return static_cast<int>(X.rows()); }
    int dimension() const { return static_cast<int>(X.cols()); }
};

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

// I.i.d. uniform within the per-feature bounds; deterministic given seed.
Eigen::MatrixXd sample_uniform(const FeatureSpace& space, int n, std::uint64_t seed);

// Endpoint-inclusive 1-D grid replicated as a full Cartesian product across d
// dimensions. Dimension 0 varies fastest. Throws when the product size
// exceeds `cap`.
Eigen::MatrixXd sample_grid(double start, double stop, double step, int d,
                            std::size_t cap = kDefaultGridCap);

// Latin hypercube: each dimension split into n equal strata, exactly one
// sample per stratum, independent stratum permutations per dimension.
Eigen::MatrixXd latin_hypercube(const FeatureSpace& space, int n, std::uint64_t seed);

struct GenerateOptions {
    std::size_t grid_cap = 4'000'000;  // raised cap for declared grid samplers
    int grid_train_target = 1000;      // grid training sets larger than this are subsampled
};

// Materializes train/test datasets for a ground truth. Uniform samplers
// reject-and-resample rows with non-finite targets; grid and LHS samplers
// drop them. Throws when more than half of all candidate rows are rejected.
std::pair<Dataset, Dataset> generate(const GroundTruth& gt, std::uint64_t seed,
                                     const GenerateOptions& options = {});

// Built-in benchmark equations plus the bundled physics manifest.
const std::vector<GroundTruth>& registry();

// Parses `name | expression | var:lo:hi,... | train-sampler | test-sampler`
// records, one per line; '#' starts a comment.
std::vector<GroundTruth> parse_manifest(std::string_view text, std::string_view source_name);
std::vector<GroundTruth> load_manifest(const std::filesystem::path& path);

const GroundTruth& find_ground_truth(const std::vector<GroundTruth>& list, std::string_view name);

void write_csv(const std::filesystem::path& path, const Dataset& dataset);
// Reads a CSV written by write_csv; bounds are restored as column min/max.
Dataset read_csv(const std::filesystem::path& path);

}  // namespace xsr::data
