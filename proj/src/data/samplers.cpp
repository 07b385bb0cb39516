#include <cmath>
#include <string>

#include "xsr/common/rng.hpp"
#include "xsr/data/dataset.hpp"

namespace xsr::data {

void FeatureSpace::validate() const {
    const int d = dimension();
    if (lower.size() != d || upper.size() != d) {
        throw ContractError("feature space bounds must match the number of names");
    }
    for (int i = 0; i < d; ++i) {
        if (!(lower[i] < upper[i])) {
            throw ContractError("feature '" + names[static_cast<std::size_t>(i)] +
                                "' requires lower < upper");
        }
        for (int j = i + 1; j < d; ++j) {
            if (names[static_cast<std::size_t>(i)] == names[static_cast<std::size_t>(j)]) {
                throw ContractError("duplicate feature name '" + names[static_cast<std::size_t>(i)] + "'");
            }
        }
    }
}

std::string SamplerSpec::describe() const {
    switch (kind) {
        case Kind::Uniform:
            if (bounds) {
                return "uniform(" + std::to_string(count) + "," + std::to_string(bounds->first) +
                       "," + std::to_string(bounds->second) + ")";
            }
            return "uniform(" + std::to_string(count) + ")";
        case Kind::Grid:
            return "grid(" + std::to_string(start) + "," + std::to_string(stop) + "," +
                   std::to_string(step) + ")";
        case Kind::LatinHypercube:
            return "lhs(" + std::to_string(count) + ")";
    }
    return "?";
}

Eigen::MatrixXd sample_uniform(const FeatureSpace& space, int n, std::uint64_t seed) {
    if (n < 0) throw ContractError("sample count must be non-negative");
    space.validate();
    const int d = space.dimension();
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            X(i, j) = rng.uniform(space.lower[j], space.upper[j]);
        }
    }
    return X;
}

Eigen::MatrixXd sample_grid(double start, double stop, double step, int d, std::size_t cap) {
    if (!(step > 0)) throw ContractError("grid step must be positive");
    if (!(stop >= start)) throw ContractError("grid requires stop >= start");
    const auto points_1d = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;

    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
        if (total > cap / points_1d + 1) {
            total = cap + 1;
            break;
        }
        total *= points_1d;
    }
    if (total > cap) {
        throw Error("grid of " + std::to_string(points_1d) + "^" + std::to_string(d) +
                    " points exceeds the cap of " + std::to_string(cap));
    }

    Eigen::VectorXd axis(static_cast<Eigen::Index>(points_1d));
    for (std::size_t i = 0; i < points_1d; ++i) {
        axis[static_cast<Eigen::Index>(i)] = start + static_cast<double>(i) * step;
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(total), d);
    for (std::size_t r = 0; r < total; ++r) {
        std::size_t rest = r;
        for (int j = 0; j < d; ++j) {
            X(static_cast<Eigen::Index>(r), j) = axis[static_cast<Eigen::Index>(rest % points_1d)];
            rest /= points_1d;
        }
    }
    return X;
}

Eigen::MatrixXd latin_hypercube(const FeatureSpace& space, int n, std::uint64_t seed) {
    if (n < 1) throw ContractError("latin hypercube requires n >= 1");
    space.validate();
    const int d = space.dimension();
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int j = 0; j < d; ++j) {
        const std::vector<int> strata = rng.permutation(n);
        const double width = (space.upper[j] - space.lower[j]) / n;
        for (int i = 0; i < n; ++i) {
            X(i, j) = space.lower[j] + (strata[static_cast<std::size_t>(i)] + rng.uniform01()) * width;
        }
    }
    return X;
}

}  // namespace xsr::data
