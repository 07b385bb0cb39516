#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace xsr {

// Halton low-discrepancy sequence over the first `d` prime bases.
// Used where a deterministic space-filling point set is needed.
class HaltonSequence {
public:
    explicit HaltonSequence(int dimension, std::uint64_t skip = 20);

    // Next point in the unit cube [0,1)^d.
    Eigen::VectorXd next();

    // `count` points scaled into [lower, upper] per coordinate.
    Eigen::MatrixXd sample(int count, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

private:
    std::vector<int> bases_;
    std::uint64_t index_;
};

}  // namespace xsr
