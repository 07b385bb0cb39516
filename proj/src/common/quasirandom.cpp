#include "xsr/common/quasirandom.hpp"

namespace xsr {

namespace {

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    primes.reserve(static_cast<std::size_t>(count));
    int candidate = 2;
    while (static_cast<int>(primes.size()) < count) {
        bool is_prime = true;
        for (int p : primes) {
            if (p * p > candidate) break;
            if (candidate % p == 0) {
                is_prime = false;
                break;
            }
        }
        if (is_prime) primes.push_back(candidate);
        ++candidate;
    }
    return primes;
}

double radical_inverse(std::uint64_t i, int base) {
    double inv_base = 1.0 / base;
    double factor = inv_base;
    double result = 0.0;
    while (i > 0) {
        result += static_cast<double>(i % static_cast<std::uint64_t>(base)) * factor;
        i /= static_cast<std::uint64_t>(base);
        factor *= inv_base;
    }
    return result;
}

}  // namespace

HaltonSequence::HaltonSequence(int dimension, std::uint64_t skip)
    : bases_(first_primes(dimension)), index_(skip + 1) {}

Eigen::VectorXd HaltonSequence::next() {
    Eigen::VectorXd point(static_cast<Eigen::Index>(bases_.size()));
    for (std::size_t j = 0; j < bases_.size(); ++j) {
        point[static_cast<Eigen::Index>(j)] = radical_inverse(index_, bases_[j]);
    }
    ++index_;
    return point;
}

Eigen::MatrixXd HaltonSequence::sample(int count, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    Eigen::MatrixXd points(count, lower.size());
    for (int i = 0; i < count; ++i) {
        const Eigen::VectorXd u = next();
        points.row(i) = (lower.array() + u.array() * (upper - lower).array()).transpose();
    }
    return points;
}

}  // namespace xsr
