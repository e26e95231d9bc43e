#pragma once
// Gauss-type quadrature for the radial part of the Gaussian measure.
//
// After u = r^2 / 2 the radial integral against exp(-r^2/2) r dr becomes
// int_0^inf g(u) u^alpha e^-u du, handled by generalized Gauss-Laguerre
// rules built with Golub-Welsch. Rules are returned with unit-normalized
// weights plus the log of the total mass Gamma(alpha + 1), so callers can
// fold huge normalization ratios in log domain and never overflow.

#include "qha/common.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <vector>

namespace qha {

struct RadialRule {
    RealVec nodes;       // in the u variable
    RealVec weights;     // normalized, sum = 1
    double log_mass;     // log Gamma(alpha + 1)
    double alpha;
};

inline RadialRule laguerre_rule(double alpha, int count) {
    if (alpha <= -1.0) throw std::invalid_argument("laguerre_rule: alpha must exceed -1");
    if (count < 1) throw std::invalid_argument("laguerre_rule: count must be positive");
    RealMat j = RealMat::Zero(count, count);
    for (int k = 0; k < count; ++k) {
        j(k, k) = 2.0 * k + alpha + 1.0;
        if (k > 0) {
            double b = std::sqrt(k * (k + alpha));
            j(k, k - 1) = b;
            j(k - 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<RealMat> es(j);
    RadialRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = es.eigenvectors().row(0).array().square();
    rule.log_mass = std::lgamma(alpha + 1.0);
    rule.alpha = alpha;
    return rule;
}

// Cache keyed by (2 alpha rounded, count); alpha arrives in half-integer steps.
inline const RadialRule& cached_laguerre_rule(double alpha, int count) {
    static std::map<std::pair<long, int>, RadialRule> cache;
    auto key = std::make_pair(std::lround(2.0 * alpha), count);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, laguerre_rule(alpha, count)).first->second;
}

}  // namespace qha
