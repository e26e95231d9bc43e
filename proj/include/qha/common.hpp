#pragma once
// Shared scalar types and small numeric helpers.

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qha {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iunit{0.0, 1.0};

// log(m!) without overflow.
inline double log_factorial(int m) {
    if (m < 0) throw std::invalid_argument("log_factorial: negative argument");
    return std::lgamma(double(m) + 1.0);
}

// Symplectic form on C^n viewed as phase space: sigma(z, w) = Im(z . conj(w)).
inline double symplectic_form(const Vec& z, const Vec& w) {
    if (z.size() != w.size())
        throw std::invalid_argument("symplectic_form: dimension mismatch");
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += z[i] * std::conj(w[i]);
    return s.imag();
}

inline double symplectic_form(cplx z, cplx w) {
    return (z * std::conj(w)).imag();
}

// Upper tail of a Poisson(lambda) distribution, P[X >= d]. Used as the
// truncation-tail estimate for coherent states: mass of k_z beyond degree D-1
// equals the Poisson tail with lambda = |z|^2 / 2.
inline double poisson_upper_tail(double lambda, int d) {
    if (lambda <= 0.0) return 0.0;
    if (d <= 0) return 1.0;
    // Sum P[X = k] for k >= d in log domain, term ratio lambda / (k+1).
    double log_term = -lambda + d * std::log(lambda) - log_factorial(d);
    double term = std::exp(log_term);
    double sum = 0.0;
    for (int k = d; k < d + 2000; ++k) {
        sum += term;
        term *= lambda / double(k + 1);
        if (term < 1e-300 || term < 1e-18 * sum) break;
    }
    return std::min(sum, 1.0);
}

inline bool approx_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

}  // namespace qha
