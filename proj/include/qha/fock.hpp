#pragma once
// Truncated Fock-space core over C^n with Gaussian weight
// (2 pi)^-n exp(-|z|^2 / 2). The monomial z^m has squared norm 2^m m!, so
// e_m = z^m / sqrt(2^m m!) is the reference orthonormal basis and the
// normalized reproducing kernel k_z has coefficient
// exp(-|z|^2/4) conj(z)^m / sqrt(2^m m!) at degree m.
//
// Displacement (Weyl) operators act by W_z f(w) = k_z(w) f(w - z). On the
// basis this is exp(alpha a^+ - conj(alpha) a) with alpha = conj(z)/sqrt(2),
// where a^+ e_m = sqrt(m+1) e_{m+1}. Two constructions are provided:
//   * weyl_operator: exponential of the truncated generator via a cached
//     spectral factorization. Unitary to machine precision and satisfies
//     the parity intertwining U W_z U = W_{-z} bit-exactly.
//   * weyl_matrix_exact: closed-form matrix elements of the untruncated
//     operator (Laguerre-type diagonal recurrences). Entries keep the true
//     exp(-|z|^2/4) decay for |z|^2/2 >> D, which the truncated exponential
//     cannot, so phase-space sampling uses this route.

#include "qha/common.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace qha {

struct FockSpec {
    int factors = 1;  // n
    int dim = 64;     // truncation dimension per factor

    long total_dim() const {
        long t = 1;
        for (int i = 0; i < factors; ++i) t *= dim;
        return t;
    }

    // Per-factor degrees of a flat basis index. Factor 0 is the slowest
    // (Kronecker) index: flat = d_0 * dim^(n-1) + ... + d_{n-1}.
    std::vector<int> degrees(long index) const {
        std::vector<int> d(factors);
        for (int i = factors - 1; i >= 0; --i) {
            d[i] = int(index % dim);
            index /= dim;
        }
        return d;
    }

    int degree(long index) const {
        int total = 0;
        for (int i = 0; i < factors; ++i) {
            total += int(index % dim);
            index /= dim;
        }
        return total;
    }

    long flat_index(const std::vector<int>& degs) const {
        long idx = 0;
        for (int i = 0; i < factors; ++i) idx = idx * dim + degs[i];
        return idx;
    }
};

inline void validate_spec(const FockSpec& spec, long total_cap = 4096) {
    if (spec.factors < 1) throw std::invalid_argument("FockSpec.factors: must be >= 1");
    if (spec.dim < 2 || spec.dim > 512)
        throw std::invalid_argument("FockSpec.dim: must lie in [2, 512]");
    if (spec.total_dim() > total_cap)
        throw std::invalid_argument("FockSpec: total dimension exceeds cap " +
                                    std::to_string(total_cap));
}

inline double log_monomial_norm(int m) {
    return 0.5 * (m * std::log(2.0) + log_factorial(m));
}

// ||z^m|| in the weighted space; overflows past m ~ 290, within the dim cap.
inline double monomial_norm(int m) { return std::exp(log_monomial_norm(m)); }

// ---------------------------------------------------------------------------
// Coherent states

struct CoherentState {
    Vec coeffs;
    double tail = 0.0;  // mass of the untruncated state beyond the cutoff
    bool tail_warning = false;
};

namespace detail {

inline Vec coherent_factor(int dim, cplx z) {
    Vec c(dim);
    double r = std::abs(z);
    if (r == 0.0) {
        c.setZero();
        c[0] = 1.0;
        return c;
    }
    double logr = std::log(r);
    double phase = -std::arg(z);  // conj(z)^m carries angle -m arg z
    for (int m = 0; m < dim; ++m) {
        double logmag = -0.25 * r * r + m * logr - log_monomial_norm(m);
        c[m] = std::polar(std::exp(logmag), phase * m);
    }
    return c;
}

}  // namespace detail

inline CoherentState coherent_state(const FockSpec& spec, const Vec& z,
                                    double tail_tol = 1e-10) {
    if (z.size() != spec.factors)
        throw std::invalid_argument("coherent_state: phase point has wrong factor count");
    CoherentState out;
    out.coeffs = Vec::Ones(1);
    double log_keep = 0.0;
    for (int i = 0; i < spec.factors; ++i) {
        Vec f = detail::coherent_factor(spec.dim, z[i]);
        double kept = f.squaredNorm();
        log_keep += std::log(kept);
        Vec merged(out.coeffs.size() * f.size());
        for (Eigen::Index a = 0; a < out.coeffs.size(); ++a)
            for (Eigen::Index b = 0; b < f.size(); ++b)
                merged[a * f.size() + b] = out.coeffs[a] * f[b];
        out.coeffs = std::move(merged);
        double lam = 0.5 * std::norm(z[i]);
        if (lam > 0.25 * spec.dim) out.tail_warning = true;
    }
    out.tail = 1.0 - std::exp(log_keep);
    if (out.tail > tail_tol) out.tail_warning = true;
    return out;
}

inline CoherentState coherent_state(const FockSpec& spec, cplx z,
                                    double tail_tol = 1e-10) {
    Vec v(1);
    v[0] = z;
    return coherent_state(spec, v, tail_tol);
}

// ---------------------------------------------------------------------------
// Ladder operators and parity

inline Mat annihilation(int dim) {
    Mat a = Mat::Zero(dim, dim);
    for (int m = 1; m < dim; ++m) a(m - 1, m) = std::sqrt(double(m));
    return a;
}

inline Mat creation(int dim) { return annihilation(dim).adjoint(); }

// diag(theta^degree); theta on the unit circle.
inline Mat parity_rotation(const FockSpec& spec, cplx theta) {
    if (std::abs(std::abs(theta) - 1.0) > 1e-12)
        throw std::invalid_argument("parity_rotation: theta must be unimodular");
    long n = spec.total_dim();
    double ang = std::arg(theta);
    Mat u = Mat::Zero(n, n);
    for (long m = 0; m < n; ++m) u(m, m) = std::polar(1.0, ang * spec.degree(m));
    return u;
}

// Per-factor phases: diag(prod_f theta_f^{degree_f}).
inline Mat parity_rotation(const FockSpec& spec, const Vec& theta_per_factor) {
    if (theta_per_factor.size() != spec.factors)
        throw std::invalid_argument("parity_rotation: phase list has wrong factor count");
    std::vector<double> angles(spec.factors);
    for (int f = 0; f < spec.factors; ++f) {
        if (std::abs(std::abs(theta_per_factor[f]) - 1.0) > 1e-12)
            throw std::invalid_argument("parity_rotation: theta must be unimodular");
        angles[f] = std::arg(theta_per_factor[f]);
    }
    long n = spec.total_dim();
    Mat u = Mat::Zero(n, n);
    for (long m = 0; m < n; ++m) {
        std::vector<int> degs = spec.degrees(m);
        double ang = 0.0;
        for (int f = 0; f < spec.factors; ++f) ang += angles[f] * degs[f];
        u(m, m) = std::polar(1.0, ang);
    }
    return u;
}

// diag((-1)^degree), exact signs.
inline Mat parity_operator(const FockSpec& spec) {
    long n = spec.total_dim();
    Mat u = Mat::Zero(n, n);
    for (long m = 0; m < n; ++m) u(m, m) = (spec.degree(m) % 2 == 0) ? 1.0 : -1.0;
    return u;
}

// ---------------------------------------------------------------------------
// Weyl operators, spectral route

namespace detail {

struct GeneratorBasis {
    RealMat vectors;  // orthonormal eigenvectors of the real Jacobi matrix
    RealVec values;
    Mat vectors_c;    // cached complex lift
};

// J(m+1, m) = J(m, m+1) = sqrt(m+1). The generator a^+ - a equals
// conj(Dg) (i J) Dg with Dg = diag(i^m), so exp(s (a^+ - a)) =
// conj(Dg) V exp(i s mu) V^T Dg.
inline const GeneratorBasis& generator_basis(int dim) {
    // guarded: experiment runners may build Weyl operators from worker threads
    static std::mutex cache_mutex;
    static std::map<int, GeneratorBasis> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    RealMat j = RealMat::Zero(dim, dim);
    for (int m = 0; m + 1 < dim; ++m) {
        double v = std::sqrt(double(m + 1));
        j(m + 1, m) = v;
        j(m, m + 1) = v;
    }
    Eigen::SelfAdjointEigenSolver<RealMat> es(j);
    GeneratorBasis gb;
    gb.vectors = es.eigenvectors();
    gb.values = es.eigenvalues();
    gb.vectors_c = gb.vectors.cast<cplx>();
    return cache.emplace(dim, std::move(gb)).first->second;
}

// One-factor W_z. Canonicalizes z to the right half plane first so that
// W_z and W_{-z} are assembled from identical trig evaluations; the parity
// intertwining U W_z U = W_{-z} then holds bit-exactly.
inline Mat weyl_factor(int dim, cplx z) {
    if (z == 0.0) return Mat::Identity(dim, dim);
    double sign = 1.0;
    if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) {
        z = -z;
        sign = -1.0;
    }
    const GeneratorBasis& gb = generator_basis(dim);
    double r = std::abs(z);
    double s = r / std::sqrt(2.0);
    double theta = std::arg(z);
    Vec expvals(dim);
    for (int k = 0; k < dim; ++k) expvals[k] = std::polar(1.0, s * gb.values[k]);
    Mat core = gb.vectors_c * expvals.asDiagonal() * gb.vectors_c.transpose();
    // d_m = (e^{-i theta} / i)^m, with the canonicalization sign folded in.
    Vec d(dim);
    double step = -theta - 0.5 * pi;
    for (int m = 0; m < dim; ++m) {
        d[m] = std::polar(1.0, step * m);
        if (sign < 0.0 && (m % 2 == 1)) d[m] = -d[m];
    }
    return d.asDiagonal() * core * d.conjugate().asDiagonal();
}

}  // namespace detail

struct WeylOperator {
    Mat matrix;
    double tail = 0.0;  // Poisson tail bound at the truncation edge
};

inline WeylOperator weyl_operator(const FockSpec& spec, const Vec& z) {
    if (z.size() != spec.factors)
        throw std::invalid_argument("weyl_operator: phase point has wrong factor count");
    WeylOperator out;
    out.matrix = Mat::Ones(1, 1);
    out.tail = 0.0;
    for (int i = 0; i < spec.factors; ++i) {
        Mat f = detail::weyl_factor(spec.dim, z[i]);
        Mat merged(out.matrix.rows() * f.rows(), out.matrix.cols() * f.cols());
        for (Eigen::Index a = 0; a < out.matrix.rows(); ++a)
            for (Eigen::Index b = 0; b < out.matrix.cols(); ++b)
                merged.block(a * f.rows(), b * f.cols(), f.rows(), f.cols()) =
                    out.matrix(a, b) * f;
        out.matrix = std::move(merged);
        out.tail = std::max(out.tail, poisson_upper_tail(0.5 * std::norm(z[i]), spec.dim));
    }
    return out;
}

inline WeylOperator weyl_operator(const FockSpec& spec, cplx z) {
    Vec v(1);
    v[0] = z;
    return weyl_operator(spec, v);
}

inline Mat weyl_matrix(const FockSpec& spec, cplx z) { return weyl_operator(spec, z).matrix; }

// ---------------------------------------------------------------------------
// Weyl operators, closed-form route

namespace detail {

// Matrix elements of the untruncated displacement: with alpha = conj(z)/sqrt(2),
// x = |alpha|^2,
//   <m+d | W | m> = sqrt(m!/(m+d)!) alpha^d     e^{-x/2} L_m^{(d)}(x)
//   <m | W | m+d> = sqrt(m!/(m+d)!) (-conj(alpha))^d e^{-x/2} L_m^{(d)}(x)
// computed per diagonal by the associated-Laguerre three-term recurrence on
// the bounded products (all entries of a unitary matrix have modulus <= 1).
inline Mat weyl_exact_factor(int dim, cplx z) {
    if (z == 0.0) return Mat::Identity(dim, dim);
    cplx alpha = std::conj(z) / std::sqrt(2.0);
    double x = std::norm(alpha);
    Mat w(dim, dim);
    double log_absa = std::log(std::abs(alpha));
    double arga = std::arg(alpha);
    cplx beta = -std::conj(alpha);
    double argb = std::arg(beta);
    for (int d = 0; d < dim; ++d) {
        // Seeds: the closed form at m = 0, assembled in log domain.
        double logmag = -0.5 * x + d * log_absa - 0.5 * log_factorial(d);
        cplx lower0 = std::polar(std::exp(logmag), arga * d);  // <d|W|0>
        cplx upper0 = std::polar(std::exp(logmag), argb * d);  // <0|W|d>
        cplx lm2 = 0.0, l_prev = lower0;
        cplx um2 = 0.0, u_prev = upper0;
        w(d, 0) = lower0;
        if (d > 0) w(0, d) = upper0;
        for (int m = 1; m + d < dim; ++m) {
            double c1 = (2.0 * m + d - 1.0 - x) / std::sqrt(double(m) * (m + d));
            double c2 = std::sqrt(double(m - 1) * (m + d - 1) / (double(m) * (m + d)));
            cplx lcur = c1 * l_prev - c2 * lm2;
            cplx ucur = c1 * u_prev - c2 * um2;
            w(m + d, m) = lcur;
            if (d > 0) w(m, m + d) = ucur;
            lm2 = l_prev;
            l_prev = lcur;
            um2 = u_prev;
            u_prev = ucur;
        }
    }
    return w;
}

}  // namespace detail

inline Mat weyl_matrix_exact(const FockSpec& spec, const Vec& z) {
    if (z.size() != spec.factors)
        throw std::invalid_argument("weyl_matrix_exact: phase point has wrong factor count");
    Mat out = Mat::Ones(1, 1);
    for (int i = 0; i < spec.factors; ++i) {
        Mat f = detail::weyl_exact_factor(spec.dim, z[i]);
        Mat merged(out.rows() * f.rows(), out.cols() * f.cols());
        for (Eigen::Index a = 0; a < out.rows(); ++a)
            for (Eigen::Index b = 0; b < out.cols(); ++b)
                merged.block(a * f.rows(), b * f.cols(), f.rows(), f.cols()) = out(a, b) * f;
        out = std::move(merged);
    }
    return out;
}

inline Mat weyl_matrix_exact(const FockSpec& spec, cplx z) {
    Vec v(1);
    v[0] = z;
    return weyl_matrix_exact(spec, v);
}

// ---------------------------------------------------------------------------
// Conjugations and products

// alpha_z(A) = W_z A W_z^*
inline Mat shift_alpha(const FockSpec& spec, const Mat& a, const Vec& z) {
    Mat w = weyl_operator(spec, z).matrix;
    return w * a * w.adjoint();
}

// beta_z(A) = W_z A W_z
inline Mat modulation_beta(const FockSpec& spec, const Mat& a, const Vec& z) {
    Mat w = weyl_operator(spec, z).matrix;
    return w * a * w;
}

// W_z A W_{-Theta z} with Theta a diagonal unimodular matrix on C^n.
inline Mat theta_twist(const FockSpec& spec, const Mat& a, const Vec& z, const Vec& theta_diag) {
    if (theta_diag.size() != spec.factors)
        throw std::invalid_argument("theta_twist: Theta diagonal has wrong factor count");
    Vec tz(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) tz[i] = -theta_diag[i] * z[i];
    Mat wl = weyl_operator(spec, z).matrix;
    Mat wr = weyl_operator(spec, tz).matrix;
    return wl * a * wr;
}

inline Mat tensor_product(const Mat& a, const Mat& b, long cap = 4096) {
    if (a.rows() * b.rows() > cap || a.cols() * b.cols() > cap)
        throw std::invalid_argument("tensor_product: product dimension exceeds cap");
    Mat merged(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            merged.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return merged;
}

// Rank-one |e_a><e_b| on the flat basis.
inline Mat basis_outer(const FockSpec& spec, long a, long b) {
    long n = spec.total_dim();
    Mat m = Mat::Zero(n, n);
    m(a, b) = 1.0;
    return m;
}

}  // namespace qha
