#pragma once
// Toeplitz quantization and the Berezin transform on the truncated space.
//
// Entries: <T_f e_m, e_l> = int f(z) e_m(z) conj(e_l(z)) dmu(z). In polar
// coordinates the angular integral selects the Fourier mode l - m of
// f(r, .), and the radial factor r^(m+l) e^(-r^2/2) r dr becomes a
// generalized Gauss-Laguerre integral with alpha = (m + l) / 2 after
// u = r^2 / 2. Normalizations are folded in log domain:
//   entry = exp(lgamma(alpha+1) - (lgamma(m+1) + lgamma(l+1)) / 2)
//           * sum_i w_i * fourier_mode_{l-m}(f; r_i).
// Symbols declared separable (radial(r) * e^{i k theta}) get the angular
// selection exactly; general symbols use a trapezoidal angular sum, exact
// for trigonometric polynomials up to the declared angular count.

#include "qha/common.hpp"
#include "qha/fock.hpp"
#include "qha/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>

namespace qha {

struct SymbolFn {
    std::function<cplx(cplx)> eval;  // z in C
    // Separable form radial(r) * exp(i harmonic theta), when declared.
    std::function<cplx(double)> radial;
    int harmonic = 0;
    bool separable = false;
    std::string name = "custom";

    cplx operator()(cplx z) const { return eval(z); }
};

inline SymbolFn symbol_winding(int k) {
    SymbolFn s;
    s.harmonic = k;
    s.separable = true;
    s.radial = [](double) { return cplx(1.0, 0.0); };
    s.eval = [k](cplx z) {
        double r = std::abs(z);
        if (r == 0.0) return cplx(0.0, 0.0);
        return std::polar(1.0, k * std::arg(z));
    };
    s.name = "winding:" + std::to_string(k);
    return s;
}

inline SymbolFn symbol_gaussian(double a) {
    SymbolFn s;
    s.harmonic = 0;
    s.separable = true;
    s.radial = [a](double r) { return cplx(std::exp(-a * r * r), 0.0); };
    s.eval = [a](cplx z) { return cplx(std::exp(-a * std::norm(z)), 0.0); };
    s.name = "gaussian:" + std::to_string(a);
    return s;
}

inline SymbolFn symbol_constant(cplx c = 1.0) {
    SymbolFn s;
    s.harmonic = 0;
    s.separable = true;
    s.radial = [c](double) { return c; };
    s.eval = [c](cplx) { return c; };
    s.name = "constant";
    return s;
}

// Bounded smooth non-separable sample for robustness tests.
inline SymbolFn symbol_smooth_bounded() {
    SymbolFn s;
    s.separable = false;
    s.eval = [](cplx z) {
        double x = z.real(), y = z.imag();
        return cplx(0.5 + 0.3 * std::sin(x) * std::cos(0.7 * y),
                    0.2 * std::cos(x + 0.3 * y));
    };
    s.name = "smooth_bounded";
    return s;
}

struct ToeplitzOptions {
    int radial_count = 64;
    int angular_count = 0;  // 0: auto, max(256, 4 dim)
    bool check_convergence = true;
    double convergence_tol = 1e-10;
};

struct ToeplitzResult {
    Mat matrix;
    double convergence_defect = 0.0;
    bool converged = true;
};

namespace detail {

inline double entry_log_prefactor(int m, int l) {
    double alpha = 0.5 * (m + l);
    return std::lgamma(alpha + 1.0) - 0.5 * (log_factorial(m) + log_factorial(l));
}

inline Mat toeplitz_separable(const FockSpec& spec, const SymbolFn& f, int radial_count) {
    const int dim = spec.dim;
    Mat t = Mat::Zero(dim, dim);
    const int k = f.harmonic;
    for (int m = 0; m < dim; ++m) {
        int l = m + k;
        if (l < 0 || l >= dim) continue;
        double alpha = 0.5 * (m + l);
        const RadialRule& rule = cached_laguerre_rule(alpha, radial_count);
        cplx acc = 0.0;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f.radial(std::sqrt(2.0 * rule.nodes[i]));
        t(l, m) = acc * std::exp(entry_log_prefactor(m, l));
    }
    return t;
}

inline Mat toeplitz_generic(const FockSpec& spec, const SymbolFn& f, int radial_count,
                            int angular_count) {
    const int dim = spec.dim;
    Mat t = Mat::Zero(dim, dim);
    std::vector<cplx> samples(angular_count);
    std::vector<double> cs(angular_count), sn(angular_count);
    for (int j = 0; j < angular_count; ++j) {
        double th = 2.0 * pi * j / angular_count;
        cs[j] = std::cos(th);
        sn[j] = std::sin(th);
    }
    // Entries grouped by anti-diagonal s = m + l: one radial rule per group.
    for (int s = 0; s <= 2 * (dim - 1); ++s) {
        double alpha = 0.5 * s;
        const RadialRule& rule = cached_laguerre_rule(alpha, radial_count);
        int d_min = std::max(-(dim - 1), s - 2 * (dim - 1));
        int d_max = std::min(dim - 1, s);
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
            double r = std::sqrt(2.0 * rule.nodes[i]);
            for (int j = 0; j < angular_count; ++j)
                samples[j] = f(cplx(r * cs[j], r * sn[j]));
            for (int d = d_min; d <= d_max; ++d) {
                if ((s - d) % 2 != 0) continue;
                int m = (s - d) / 2, l = (s + d) / 2;
                if (m < 0 || m >= dim || l < 0 || l >= dim) continue;
                cplx mode = 0.0;
                for (int j = 0; j < angular_count; ++j) {
                    double ang = -2.0 * pi * double(d) * j / angular_count;
                    mode += samples[j] * std::polar(1.0, ang);
                }
                mode /= double(angular_count);
                t(l, m) += rule.weights[i] * mode;
            }
        }
        for (int d = d_min; d <= d_max; ++d) {
            if ((s - d) % 2 != 0) continue;
            int m = (s - d) / 2, l = (s + d) / 2;
            if (m < 0 || m >= dim || l < 0 || l >= dim) continue;
            t(l, m) *= std::exp(entry_log_prefactor(m, l));
        }
    }
    return t;
}

}  // namespace detail

inline ToeplitzResult toeplitz(const FockSpec& spec, const SymbolFn& f,
                               ToeplitzOptions opts = {}) {
    if (spec.factors != 1)
        throw std::invalid_argument("toeplitz: only single-factor specs are supported");
    int n_ang = opts.angular_count > 0 ? opts.angular_count : std::max(256, 4 * spec.dim);
    auto build = [&](int rc) {
        return f.separable ? detail::toeplitz_separable(spec, f, rc)
                           : detail::toeplitz_generic(spec, f, rc, n_ang);
    };
    ToeplitzResult out;
    out.matrix = build(opts.radial_count);
    if (opts.check_convergence) {
        Mat refined = build(2 * opts.radial_count);
        out.convergence_defect = (refined - out.matrix).norm() /
                                 std::max(1.0, out.matrix.norm());
        out.converged = out.convergence_defect < opts.convergence_tol;
        out.matrix = std::move(refined);
    }
    return out;
}

inline Mat toeplitz_matrix(const FockSpec& spec, const SymbolFn& f,
                           ToeplitzOptions opts = {}) {
    return toeplitz(spec, f, opts).matrix;
}

// ---------------------------------------------------------------------------
// Berezin transform

// <A k_z, k_z>. Callers are responsible for keeping z within the coherent
// tail tolerance of the truncation; see coherent_state().tail.
inline cplx berezin(const FockSpec& spec, const Mat& a, const Vec& z) {
    CoherentState k = coherent_state(spec, z);
    return k.coeffs.dot(a * k.coeffs);
}

inline cplx berezin(const FockSpec& spec, const Mat& a, cplx z) {
    Vec v(1);
    v[0] = z;
    return berezin(spec, a, v);
}

struct BerezinSample {
    cplx z;
    cplx value;
    double tail;
};

inline std::vector<BerezinSample> berezin_grid(const FockSpec& spec, const Mat& a,
                                               const std::vector<cplx>& points) {
    std::vector<BerezinSample> out;
    out.reserve(points.size());
    for (cplx z : points) {
        Vec v(1);
        v[0] = z;
        CoherentState k = coherent_state(spec, v);
        out.push_back({z, k.coeffs.dot(a * k.coeffs), k.tail});
    }
    return out;
}

// f(-z) as a symbol.
inline SymbolFn symbol_reflect(const SymbolFn& f) {
    SymbolFn g = f;
    g.eval = [inner = f.eval](cplx z) { return inner(-z); };
    if (f.separable) g.harmonic = f.harmonic;  // radial part even in z -> -z
    if (f.separable && f.harmonic % 2 != 0) {
        // e^{ik(theta+pi)} = (-1)^k e^{ik theta}
        g.radial = [inner = f.radial](double r) { return -inner(r); };
    }
    g.name = "reflect(" + f.name + ")";
    return g;
}

}  // namespace qha
