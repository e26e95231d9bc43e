#pragma once
// Phase-space Fourier stack on grid symbols: the symplectic Fourier transform,
// Weyl-displacement analysis and synthesis, twisted convolution, quantization
// as synthesis-after-Fourier, the operator Fourier transform, and the audit
// that pins down every normalization constant numerically.
//
// Symbols live on a centered square grid: samples(i, j) holds the value at
// (w1, w2) = (coord(i), coord(j)), identified with the complex point
// z = w1 + i w2. The symplectic form throughout is
// sigma(a, b) = Im(a . conj(b)) = a2 b1 - a1 b2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "common.hpp"
#include "fft.hpp"
#include "fock.hpp"
#include "linalg.hpp"
#include "quantize.hpp"

namespace qha {

// ---------------------------------------------------------------------------
// grids and sampled symbols

struct Grid {
    double extent = 10.0;  // samples cover [-extent, extent) per axis
    int points = 256;      // per axis; power of two, at least 8

    double spacing() const { return 2.0 * extent / double(points); }
    double coord(long i) const { return (double(i) - double(points / 2)) * spacing(); }

    // Grid carrying the transformed variable: spacing 2 pi / (|s| N h), so the
    // frequency box has extent pi / (|s| h). Dual of the dual restores the
    // original box exactly.
    Grid dual(double phase_scale) const {
        if (phase_scale == 0.0)
            throw std::invalid_argument("Grid::dual: phase scale must be nonzero");
        Grid g;
        g.points = points;
        g.extent = pi / (std::abs(phase_scale) * spacing());
        return g;
    }
};

inline void check_grid(const Grid& g) {
    if (g.extent <= 0.0) throw std::invalid_argument("grid extent must be positive");
    if (g.points < 8 || (g.points & (g.points - 1)) != 0)
        throw std::invalid_argument("grid points must be a power of two, at least 8");
}

struct GridSymbol {
    Grid grid;
    Mat samples;  // points x points, first coordinate along rows
    std::string provenance = "sampled";
    bool boundary_warning = false;
};

inline GridSymbol sample_symbol(const std::function<cplx(cplx)>& f, const Grid& grid,
                                const std::string& name = "sampled") {
    check_grid(grid);
    const int n = grid.points;
    GridSymbol s;
    s.grid = grid;
    s.samples = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.samples(i, j) = f(cplx(grid.coord(i), grid.coord(j)));
    s.provenance = name;
    return s;
}

inline GridSymbol sample_symbol(const SymbolFn& f, const Grid& grid) {
    return sample_symbol(f.eval, grid, f.name);
}

// Largest magnitude on the outermost rows and columns; the aliasing guard for
// every transform that treats the symbol as supported inside the box.
inline double boundary_max(const GridSymbol& f) {
    const Eigen::Index n = f.samples.rows();
    double m = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        m = std::max(m, std::abs(f.samples(0, j)));
        m = std::max(m, std::abs(f.samples(n - 1, j)));
        m = std::max(m, std::abs(f.samples(j, 0)));
        m = std::max(m, std::abs(f.samples(j, n - 1)));
    }
    return m;
}

// Point reflection z -> -z on the sampled box. Index 0 carries the coordinate
// -extent, which has no mirror partner on a [-L, L) grid, so the index-0 row
// and column stay fixed.
inline GridSymbol reflect_symbol(const GridSymbol& f) {
    const Eigen::Index n = f.samples.rows();
    GridSymbol out = f;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out.samples(i, j) = f.samples(i == 0 ? 0 : n - i, j == 0 ? 0 : n - j);
    out.provenance = "reflect(" + f.provenance + ")";
    return out;
}

// ---------------------------------------------------------------------------
// normalization conventions

// Every constant the transform stack depends on, as explicit configuration.
// The symplectic Fourier transform realized here is
//     F(f)(z) = fourier_prefactor * Integral f(w) exp(i s sigma(w, z)) dw
// with s = fourier_phase_scale; it is an involution exactly when
// fourier_prefactor = |s| / (2 pi). Twisted convolution is
//     (f *t g)(xi) = twisted_prefactor * Integral f(xi - w) g(w)
//                    exp(i t sigma(xi, w)) dw
// and operator synthesis integrates against haar_normalization * dxi.
struct ConventionParams {
    std::string name = "full-phase";
    double fourier_phase_scale = 1.0;
    double fourier_prefactor = 1.0 / (2.0 * pi);
    double twisted_phase_scale = -0.5;
    double twisted_prefactor = 1.0 / (2.0 * pi);
    double haar_normalization = 1.0 / (2.0 * pi);

    // Full phase exp(i sigma(w, z)) with the 1/(2 pi) prefactor. Involutive;
    // quantization through this route is the classical Weyl correspondence
    // (Gaussian symbols pick up the heat-kernel smoothing in their Berezin
    // transforms).
    static ConventionParams full_phase() { return ConventionParams{}; }

    // Half phase exp(-i sigma(w, z) / 2) with the 1/(4 pi) prefactor, still an
    // involution. Under this choice the operator Fourier transform acts as
    // right multiplication by parity, F_op(A) = A U, with scale exactly 1.
    // The opposite sign +1/2 lands on the left product U A instead; the audit
    // records both.
    static ConventionParams half_phase() {
        ConventionParams c;
        c.name = "half-phase";
        c.fourier_phase_scale = -0.5;
        c.fourier_prefactor = 1.0 / (4.0 * pi);
        return c;
    }
};

// ---------------------------------------------------------------------------
// symplectic Fourier transform

// Discrete realization of
//     F(f)(z) = c * h^2 * Sum_w f(w) exp(i s sigma(w, z))
// on the dual grid with spacing 2 pi / (|s| N h). Centered indices are folded
// into pre/post sign flips (-1)^(i+j); N a power of two >= 8 makes the corner
// phase exactly +1, so applying the transform twice reproduces the input to
// machine precision whenever c = |s| / (2 pi).
inline GridSymbol symplectic_fourier(const GridSymbol& f, const ConventionParams& conv) {
    check_grid(f.grid);
    const double s = conv.fourier_phase_scale;
    if (s == 0.0)
        throw std::invalid_argument("symplectic_fourier: phase scale must be nonzero");
    const int n = f.grid.points;
    const double h = f.grid.spacing();
    const int sgn = s > 0.0 ? 1 : -1;

    Mat work = f.samples;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((i + j) & 1) work(i, j) = -work(i, j);

    // sigma(w, z) = w2 z1 - w1 z2: the row index (w1) pairs with z2 under the
    // negative kernel, the column index (w2) with z1 under the positive one;
    // the transpose swaps the output back to (z1 rows, z2 columns).
    fft_cols(work, -sgn);
    fft_rows(work, sgn);
    Mat out = work.transpose();

    const double scale = conv.fourier_prefactor * h * h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) *= ((i + j) & 1) ? -scale : scale;

    GridSymbol g;
    g.grid = f.grid.dual(s);
    g.samples = std::move(out);
    g.provenance = "symplectic_fourier(" + f.provenance + ")";
    g.boundary_warning = f.boundary_warning || boundary_max(f) > 1e-8;
    return g;
}

// ---------------------------------------------------------------------------
// Weyl analysis: A -> Tr(A W_xi^*)

namespace detail {

// Rows/columns beyond this index carry no weight above tol relative to the
// largest entry; used to flag operators leaking outside the interior block.
inline long support_extent(const Mat& a, double tol = 1e-12) {
    const double top = a.cwiseAbs().maxCoeff();
    if (top == 0.0) return 0;
    long ext = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > tol * top) ext = std::max<long>(ext, std::max<long>(i, j));
    return ext + 1;
}

}  // namespace detail

// Samples Tr(A W_xi^*) = Tr(A W_{-xi}) over the grid. The displacement
// entries come from the closed-form route, which is exact for every matrix
// element, so the trace is the untruncated one whenever A is supported in the
// block; a support extent beyond half the dimension raises the warning flag.
// Analysis carries no normalization constants; conv only tags provenance.
inline std::vector<GridSymbol> fourier_weyl_batch(const FockSpec& spec,
                                                  const std::vector<Mat>& as,
                                                  const Grid& grid,
                                                  const ConventionParams& conv) {
    check_grid(grid);
    if (spec.factors != 1)
        throw std::invalid_argument("fourier_weyl: grid symbols are single-factor");
    const int n = grid.points;
    const long d = spec.total_dim();
    std::vector<Mat> transposed;
    transposed.reserve(as.size());
    bool warn = false;
    for (const Mat& a : as) {
        if (a.rows() != d || a.cols() != d)
            throw std::invalid_argument("fourier_weyl: operator does not match the space");
        if (2 * detail::support_extent(a) > d) warn = true;
        transposed.push_back(a.transpose());
    }
    std::vector<GridSymbol> out(as.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].grid = grid;
        out[k].samples = Mat(n, n);
        out[k].provenance = "fourier_weyl";
        out[k].boundary_warning = warn;
    }
    (void)conv;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx xi(grid.coord(i), grid.coord(j));
            const Mat w = weyl_matrix_exact(spec, -xi);
            for (std::size_t k = 0; k < out.size(); ++k)
                out[k].samples(i, j) = transposed[k].cwiseProduct(w).sum();
        }
    return out;
}

inline GridSymbol fourier_weyl(const FockSpec& spec, const Mat& a, const Grid& grid,
                               const ConventionParams& conv) {
    return fourier_weyl_batch(spec, {a}, grid, conv)[0];
}

// ---------------------------------------------------------------------------
// Abel-regularized traces, for inputs that are not trace class

namespace detail {

// Neville evaluation at 0 of the polynomial through (xs, ys).
inline cplx neville_at_zero(std::vector<double> xs, std::vector<cplx> ys) {
    const std::size_t n = xs.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t j = 0; j + k < n; ++j)
            ys[j] = (xs[j + k] * ys[j] - xs[j] * ys[j + 1]) / (xs[j + k] - xs[j]);
    return ys[0];
}

inline cplx abel_extrapolate(const Vec& diag, double damping, int order) {
    if (!(damping > 0.0 && damping < 1.0))
        throw std::invalid_argument("regularized_trace: damping must lie in (0, 1)");
    if (order < 1 || order > 12)
        throw std::invalid_argument("regularized_trace: extrapolation order out of range");
    std::vector<double> eps(std::size_t(order) + 1);
    std::vector<cplx> vals(std::size_t(order) + 1);
    for (int j = 0; j <= order; ++j) {
        eps[std::size_t(j)] = (1.0 - damping) * std::pow(0.7, j);
        const double r = 1.0 - eps[std::size_t(j)];
        cplx acc = 0.0;
        for (Eigen::Index m = diag.size() - 1; m >= 0; --m) acc = acc * r + diag[m];
        vals[std::size_t(j)] = acc;
    }
    const cplx full = neville_at_zero(eps, vals);
    eps.pop_back();
    vals.pop_back();
    const cplx dropped = neville_at_zero(eps, vals);
    const double est = std::abs(full - dropped);
    if (est > 1e-2 * std::max(1.0, std::abs(full)))
        throw std::runtime_error("regularized_trace: extrapolation does not converge");
    return full;
}

}  // namespace detail

// Richardson-extrapolated limit of the damped diagonal sum
// Sum_m r^m <A e_m, e_m> as r -> 1, evaluated on the geometric node ladder
// eps_j = (1 - damping) 0.7^j, j = 0..order. Trace-class inputs pass through
// unchanged; conditionally summable diagonals (parity, displaced parities)
// converge; genuinely divergent diagonals (the number operator) trip the
// convergence check.
inline cplx regularized_trace(const Mat& a, double damping = 0.6, int order = 5) {
    return detail::abel_extrapolate(a.diagonal(), damping, order);
}

// Abel-regularized analysis: the value at xi is the regularized trace of
// A W_{-xi}, whose diagonal costs one elementwise product per node.
inline GridSymbol fourier_weyl_regularized(const FockSpec& spec, const Mat& a,
                                           const Grid& grid, double damping = 0.6,
                                           int order = 5) {
    check_grid(grid);
    if (spec.factors != 1)
        throw std::invalid_argument("fourier_weyl_regularized: single-factor only");
    const int n = grid.points;
    GridSymbol out;
    out.grid = grid;
    out.samples = Mat(n, n);
    out.provenance = "fourier_weyl_regularized";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx xi(grid.coord(i), grid.coord(j));
            const Mat w = weyl_matrix_exact(spec, -xi);
            const Vec diag = a.cwiseProduct(w.transpose()).rowwise().sum();
            out.samples(i, j) = detail::abel_extrapolate(diag, damping, order);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Weyl synthesis and quantization

// Quadrature realization of the synthesis integral,
//     A = haar_normalization * h^2 * Sum_xi f(xi) W_xi.
// Slowly decaying symbols alias onto high basis modes; the interior block
// stays accurate because displacement matrix elements themselves decay like
// exp(-|xi|^2/4) there. Callers gauge the boundary via boundary_max.
inline Mat inverse_fourier_weyl(const GridSymbol& f, const FockSpec& spec,
                                const ConventionParams& conv) {
    check_grid(f.grid);
    if (spec.factors != 1)
        throw std::invalid_argument("inverse_fourier_weyl: single-factor only");
    const int n = f.grid.points;
    const long d = spec.total_dim();
    Mat acc = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx v = f.samples(i, j);
            const cplx xi(f.grid.coord(i), f.grid.coord(j));
            acc.noalias() += v * weyl_matrix_exact(spec, xi);
        }
    const double h = f.grid.spacing();
    return (conv.haar_normalization * h * h) * acc;
}

// Quantization as synthesis after the symplectic Fourier transform. Under the
// full-phase convention this is the classical Weyl correspondence; the
// half-phase route dilates Gaussian widths instead. The synthesis runs over
// the dual grid, whose spacing is pi / (|phase scale| * extent): the extent
// of f's grid therefore has to be large enough that this spacing resolves
// the oscillation of the top mode (classical radius sqrt(8m + 4), frequency
// half that), or the high modes pick up aliasing artifacts.
inline Mat weyl_quantize(const GridSymbol& f, const FockSpec& spec,
                         const ConventionParams& conv) {
    return inverse_fourier_weyl(symplectic_fourier(f, conv), spec, conv);
}

// ---------------------------------------------------------------------------
// twisted convolution

namespace detail {

inline void check_same_grid(const GridSymbol& f, const GridSymbol& g) {
    if (f.grid.points != g.grid.points ||
        std::abs(f.grid.extent - g.grid.extent) > 1e-12 * std::max(1.0, f.grid.extent))
        throw std::invalid_argument("twisted_convolution: symbols live on different grids");
}

}  // namespace detail

// Direct double sum
//     out(xi) = pref * h^2 * Sum_w f(xi - w) g(w) exp(i t sigma(xi, w)),
// with f taken as zero outside the sampled box. Quadratic in the number of
// grid nodes per output point; kept as the reference the fast path must match
// to 1e-10, since the phase-coupled sum is the easiest place to silently
// break a convention.
inline GridSymbol twisted_convolution_reference(const GridSymbol& f, const GridSymbol& g,
                                                const ConventionParams& conv) {
    check_grid(f.grid);
    detail::check_same_grid(f, g);
    const int n = f.grid.points;
    const double h = f.grid.spacing();
    const double t = conv.twisted_phase_scale;
    // phase split: exp(i t sigma(xi, w)) = exp(i t xi2 w1) * exp(-i t xi1 w2)
    Mat row_phase(n, n), col_phase(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double ca = f.grid.coord(a), cb = f.grid.coord(b);
            row_phase(a, b) = std::polar(1.0, t * ca * cb);   // (xi2, w1)
            col_phase(a, b) = std::polar(1.0, -t * ca * cb);  // (xi1, w2)
        }
    GridSymbol out;
    out.grid = f.grid;
    out.samples = Mat::Zero(n, n);
    out.provenance = "twisted_convolution";
    out.boundary_warning = f.boundary_warning || g.boundary_warning;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            cplx acc = 0.0;
            for (int j1 = 0; j1 < n; ++j1) {
                const int r = i1 - j1 + n / 2;
                if (r < 0 || r >= n) continue;
                const cplx outer = row_phase(i2, j1);
                cplx inner = 0.0;
                for (int j2 = 0; j2 < n; ++j2) {
                    const int c = i2 - j2 + n / 2;
                    if (c < 0 || c >= n) continue;
                    inner += f.samples(r, c) * g.samples(j1, j2) * col_phase(i1, j2);
                }
                acc += outer * inner;
            }
            out.samples(i1, i2) = conv.twisted_prefactor * h * h * acc;
        }
    return out;
}

// Fast path: for each output row xi1, modulate g along its second axis by
// exp(-i t xi1 w2), run zero-padded FFT convolutions against the rows of f,
// and close the w1 sum with the exp(i t xi2 w1) phase. Identical quadrature
// and phases to the reference, reorganized to O(N^3 log N).
inline GridSymbol twisted_convolution(const GridSymbol& f, const GridSymbol& g,
                                      const ConventionParams& conv) {
    check_grid(f.grid);
    detail::check_same_grid(f, g);
    const int n = f.grid.points;
    const std::size_t padded = 2 * std::size_t(n);
    const double h = f.grid.spacing();
    const double t = conv.twisted_phase_scale;

    // forward transforms of the zero-padded rows of f, once
    std::vector<std::vector<cplx>> frows(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        std::vector<cplx> buf(padded, cplx(0.0, 0.0));
        for (int c = 0; c < n; ++c) buf[std::size_t(c)] = f.samples(r, c);
        fft_pow2(buf, -1);
        frows[std::size_t(r)] = std::move(buf);
    }

    Mat close_phase(n, n);  // (xi2 index, w1 index)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            close_phase(a, b) = std::polar(1.0, t * f.grid.coord(a) * f.grid.coord(b));

    GridSymbol out;
    out.grid = f.grid;
    out.samples = Mat::Zero(n, n);
    out.provenance = "twisted_convolution";
    out.boundary_warning = f.boundary_warning || g.boundary_warning;

    std::vector<cplx> gbuf(padded);
    const double scale = conv.twisted_prefactor * h * h / double(padded);
    for (int i1 = 0; i1 < n; ++i1) {
        const double xi1 = f.grid.coord(i1);
        for (int j1 = 0; j1 < n; ++j1) {
            const int r = i1 - j1 + n / 2;
            if (r < 0 || r >= n) continue;
            std::fill(gbuf.begin(), gbuf.end(), cplx(0.0, 0.0));
            for (int j2 = 0; j2 < n; ++j2)
                gbuf[std::size_t(j2)] =
                    g.samples(j1, j2) * std::polar(1.0, -t * xi1 * f.grid.coord(j2));
            fft_pow2(gbuf, -1);
            const std::vector<cplx>& fr = frows[std::size_t(r)];
            for (std::size_t k = 0; k < padded; ++k) gbuf[k] *= fr[k];
            fft_pow2(gbuf, 1);  // unscaled inverse; 1/(2N) folded into scale
            for (int i2 = 0; i2 < n; ++i2)
                out.samples(i1, i2) +=
                    close_phase(i2, j1) * gbuf[std::size_t(i2 + n / 2)] * scale;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// operator Fourier transform

struct OperatorFourierResult {
    Mat result;
    cplx scale_right = 0.0;       // best fit in result = scale * (A U)
    double residual_right = 0.0;  // relative Frobenius misfit after that fit
    cplx scale_left = 0.0;        // best fit against U A
    double residual_left = 0.0;
    double diag_ratio = 0.0;      // geometric ratio of the leading diagonal
    double diag_ratio_spread = 0.0;
    double dilation = 1.0;        // 1 / (1 - diag_ratio): Berezin width factor
};

namespace detail {

struct ScalarFit {
    cplx scale;
    double residual;
};

inline ScalarFit fit_scalar(const Mat& target, const Mat& value) {
    const double denom = frobenius_norm(target);
    const double vnorm = frobenius_norm(value);
    if (denom == 0.0 || vnorm == 0.0) return {cplx(0.0, 0.0), vnorm == 0.0 ? 0.0 : 1.0};
    const cplx c = frobenius_inner(target, value) / cplx(denom * denom, 0.0);
    const double res = frobenius_norm(value - c * target) / vnorm;
    return {c, res};
}

// Grid on which analysis -> symbol Fourier -> synthesis resolves every mode
// of the space. Mode m of a displacement matrix element lives inside the
// classical radius sqrt(8m + 4) and oscillates at half that rate, so the
// synthesis nodes (which land on the dual grid) must sample above the top
// mode's Nyquist rate and the dual box must contain its support; otherwise
// the cancellations that empty the high modes fail and leave artifacts of
// order one. The caller's grid only sets a floor.
inline Grid alias_safe_grid(const FockSpec& spec, long top_mode, double phase_scale,
                            const Grid& hint) {
    const double s = std::abs(phase_scale);
    const double margin = 7.0;
    const double r_data = std::sqrt(8.0 * double(std::max<long>(top_mode, 0)) + 4.0);
    const double r_top = std::sqrt(8.0 * double(spec.total_dim() - 1) + 4.0);
    const double extent =
        std::max({hint.extent, r_data + margin,
                  (0.5 * (r_data + r_top) + margin) / (2.0 * s)});
    const double h_max = pi / std::max(0.5 * r_data + 4.0, s * (r_top + margin));
    int n = hint.points;
    while (n < 2048 && 2.0 * extent / n > h_max) n *= 2;
    if (2.0 * extent / n > h_max)
        throw std::invalid_argument(
            "operator_fourier: space too large for an alias-safe synthesis grid");
    return Grid{extent, n};
}

}  // namespace detail

// Analysis, symplectic Fourier transform of the symbol, synthesis. Under the
// half-phase convention the composite acts as right multiplication by parity;
// under the full phase it dilates instead, visible as a geometric profile on
// the diagonal (the fitted ratio and the implied Berezin width factor are
// reported alongside the scalar fits against A U and U A).
inline OperatorFourierResult operator_fourier(const FockSpec& spec, const Mat& a,
                                              const Grid& grid,
                                              const ConventionParams& conv) {
    const Grid work = detail::alias_safe_grid(spec, detail::support_extent(a) - 1,
                                              conv.fourier_phase_scale, grid);
    GridSymbol fw = fourier_weyl(spec, a, work, conv);
    GridSymbol fs = symplectic_fourier(fw, conv);
    OperatorFourierResult r;
    r.result = inverse_fourier_weyl(fs, spec, conv);

    const Mat u = parity_operator(spec);
    const detail::ScalarFit right = detail::fit_scalar(a * u, r.result);
    const detail::ScalarFit left = detail::fit_scalar(u * a, r.result);
    r.scale_right = right.scale;
    r.residual_right = right.residual;
    r.scale_left = left.scale;
    r.residual_left = left.residual;

    const long d = spec.total_dim();
    const long probe = std::min<long>(12, std::max<long>(2, d / 4));
    const double floor_mag = 1e-9 * std::max(1e-300, std::abs(r.result(0, 0)));
    std::vector<cplx> ratios;
    for (long m = 0; m + 1 < probe; ++m) {
        const cplx dm = r.result(m, m), dn = r.result(m + 1, m + 1);
        if (std::abs(dm) < floor_mag || std::abs(dn) < floor_mag) break;
        ratios.push_back(dn / dm);
    }
    if (!ratios.empty()) {
        cplx mean = 0.0;
        for (cplx q : ratios) mean += q;
        mean /= double(ratios.size());
        r.diag_ratio = mean.real();
        for (cplx q : ratios)
            r.diag_ratio_spread = std::max(r.diag_ratio_spread, std::abs(q - mean));
    }
    r.dilation = (1.0 - r.diag_ratio) > 1e-12 ? 1.0 / (1.0 - r.diag_ratio)
                                              : std::numeric_limits<double>::infinity();
    return r;
}

// ---------------------------------------------------------------------------
// parity conjugation of quantized symbols

struct ParityConjugationResult {
    Mat quantized;
    Mat reflected_quantized;
    double defect = 0.0;  // |U op(f) U - op(reflect f)|_F / |op(f)|_F
};

// Conjugating the quantized operator by parity quantizes the reflected
// symbol; this holds for any phase scale because the synthesis displacements
// flip sign under parity conjugation.
inline ParityConjugationResult parity_conjugation_check(const GridSymbol& f,
                                                        const FockSpec& spec,
                                                        const ConventionParams& conv) {
    ParityConjugationResult r;
    r.quantized = weyl_quantize(f, spec, conv);
    r.reflected_quantized = weyl_quantize(reflect_symbol(f), spec, conv);
    const Mat u = parity_operator(spec);
    const double base = std::max(frobenius_norm(r.quantized), 1e-300);
    r.defect = frobenius_norm(u * r.quantized * u - r.reflected_quantized) / base;
    return r;
}

// ---------------------------------------------------------------------------
// ideal membership probes

struct IdealMembershipResult {
    RealVec sv_plain, sv_fourier, sv_reflected;
    double sv_defect_fourier = 0.0;    // max singular value gap, relative
    double sv_defect_reflected = 0.0;
    int rank_plain = 0, rank_fourier = 0, rank_reflected = 0;
    double right_restriction_plain = 0.0;    // max |A* e_k| over the subspace
    double right_restriction_fourier = 0.0;
    double left_restriction_plain = 0.0;     // max |A e_k|
    double left_restriction_reflected = 0.0;
    bool right_agree = false;
    bool left_agree = false;
    double threshold = 0.0;
};

// Quantizes f, its symplectic Fourier transform, and its reflection, then
// compares the three against membership probes for the corner subspace:
// right ideals test the adjoint restricted to X, left ideals the operator
// itself. Under the half-phase convention the Fourier partner is the right
// parity multiple and the reflection partner the parity conjugate, so ranks,
// singular values, and the restriction norms must agree.
inline IdealMembershipResult ideal_membership_suite(const GridSymbol& f,
                                                    const std::vector<long>& subspace,
                                                    const FockSpec& spec,
                                                    const ConventionParams& conv,
                                                    double threshold = 1e-6,
                                                    double rank_tolerance = 1e-5) {
    const Mat a = weyl_quantize(f, spec, conv);
    const Mat b = weyl_quantize(symplectic_fourier(f, conv), spec, conv);
    const Mat c = weyl_quantize(reflect_symbol(f), spec, conv);

    IdealMembershipResult r;
    r.threshold = threshold;
    r.sv_plain = singular_values(a);
    r.sv_fourier = singular_values(b);
    r.sv_reflected = singular_values(c);
    const double top = std::max(r.sv_plain[0], 1e-300);
    for (Eigen::Index k = 0; k < r.sv_plain.size(); ++k) {
        r.sv_defect_fourier =
            std::max(r.sv_defect_fourier, std::abs(r.sv_plain[k] - r.sv_fourier[k]) / top);
        r.sv_defect_reflected =
            std::max(r.sv_defect_reflected, std::abs(r.sv_plain[k] - r.sv_reflected[k]) / top);
    }
    // the rank cut is relative to the top singular value and must sit above
    // the quadrature noise floor of the quantization, not at it
    const double rank_tol = rank_tolerance * top;
    r.rank_plain = numerical_rank(a, rank_tol);
    r.rank_fourier = numerical_rank(b, rank_tol);
    r.rank_reflected = numerical_rank(c, rank_tol);

    for (long k : subspace) {
        if (k < 0 || k >= spec.total_dim())
            throw std::invalid_argument("ideal_membership_suite: subspace index out of range");
        // A* e_k is the conjugated k-th row; A e_k the k-th column.
        r.right_restriction_plain = std::max(r.right_restriction_plain, a.row(k).norm());
        r.right_restriction_fourier = std::max(r.right_restriction_fourier, b.row(k).norm());
        r.left_restriction_plain = std::max(r.left_restriction_plain, a.col(k).norm());
        r.left_restriction_reflected = std::max(r.left_restriction_reflected, c.col(k).norm());
    }
    r.right_agree = (r.right_restriction_plain <= threshold) ==
                    (r.right_restriction_fourier <= threshold);
    r.left_agree = (r.left_restriction_plain <= threshold) ==
                   (r.left_restriction_reflected <= threshold);
    return r;
}

// ---------------------------------------------------------------------------
// convention audit

struct ConventionAudit {
    ConventionParams audited;
    double involution_defect_full = 0.0;
    double involution_defect_half = 0.0;
    double haar_fit = 0.0;        // synthesis constant fitted from round trips
    double haar_fit_spread = 0.0;
    double haar_relative_error = 0.0;  // against 1 / (2 pi)
    cplx fop_scale_vacuum = 0.0;       // vacuum projector, half phase, vs A U
    double fop_residual_vacuum = 0.0;
    double vacuum_diag_ratio_half = 0.0;
    double vacuum_diag_ratio_full = 0.0;  // geometric dilation under full phase
    cplx fop_scale_mixed = 0.0;           // parity-asymmetric probe, half phase
    double fop_residual_mixed_right = 0.0;
    double fop_residual_mixed_left = 0.0;
    double fop_residual_flip_right = 0.0;  // +1/2 phase scale variant
    double fop_residual_flip_left = 0.0;
    double fop_residual_full_right = 0.0;  // full phase, same probe
    double twisted_vacuum_defect = 0.0;            // audited constants
    double twisted_vacuum_defect_displayed = 0.0;  // t = +1, prefactor 1
    bool consistent = false;
    std::string message;
};

// Pins every constant numerically: involution defects for both phase scales,
// the synthesis measure from rank-one round trips, the operator-transform
// product order from a parity-asymmetric probe (the +1/2 and -1/2 scales land
// on opposite sides of parity), the vacuum dilation under the full phase, and
// the twisted-convolution normalization on the vacuum symbol.
inline ConventionAudit convention_audit(const FockSpec& spec, const Grid& grid) {
    check_grid(grid);
    if (spec.factors != 1)
        throw std::invalid_argument("convention_audit: single-factor only");
    ConventionAudit audit;
    const ConventionParams full = ConventionParams::full_phase();
    const ConventionParams half = ConventionParams::half_phase();

    // involutions on a Gaussian probe symbol
    const GridSymbol probe = sample_symbol(
        [](cplx z) { return std::exp(-0.5 * std::norm(z)); }, grid, "gauss");
    auto involution_defect = [&](const ConventionParams& conv) {
        const GridSymbol twice = symplectic_fourier(symplectic_fourier(probe, conv), conv);
        return (twice.samples - probe.samples).cwiseAbs().maxCoeff();
    };
    audit.involution_defect_full = involution_defect(full);
    audit.involution_defect_half = involution_defect(half);

    // synthesis measure from rank-one round trips
    std::vector<Mat> rank_ones;
    rank_ones.push_back(basis_outer(spec, 0, 0));
    {
        const long d = spec.total_dim();
        Vec mix = Vec::Zero(d);
        mix[0] = 1.0 / std::sqrt(2.0);
        mix[1] = 1.0 / std::sqrt(2.0);
        rank_ones.push_back(mix * mix.adjoint());
    }
    ConventionParams unit = full;
    unit.haar_normalization = 1.0;
    std::vector<double> fits;
    for (const Mat& a : rank_ones) {
        const GridSymbol fw = fourier_weyl(spec, a, grid, unit);
        const Mat raw = inverse_fourier_weyl(fw, spec, unit);
        // best c with c * raw = a recovers the missing measure constant
        fits.push_back(detail::fit_scalar(raw, a).scale.real());
    }
    audit.haar_fit = 0.5 * (fits[0] + fits[1]);
    audit.haar_fit_spread = std::abs(fits[0] - fits[1]);
    audit.haar_relative_error = std::abs(audit.haar_fit - 1.0 / (2.0 * pi)) * 2.0 * pi;

    // operator Fourier transform: vacuum projector and an asymmetric probe
    const Mat vacuum = basis_outer(spec, 0, 0);
    const Mat mixed = basis_outer(spec, 0, 0) + basis_outer(spec, 1, 0);
    ConventionParams flip = half;
    flip.name = "half-phase-flipped";
    flip.fourier_phase_scale = 0.5;

    const OperatorFourierResult vac_half = operator_fourier(spec, vacuum, grid, half);
    audit.fop_scale_vacuum = vac_half.scale_right;
    audit.fop_residual_vacuum = vac_half.residual_right;
    audit.vacuum_diag_ratio_half = vac_half.diag_ratio;
    const OperatorFourierResult vac_full = operator_fourier(spec, vacuum, grid, full);
    audit.vacuum_diag_ratio_full = vac_full.diag_ratio;

    const OperatorFourierResult mix_half = operator_fourier(spec, mixed, grid, half);
    audit.fop_scale_mixed = mix_half.scale_right;
    audit.fop_residual_mixed_right = mix_half.residual_right;
    audit.fop_residual_mixed_left = mix_half.residual_left;
    const OperatorFourierResult mix_flip = operator_fourier(spec, mixed, grid, flip);
    audit.fop_residual_flip_right = mix_flip.residual_right;
    audit.fop_residual_flip_left = mix_flip.residual_left;
    const OperatorFourierResult mix_full = operator_fourier(spec, mixed, grid, full);
    audit.fop_residual_full_right = mix_full.residual_right;

    // twisted convolution on the vacuum symbol
    const GridSymbol fvac = fourier_weyl(spec, vacuum, grid, half);
    const GridSymbol tc = twisted_convolution(fvac, fvac, half);
    audit.twisted_vacuum_defect = (tc.samples - fvac.samples).cwiseAbs().maxCoeff();
    ConventionParams displayed = half;
    displayed.name = "displayed-twisted";
    displayed.twisted_phase_scale = 1.0;
    displayed.twisted_prefactor = 1.0;
    const GridSymbol td = twisted_convolution(fvac, fvac, displayed);
    audit.twisted_vacuum_defect_displayed = (td.samples - fvac.samples).cwiseAbs().maxCoeff();

    audit.audited = half;
    audit.consistent = audit.involution_defect_full < 1e-8 &&
                       audit.involution_defect_half < 1e-8 &&
                       audit.haar_relative_error < 1e-2 &&
                       audit.fop_residual_vacuum < 1e-3 &&
                       audit.fop_residual_mixed_right < 1e-3 &&
                       audit.twisted_vacuum_defect < 1e-3;

    std::ostringstream msg;
    msg.setf(std::ios::scientific);
    msg.precision(3);
    msg << "involution defects: full-phase " << audit.involution_defect_full
        << ", half-phase " << audit.involution_defect_half << "\n";
    msg << "synthesis measure: fitted " << audit.haar_fit << " vs 1/(2 pi) = "
        << 1.0 / (2.0 * pi) << " (relative error " << audit.haar_relative_error
        << ", probe spread " << audit.haar_fit_spread << ")\n";
    msg << "operator transform, half phase (scale -1/2): vacuum fit "
        << audit.fop_scale_vacuum.real() << " * A U with residual "
        << audit.fop_residual_vacuum << "; asymmetric probe residual "
        << audit.fop_residual_mixed_right << " against A U, "
        << audit.fop_residual_mixed_left << " against U A\n";
    msg << "operator transform, flipped scale +1/2: residual "
        << audit.fop_residual_flip_right << " against A U, "
        << audit.fop_residual_flip_left
        << " against U A (the sign selects the side of the parity factor)\n";
    msg << "operator transform, full phase: asymmetric probe residual "
        << audit.fop_residual_full_right
        << " against A U; vacuum diagonal contracts geometrically with ratio "
        << audit.vacuum_diag_ratio_full << " (Berezin width factor "
        << 1.0 / (1.0 - audit.vacuum_diag_ratio_full) << ")\n";
    msg << "twisted convolution: scale -1/2 with 1/(2 pi) prefactor keeps the "
           "vacuum symbol idempotent (defect "
        << audit.twisted_vacuum_defect
        << "); the unnormalized full-phase form fails (defect "
        << audit.twisted_vacuum_defect_displayed << ")\n";
    msg << (audit.consistent
                ? "audit: consistent normalization found (half-phase set)"
                : "audit: no consistent convention found at the stated tolerances");
    audit.message = msg.str();
    return audit;
}

}  // namespace qha
