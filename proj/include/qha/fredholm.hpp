#pragma once

// Index estimation for banded operators on the truncated basis. Two
// independent estimators: singular-value deficiency counts on rectangular
// band truncations, and the winding number of the heat-smoothed symbol on a
// large circle.

#include "qha/linalg.hpp"
#include "qha/quantize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qha {

// ---------------------------------------------------------------------------
// Band structure

struct BandProfile {
    int lower = 0;          // largest kept row-minus-col offset
    int upper = 0;          // largest kept col-minus-row offset
    double residual = 0.0;  // Frobenius mass outside the band
};

// Minimal per-side bandwidths leaving less than tol * ||A||_F off band, the
// budget split evenly between the two sides.
inline BandProfile band_profile(const Mat& a, double tol = 1e-10) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("band_profile: square input expected");
    std::vector<double> low2(n, 0.0), up2(n, 0.0);  // squared mass per offset
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double m = std::norm(a(i, j));
            if (i >= j)
                low2[i - j] += m;
            else
                up2[j - i] += m;
        }
    double budget = 0.5 * tol * tol * std::max(a.squaredNorm(), 1e-300);
    auto minimal = [&](const std::vector<double>& side) {
        double outside = 0.0;
        int width = int(n) - 1;
        while (width > 0 && outside + side[width] <= budget) {
            outside += side[width];
            --width;
        }
        return std::pair<int, double>(width, outside);
    };
    auto [lo, lo_mass] = minimal(low2);
    auto [up, up_mass] = minimal(up2);
    if (lo >= n / 2 || up >= n / 2)
        throw std::runtime_error("band_profile: not banded at the requested tolerance");
    BandProfile bp;
    bp.lower = lo;
    bp.upper = up;
    bp.residual = std::sqrt(lo_mass + up_mass);
    return bp;
}

// ---------------------------------------------------------------------------
// Index estimates

enum class IndexMethod { deficiency, winding };

struct IndexEstimate {
    int value = 0;
    IndexMethod method = IndexMethod::deficiency;
    // deficiency diagnostics
    int kernel_dim = 0;
    int cokernel_dim = 0;
    double kernel_gap = 0.0;    // rank-decision separation, +inf when clean
    double cokernel_gap = 0.0;
    int domain_dim = 0;         // rectangle columns M
    int codomain_dim = 0;       // rectangle rows on the kernel side
    // winding diagnostics
    double winding_residual = 0.0;
    double min_modulus = 0.0;
};

namespace detail {

// Nullity of the first-M-columns rectangle with enough rows to hold the
// whole image; row deficit would fabricate kernel vectors.
struct RectNullity {
    int nullity = 0;
    double gap = 0.0;
    int rows = 0;
};

inline RectNullity rect_nullity(const Mat& a, int m, int extra_rows, double tol) {
    int rows = std::min<long>(m + extra_rows, a.rows());
    Mat rect = a.topLeftCorner(rows, m);
    RealVec sv = singular_values(rect);
    double scale = sv.size() > 0 ? std::max(sv[0], 1.0) : 1.0;
    RectNullity out;
    out.nullity = nullity_at(sv, m, tol * scale);
    out.gap = rank_gap_factor(sv, tol * scale);
    out.rows = rows;
    return out;
}

}  // namespace detail

// Kernel minus cokernel on rectangular band truncations: kernel from A with
// the image of the first M basis vectors fully represented, cokernel from
// the adjoint the same way.
inline IndexEstimate index_deficiency(const Mat& a, double tol = 1e-8,
                                      double interior = 0.5,
                                      double band_tol = 1e-10) {
    BandProfile bp = band_profile(a, band_tol);
    const int n = int(a.rows());
    const int m = std::max(1, int(interior * n));
    int bandwidth = std::max({bp.lower, bp.upper, 1});
    if (m < 8 * bandwidth)
        throw std::invalid_argument(
            "index_deficiency: interior window too small for bandwidth " +
            std::to_string(bandwidth));
    detail::RectNullity ker = detail::rect_nullity(a, m, bp.lower, tol);
    detail::RectNullity cok = detail::rect_nullity(a.adjoint(), m, bp.upper, tol);
    if (ker.gap < 10.0 || cok.gap < 10.0)
        throw std::runtime_error(
            "index_deficiency: ill-conditioned rank decision, gap factor below 10");
    IndexEstimate est;
    est.value = ker.nullity - cok.nullity;
    est.method = IndexMethod::deficiency;
    est.kernel_dim = ker.nullity;
    est.cokernel_dim = cok.nullity;
    est.kernel_gap = ker.gap;
    est.cokernel_gap = cok.gap;
    est.domain_dim = m;
    est.codomain_dim = ker.rows;
    return est;
}

// Minus the winding number of the Berezin curve on |z| = radius.
inline IndexEstimate index_winding(const FockSpec& spec, const Mat& a,
                                   double radius = 6.0, int samples = 720) {
    if (spec.factors != 1)
        throw std::invalid_argument("index_winding: single-factor specs only");
    if (samples < 16) throw std::invalid_argument("index_winding: too few samples");
    std::vector<cplx> curve(samples);
    double min_abs = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j) {
        cplx z = std::polar(radius, 2.0 * pi * j / samples);
        curve[j] = berezin(spec, a, z);
        min_abs = std::min(min_abs, std::abs(curve[j]));
    }
    if (min_abs < 1e-8)
        throw std::runtime_error("index_winding: curve passes through zero");
    double total = 0.0;
    for (int j = 0; j < samples; ++j)
        total += std::arg(curve[(j + 1) % samples] / curve[j]);
    double turns = total / (2.0 * pi);
    int winding = int(std::lround(turns));
    double residual = std::abs(total - 2.0 * pi * winding);
    if (min_abs < 10.0 * residual)
        throw std::runtime_error("index_winding: curve not bounded away from zero");
    IndexEstimate est;
    est.value = -winding;
    est.method = IndexMethod::winding;
    est.winding_residual = residual;
    est.min_modulus = min_abs;
    return est;
}

}  // namespace qha
