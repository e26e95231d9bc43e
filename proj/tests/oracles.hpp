#pragma once
// Test-local oracles, kept independent of the library's quadrature and FFT
// machinery: an adaptive Simpson integrator, closed-form overlaps, and a
// brute-force discrete Fourier sum.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// int_0^inf r^p exp(-r^2/2) dr, scaled by exp(-log_scale) inside the
// integrand so huge powers stay in range.
inline double radial_moment_scaled(double p, double log_scale) {
    double peak = std::sqrt(std::max(p, 1.0));
    double hi = peak + 14.0 + 0.5 * peak;
    auto f = [p, log_scale](double r) {
        if (r <= 0.0) return 0.0;
        return std::exp(p * std::log(r) - 0.5 * r * r - log_scale);
    };
    return integrate(f, 0.0, hi);
}

// <k_z, k_w> for normalized coherent states, untruncated closed form.
inline cplx coherent_overlap(cplx z, cplx w) {
    cplx ex = 0.5 * std::conj(z) * w -
              cplx(0.25 * std::norm(z) + 0.25 * std::norm(w), 0.0);
    return std::exp(ex);
}

// Brute-force centered symplectic Fourier sum on an N x N grid of spacing h:
//   out(k) = c * h^2 * sum_j in(j) * exp(i s sigma(w_j, z_k))
// with sigma(w, z) = w2 z1 - w1 z2, z_k = k * (2 pi / (s N h)).
inline std::vector<cplx> symplectic_dft(const std::vector<cplx>& in, int n, double h,
                                        double s, double c) {
    std::vector<cplx> out(n * n);
    double hout = 2.0 * M_PI / (s * n * h);
    for (int k1 = -n / 2; k1 < n / 2; ++k1)
        for (int k2 = -n / 2; k2 < n / 2; ++k2) {
            cplx acc = 0.0;
            double z1 = k1 * hout, z2 = k2 * hout;
            for (int j1 = -n / 2; j1 < n / 2; ++j1)
                for (int j2 = -n / 2; j2 < n / 2; ++j2) {
                    double w1 = j1 * h, w2 = j2 * h;
                    double phase = s * (w2 * z1 - w1 * z2);
                    acc += in[(j1 + n / 2) * n + (j2 + n / 2)] *
                           std::polar(1.0, phase);
                }
            out[(k1 + n / 2) * n + (k2 + n / 2)] = c * h * h * acc;
        }
    return out;
}

}  // namespace oracle
