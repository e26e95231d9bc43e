#pragma once
// Iterative radix-2 FFT, unscaled, plus row/column helpers for grid arrays.
// sign = +1 applies the kernel exp(+2 pi i jk / N), sign = -1 its conjugate.

#include <complex>
#include <stdexcept>
#include <vector>

#include "common.hpp"

namespace qha {

inline void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: length must be a power of two");
    if (sign != 1 && sign != -1) throw std::invalid_argument("fft_pow2: sign must be +-1");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<cplx> tw(n / 2);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        // Twiddles from polar() per stage, not from a running product: keeps
        // the roundoff floor near machine precision, which the reference-vs-
        // fast convolution comparison relies on.
        const double ang = double(sign) * 2.0 * pi / double(len);
        for (std::size_t k = 0; k < len / 2; ++k) tw[k] = std::polar(1.0, ang * double(k));
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * tw[k];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Transform every row (sum over the column index).
inline void fft_rows(Mat& m, int sign) {
    std::vector<cplx> buf(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) buf[std::size_t(j)] = m(i, j);
        fft_pow2(buf, sign);
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = buf[std::size_t(j)];
    }
}

// Transform every column (sum over the row index).
inline void fft_cols(Mat& m, int sign) {
    std::vector<cplx> buf(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) buf[std::size_t(i)] = m(i, j);
        fft_pow2(buf, sign);
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = buf[std::size_t(i)];
    }
}

}  // namespace qha
