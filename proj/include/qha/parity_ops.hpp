#pragma once

// Even/odd operator calculus and the conjugation-continuity diagnostics:
// parity splitting, graded block structure, symmetry classes under
// root-of-unity rotations, and the shift/modulation/theta moduli.

#include "qha/fock.hpp"
#include "qha/linalg.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace qha {

// ---------------------------------------------------------------------------
// Even/odd splitting

struct EvenOddSplit {
    Mat even_part;
    Mat odd_part;
    double residual = 0.0;  // reconstruction defect, should be ~eps
};

inline EvenOddSplit even_odd_split(const FockSpec& spec, const Mat& a) {
    Mat u = parity_operator(spec);
    Mat uau = u * a * u;
    EvenOddSplit s;
    s.even_part = 0.5 * (a + uau);
    s.odd_part = 0.5 * (a - uau);
    s.residual = (s.even_part + s.odd_part - a).norm();
    return s;
}

// ---------------------------------------------------------------------------
// Graded block structure

struct ParityBlocks {
    Mat ee, eo, oe, oo;            // row/col labels: e = even degree, o = odd
    std::vector<long> even_index;  // flat indices behind each block position
    std::vector<long> odd_index;
};

inline ParityBlocks block_decompose(const FockSpec& spec, const Mat& a) {
    long n = spec.total_dim();
    if (a.rows() != n || a.cols() != n)
        throw std::invalid_argument("block_decompose: matrix does not match spec");
    ParityBlocks b;
    for (long m = 0; m < n; ++m)
        (spec.degree(m) % 2 == 0 ? b.even_index : b.odd_index).push_back(m);
    long ne = long(b.even_index.size()), no = long(b.odd_index.size());
    b.ee.resize(ne, ne);
    b.eo.resize(ne, no);
    b.oe.resize(no, ne);
    b.oo.resize(no, no);
    for (long i = 0; i < ne; ++i)
        for (long j = 0; j < ne; ++j) b.ee(i, j) = a(b.even_index[i], b.even_index[j]);
    for (long i = 0; i < ne; ++i)
        for (long j = 0; j < no; ++j) b.eo(i, j) = a(b.even_index[i], b.odd_index[j]);
    for (long i = 0; i < no; ++i)
        for (long j = 0; j < ne; ++j) b.oe(i, j) = a(b.odd_index[i], b.even_index[j]);
    for (long i = 0; i < no; ++i)
        for (long j = 0; j < no; ++j) b.oo(i, j) = a(b.odd_index[i], b.odd_index[j]);
    return b;
}

inline Mat block_reassemble(const FockSpec& spec, const ParityBlocks& b) {
    long n = spec.total_dim();
    Mat a = Mat::Zero(n, n);
    long ne = long(b.even_index.size()), no = long(b.odd_index.size());
    for (long i = 0; i < ne; ++i)
        for (long j = 0; j < ne; ++j) a(b.even_index[i], b.even_index[j]) = b.ee(i, j);
    for (long i = 0; i < ne; ++i)
        for (long j = 0; j < no; ++j) a(b.even_index[i], b.odd_index[j]) = b.eo(i, j);
    for (long i = 0; i < no; ++i)
        for (long j = 0; j < ne; ++j) a(b.odd_index[i], b.even_index[j]) = b.oe(i, j);
    for (long i = 0; i < no; ++i)
        for (long j = 0; j < no; ++j) a(b.odd_index[i], b.odd_index[j]) = b.oo(i, j);
    return a;
}

// ---------------------------------------------------------------------------
// Even operators of prescribed index

// Even operator whose banded-truncation index estimate is k. Even k uses the
// global degree shift (its even and odd blocks are shifts of equal index k/2,
// so the block indices agree, as they must for any sufficiently continuous
// even operator). Odd k cannot have agreeing block indices; it uses the
// identity-on-even, shift-on-odd form, which is the standard counterexample
// once continuity in the shift direction is dropped.
inline Mat make_even_with_index(int k, const FockSpec& spec) {
    if (spec.factors != 1)
        throw std::invalid_argument("make_even_with_index: single-factor specs only");
    int d = spec.dim;
    if (4 * std::abs(k) >= d)
        throw std::invalid_argument("make_even_with_index: |k| must be < dim/4");
    Mat a = Mat::Zero(d, d);
    if (k == 0) return Mat::Identity(d, d);
    if (k % 2 == 0) {
        // index of the down-shift e_{m+k} -> e_m is +k; transpose for k < 0
        int s = std::abs(k);
        for (int m = 0; m + s < d; ++m) {
            if (k > 0)
                a(m, m + s) = 1.0;
            else
                a(m + s, m) = 1.0;
        }
        return a;
    }
    for (int m = 0; m < d; m += 2) a(m, m) = 1.0;
    int s = std::abs(k);
    for (int j = 0; 2 * (j + s) + 1 < d; ++j) {
        if (k > 0)
            a(2 * j + 1, 2 * (j + s) + 1) = 1.0;
        else
            a(2 * (j + s) + 1, 2 * j + 1) = 1.0;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Symmetry class under a root-of-unity rotation

// Smallest-defect m with U_theta A U_theta^* ~ theta^m A; none when no class
// fits within tol (relative to ||A||_F).
inline std::optional<int> symmetry_class(const FockSpec& spec, const Mat& a, cplx theta,
                                         int order, double tol = 1e-8) {
    if (order < 1) throw std::invalid_argument("symmetry_class: order must be positive");
    cplx pw = 1.0;
    for (int j = 0; j < order; ++j) pw *= theta;
    if (std::abs(pw - 1.0) > 1e-10)
        throw std::invalid_argument("symmetry_class: theta is not a root of unity of the given order");
    Mat u = parity_rotation(spec, theta);
    Mat conj = u * a * u.adjoint();
    double scale = std::max(1.0, a.norm());
    int best = -1;
    double best_defect = std::numeric_limits<double>::infinity();
    cplx phase = 1.0;
    for (int m = 0; m < order; ++m) {
        double defect = (conj - phase * a).norm();
        if (defect < best_defect) {
            best_defect = defect;
            best = m;
        }
        phase *= theta;
    }
    if (best_defect > tol * scale) return std::nullopt;
    return best;
}

// ---------------------------------------------------------------------------
// Conjugation-continuity moduli

enum class ModulusMode { shift, modulation, theta };

inline const char* modulus_mode_name(ModulusMode m) {
    switch (m) {
        case ModulusMode::shift: return "shift";
        case ModulusMode::modulation: return "modulation";
        default: return "theta";
    }
}

// Operator-norm defect of one conjugation at displacement z.
inline double conjugation_defect(const FockSpec& spec, const Mat& a, const Vec& z,
                                 ModulusMode mode, const Vec* theta_diag = nullptr) {
    switch (mode) {
        case ModulusMode::shift:
            return op_norm(shift_alpha(spec, a, z) - a);
        case ModulusMode::modulation:
            return op_norm(modulation_beta(spec, a, z) - a);
        default: {
            if (theta_diag == nullptr)
                throw std::invalid_argument("conjugation_defect: theta mode needs Theta");
            return op_norm(theta_twist(spec, a, z, *theta_diag) - a);
        }
    }
}

// Deterministic direction set on the unit sphere of C^n, closed under v -> -v.
// Single factor: equispaced phases. Several factors: seeded unit vectors plus
// their negatives.
inline std::vector<Vec> direction_set(int factors, int count) {
    if (count < 2 || count % 2 != 0)
        throw std::invalid_argument("direction_set: count must be even and >= 2");
    std::vector<Vec> dirs;
    dirs.reserve(count);
    if (factors == 1) {
        for (int j = 0; j < count; ++j) {
            Vec v(1);
            v[0] = std::polar(1.0, 2.0 * pi * j / count);
            dirs.push_back(v);
        }
        return dirs;
    }
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < count / 2; ++j) {
        Vec v(factors);
        do {
            for (int f = 0; f < factors; ++f) v[f] = cplx(gauss(rng), gauss(rng));
        } while (v.norm() < 1e-6);
        v /= v.norm();
        dirs.push_back(v);
        dirs.push_back(-v);
    }
    return dirs;
}

struct ContinuityProfile {
    std::vector<double> radii;
    std::vector<double> moduli;  // sup over sampled directions, a lower bound of the true sup
    ModulusMode mode = ModulusMode::shift;
    bool truncation_warning = false;
};

// Sup over sampled directions of the conjugation defect, per radius.
inline ContinuityProfile continuity_modulus(const FockSpec& spec, const Mat& a,
                                            ModulusMode mode,
                                            const std::vector<double>& radii,
                                            int directions = 8,
                                            const Vec* theta_diag = nullptr) {
    ContinuityProfile prof;
    prof.mode = mode;
    prof.radii = radii;
    prof.moduli.reserve(radii.size());
    std::vector<Vec> dirs = direction_set(spec.factors, directions);
    for (double r : radii) {
        if (r == 0.0) {
            prof.moduli.push_back(0.0);
            continue;
        }
        double sup = 0.0;
        double tail = 0.0;
        for (const Vec& u : dirs) {
            Vec z = r * u;
            sup = std::max(sup, conjugation_defect(spec, a, z, mode, theta_diag));
            tail = std::max(tail, weyl_operator(spec, z).tail);
        }
        // Conjugation error scales like the amplitude lost past the cutoff.
        if (sup < 10.0 * std::sqrt(tail)) prof.truncation_warning = true;
        prof.moduli.push_back(sup);
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Localization along mirrored coherent pairs

// max over sampled directions of |<A k_z, k_{-z}>| per radius.
inline std::vector<double> localization_profile(const FockSpec& spec, const Mat& a,
                                                const std::vector<double>& radii,
                                                int directions = 8) {
    std::vector<Vec> dirs = direction_set(spec.factors, directions);
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        double sup = 0.0;
        for (const Vec& u : dirs) {
            Vec z = r * u;
            Vec mz = -z;
            CoherentState kp = coherent_state(spec, z);
            CoherentState km = coherent_state(spec, mz);
            sup = std::max(sup, std::abs(km.coeffs.dot(a * kp.coeffs)));
        }
        out.push_back(sup);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed spaces of diagonal rotation families

struct FixedSplit {
    std::vector<int> moving_factors;  // some rotation acts nontrivially: spans V0
    std::vector<int> fixed_factors;   // every rotation acts trivially: spans V0-perp
};

// Each rotation is a per-factor phase list; a factor belongs to V0 when any
// rotation moves it.
inline FixedSplit fixed_eigenspace_complement(const FockSpec& spec,
                                              const std::vector<Vec>& theta_list) {
    std::vector<bool> moves(spec.factors, false);
    for (const Vec& th : theta_list) {
        if (th.size() != spec.factors)
            throw std::invalid_argument("fixed_eigenspace_complement: phase list has wrong factor count");
        for (int f = 0; f < spec.factors; ++f) {
            if (std::abs(std::abs(th[f]) - 1.0) > 1e-12)
                throw std::invalid_argument("fixed_eigenspace_complement: phases must be unimodular");
            if (std::abs(th[f] - cplx(1.0, 0.0)) > 1e-12) moves[f] = true;
        }
    }
    FixedSplit split;
    for (int f = 0; f < spec.factors; ++f)
        (moves[f] ? split.moving_factors : split.fixed_factors).push_back(f);
    return split;
}

// ---------------------------------------------------------------------------
// Berezin decay envelope along a factor split

struct EnvelopeSample {
    double v_radius = 0.0;
    double envelope = 0.0;       // sup over the transverse grid and directions
    double flat_variation = 0.0; // (max - min) / max over the transverse grid
    double max_tail = 0.0;       // worst coherent tail among the samples
};

// sup_w |Berezin(A)(v + w)| against |v|, v supported on moving_factors and w
// on the transverse grid of fixed factors.
inline std::vector<EnvelopeSample> berezin_envelope(
    const FockSpec& spec, const Mat& a, const std::vector<int>& moving_factors,
    const std::vector<double>& v_radii, const std::vector<cplx>& transverse_grid,
    int v_directions = 4) {
    std::vector<bool> moving(spec.factors, false);
    for (int f : moving_factors) {
        if (f < 0 || f >= spec.factors)
            throw std::invalid_argument("berezin_envelope: factor index out of range");
        moving[f] = true;
    }
    std::vector<int> fixed;
    for (int f = 0; f < spec.factors; ++f)
        if (!moving[f]) fixed.push_back(f);

    int nm = int(moving_factors.size());
    std::vector<Vec> vdirs =
        nm > 0 ? direction_set(nm, v_directions) : std::vector<Vec>{};
    // transverse grid points are applied to every fixed factor at once;
    // the bounded-grid sweep is per scalar value, kept modest on purpose
    std::vector<cplx> wgrid = transverse_grid.empty()
                                  ? std::vector<cplx>{cplx(0.0, 0.0)}
                                  : transverse_grid;

    std::vector<EnvelopeSample> out;
    out.reserve(v_radii.size());
    for (double r : v_radii) {
        EnvelopeSample s;
        s.v_radius = r;
        int vcount = nm > 0 ? int(vdirs.size()) : 1;
        for (int dv = 0; dv < vcount; ++dv) {
            // transverse flatness is judged with the moving part held still
            double hi = 0.0, lo = std::numeric_limits<double>::infinity();
            for (cplx w : wgrid) {
                Vec z = Vec::Zero(spec.factors);
                if (nm > 0)
                    for (int i = 0; i < nm; ++i) z[moving_factors[i]] = r * vdirs[dv][i];
                for (int f : fixed) z[f] = w;
                CoherentState k = coherent_state(spec, z);
                double val = std::abs(k.coeffs.dot(a * k.coeffs));
                hi = std::max(hi, val);
                lo = std::min(lo, val);
                s.max_tail = std::max(s.max_tail, k.tail);
            }
            s.envelope = std::max(s.envelope, hi);
            if (hi > 0.0) s.flat_variation = std::max(s.flat_variation, (hi - lo) / hi);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace qha
