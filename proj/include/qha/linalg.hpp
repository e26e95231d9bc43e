#pragma once
// Dense linear-algebra helpers on top of Eigen: operator norms, singular
// values, numerical rank, and Frobenius geometry.

#include "qha/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <vector>

namespace qha {

// Operator norm = largest singular value, computed from the Gram matrix.
// Absolute accuracy scales with the norm of A itself, so tiny defect
// matrices keep full relative precision.
inline double op_norm(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Mat gram = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top));
}

inline double frobenius_norm(const Mat& a) { return a.norm(); }

inline cplx frobenius_inner(const Mat& a, const Mat& b) {
    return (a.adjoint() * b).trace();
}

// Full singular value list, descending.
inline RealVec singular_values(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return RealVec(0);
    if (std::min(a.rows(), a.cols()) <= 32) {
        Eigen::JacobiSVD<Mat> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Mat> svd(a);
    return svd.singularValues();
}

// Count of singular values at or below tol (numerical nullity of the map
// restricted to its column space dimensions).
inline int nullity_at(const RealVec& sv, Eigen::Index cols, double tol) {
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return int(cols) - rank;
}

inline int numerical_rank(const Mat& a, double tol) {
    RealVec sv = singular_values(a);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return rank;
}

// Smallest ratio between consecutive singular values across the tolerance
// cut; large values mean the rank decision is well separated. Returns +inf
// when no singular value falls below tol.
inline double rank_gap_factor(const RealVec& sv, double tol) {
    double smallest_kept = -1.0, largest_cut = -1.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > tol)
            smallest_kept = (smallest_kept < 0) ? sv[i] : std::min(smallest_kept, sv[i]);
        else
            largest_cut = std::max(largest_cut, sv[i]);
    }
    if (largest_cut <= 0.0) return std::numeric_limits<double>::infinity();
    if (smallest_kept < 0.0) return std::numeric_limits<double>::infinity();
    return smallest_kept / largest_cut;
}

}  // namespace qha
