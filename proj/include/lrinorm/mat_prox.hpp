#pragma once

#include "lrinorm/vec_prox.hpp"

#include <Eigen/Dense>

namespace lrinorm {

/// Thin SVD, U n x q, V m x q with q = min(n, m), sigma non-increasing.
struct SvdFactors {
    Matrix U;
    Vector sigma;
    Matrix V;
};

inline void validate_finite(const Matrix& Z, const char* where) {
    if (Z.size() == 0) throw std::invalid_argument(std::string(where) + ": empty matrix");
    if (!Z.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite entries");
}

inline SvdFactors thin_svd(const Matrix& Z) {
    validate_finite(Z, "thin_svd");
    Eigen::JacobiSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw std::runtime_error("thin_svd: decomposition failed");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Vector singular_values(const Matrix& Z) {
    validate_finite(Z, "singular_values");
    Eigen::JacobiSVD<Matrix> svd(Z);
    return svd.singularValues();
}

/// Count of singular values above rel_threshold * sigma_1.
inline int numerical_rank(const Vector& sigma, double rel_threshold = 1e-9) {
    if (sigma.size() == 0) return 0;
    const double cut = rel_threshold * sigma[0];
    int rank = 0;
    for (Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > cut) ++rank;
    return rank;
}

inline int numerical_rank(const Matrix& Z, double rel_threshold = 1e-9) {
    return numerical_rank(singular_values(Z), rel_threshold);
}

/// Value of the low-rank inducing norm on a matrix: the vector norm applied
/// to the singular values.
inline double matrix_norm_value(const Matrix& Z, const NormSpec& spec) {
    const Vector sigma = singular_values(Z);
    validate_rank(spec.r, sigma.size(), "matrix_norm_value");
    return norm_value(sigma, spec);
}

inline double matrix_dual_norm_value(const Matrix& Z, const NormSpec& spec) {
    const Vector sigma = singular_values(Z);
    validate_rank(spec.r, sigma.size(), "matrix_dual_norm_value");
    return dual_norm_value(sigma, spec);
}

inline double matrix_scaled_norm_value(const Matrix& Z, const ScaledNorm& f) {
    const double n = matrix_norm_value(Z, f.spec);
    return f.squared ? 0.5 * f.gamma * n * n : f.gamma * n;
}

struct MatrixProxResult {
    Matrix X;
    Vector sigma_in;
    Vector sigma_out;
    CandidateSolution accepted;
    int candidate_solves = 0;
    int rank = 0;
};

/// Prox of a unitarily invariant function: decompose, apply the vector prox
/// to the singular values, reconstruct with the same factors.
inline MatrixProxResult matrix_prox(const Matrix& Z, const ScaledNorm& f,
                                    SearchMode mode = SearchMode::BinarySearch,
                                    double rank_threshold = 1e-9) {
    const SvdFactors svd = thin_svd(Z);
    validate_rank(f.spec.r, svd.sigma.size(), "matrix_prox");
    VecProxResult v = prox_vec(svd.sigma, f, mode);
    MatrixProxResult out;
    out.X = svd.U * v.x.asDiagonal() * svd.V.transpose();
    out.sigma_in = svd.sigma;
    out.sigma_out = v.x;
    out.accepted = v.accepted;
    out.candidate_solves = v.candidate_solves;
    out.rank = numerical_rank(v.x, rank_threshold);
    return out;
}

struct EpigraphPoint {
    Matrix X;
    double s = 0.0;
};

/// Euclidean projection of (Z, t) onto the epigraph { (X, s) : N(X) <= s }.
/// Inside the epigraph nothing moves; inside the polar cone the answer is the
/// origin; otherwise the multiplier lambda with N(prox_{lambda N}(Z)) = t +
/// lambda is found by safeguarded bisection on the singular values.
inline EpigraphPoint project_epigraph(const Matrix& Z, double t, const NormSpec& spec) {
    const SvdFactors svd = thin_svd(Z);
    validate_rank(spec.r, svd.sigma.size(), "project_epigraph");
    const MagnitudeProfile prof = make_profile(svd.sigma);
    const double nz = norm_value(prof, spec);
    if (nz <= t) return {Z, t};
    const double gz = dual_norm_value(prof, spec);
    if (gz <= -t) return {Matrix::Zero(Z.rows(), Z.cols()), 0.0};

    auto shifted_norm = [&](double lambda) {
        ScaledNorm f{spec, std::max(lambda, 1e-300), false};
        return norm_value(prox_vec(svd.sigma, f, SearchMode::BinarySearch).x, spec) - (t + lambda);
    };
    double lo = 0.0, hi = gz;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_norm(mid) > 0.0) lo = mid; else hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, gz)) break;
    }
    const double lambda = 0.5 * (lo + hi);
    ScaledNorm f{spec, std::max(lambda, 1e-300), false};
    const Vector sf = prox_vec(svd.sigma, f, SearchMode::BinarySearch).x;
    return {svd.U * sf.asDiagonal() * svd.V.transpose(), t + lambda};
}

}  // namespace lrinorm
