#pragma once

#include "lrinorm/candidates.hpp"

namespace lrinorm {

struct VecProxResult {
    Vector x;                    ///< output in the original ordering
    CandidateSolution accepted;  ///< the (k1, k2) cell the output came from
    int candidate_solves = 0;    ///< scalar solves spent by the search
};

namespace detail {
inline int& last_solves_slot() {
    thread_local int n = 0;
    return n;
}
}  // namespace detail

/// Number of (k1, k2) scalar solves performed by the most recent
/// prox/projection call on this thread.
inline int count_candidate_solves() { return detail::last_solves_slot(); }

/// Euclidean projection of z onto { w : sum of the r largest w_i^2 <= c^2 },
/// the dual-norm ball of the low-rank inducing Frobenius norm. Signs and
/// ordering of z are preserved; the projection acts on magnitudes.
inline VecProxResult project_truncated_l2_ball(const Vector& z, int r, double c,
                                               SearchMode mode = SearchMode::BinarySearch) {
    if (!(c >= 0.0)) throw std::invalid_argument("project_truncated_l2_ball: radius c must be >= 0");
    const MagnitudeProfile p = make_profile(z);
    validate_rank(r, p.size(), "project_truncated_l2_ball");
    detail::Family f;
    f.scale = true;
    f.ball = true;
    f.c = c;
    f.r = r;
    auto res = detail::run_family(p, f, mode);
    detail::last_solves_slot() = res.solves;
    return {p.restore(res.w), res.accepted, res.solves};
}

/// Euclidean projection of z onto { w : sum of the r largest |w_i| <= c },
/// the Ky Fan r ball, dual to the low-rank inducing spectral norm.
inline VecProxResult project_kyfan_l1_ball(const Vector& z, int r, double c,
                                           SearchMode mode = SearchMode::BinarySearch) {
    if (!(c >= 0.0)) throw std::invalid_argument("project_kyfan_l1_ball: radius c must be >= 0");
    const MagnitudeProfile p = make_profile(z);
    validate_rank(r, p.size(), "project_kyfan_l1_ball");
    detail::Family f;
    f.scale = false;
    f.ball = true;
    f.c = c;
    f.r = r;
    auto res = detail::run_family(p, f, mode);
    detail::last_solves_slot() = res.solves;
    return {p.restore(res.w), res.accepted, res.solves};
}

/// Proximal mapping of gamma*N or (gamma/2)*N^2 for both norm flavors.
///
/// All four cases run one two-integer search on the conjugate side and take
/// the Moreau residual: the unsquared prox subtracts the projection onto the
/// gamma-scaled dual-gauge ball, the squared prox subtracts the prox of
/// (1/(2 gamma)) * (dual gauge)^2.
inline VecProxResult prox_vec(const Vector& z, const ScaledNorm& f,
                              SearchMode mode = SearchMode::BinarySearch) {
    const MagnitudeProfile p = make_profile(z);
    validate_rank(f.spec.r, p.size(), "prox_vec");
    if (!(f.gamma > 0.0)) throw std::invalid_argument("prox_vec: gamma must be positive");
    const double gamma = std::max(f.gamma, 1e-300);

    detail::Family fam;
    fam.scale = (f.spec.flavor == NormFlavor::FrobeniusR);
    fam.r = f.spec.r;
    if (f.squared) {
        fam.ball = false;
        fam.lambda = 1.0 / gamma;
    } else {
        fam.ball = true;
        fam.c = gamma;
    }
    auto res = detail::run_family(p, fam, mode);
    detail::last_solves_slot() = res.solves;

    // Moreau residual of the search output; the conjugate side was solved,
    // the prox is what is left of z. Rounding in w can leave equal-by-math
    // neighbours one ulp out of order, so re-impose the sorted cone.
    Vector xs = p.values_sorted - res.w;
    for (Index i = 1; i < xs.size(); ++i) xs[i] = std::min(xs[i], xs[i - 1]);
    return {p.restore(xs), res.accepted, res.solves};
}

/// Candidate count ceiling of the exhaustive sweep.
inline double enumerate_solve_bound(int q, int r) {
    return static_cast<double>(r) * (q - r) + q + 1.0;
}

/// Candidate count ceiling of the nested binary search.
inline double binary_solve_bound(int q, int r) {
    return 4.0 * (1.0 + std::log2(static_cast<double>(r) + 1.0)) *
           (1.0 + std::log2(static_cast<double>(q - r) + 1.0));
}

}  // namespace lrinorm
