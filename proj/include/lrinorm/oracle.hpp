#pragma once

#include "lrinorm/norms.hpp"
#include "lrinorm/rng.hpp"

namespace lrinorm {

/// Runtime optimality check for x = prox_f(z), built from the subgradient
/// characterization. Unsquared f = gamma*N: the residual z - x must lie in
/// the gamma-scaled dual-gauge ball and pair exactly with x:
///   g(z-x) <= gamma   and   <z-x, x> = gamma * N(x).
/// Squared f = (gamma/2)*N^2: the bound tightens to gamma*N(x) and the
/// pairing to gamma*N(x)^2.
struct Certificate {
    double dual_residual = 0.0;       ///< violation of the dual-gauge bound
    double alignment_residual = 0.0;  ///< violation of the pairing equality
    bool pass = false;
    double scale = 1.0;               ///< max(1, ||z||); residuals are judged against tol*scale
};

inline Certificate certify_prox(const Vector& z, const Vector& x, const ScaledNorm& f,
                                double tol = 1e-10) {
    if (z.size() != x.size()) throw std::invalid_argument("certify_prox: size mismatch");
    const MagnitudeProfile px = make_profile(x);
    const MagnitudeProfile pd = make_profile(Vector(z - x));
    validate_rank(f.spec.r, px.size(), "certify_prox");

    const double nx = norm_value(px, f.spec);
    const double gd = dual_norm_value(pd, f.spec);
    const double pairing = (z - x).dot(x);

    Certificate cert;
    cert.scale = std::max(1.0, z.norm());
    if (f.squared) {
        cert.dual_residual = std::max(0.0, gd - f.gamma * nx);
        cert.alignment_residual = std::abs(pairing - f.gamma * nx * nx);
    } else {
        cert.dual_residual = std::max(0.0, gd - f.gamma);
        cert.alignment_residual = std::abs(pairing - f.gamma * nx);
    }
    cert.pass = cert.dual_residual <= tol * cert.scale &&
                cert.alignment_residual <= tol * cert.scale;
    return cert;
}

/// Same check for w = projection of z onto the dual-gauge ball of radius c:
/// w must be feasible and <z-w, w> must attain c times the support value.
inline Certificate certify_ball_projection(const Vector& z, const Vector& w, const NormSpec& spec,
                                           double c, double tol = 1e-10) {
    if (z.size() != w.size()) throw std::invalid_argument("certify_ball_projection: size mismatch");
    const MagnitudeProfile pw = make_profile(w);
    const MagnitudeProfile pd = make_profile(Vector(z - w));
    Certificate cert;
    cert.scale = std::max(1.0, z.norm());
    cert.dual_residual = std::max(0.0, truncated_gauge(pw, dual_gauge_ell(spec.flavor), spec.r) - c);
    cert.alignment_residual = std::abs((z - w).dot(w) - c * norm_value(pd, spec));
    cert.pass = cert.dual_residual <= tol * cert.scale &&
                cert.alignment_residual <= tol * cert.scale;
    return cert;
}

/// Sampled local-optimality probe: x must not lose to x + delta*d on the prox
/// objective for random unit directions d and shrinking steps. For q = 1 the
/// two possible directions are checked outright.
inline bool perturbation_probe(const Vector& z, const Vector& x, const ScaledNorm& f, int trials,
                               double radius, std::uint64_t seed = 1234567) {
    if (trials < 1 || !(radius > 0.0))
        throw std::invalid_argument("perturbation_probe: trials >= 1 and radius > 0 required");
    const Index q = z.size();
    auto objective = [&](const Vector& v) {
        return 0.5 * (v - z).squaredNorm() + scaled_norm_value(v, f);
    };
    const double base = objective(x);
    const double slack = 1e-12 * std::max(1.0, z.squaredNorm());
    Rng rng = Rng(seed).stream("perturbation_probe");
    const int dirs = q == 1 ? 2 : trials;
    for (int tr = 0; tr < dirs; ++tr) {
        Vector d(q);
        if (q == 1) {
            d[0] = tr == 0 ? 1.0 : -1.0;
        } else {
            for (Index i = 0; i < q; ++i) d[i] = rng.normal();
            const double n = d.norm();
            if (n == 0.0) continue;
            d /= n;
        }
        for (double delta : {radius, radius / 10.0, radius / 100.0}) {
            if (base > objective(x + delta * d) + slack) return false;
        }
    }
    return true;
}

namespace detail {

/// Weighted isotonic regression by pool-adjacent-violators:
///   minimize sum_i a_i (w_i - b_i)^2  s.t.  w_1 >= w_2 >= ... >= w_q >= 0.
/// Exact in O(q); the nonnegativity floor is a clip of the block means.
inline Vector isotonic_nonincreasing(const Vector& b, const Vector& a) {
    const Index q = b.size();
    std::vector<double> val(q), wt(q);
    std::vector<Index> len(q);
    Index nb = 0;
    for (Index i = 0; i < q; ++i) {
        double v = b[i], w = a[i];
        Index l = 1;
        while (nb > 0 && val[nb - 1] <= v) {
            v = (wt[nb - 1] * val[nb - 1] + w * v) / (wt[nb - 1] + w);
            w += wt[nb - 1];
            l += len[nb - 1];
            --nb;
        }
        val[nb] = v;
        wt[nb] = w;
        len[nb] = l;
        ++nb;
    }
    Vector out(q);
    Index pos = 0;
    for (Index k = 0; k < nb; ++k) {
        const double v = std::max(0.0, val[k]);
        for (Index j = 0; j < len[k]; ++j) out[pos++] = v;
    }
    return out;
}

/// min 0.5||w - z||^2 + (mu/2) * sum_{i<=r} w_i^2 over the sorted cone.
inline Vector iso_scale_step(const Vector& zs, int r, double mu) {
    const Index q = zs.size();
    Vector a(q), b(q);
    for (Index i = 0; i < q; ++i) {
        if (i < r) {
            a[i] = 1.0 + mu;
            b[i] = zs[i] / (1.0 + mu);
        } else {
            a[i] = 1.0;
            b[i] = zs[i];
        }
    }
    return isotonic_nonincreasing(b, a);
}

/// min 0.5||w - z||^2 + mu * sum_{i<=r} w_i over the sorted cone.
inline Vector iso_shift_step(const Vector& zs, int r, double mu) {
    const Index q = zs.size();
    Vector a = Vector::Ones(q), b(q);
    for (Index i = 0; i < q; ++i) b[i] = i < r ? zs[i] - mu : zs[i];
    return isotonic_nonincreasing(b, a);
}

struct RefOutcome {
    Vector w;
    int iterations = 0;
};

/// Projection onto {sum of the r largest squares <= c^2} for sorted
/// nonnegative input: 1-D bisection on the multiplier around exact isotonic
/// inner solves.
inline RefOutcome ref_project_l2_sorted(const Vector& zs, int r, double c) {
    double gauge2 = 0.0;
    for (int i = 0; i < r; ++i) gauge2 += zs[i] * zs[i];
    if (gauge2 <= c * c) return {zs, 0};
    if (c <= 0.0) return {Vector::Zero(zs.size()), 0};
    auto violation = [&](double mu) {
        const Vector w = iso_scale_step(zs, r, mu);
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += w[i] * w[i];
        return s - c * c;
    };
    int iters = 0;
    double hi = 1.0;
    while (violation(hi) > 0.0 && iters < 2100) {
        hi *= 4.0;
        ++iters;
    }
    double lo = 0.0;
    for (int it = 0; it < 150; ++it, ++iters) {
        const double mid = 0.5 * (lo + hi);
        if (violation(mid) > 0.0) lo = mid; else hi = mid;
    }
    return {iso_scale_step(zs, r, hi), iters};
}

/// Projection onto {sum of the r largest magnitudes <= c}, sorted input.
inline RefOutcome ref_project_l1_sorted(const Vector& zs, int r, double c) {
    double gauge = 0.0;
    for (int i = 0; i < r; ++i) gauge += zs[i];
    if (gauge <= c) return {zs, 0};
    if (c <= 0.0) return {Vector::Zero(zs.size()), 0};
    auto violation = [&](double mu) {
        const Vector w = iso_shift_step(zs, r, mu);
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += w[i];
        return s - c;
    };
    int iters = 0;
    double hi = std::max(1.0, zs[0]);
    while (violation(hi) > 0.0 && iters < 2100) {
        hi *= 4.0;
        ++iters;
    }
    double lo = 0.0;
    for (int it = 0; it < 150; ++it, ++iters) {
        const double mid = 0.5 * (lo + hi);
        if (violation(mid) > 0.0) lo = mid; else hi = mid;
    }
    return {iso_shift_step(zs, r, hi), iters};
}

/// prox of (lambda/2) * sum of the r largest squares, sorted input. One exact
/// isotonic solve.
inline RefOutcome ref_prox_topk_sq_sorted(const Vector& zs, int r, double lambda) {
    return {iso_scale_step(zs, r, lambda), 1};
}

/// prox of (lambda/2) * (sum of the r largest magnitudes)^2, sorted input:
/// bisection on the coupled top-r sum.
inline RefOutcome ref_prox_topk_sum_sq_sorted(const Vector& zs, int r, double lambda) {
    double s1r = 0.0;
    for (int i = 0; i < r; ++i) s1r += zs[i];
    if (s1r == 0.0) return {Vector::Zero(zs.size()), 0};
    auto excess = [&](double g) {
        const Vector w = iso_shift_step(zs, r, lambda * g);
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += w[i];
        return s - g;
    };
    double lo = 0.0, hi = s1r;
    int iters = 0;
    for (int it = 0; it < 150; ++it, ++iters) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) lo = mid; else hi = mid;
    }
    return {iso_shift_step(zs, r, lambda * hi), iters};
}

}  // namespace detail

struct SlowProxResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
};

/// Slow independent reference for the proximal mappings: the conjugate-side
/// problem is solved as an isotonic regression over the sorted cone (exact
/// pool-adjacent-violators), with a one-dimensional bisection supplying the
/// multiplier where one is needed, and the prox recovered as the Moreau
/// residual. No candidate cells, windows or integer searches are involved.
inline SlowProxResult reference_prox_slow(const Vector& z, const ScaledNorm& f) {
    const Index q = z.size();
    if (q > 50) throw std::invalid_argument("reference_prox_slow: desk-scale only (q <= 50)");
    validate_rank(f.spec.r, q, "reference_prox_slow");
    if (!(f.gamma > 0.0)) throw std::invalid_argument("reference_prox_slow: gamma must be positive");

    const MagnitudeProfile p = make_profile(z);
    const Vector& zs = p.values_sorted;
    const int r = f.spec.r;
    detail::RefOutcome ref;
    if (f.spec.flavor == NormFlavor::FrobeniusR) {
        ref = f.squared ? detail::ref_prox_topk_sq_sorted(zs, r, 1.0 / f.gamma)
                        : detail::ref_project_l2_sorted(zs, r, f.gamma);
    } else {
        ref = f.squared ? detail::ref_prox_topk_sum_sq_sorted(zs, r, 1.0 / f.gamma)
                        : detail::ref_project_l1_sorted(zs, r, f.gamma);
    }
    SlowProxResult out;
    out.x = p.restore(Vector(zs - ref.w));
    out.iterations = std::max(1, ref.iterations);
    out.converged = true;
    return out;
}

}  // namespace lrinorm
