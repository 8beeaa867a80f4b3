#pragma once

#include "lrinorm/profile.hpp"

#include <cassert>

namespace lrinorm {

/// Which member of the low-rank inducing family.
///
/// FrobeniusR is the dual norm of the truncated-l2 gauge (l2 norm of the r
/// largest magnitudes); on vectors it is the k-support norm with k = r.
/// SpectralR is the dual norm of the truncated-l1 (Ky Fan r) gauge; its value
/// is max(largest magnitude, l1/r).
enum class NormFlavor { FrobeniusR, SpectralR };

enum class TruncEll { L1, L2 };

struct NormSpec {
    NormFlavor flavor = NormFlavor::FrobeniusR;
    int r = 1;
};

/// The scaled function whose prox is computed: gamma*N(.) or, with
/// squared = true, (gamma/2)*N(.)^2.
struct ScaledNorm {
    NormSpec spec;
    double gamma = 1.0;
    bool squared = false;
};

inline void validate_rank(int r, Index q, const char* where) {
    if (r < 1 || r > q)
        throw std::invalid_argument(std::string(where) + ": target rank r = " +
                                    std::to_string(r) + " out of range [1, " +
                                    std::to_string(q) + "]");
}

/// lp norm of the r largest magnitudes. O(1) given the profile.
inline double truncated_gauge(const MagnitudeProfile& p, TruncEll ell, int r) {
    validate_rank(r, p.size(), "truncated_gauge");
    return ell == TruncEll::L1 ? p.s1(r) : std::sqrt(p.s2(r));
}

inline TruncEll dual_gauge_ell(NormFlavor flavor) {
    return flavor == NormFlavor::FrobeniusR ? TruncEll::L2 : TruncEll::L1;
}

namespace detail {
/// Magnitude mass strictly after sorted position `lead`, summed backwards so
/// the small-tail cases come out exact instead of as a difference of two
/// large prefix sums.
inline double tail_mass(const MagnitudeProfile& p, int lead) {
    double t = 0.0;
    for (Index i = p.size() - 1; i >= lead; --i) t += p.values_sorted[i];
    return t;
}
}  // namespace detail

/// Split index s of the k-support evaluation: the unique s in {0,...,r-1}
/// with |z|_[r-s-1] > T/(s+1) >= |z|_[r-s], where T is the magnitude mass at
/// positions r-s..q and |z|_[0] = +inf. For the zero vector the window
/// accepts s = r-1. Optionally reports how many s values pass the window.
inline int ksupport_split(const MagnitudeProfile& p, int r, int* accept_count = nullptr) {
    const Index q = p.size();
    validate_rank(r, q, "ksupport_split");
    int found = -1;
    int count = 0;
    double tail = detail::tail_mass(p, r - 1);
    for (int s = 0; s < r; ++s) {
        const int lead = r - s - 1;  // entries kept quadratically
        const double level = tail / (s + 1);
        const bool hi_ok = (lead == 0) || (p.values_sorted[lead - 1] > level);
        const bool lo_ok = level >= p.values_sorted[lead];
        if (hi_ok && lo_ok) {
            ++count;
            if (found < 0) found = s;
        }
        if (lead >= 1) tail += p.values_sorted[lead - 1];
    }
    if (accept_count) *accept_count = count;
    assert(count == 1 && "k-support split window accepted other than exactly once");
    if (found < 0) {
        // Only reachable through floating-point rounding at a window edge;
        // fall back to the flat-vector convention.
        found = r - 1;
    }
    return found;
}

/// Value of the low-rank inducing norm.
inline double norm_value(const MagnitudeProfile& p, const NormSpec& spec) {
    const Index q = p.size();
    validate_rank(spec.r, q, "norm_value");
    if (spec.flavor == NormFlavor::SpectralR) {
        return std::max(p.values_sorted[0], p.s1(q) / spec.r);
    }
    const int s = ksupport_split(p, spec.r);
    const int lead = spec.r - s - 1;
    const double tail = detail::tail_mass(p, lead);
    return std::sqrt(p.s2(lead) + tail * tail / (s + 1));
}

/// Value of the dual norm, i.e. the truncated gauge the flavor is dual to.
inline double dual_norm_value(const MagnitudeProfile& p, const NormSpec& spec) {
    return truncated_gauge(p, dual_gauge_ell(spec.flavor), spec.r);
}

/// gamma*N(z) or (gamma/2)*N(z)^2 depending on the squared flag.
inline double scaled_norm_value(const MagnitudeProfile& p, const ScaledNorm& f) {
    const double n = norm_value(p, f.spec);
    return f.squared ? 0.5 * f.gamma * n * n : f.gamma * n;
}

inline double norm_value(const Vector& z, const NormSpec& spec) {
    return norm_value(make_profile(z), spec);
}

inline double dual_norm_value(const Vector& z, const NormSpec& spec) {
    return dual_norm_value(make_profile(z), spec);
}

inline double scaled_norm_value(const Vector& z, const ScaledNorm& f) {
    return scaled_norm_value(make_profile(z), f);
}

}  // namespace lrinorm
