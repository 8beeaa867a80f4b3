#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrinorm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A vector split into non-increasing magnitudes plus everything needed to
/// restore the original ordering exactly: per-entry signs, the sorting
/// permutation, and running sums of the sorted magnitudes and their squares.
/// All sorted-space algorithms in this library operate on this structure.
struct MagnitudeProfile {
    Vector values_sorted;     ///< magnitudes, values_sorted[0] >= ... >= values_sorted[q-1] >= 0
    Vector signs;             ///< +1/-1 per *original* entry
    std::vector<Index> perm;  ///< sorted position -> original position
    Vector prefix_abs;        ///< prefix_abs[i] = sum of the i largest magnitudes (length q+1, [0] = 0)
    Vector prefix_sq;         ///< prefix_sq[i]  = sum of their squares (length q+1, [0] = 0)

    Index size() const { return values_sorted.size(); }

    /// Sum of the i largest magnitudes, s1(0) == 0.
    double s1(Index i) const { return prefix_abs[i]; }
    /// Sum of squares of the i largest magnitudes, s2(0) == 0.
    double s2(Index i) const { return prefix_sq[i]; }

    /// Magnitude scale used for relative tolerances: max(1, largest magnitude).
    double magnitude_scale() const {
        return size() > 0 ? std::max(1.0, values_sorted[0]) : 1.0;
    }

    /// Map sorted-space values back to the original ordering with signs applied.
    Vector restore(const Vector& sorted_vals) const {
        Vector out(size());
        for (Index i = 0; i < size(); ++i) {
            const Index j = perm[static_cast<std::size_t>(i)];
            out[j] = signs[j] * sorted_vals[i];
        }
        return out;
    }
};

/// Decompose z into a MagnitudeProfile. Ties in magnitude keep the original
/// order (stable sort), so the permutation round-trip is deterministic.
inline MagnitudeProfile make_profile(const Vector& z) {
    const Index q = z.size();
    if (q < 1) throw std::invalid_argument("make_profile: input vector is empty");
    for (Index i = 0; i < q; ++i) {
        if (!std::isfinite(z[i]))
            throw std::invalid_argument("make_profile: non-finite entry at index " +
                                        std::to_string(i));
    }

    MagnitudeProfile p;
    p.perm.resize(static_cast<std::size_t>(q));
    std::iota(p.perm.begin(), p.perm.end(), Index{0});
    std::stable_sort(p.perm.begin(), p.perm.end(), [&z](Index a, Index b) {
        return std::abs(z[a]) > std::abs(z[b]);
    });

    p.values_sorted.resize(q);
    p.signs.resize(q);
    for (Index i = 0; i < q; ++i) {
        const Index j = p.perm[static_cast<std::size_t>(i)];
        p.values_sorted[i] = std::abs(z[j]);
        p.signs[j] = std::signbit(z[j]) ? -1.0 : 1.0;
    }

    p.prefix_abs.resize(q + 1);
    p.prefix_sq.resize(q + 1);
    p.prefix_abs[0] = 0.0;
    p.prefix_sq[0] = 0.0;
    for (Index i = 0; i < q; ++i) {
        p.prefix_abs[i + 1] = p.prefix_abs[i] + p.values_sorted[i];
        p.prefix_sq[i + 1] = p.prefix_sq[i] + p.values_sorted[i] * p.values_sorted[i];
    }
    return p;
}

}  // namespace lrinorm
