#pragma once

#include "lrinorm/norms.hpp"

#include <cstdint>
#include <optional>

namespace lrinorm {

enum class SearchMode { Enumerate, BinarySearch };

/// One point of the two-integer search in sorted magnitude space: sorted
/// entries 1..k1 form the strictly shrunk top region, entries k1+1..k2 share
/// the plateau level t, entries k2+1..q are untouched. mu is the multiplier
/// (soft-threshold level for the shift families, (1-u)/u for the scaled
/// families). k1 == k2 encodes an empty plateau.
struct CandidateSolution {
    int k1 = 0;
    int k2 = 0;
    double mu = 0.0;
    double t = 0.0;
    bool feasible = false;
    double objective = 0.0;
};

namespace detail {

constexpr double kFeasWindow = 1e-12;  // feasibility window, times magnitude scale
constexpr double kSolveTol = 1e-14;    // scalar-solve residual target
constexpr double kUniqueTol = 1e-9;    // accepted candidates must agree to this, times scale

enum class CellKind : std::uint8_t { Plateau, NoPlateau, Floor, Zero, Identity };

struct Cell {
    CellKind kind = CellKind::Plateau;
    int k1 = 0;
    int k2 = 0;
    double mu = 0.0;  // shift amount / Lagrange multiplier
    double u = 1.0;   // top-block factor 1/(1+mu), scale families only
    double t = 0.0;   // plateau level; NoPlateau stores the last shrunk value
    bool solvable = false;
};

/// The four sorted-space problems share one three-region template.
/// Scale families multiply the top block by u = 1/(1+mu), shift families
/// subtract mu from it. Ball families determine mu from the active gauge
/// constraint of radius c; prox families carry the weight lambda, and the
/// shift-prox family couples mu = lambda * (top-r sum of the output).
struct Family {
    bool scale = true;
    bool ball = true;
    double c = 0.0;
    double lambda = 0.0;
    int r = 1;
};

struct SortedCtx {
    const MagnitudeProfile& p;
    int q;
    double scale;
    double tol;

    explicit SortedCtx(const MagnitudeProfile& prof)
        : p(prof),
          q(static_cast<int>(prof.size())),
          scale(prof.magnitude_scale()),
          tol(kFeasWindow * prof.magnitude_scale()) {}

    double z(int i) const { return p.values_sorted[i - 1]; }  // 1-based
    double S1(int i) const { return p.s1(i); }
    double S2(int i) const { return p.s2(i); }
};

inline double transformed(const Family& f, const Cell& cell, double v) {
    return f.scale ? cell.u * v : v - cell.mu;
}

/// Plateau-cell scalar solve. The plateau-mass equation
///   S1[k2] - S1[k1] - (k2-k1) t = mu t (r-k1)        (scale families)
///   S1[k2] - S1[k1] - (k2-k1) t = mu (r-k1)          (shift families)
/// pins t given mu; ball families additionally pin mu through the active
/// gauge constraint, the shift-prox family through mu = lambda * top-r sum.
inline Cell solve_plateau(const SortedCtx& c, const Family& f, int k1, int k2) {
    Cell cell;
    cell.kind = CellKind::Plateau;
    cell.k1 = k1;
    cell.k2 = k2;
    const double m = static_cast<double>(f.r - k1);  // theta budget, >= 1 here
    const double dS1 = c.S1(k2) - c.S1(k1);

    if (f.scale && f.ball) {
        // Solve u^2 S2[k1] + m t(u)^2 = c^2 on u in (0,1],
        // t(u) = u dS1 / (m + u d); the left side is increasing in u.
        const double a = c.S2(k1);
        const double d = static_cast<double>(k2 - f.r);
        const double cc = f.c;
        auto plateau_t = [&](double u) { return u * dS1 / (m + u * d); };
        auto gauge_sq = [&](double u) {
            const double t = plateau_t(u);
            return u * u * a + m * t * t;
        };
        if (gauge_sq(1.0) < cc * cc) return cell;  // would need mu < 0
        double u;
        if (dS1 == 0.0) {
            u = (a > 0.0) ? std::min(1.0, cc / std::sqrt(a)) : 1.0;
        } else if (a == 0.0) {
            const double t = cc / std::sqrt(m);
            const double den = dS1 - t * d;
            if (!(den > 0.0)) return cell;
            u = std::min(1.0, t * m / den);
        } else {
            // Safeguarded Newton, bracket [lo, hi] kept valid throughout.
            double lo = 0.0, hi = 1.0;
            const double t1 = plateau_t(1.0);
            u = std::min(1.0, cc / std::sqrt(a + m * t1 * t1));
            for (int it = 0; it < 200; ++it) {
                const double t = plateau_t(u);
                const double phi = u * u * a + m * t * t - cc * cc;
                if (phi > 0.0) hi = u; else lo = u;
                if (std::abs(phi) <= kSolveTol * cc * cc) break;
                const double dt = dS1 * m / ((m + u * d) * (m + u * d));
                const double dphi = 2.0 * u * a + 2.0 * m * t * dt;
                double next = (dphi > 0.0) ? u - phi / dphi : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (std::abs(next - u) <= 1e-17 * std::max(1.0, u)) { u = next; break; }
                u = next;
            }
        }
        cell.u = u;
        cell.mu = 1.0 / u - 1.0;
        cell.t = plateau_t(u);
        cell.solvable = true;
        return cell;
    }

    if (!f.scale && f.ball) {
        const double D = static_cast<double>(k1) * (k2 - k1) + m * m;
        cell.t = (m * (f.c - c.S1(k1)) + k1 * dS1) / D;
        cell.mu = (dS1 - (k2 - k1) * cell.t) / m;
        cell.solvable = true;
        return cell;
    }

    if (f.scale && !f.ball) {
        cell.u = 1.0 / (1.0 + f.lambda);
        cell.mu = f.lambda;
        cell.t = dS1 / ((k2 - k1) + f.lambda * m);
        cell.solvable = true;
        return cell;
    }

    const double one = 1.0 + f.lambda * k1;
    const double den = (k2 - k1) * one + f.lambda * m * m;
    cell.t = (dS1 * one - f.lambda * m * c.S1(k1)) / den;
    cell.mu = f.lambda * (c.S1(k1) + m * cell.t) / one;
    cell.solvable = true;
    return cell;
}

/// Empty-plateau cell (k1 = k2 = r): the whole top block is shrunk, the tail
/// untouched. cell.t records the transformed value of entry r.
inline Cell solve_noplateau(const SortedCtx& c, const Family& f) {
    Cell cell;
    cell.kind = CellKind::NoPlateau;
    cell.k1 = f.r;
    cell.k2 = f.r;
    const int r = f.r;
    if (f.scale && f.ball) {
        const double s2r = c.S2(r);
        if (!(s2r > 0.0)) return cell;  // zero top block, unreachable in the active path
        cell.u = f.c / std::sqrt(s2r);
        cell.mu = 1.0 / cell.u - 1.0;
        cell.t = cell.u * c.z(r);
    } else if (!f.scale && f.ball) {
        cell.mu = (c.S1(r) - f.c) / r;
        cell.t = c.z(r) - cell.mu;
    } else if (f.scale && !f.ball) {
        cell.u = 1.0 / (1.0 + f.lambda);
        cell.mu = f.lambda;
        cell.t = cell.u * c.z(r);
    } else {
        cell.mu = f.lambda * c.S1(r) / (1.0 + f.lambda * r);
        cell.t = c.z(r) - cell.mu;
    }
    cell.solvable = true;
    return cell;
}

/// Zero-plateau cell of the shift families: top k1 entries soft-thresholded,
/// everything after them set to zero.
inline Cell solve_floor(const SortedCtx& c, const Family& f, int k1) {
    Cell cell;
    cell.kind = CellKind::Floor;
    cell.k1 = k1;
    cell.k2 = c.q;
    cell.t = 0.0;
    cell.mu = f.ball ? (c.S1(k1) - f.c) / k1
                     : f.lambda * c.S1(k1) / (1.0 + f.lambda * k1);
    cell.solvable = true;
    return cell;
}

inline bool cell_feasible(const SortedCtx& c, const Family& f, const Cell& cell) {
    if (!cell.solvable) return false;
    const double tol = c.tol;
    switch (cell.kind) {
        case CellKind::Plateau: {
            if (cell.t < -tol) return false;
            if (f.scale) {
                if (!(cell.u > 0.0) || cell.u > 1.0 + 1e-14) return false;
            } else if (cell.mu < -tol) {
                return false;
            }
            const double t = std::max(cell.t, 0.0);
            if (cell.k1 >= 1 && transformed(f, cell, c.z(cell.k1)) < t - tol) return false;
            if (transformed(f, cell, c.z(cell.k1 + 1)) > t + tol) return false;
            if (c.z(cell.k2) < t - tol) return false;
            if (cell.k2 < c.q && c.z(cell.k2 + 1) > t + tol) return false;
            return true;
        }
        case CellKind::NoPlateau: {
            if (cell.t < -tol) return false;
            if (f.scale) {
                if (!(cell.u > 0.0) || cell.u > 1.0 + 1e-14) return false;
            } else if (cell.mu < -tol) {
                return false;
            }
            if (f.r < c.q && c.z(f.r + 1) > std::max(cell.t, 0.0) + tol) return false;
            return true;
        }
        case CellKind::Floor: {
            if (cell.mu < -tol) return false;
            if (cell.k1 >= 1 && c.z(cell.k1) < cell.mu - tol) return false;
            if (cell.k1 < c.q && c.z(cell.k1 + 1) > cell.mu + tol) return false;
            const double m = static_cast<double>(f.r - cell.k1);
            const double tail = c.S1(c.q) - c.S1(cell.k1);
            if (tail > cell.mu * m + tol * std::max(1.0, m)) return false;
            return true;
        }
        case CellKind::Zero:
            return f.ball && f.c <= 0.0;
        case CellKind::Identity:
            return true;
    }
    return false;
}

/// Canonical sorted-space output of a cell: regions materialized, the plateau
/// clamped into [0, z_(k2)], the whole vector forced non-increasing.
inline Vector build_w(const SortedCtx& c, const Family& f, const Cell& cell) {
    Vector w(c.q);
    switch (cell.kind) {
        case CellKind::Identity:
            for (int i = 1; i <= c.q; ++i) w[i - 1] = c.z(i);
            return w;
        case CellKind::Zero:
            w.setZero();
            return w;
        case CellKind::Plateau: {
            const double t = std::min(std::max(cell.t, 0.0), c.z(cell.k2));
            for (int i = 1; i <= cell.k1; ++i) w[i - 1] = std::max(0.0, transformed(f, cell, c.z(i)));
            for (int i = cell.k1 + 1; i <= cell.k2; ++i) w[i - 1] = t;
            for (int i = cell.k2 + 1; i <= c.q; ++i) w[i - 1] = c.z(i);
            break;
        }
        case CellKind::NoPlateau: {
            for (int i = 1; i <= f.r; ++i) w[i - 1] = std::max(0.0, transformed(f, cell, c.z(i)));
            for (int i = f.r + 1; i <= c.q; ++i) w[i - 1] = c.z(i);
            break;
        }
        case CellKind::Floor: {
            for (int i = 1; i <= cell.k1; ++i) w[i - 1] = std::max(0.0, c.z(i) - cell.mu);
            for (int i = cell.k1 + 1; i <= c.q; ++i) w[i - 1] = 0.0;
            break;
        }
    }
    for (int i = 1; i < c.q; ++i) w[i] = std::min(w[i], w[i - 1]);
    return w;
}

/// 0.5 * ||w - z||^2 plus, for the prox families, the penalty at w.
inline double cell_objective(const SortedCtx& c, const Family& f, const Vector& w) {
    double dist = 0.0;
    for (int i = 1; i <= c.q; ++i) {
        const double d = w[i - 1] - c.z(i);
        dist += d * d;
    }
    double obj = 0.5 * dist;
    if (!f.ball) {
        if (f.scale) {
            double g2 = 0.0;
            for (int i = 0; i < f.r; ++i) g2 += w[i] * w[i];
            obj += 0.5 * f.lambda * g2;
        } else {
            double g1 = 0.0;
            for (int i = 0; i < f.r; ++i) g1 += w[i];
            obj += 0.5 * f.lambda * g1 * g1;
        }
    }
    return obj;
}

inline CandidateSolution to_candidate(const SortedCtx& c, const Family& f, const Cell& cell,
                                      const Vector& w) {
    CandidateSolution out;
    out.k1 = cell.k1;
    out.k2 = cell.k2;
    out.mu = std::max(cell.mu, 0.0);
    out.t = cell.kind == CellKind::NoPlateau ? 0.0 : std::max(cell.t, 0.0);
    out.feasible = true;
    out.objective = cell_objective(c, f, w);
    return out;
}

struct SearchOutcome {
    Vector w;  // sorted space
    CandidateSolution accepted;
    int solves = 0;
};

/// Reference mode: sweep every candidate cell in lexicographic (k1, k2)
/// order, accept the first feasible one, and require that any other feasible
/// cell describes the same point.
inline SearchOutcome search_enumerate(const SortedCtx& c, const Family& f) {
    int solves = 0;
    std::optional<Cell> first;
    Vector first_w;

    auto consider = [&](const Cell& cell) {
        if (!cell_feasible(c, f, cell)) return;
        Vector w = build_w(c, f, cell);
        if (!first) {
            first = cell;
            first_w = std::move(w);
            return;
        }
        const double dmax = (w - first_w).cwiseAbs().maxCoeff();
        if (dmax > kUniqueTol * c.scale)
            throw std::logic_error("candidate search: two feasible candidates disagree (k1,k2)=(" +
                                   std::to_string(cell.k1) + "," + std::to_string(cell.k2) + ")");
    };

    const int r = f.r;
    for (int k1 = 0; k1 < r; ++k1) {
        for (int k2 = r + 1; k2 <= c.q; ++k2) {
            ++solves;
            consider(solve_plateau(c, f, k1, k2));
        }
        if (!f.scale && k1 >= 1 && k1 <= c.q - 1) {
            ++solves;
            consider(solve_floor(c, f, k1));
        }
    }
    ++solves;
    consider(solve_noplateau(c, f));
    if (!f.scale && r <= c.q - 1) {
        ++solves;
        consider(solve_floor(c, f, r));
    }

    if (!first) throw std::logic_error("candidate search: no feasible candidate");
    SearchOutcome out;
    out.accepted = to_candidate(c, f, *first, first_w);
    out.w = std::move(first_w);
    out.solves = solves;
    return out;
}

enum class Dir { Accept, Left, Right };

struct ProbeResult {
    Cell cell;
    Dir dir = Dir::Right;
};

/// Resolve the plateau end for a fixed k1 (binary search on k2), then judge
/// the k1 boundary. The window violations give the move direction: an entry
/// pushing past the plateau from the tail or a plateau level heading below
/// zero extends the plateau; a plateau losing its last entry shrinks it.
inline ProbeResult probe_k1(const SortedCtx& c, const Family& f, int k1, int& solves) {
    const int r = f.r;
    const double tol = c.tol;

    if (k1 == r) {
        ++solves;
        Cell cell = solve_noplateau(c, f);
        if (!cell.solvable) return {cell, Dir::Left};
        if (cell.t < -tol) return {cell, Dir::Left};
        if (r < c.q && c.z(r + 1) > std::max(cell.t, 0.0) + tol) return {cell, Dir::Left};
        if (!f.scale && f.ball && cell.mu < -tol) return {cell, Dir::Left};
        return {cell, Dir::Accept};
    }

    // First-true search: ties can open a small interval of acceptable k2,
    // land on its left end like the enumerate sweep does.
    int lo = r + 1, hi = c.q;
    std::optional<Cell> found;
    while (lo <= hi) {
        const int mid = lo + (hi - lo) / 2;
        ++solves;
        Cell cell = solve_plateau(c, f, k1, mid);
        if (!cell.solvable) { hi = mid - 1; continue; }             // plateau too dilute to be active
        if (!f.scale && cell.t < -tol) { lo = mid + 1; continue; }  // level heading below zero
        const double t = std::max(cell.t, 0.0);
        if (mid < c.q && c.z(mid + 1) > t + tol) { lo = mid + 1; continue; }
        if (c.z(mid) < t - tol) { hi = mid - 1; continue; }
        if (!f.scale && f.ball && cell.mu < -tol) { hi = mid - 1; continue; }
        found = cell;
        hi = mid - 1;
    }

    if (!found) {
        if (!f.scale && lo > c.q) {
            // Ran off the right edge: the plateau sits at zero. The k1 = 0
            // floor is the all-zero point, reachable only from z = 0, which
            // other cells already accept.
            if (k1 == 0) {
                ProbeResult p;
                p.dir = Dir::Right;
                return p;
            }
            ++solves;
            Cell cell = solve_floor(c, f, k1);
            if (cell.mu < -tol) return {cell, Dir::Right};
            if (cell.k1 < c.q && c.z(cell.k1 + 1) > cell.mu + tol) return {cell, Dir::Right};
            if (cell.k1 >= 1 && c.z(cell.k1) < cell.mu - tol) return {cell, Dir::Left};
            const double m = static_cast<double>(r - k1);
            const double tail = c.S1(c.q) - c.S1(k1);
            if (tail > cell.mu * m + tol * std::max(1.0, m)) return {cell, Dir::Right};
            return {cell, Dir::Accept};
        }
        // Plateau vanished for this k1: the split point lies further right.
        ProbeResult p;
        p.dir = Dir::Right;
        return p;
    }

    const Cell& cell = *found;
    const double t = std::max(cell.t, 0.0);
    if (transformed(f, cell, c.z(k1 + 1)) > t + tol) return {cell, Dir::Right};
    if (k1 >= 1 && transformed(f, cell, c.z(k1)) < t - tol) return {cell, Dir::Left};
    return {cell, Dir::Accept};
}

inline SearchOutcome search_binary(const SortedCtx& c, const Family& f) {
    int solves = 0;
    int lo = 0, hi = f.r;
    std::optional<Cell> accepted;
    while (lo <= hi) {
        const int mid = lo + (hi - lo) / 2;
        const ProbeResult p = probe_k1(c, f, mid, solves);
        if (p.dir == Dir::Accept) {
            accepted = p.cell;  // keep hunting for a smaller accepted k1
            hi = mid - 1;
            continue;
        }
        if (p.dir == Dir::Right) lo = mid + 1; else hi = mid - 1;
    }
    if (!accepted) throw std::logic_error("binary search exhausted the k1 range without acceptance");
    if (!cell_feasible(c, f, *accepted))
        throw std::logic_error("binary search accepted an infeasible cell");
    Vector w = build_w(c, f, *accepted);
    SearchOutcome out;
    out.accepted = to_candidate(c, f, *accepted, w);
    out.w = std::move(w);
    out.solves = solves;
    return out;
}

/// Shared entry point. Ball families short-circuit the inactive case (z is
/// already inside the ball) and the zero-radius ball, whose only point is
/// the origin.
inline SearchOutcome run_family(const MagnitudeProfile& p, const Family& f, SearchMode mode) {
    SortedCtx c(p);
    validate_rank(f.r, c.q, "candidate search");
    if (f.ball) {
        if (f.c <= 0.0) {
            Cell zero;
            zero.kind = CellKind::Zero;
            zero.k1 = 0;
            zero.k2 = c.q;
            zero.solvable = true;
            Vector w = build_w(c, f, zero);
            SearchOutcome out;
            out.accepted = to_candidate(c, f, zero, w);
            out.w = std::move(w);
            out.solves = 1;
            return out;
        }
        const double gauge = f.scale ? std::sqrt(c.S2(f.r)) : c.S1(f.r);
        if (gauge <= f.c) {
            Cell id;
            id.kind = CellKind::Identity;
            id.k1 = 0;
            id.k2 = 0;
            id.solvable = true;
            Vector w = build_w(c, f, id);
            SearchOutcome out;
            out.accepted = to_candidate(c, f, id, w);
            out.w = std::move(w);
            out.solves = 0;
            return out;
        }
    }
    return mode == SearchMode::Enumerate ? search_enumerate(c, f) : search_binary(c, f);
}

}  // namespace detail
}  // namespace lrinorm
