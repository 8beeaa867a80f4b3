#pragma once

#include "lrinorm/mat_prox.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <utility>

namespace lrinorm {

struct SolverConfig {
    double tol = 1e-9;
    int max_iter = 100000;
    double gamma = 1.0;  ///< Douglas-Rachford prox scaling
    double alpha = 1.0;  ///< Douglas-Rachford relaxation, in (0, 2)
    bool accelerate = false;
    double rank_threshold = 1e-9;
    bool keep_trace = false;
    SearchMode mode = SearchMode::BinarySearch;
};

struct TracePoint {
    int iter = 0;
    double objective = 0.0;
    double residual = 0.0;
};

struct SolverReport {
    double objective = 0.0;
    double fixed_point_residual = 0.0;
    int iterations = 0;
    int numerical_rank = 0;
    double wall_time_ms = 0.0;
    bool converged = false;
    int monotonicity_warnings = 0;  ///< residual rose across a trailing 50-iteration window
    std::vector<TracePoint> trace;
};

/// A prox handle: apply(point, step) evaluates prox_{step*f}(point).
/// Indicators ignore the step.
struct ProxOracle {
    std::function<Matrix(const Matrix&, double)> apply;
    std::function<double(const Matrix&)> value;
    bool is_indicator = false;
};

struct SmoothTerm {
    std::function<double(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> gradient;
    double lipschitz = 1.0;
};

struct SolveResult {
    Matrix X;
    SolverReport report;
};

namespace detail {

class ResidualWindow {
  public:
    void push(double r) {
        buf_[head_ % kLen] = r;
        ++head_;
    }
    bool rising(double r) const { return head_ >= kLen && r > buf_[head_ % kLen]; }

  private:
    static constexpr int kLen = 50;
    double buf_[kLen] = {};
    std::size_t head_ = 0;
};

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Forward-backward splitting with step 1/L and optional Nesterov momentum.
/// Stops when the iterate movement drops below tol relative to the iterate
/// size; the report carries the composite fixed-point residual
/// ||x - prox_{g/L}(x - grad f(x)/L)|| / max(1, ||x||).
inline SolveResult prox_gradient(const SmoothTerm& f, const ProxOracle& g, const Matrix& x0,
                                 const SolverConfig& cfg) {
    if (!(f.lipschitz > 0.0)) throw std::invalid_argument("prox_gradient: L must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const double step = 1.0 / f.lipschitz;

    Matrix x = x0;
    Matrix y = x0;
    double tk = 1.0;
    SolverReport rep;
    detail::ResidualWindow window;

    for (int k = 1; k <= cfg.max_iter; ++k) {
        const Matrix& point = cfg.accelerate ? y : x;
        Matrix xn = g.apply(point - step * f.gradient(point), step);
        const double res = (xn - x).norm() / std::max(1.0, x.norm());
        if (cfg.keep_trace) rep.trace.push_back({k, f.value(xn) + g.value(xn), res});
        if (window.rising(res)) ++rep.monotonicity_warnings;
        window.push(res);
        if (cfg.accelerate) {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            y = xn + ((tk - 1.0) / tn) * (xn - x);
            tk = tn;
        }
        x = std::move(xn);
        rep.iterations = k;
        if (res <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.objective = f.value(x) + g.value(x);
    rep.fixed_point_residual = (x - g.apply(x - step * f.gradient(x), step)).norm() /
                               std::max(1.0, x.norm());
    rep.numerical_rank = numerical_rank(x, cfg.rank_threshold);
    rep.wall_time_ms = detail::elapsed_ms(t0);
    return {std::move(x), std::move(rep)};
}

/// Douglas-Rachford splitting:
///   x = proxA(z); y = proxB(2x - z); z <- z + alpha (y - x),
/// stopping when ||y - x|| <= tol * max(1, ||x||). The returned solution is
/// proxA of the final z, so indicator constraints hold exactly.
inline SolveResult douglas_rachford(const ProxOracle& proxA, const ProxOracle& proxB,
                                    const Matrix& z0, double gamma, double alpha,
                                    const SolverConfig& cfg) {
    if (!(gamma > 0.0)) throw std::invalid_argument("douglas_rachford: gamma must be positive");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("douglas_rachford: alpha must lie in (0, 2)");
    const auto t0 = std::chrono::steady_clock::now();

    Matrix z = z0;
    Matrix y_last;
    SolverReport rep;
    detail::ResidualWindow window;
    double initial_res = -1.0;

    for (int k = 1; k <= cfg.max_iter; ++k) {
        Matrix x = proxA.apply(z, gamma);
        Matrix y = proxB.apply(2.0 * x - z, gamma);
        const double res = (y - x).norm();
        z += alpha * (y - x);
        y_last = y;
        rep.iterations = k;
        if (cfg.keep_trace) rep.trace.push_back({k, proxA.value(x) + proxB.value(x), res});
        if (window.rising(res)) ++rep.monotonicity_warnings;
        window.push(res);
        if (initial_res < 0.0) initial_res = res;
        if (res > 1e6 * std::max(initial_res, 1e-300) && res > 1.0)
            throw std::runtime_error("douglas_rachford: diverged, residual " + std::to_string(res) +
                                     " from initial " + std::to_string(initial_res) + " at iteration " +
                                     std::to_string(k));
        rep.fixed_point_residual = res;
        if (res <= cfg.tol * std::max(1.0, x.norm())) {
            rep.converged = true;
            break;
        }
    }

    Matrix solution = proxA.apply(z, gamma);
    rep.objective = proxA.value(solution) + proxB.value(solution);
    // Rank is read off the proxB-side iterate: its inactive singular values
    // are exact zeros, while proxA's extraction re-adds O(tol) noise.
    rep.numerical_rank =
        numerical_rank(y_last.size() > 0 ? y_last : solution, cfg.rank_threshold);
    rep.wall_time_ms = detail::elapsed_ms(t0);
    return {std::move(solution), std::move(rep)};
}

/// Prox handle of the scaled low-rank inducing norm term.
inline ProxOracle make_norm_prox_oracle(const ScaledNorm& f, SearchMode mode = SearchMode::BinarySearch,
                                        double rank_threshold = 1e-9) {
    ProxOracle g;
    g.apply = [f, mode, rank_threshold](const Matrix& Z, double step) {
        ScaledNorm scaled = f;
        scaled.gamma = f.gamma * step;
        return matrix_prox(Z, scaled, mode, rank_threshold).X;
    };
    g.value = [f](const Matrix& X) { return matrix_scaled_norm_value(X, f); };
    return g;
}

/// Prox handle of 0.5||X - M||_F^2, optionally intersected with the entrywise
/// box [lo, hi]; both pieces are separable, so the prox is a clamp of the
/// per-entry minimizer.
inline ProxOracle make_quadratic_fit_prox(Matrix M,
                                          std::optional<std::pair<double, double>> box = {}) {
    if (box && !(box->first <= box->second))
        throw std::invalid_argument("make_quadratic_fit_prox: box bounds must satisfy lo <= hi");
    ProxOracle g;
    g.apply = [M, box](const Matrix& Z, double step) {
        Matrix X = (Z + step * M) / (1.0 + step);
        if (box) X = X.cwiseMax(box->first).cwiseMin(box->second);
        return X;
    };
    g.value = [M](const Matrix& X) { return 0.5 * (X - M).squaredNorm(); };
    return g;
}

/// Projection onto the affine set of matrices agreeing with M on the observed
/// entries: overwrite them, leave the rest alone.
inline ProxOracle make_observation_projection(Matrix M,
                                              std::vector<std::pair<Index, Index>> mask) {
    ProxOracle g;
    g.is_indicator = true;
    g.apply = [M = std::move(M), mask = std::move(mask)](const Matrix& Z, double) {
        Matrix X = Z;
        for (const auto& [i, j] : mask) X(i, j) = M(i, j);
        return X;
    };
    g.value = [](const Matrix&) { return 0.0; };
    return g;
}

enum class ProblemKind { MatrixCompletion, BoxConstrainedLowRankApprox, RegularizedLeastSquares };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::MatrixCompletion;
    Matrix M;
    std::vector<std::pair<Index, Index>> mask;  ///< observed entries, 0-based
    ScaledNorm norm;
    std::optional<std::pair<double, double>> box;
};

inline void validate_problem(const ProblemSpec& spec) {
    if (spec.M.size() == 0) throw std::invalid_argument("problem: data matrix is empty");
    for (const auto& [i, j] : spec.mask) {
        if (i < 0 || i >= spec.M.rows() || j < 0 || j >= spec.M.cols())
            throw std::invalid_argument("problem: mask index (" + std::to_string(i + 1) + ", " +
                                        std::to_string(j + 1) + ") out of range");
    }
    if (spec.box && !(spec.box->first <= spec.box->second))
        throw std::invalid_argument("problem: box bounds must satisfy lo <= hi");
    validate_rank(spec.norm.spec.r, std::min(spec.M.rows(), spec.M.cols()), "problem");
}

/// minimize the norm term subject to X agreeing with M on the observed set,
/// via Douglas-Rachford with the observation projection and the norm prox.
inline SolveResult solve_matrix_completion(const ProblemSpec& spec, const SolverConfig& cfg) {
    validate_problem(spec);
    if (spec.mask.empty())
        throw std::invalid_argument("solve_matrix_completion: observation set is empty");
    Matrix z0 = Matrix::Zero(spec.M.rows(), spec.M.cols());
    for (const auto& [i, j] : spec.mask) z0(i, j) = spec.M(i, j);
    const ProxOracle proxA = make_observation_projection(spec.M, spec.mask);
    const ProxOracle proxB = make_norm_prox_oracle(spec.norm, cfg.mode, cfg.rank_threshold);
    SolveResult res = douglas_rachford(proxA, proxB, z0, cfg.gamma, cfg.alpha, cfg);
    res.report.objective = matrix_scaled_norm_value(res.X, spec.norm);
    return res;
}

/// minimize 0.5||X - M||_F^2 (+ box indicator) + norm term. The regularized
/// least-squares flavor runs either solver; the box flavor runs
/// Douglas-Rachford, whose fit prox absorbs the box exactly.
inline SolveResult solve_problem(const ProblemSpec& spec, const SolverConfig& cfg,
                                 bool use_prox_gradient = false) {
    validate_problem(spec);
    if (spec.kind == ProblemKind::MatrixCompletion) return solve_matrix_completion(spec, cfg);

    const auto box = spec.kind == ProblemKind::BoxConstrainedLowRankApprox ? spec.box : std::nullopt;
    const ProxOracle norm_prox = make_norm_prox_oracle(spec.norm, cfg.mode, cfg.rank_threshold);
    if (use_prox_gradient) {
        if (box) throw std::invalid_argument("solve_problem: prox-gradient route has no box support");
        SmoothTerm f;
        const Matrix M = spec.M;
        f.value = [M](const Matrix& X) { return 0.5 * (X - M).squaredNorm(); };
        f.gradient = [M](const Matrix& X) { return Matrix(X - M); };
        f.lipschitz = 1.0;
        return prox_gradient(f, norm_prox, M, cfg);
    }
    const ProxOracle fit = make_quadratic_fit_prox(spec.M, box);
    return douglas_rachford(fit, norm_prox, spec.M, cfg.gamma, cfg.alpha, cfg);
}

}  // namespace lrinorm
