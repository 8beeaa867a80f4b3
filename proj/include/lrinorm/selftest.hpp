#pragma once

#include "lrinorm/oracle.hpp"
#include "lrinorm/vec_prox.hpp"

#include <string>
#include <vector>

namespace lrinorm::selftest {

/// One randomized prox instance drawn from the standard test distribution:
/// q uniform in 1..qmax, entries standard normal, r uniform, gamma
/// log-uniform in [1e-3, 1e3], flavor and squared fair coins.
struct Instance {
    Vector z;
    ScaledNorm f;
    std::string descriptor;
};

inline Instance draw_instance(Rng rng, int qmax = 50) {
    Instance inst;
    const int q = rng.uniform_int(1, qmax);
    inst.z.resize(q);
    for (int i = 0; i < q; ++i) inst.z[i] = rng.normal();
    inst.f.spec.r = rng.uniform_int(1, q);
    inst.f.spec.flavor = rng.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR;
    inst.f.gamma = std::pow(10.0, rng.uniform(-3.0, 3.0));
    inst.f.squared = rng.uniform() < 0.5;
    char buf[160];
    std::snprintf(buf, sizeof buf, "q=%d r=%d flavor=%s squared=%d gamma=%.17g", q, inst.f.spec.r,
                  inst.f.spec.flavor == NormFlavor::FrobeniusR ? "fro" : "spec",
                  static_cast<int>(inst.f.squared), inst.f.gamma);
    inst.descriptor = buf;
    return inst;
}

struct SuiteResult {
    int total = 0;
    int passed = 0;
    std::vector<std::string> failures;  ///< reproducible instance descriptors
    bool ok() const { return passed == total; }
};

/// Every prox output must carry a passing optimality certificate.
inline SuiteResult run_certificate_suite(std::uint64_t seed, int count, int qmax = 50,
                                         double tol = 1e-10,
                                         std::vector<std::string>* manifest = nullptr) {
    SuiteResult res;
    const Rng root = Rng(seed).stream("certificate-suite");
    for (int i = 0; i < count; ++i) {
        const Instance inst = draw_instance(root.stream(static_cast<std::uint64_t>(i)), qmax);
        const std::string line =
            "seed=" + std::to_string(seed) + " index=" + std::to_string(i) + " " + inst.descriptor;
        if (manifest) manifest->push_back(line);
        ++res.total;
        const VecProxResult pr = prox_vec(inst.z, inst.f, SearchMode::BinarySearch);
        const Certificate cert = certify_prox(inst.z, pr.x, inst.f, tol);
        if (cert.pass) ++res.passed;
        else res.failures.push_back(line + " dual_residual=" + std::to_string(cert.dual_residual) +
                                    " alignment_residual=" + std::to_string(cert.alignment_residual));
    }
    return res;
}

/// Enumerate and BinarySearch must agree componentwise, and the accelerated
/// mode must respect its candidate-solve budget on every instance.
inline SuiteResult run_mode_equivalence_suite(std::uint64_t seed, int count, int qmax = 50,
                                              double tol = 1e-12,
                                              std::vector<std::string>* manifest = nullptr) {
    SuiteResult res;
    const Rng root = Rng(seed).stream("mode-equivalence-suite");
    for (int i = 0; i < count; ++i) {
        const Instance inst = draw_instance(root.stream(static_cast<std::uint64_t>(i)), qmax);
        const std::string line =
            "seed=" + std::to_string(seed) + " index=" + std::to_string(i) + " " + inst.descriptor;
        if (manifest) manifest->push_back(line);
        ++res.total;
        const VecProxResult a = prox_vec(inst.z, inst.f, SearchMode::Enumerate);
        const VecProxResult b = prox_vec(inst.z, inst.f, SearchMode::BinarySearch);
        const double diff = (a.x - b.x).cwiseAbs().maxCoeff();
        const int q = static_cast<int>(inst.z.size());
        const bool count_ok =
            b.candidate_solves <= binary_solve_bound(q, inst.f.spec.r) &&
            a.candidate_solves <= enumerate_solve_bound(q, inst.f.spec.r);
        if (diff <= tol && count_ok) ++res.passed;
        else res.failures.push_back(line + " diff=" + std::to_string(diff) +
                                    " solves=" + std::to_string(b.candidate_solves));
    }
    return res;
}

/// Unsquared prox plus dual-ball projection must reassemble z.
inline SuiteResult run_moreau_suite(std::uint64_t seed, int count, int qmax = 50,
                                    double tol = 1e-13,
                                    std::vector<std::string>* manifest = nullptr) {
    SuiteResult res;
    const Rng root = Rng(seed).stream("moreau-suite");
    for (int i = 0; i < count; ++i) {
        Instance inst = draw_instance(root.stream(static_cast<std::uint64_t>(i)), qmax);
        inst.f.squared = false;
        const std::string line =
            "seed=" + std::to_string(seed) + " index=" + std::to_string(i) + " " + inst.descriptor;
        if (manifest) manifest->push_back(line);
        ++res.total;
        const int r = inst.f.spec.r;
        const VecProxResult px = prox_vec(inst.z, inst.f, SearchMode::BinarySearch);
        const VecProxResult pw =
            inst.f.spec.flavor == NormFlavor::FrobeniusR
                ? project_truncated_l2_ball(inst.z, r, inst.f.gamma, SearchMode::BinarySearch)
                : project_kyfan_l1_ball(inst.z, r, inst.f.gamma, SearchMode::BinarySearch);
        const double resid = (px.x + pw.x - inst.z).cwiseAbs().maxCoeff();
        if (resid <= tol * std::max(1.0, inst.z.norm())) ++res.passed;
        else res.failures.push_back(line + " moreau_residual=" + std::to_string(resid));
    }
    return res;
}

}  // namespace lrinorm::selftest
