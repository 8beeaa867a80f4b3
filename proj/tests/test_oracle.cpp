#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrinorm/oracle.hpp"
#include "lrinorm/selftest.hpp"
#include "lrinorm/vec_prox.hpp"

using namespace lrinorm;

namespace {

Vector vec(std::initializer_list<double> vals) {
    Vector v(static_cast<Index>(vals.size()));
    Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("certificate accepts the soft-threshold ground truth and rejects neighbours") {
    const Vector z = vec({3, 1});
    const ScaledNorm f{{NormFlavor::FrobeniusR, 1}, 1.0, false};
    CHECK(certify_prox(z, vec({2, 0}), f).pass);
    CHECK_FALSE(certify_prox(z, vec({2.1, 0}), f).pass);
    CHECK_FALSE(certify_prox(z, z, f).pass);  // unmoved point outside the dual ball
}

TEST_CASE("certificates pass on every prox example family") {
    Rng rng(61);
    for (int it = 0; it < 2000; ++it) {
        const auto inst = selftest::draw_instance(rng.stream(static_cast<std::uint64_t>(it)), 30);
        const Vector x = prox_vec(inst.z, inst.f).x;
        const Certificate cert = certify_prox(inst.z, x, inst.f);
        CAPTURE(inst.descriptor);
        CHECK(cert.pass);
        CHECK(cert.dual_residual <= 1e-10 * cert.scale);
        CHECK(cert.alignment_residual <= 1e-10 * cert.scale);
    }
}

TEST_CASE("ball projection certificates") {
    Rng rng(62);
    for (int it = 0; it < 1000; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const int q = r.uniform_int(1, 25);
        Vector z(q);
        for (int i = 0; i < q; ++i) z[i] = r.normal();
        const int rr = r.uniform_int(1, q);
        const double c = std::pow(10.0, r.uniform(-2, 1));
        if (r.uniform() < 0.5) {
            const Vector w = project_truncated_l2_ball(z, rr, c).x;
            CHECK(certify_ball_projection(z, w, {NormFlavor::FrobeniusR, rr}, c).pass);
        } else {
            const Vector w = project_kyfan_l1_ball(z, rr, c).x;
            CHECK(certify_ball_projection(z, w, {NormFlavor::SpectralR, rr}, c).pass);
        }
    }
}

TEST_CASE("certificate soundness on displaced points") {
    Rng rng(63);
    int rejected = 0;
    const int total = 10000;
    for (int it = 0; it < total; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const auto inst = selftest::draw_instance(r, 20);
        Vector x = prox_vec(inst.z, inst.f).x;
        Vector d(x.size());
        for (Index i = 0; i < d.size(); ++i) d[i] = r.normal();
        d *= (1e-3 + std::abs(r.normal())) / std::max(d.norm(), 1e-12);
        x += d;
        if (!certify_prox(inst.z, x, inst.f).pass) ++rejected;
    }
    CHECK(rejected >= total * 99 / 100);
}

TEST_CASE("perturbation probe") {
    const Vector z = vec({3, 1, -2});
    const ScaledNorm f{{NormFlavor::SpectralR, 2}, 0.8, false};
    const Vector x = prox_vec(z, f).x;
    CHECK(perturbation_probe(z, x, f, 200, 0.1));
    Vector bad = x;
    bad[0] += 0.05;
    CHECK_FALSE(perturbation_probe(z, bad, f, 200, 0.1));
    CHECK_THROWS_AS(perturbation_probe(z, x, f, 0, 0.1), std::invalid_argument);
}

TEST_CASE("scalar case: probe agrees with a dense grid") {
    Rng rng(64);
    for (int it = 0; it < 50; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        Vector z(1);
        z << r.normal() * 2.0;
        const ScaledNorm f{{r.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR, 1},
                           std::pow(10.0, r.uniform(-1, 1)), r.uniform() < 0.5};
        const Vector x = prox_vec(z, f).x;
        CHECK(perturbation_probe(z, x, f, 2, 0.1));
        // dense scan of the scalar objective
        const double span = std::abs(z[0]) + 1.0;
        double best = std::numeric_limits<double>::infinity(), arg = 0.0;
        for (double v = -span; v <= span; v += 1e-4) {
            Vector w(1);
            w << v;
            const double val = 0.5 * (v - z[0]) * (v - z[0]) + scaled_norm_value(w, f);
            if (val < best) {
                best = val;
                arg = v;
            }
        }
        CHECK(std::abs(arg - x[0]) <= 2e-4);
    }
}

TEST_CASE("slow reference matches the closed forms") {
    CHECK((reference_prox_slow(vec({3, 4}), {{NormFlavor::FrobeniusR, 2}, 1.0, false}).x -
           vec({2.4, 3.2}))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    CHECK((reference_prox_slow(vec({3, 1}), {{NormFlavor::FrobeniusR, 1}, 1.0, false}).x -
           vec({2, 0}))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    CHECK((reference_prox_slow(vec({3, 1}), {{NormFlavor::FrobeniusR, 1}, 1.0, true}).x -
           vec({1.5, 0}))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    const auto zero = reference_prox_slow(vec({0, 0}), {{NormFlavor::SpectralR, 1}, 2.0, true});
    CHECK(zero.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.converged);
    CHECK(zero.iterations >= 1);
}

TEST_CASE("slow reference agrees with the candidate search") {
    Rng rng(65);
    for (int it = 0; it < 1500; ++it) {
        const auto inst = selftest::draw_instance(rng.stream(static_cast<std::uint64_t>(it)), 20);
        const auto slow = reference_prox_slow(inst.z, inst.f);
        const auto fast = prox_vec(inst.z, inst.f);
        CAPTURE(inst.descriptor);
        CHECK(slow.converged);
        CHECK((slow.x - fast.x).cwiseAbs().maxCoeff() <= 1e-6);
    }
    Vector big = Vector::Zero(51);
    CHECK_THROWS_AS(reference_prox_slow(big, {{NormFlavor::FrobeniusR, 1}, 1.0, false}),
                    std::invalid_argument);
}

TEST_CASE("squared spectral prox agrees with the scalar fixed-point route") {
    // independent reduction: beta = gamma * N(prox_{beta N}(z)) by bisection
    Rng rng(66);
    for (int it = 0; it < 400; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const int q = r.uniform_int(1, 20);
        Vector z(q);
        for (int i = 0; i < q; ++i) z[i] = r.normal();
        const int rr = r.uniform_int(1, q);
        const double gamma = std::pow(10.0, r.uniform(-2, 2));
        const NormSpec spec{NormFlavor::SpectralR, rr};
        const ScaledNorm fsq{spec, gamma, true};

        const double nz = norm_value(z, spec);
        double lo = 0.0, hi = gamma * nz;
        Vector x = z;
        if (nz > 0.0) {
            for (int b = 0; b < 120; ++b) {
                const double beta = 0.5 * (lo + hi);
                x = prox_vec(z, {spec, std::max(beta, 1e-300), false}).x;
                if (gamma * norm_value(x, spec) > beta) lo = beta; else hi = beta;
            }
            x = prox_vec(z, {spec, std::max(0.5 * (lo + hi), 1e-300), false}).x;
        }
        const Vector direct = prox_vec(z, fsq).x;
        CHECK((direct - x).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, z.norm()));
    }
}
