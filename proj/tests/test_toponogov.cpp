#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linelab/toponogov.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace linelab;

TEST_CASE("builtin families: convexity and pinned curvature facts") {
    // paraboloid tip is umbilic
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    CHECK(principal_curvatures(*par, 0, 0).gap < 1e-14);

    // convex graph: kappa1 kappa2 > 0 at all samples (Monge oracle)
    auto graph = make_builtin("convex_graph");
    testutil::Rng rng(51);
    for (int k = 0; k < 60; ++k) {
        const double s = rng.uniform(-4, 4), t = rng.uniform(-3, 3);
        const CurvatureData cd = principal_curvatures(*graph, s, t);
        CHECK(cd.product > 0);
        const auto [k1, k2] =
            oracles::monge_curvatures(s, std::sinh(t), 1, 0, std::cosh(t));
        CHECK(cd.kappa1 == doctest::Approx(k1).epsilon(1e-10));
        CHECK(cd.kappa2 == doctest::Approx(k2).epsilon(1e-10));
    }

    // plane: gap and product identically zero
    auto pl = make_builtin("plane");
    const CurvatureData cp = principal_curvatures(*pl, 3.0, -2.0);
    CHECK(cp.gap == doctest::Approx(0));
    CHECK(cp.product == doctest::Approx(0));
}

TEST_CASE("builtin convex families satisfy kappa1 kappa2 >= 0") {
    testutil::Rng rng(53);
    for (const char *fam : {"sphere", "cylinder", "paraboloid", "cigar",
                            "convex_graph", "plane"}) {
        auto S = make_builtin(fam);
        double s0, s1, t0, t1;
        S->domain().bounds(s0, s1, t0, t1);
        for (int k = 0; k < 50; ++k) {
            const double s = rng.uniform(s0, s1), t = rng.uniform(t0, t1);
            if (!S->domain().contains(s, t))
                continue;
            CHECK(principal_curvatures(*S, s, t).product >= -1e-9);
        }
    }
}

TEST_CASE("cigar surface is asymptotic to the tanh profile") {
    auto cig = make_builtin("cigar", {{"r0", 1.0}, {"a", 1.0}});
    auto prof = make_tanh_profile(1.0, 1.0);
    double prev_diff = 1.0;
    for (double r : {0.9, 0.95, 0.97}) {
        const double z = cig->position(r, 0.0).z();
        const double r_prof = prof->r(z, 0.0);
        CHECK(r_prof <= r + 1e-12); // profile radius bounds the embedding
        const double diff = r - r_prof;
        CHECK(diff < prev_diff); // and closes in toward the rim
        prev_diff = diff;
    }
    CHECK(prev_diff < 0.02);
    // smooth umbilic tip
    CHECK(principal_curvatures(*cig, 0, 0).gap < 1e-12);
}

TEST_CASE("profile_check: tanh profile passes the four conditions") {
    auto prof = make_tanh_profile(2.0, 0.7);
    const ProfileCheckReport rep = profile_check(*prof, 64, 16, 20.0 / 0.7);
    CHECK(rep.monotone_ok);
    CHECK(rep.concave_ok);
    CHECK(rep.bounded_ok);
    CHECK(rep.limits_ok);
    CHECK(rep.all_ok());
    CHECK(rep.approach_gap < 1e-9);
    CHECK(rep.rz_at_zmax < 1e-9);

    // closed-form derivative oracle: library derivatives match finite
    // differences of r itself
    const double h = 1e-5;
    for (double z : {0.3, 1.7, 4.0}) {
        const double rz_fd = (prof->r(z + h, 0) - prof->r(z - h, 0)) / (2 * h);
        const double rzz_fd =
            (prof->r(z + h, 0) - 2 * prof->r(z, 0) + prof->r(z - h, 0)) /
            (h * h);
        CHECK(prof->r_z(z, 0) == doctest::Approx(rz_fd).epsilon(1e-8));
        CHECK(prof->r_zz(z, 0) == doctest::Approx(rzz_fd).epsilon(1e-5));
    }
}

TEST_CASE("profile_check: negative controls fail the right conditions") {
    const ProfileCheckReport lin =
        profile_check(*make_linear_profile(1.0), 32, 8, 10.0);
    CHECK_FALSE(lin.bounded_ok);
    CHECK(lin.monotone_ok);

    const ProfileCheckReport sin =
        profile_check(*make_sine_profile(1.0), 64, 8, 10.0);
    CHECK_FALSE(sin.monotone_ok);
}

TEST_CASE("profile to surface embedding round-trips r") {
    auto prof = make_tanh_profile(1.5, 1.0);
    auto surf = surface_from_profile(prof, 0.5, 8.0);
    for (double z : {0.7, 2.0, 7.5}) {
        for (double phi : {0.1, 2.0, 5.5}) {
            const Vec3 p = surf->position(z, phi);
            CHECK(std::hypot(p.x(), p.y()) ==
                  doctest::Approx(prof->r(z, phi)).epsilon(1e-9));
            CHECK(p.z() == doctest::Approx(z));
        }
    }
}

TEST_CASE("gap_sweep: paraboloid attains zero at its umbilic tip") {
    auto par = make_builtin("paraboloid", {{"c", 1.0}, {"extent", 1.0}});
    const GapSweepResult res = gap_sweep(*par, {0.25, 0.5, 1.0});
    for (size_t k = 0; k < res.min_gap.size(); ++k)
        CHECK(res.min_gap[k] < 1e-12);
    CHECK(res.trend == "zero-attained");
}

TEST_CASE("gap_sweep: monotone non-increasing on the convex graph") {
    auto graph = make_builtin("convex_graph");
    const GapSweepResult res =
        gap_sweep(*graph, {1.0, 2.0, 4.0, 8.0, 10.0}, 1e-3, 65, 2);
    for (size_t k = 1; k < res.min_gap.size(); ++k)
        CHECK(res.min_gap[k] <= res.min_gap[k - 1]);
    CHECK(res.min_gap.back() < 0.01);
}

TEST_CASE("gap_sweep: genuinely umbilic-free graph trends to zero") {
    // z = exp(s) + cosh(t) is convex and umbilic-free: on t = 0 umbilicity
    // would need e^s/(1+e^{2s}) = 1, impossible; elsewhere the mixed terms
    // of I forbid proportionality. The gap decays like e^{-s}.
    auto S = make_expression_surface("s", "t", "exp(s) + cosh(t)",
                                     Domain::rect(-12, 12, -12, 12));
    const GapSweepResult res =
        gap_sweep(*S, {1.0, 2.0, 4.0, 8.0, 10.0}, 1e-3, 65, 1);
    for (size_t k = 0; k < res.min_gap.size(); ++k)
        CHECK(res.min_gap[k] > 0);
    for (size_t k = 1; k < res.min_gap.size(); ++k)
        CHECK(res.min_gap[k] <= res.min_gap[k - 1]);
    CHECK(res.min_gap.front() > 0.05);
    CHECK(res.min_gap.back() < 0.01);
    CHECK(res.trend == "decreasing");
    CHECK(res.loglog_slope < -1.0);
}

TEST_CASE("cigar waist annulus: uniformly non-umbilic with a finite edge") {
    auto waist = make_builtin("cigar", {{"r0", 1.0},
                                        {"a", 1.0},
                                        {"r_inner", 0.5},
                                        {"r_outer", 0.9}});
    const GapSweepResult res = gap_sweep(*waist, {0.9}, 1e-3, 65, 2);
    CHECK(res.min_gap[0] > 0.1); // uniform non-umbilic bound C

    const auto reps =
        completeness_probe(*waist, {Ray{0.6, 0.0, 1.0, 0.0, 5.0}});
    CHECK(reps[0].hit_domain_edge);
    CHECK(reps[0].length < 10.0); // finite edge distance
    CHECK(reps[0].length > 0.0);
}

TEST_CASE("gap_sweep input validation") {
    auto par = make_builtin("paraboloid");
    CHECK_THROWS_AS(gap_sweep(*par, {}), InvalidInputError);
    CHECK_THROWS_AS(gap_sweep(*par, {1.0, 0.5}), InvalidInputError);
}
