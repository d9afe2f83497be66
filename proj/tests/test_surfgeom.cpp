#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linelab/expr.hpp"
#include "linelab/surfgeom.hpp"
#include "linelab/toponogov.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace linelab;

TEST_CASE("fundamental forms: sphere is totally umbilic, plane flat") {
    auto sph = make_builtin("sphere", {{"radius", 2.0}});
    for (double s : {-1.0, 0.3, 2.0}) {
        for (double t : {-0.8, 0.0, 0.9}) {
            const FundamentalForms f = fundamental_forms(*sph, s, t);
            // inward orientation: II = I / R
            CHECK((f.II - f.I / 2.0).norm() < 1e-12 * f.I.norm());
        }
    }

    auto pl = make_builtin("plane");
    const FundamentalForms f = fundamental_forms(*pl, 0.4, -3.0);
    CHECK(f.II.norm() == doctest::Approx(0));
}

TEST_CASE("fundamental forms: Monge oracle at the critical point") {
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    const FundamentalForms f = fundamental_forms(*par, 0, 0);
    CHECK((f.I - Eigen::Matrix2d::Identity()).norm() < 1e-14);
    CHECK((f.II - Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("principal curvatures: pinned family values") {
    auto sph = make_builtin("sphere", {{"radius", 2.0}});
    const CurvatureData cs = principal_curvatures(*sph, 0.3, -0.4);
    CHECK(cs.kappa1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cs.kappa2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cs.gap == doctest::Approx(0.0));

    auto cyl = make_builtin("cylinder", {{"radius", 1.0}});
    const CurvatureData cc = principal_curvatures(*cyl, 0.7, 0.2);
    CHECK(cc.kappa1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cc.kappa2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cc.product == doctest::Approx(0.0));

    // rotational graph z = r^2/2 at r = 1: the two [DERIVED] values
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    const CurvatureData cp = principal_curvatures(*par, 1.0, 0.0);
    CHECK(cp.kappa1 == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    CHECK(cp.kappa2 == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    const auto [km, kp] = oracles::revolution_curvatures(1.0, 1.0, 1.0);
    CHECK(cp.kappa2 == doctest::Approx(km).epsilon(1e-12));
    CHECK(cp.kappa1 == doctest::Approx(kp).epsilon(1e-12));
}

TEST_CASE("principal curvatures agree with the Monge oracle off-axis") {
    auto graph = make_builtin("convex_graph");
    testutil::Rng rng(41);
    for (int k = 0; k < 50; ++k) {
        const double s = rng.uniform(-2, 2), t = rng.uniform(-2, 2);
        const CurvatureData cd = principal_curvatures(*graph, s, t);
        const auto [k1, k2] = oracles::monge_curvatures(
            s, std::sinh(t), 1.0, 0.0, std::cosh(t));
        CHECK(cd.kappa1 == doctest::Approx(k1).epsilon(1e-10));
        CHECK(cd.kappa2 == doctest::Approx(k2).epsilon(1e-10));
    }
}

TEST_CASE("ill-conditioned first fundamental form is rejected") {
    auto bad = make_callable_surface(
        [](double s, double t) { return Vec3(s, 1e-7 * t, 0.0); },
        Domain::rect(-1, 1, -1, 1));
    CHECK_THROWS_AS(principal_curvatures(*bad, 0.1, 0.1),
                    ChartDegenerateError);
}

TEST_CASE("degenerate surface is rejected") {
    auto bad = make_callable_surface(
        [](double s, double t) { return Vec3(s + t, s + t, 0.0); },
        Domain::rect(-1, 1, -1, 1));
    CHECK_THROWS_AS(fundamental_forms(*bad, 0.0, 0.0),
                    DegenerateSurfaceError);
}

TEST_CASE("normal congruence: sphere gives the zero section") {
    auto sph = make_builtin("sphere", {{"radius", 1.5}});
    sph->set_orientation(+1); // outward normals pass through the origin
    for (double s : {-0.5, 0.7}) {
        for (double t : {-0.3, 0.8}) {
            const CongruencePoint cp = normal_congruence(*sph, s, t);
            CHECK(cp.line.moment().norm() < 1e-12);
            const Vec3 u_expect = sph->position(s, t) / 1.5;
            CHECK((cp.line.direction() - u_expect).norm() < 1e-12);
        }
    }
}

TEST_CASE("normal congruence: plane and paraboloid closed forms") {
    auto pl = make_builtin("plane");
    const CongruencePoint c0 = normal_congruence(*pl, 2.0, -1.0);
    CHECK((c0.line.direction() - Vec3(0, 0, 1)).norm() < 1e-14);
    CHECK((c0.line.moment() - Vec3(2, -1, 0)).norm() < 1e-14);

    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    const CongruencePoint c1 = normal_congruence(*par, 1.0, 0.0);
    const Vec3 u_expect = Vec3(-1, 0, 1) / std::sqrt(2.0);
    CHECK((c1.line.direction() - u_expect).norm() < 1e-13);
    CHECK((c1.line.moment() - Vec3(0.75, 0, 0.75)).norm() < 1e-13);
}

TEST_CASE("congruence lines meet the surface") {
    for (const char *fam : {"paraboloid", "cigar", "convex_graph"}) {
        auto S = make_builtin(fam);
        double s0, s1, t0, t1;
        S->domain().bounds(s0, s1, t0, t1);
        for (int i = 0; i < 9; ++i) {
            for (int j = 0; j < 9; ++j) {
                const double s = s0 + (s1 - s0) * i / 8;
                const double t = t0 + (t1 - t0) * j / 8;
                if (!S->domain().contains(s, t))
                    continue;
                const CongruencePoint cp = normal_congruence(*S, s, t);
                const Vec3 p = S->position(s, t);
                const double d =
                    (p - cp.line.point_at(p.dot(cp.line.direction()))).norm();
                CHECK(d < 1e-10);
            }
        }
    }
}

TEST_CASE("shape operator trace/determinant consistency") {
    // gap^2 = (k1+k2)^2 - 4 k1 k2 across families and samples.
    testutil::Rng rng(43);
    for (const char *fam : {"sphere", "cylinder", "paraboloid", "cigar",
                            "convex_graph", "plane"}) {
        auto S = make_builtin(fam);
        double s0, s1, t0, t1;
        S->domain().bounds(s0, s1, t0, t1);
        for (int k = 0; k < 40; ++k) {
            const double s = rng.uniform(s0, s1);
            const double t = rng.uniform(t0, t1);
            if (!S->domain().contains(s, t))
                continue;
            const CurvatureData cd = principal_curvatures(*S, s, t);
            const double lhs = cd.gap * cd.gap;
            const double rhs = (cd.kappa1 + cd.kappa2) *
                                   (cd.kappa1 + cd.kappa2) -
                               4 * cd.product;
            CHECK(std::abs(lhs - rhs) <
                  1e-9 * std::max(1.0, std::abs(rhs)));
        }
    }
}

namespace {

// Exact chain-rule reparameterization (s,t) -> (2s, 2t).
class Rescaled : public ParamSurface {
  public:
    explicit Rescaled(std::shared_ptr<ParamSurface> inner)
        : inner_(std::move(inner)), dom_(Domain::rect(-0.5, 0.5, -0.5, 0.5)) {}
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        Jet3 j = inner_->jet(2 * s, 2 * t);
        j.ps *= 2;
        j.pt *= 2;
        j.pss *= 4;
        j.pst *= 4;
        j.ptt *= 4;
        j.psss *= 8;
        j.psst *= 8;
        j.pstt *= 8;
        j.pttt *= 8;
        return j;
    }

  private:
    std::shared_ptr<ParamSurface> inner_;
    Domain dom_;
};

} // namespace

TEST_CASE("curvatures invariant under parameter rescaling") {
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    Rescaled scaled(par);
    for (double s : {-0.2, 0.11}) {
        for (double t : {0.05, 0.31}) {
            const CurvatureData a = principal_curvatures(*par, 2 * s, 2 * t);
            const CurvatureData b = principal_curvatures(scaled, s, t);
            const double mean_a = 0.5 * (a.kappa1 + a.kappa2);
            const double mean_b = 0.5 * (b.kappa1 + b.kappa2);
            CHECK(std::abs(mean_a - mean_b) < 1e-9);
        }
    }
}

TEST_CASE("orientation flip negates curvatures and keeps the gap") {
    auto S = make_builtin("convex_graph");
    const CurvatureData a = principal_curvatures(*S, 0.7, -0.4);
    S->set_orientation(-1);
    const CurvatureData b = principal_curvatures(*S, 0.7, -0.4);
    CHECK(b.kappa1 == doctest::Approx(-a.kappa2).epsilon(1e-12));
    CHECK(b.kappa2 == doctest::Approx(-a.kappa1).epsilon(1e-12));
    CHECK(b.gap == doctest::Approx(a.gap).epsilon(1e-12));
}

TEST_CASE("shape deviator: modulus matches the gap, winding flags the tip") {
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    for (double s : {0.3, 0.9}) {
        const CurvatureData cd = principal_curvatures(*par, s, 0.2);
        const Complex dev = shape_deviator(*par, s, 0.2);
        CHECK(2 * std::abs(dev) == doctest::Approx(cd.gap).epsilon(1e-10));
    }
    const int w = oracles::rect_winding(
        [&](double s, double t) { return shape_deviator(*par, s, t); }, -0.11,
        0.13, -0.12, 0.1, 64);
    CHECK(std::abs(w) == 2); // rotationally symmetric umbilic of index 1
}

TEST_CASE("gauss image: paraboloid in the open upper hemisphere") {
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    const GaussImageReport rep =
        gauss_image_check(*par, 33, 33, Vec3(0, 0, 1));
    CHECK(rep.contained());
    // closed form at the farthest corner: n.e3 = 1/sqrt(1+r^2), r^2 = 2
    CHECK(rep.min_dot == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(rep.boundary_samples.empty());

    auto pl = make_builtin("plane");
    const GaussImageReport rp = gauss_image_check(*pl, 9, 9, Vec3(0, 0, 1));
    CHECK(rp.min_dot == doctest::Approx(1.0));

    auto sph = make_builtin("sphere", {{"radius", 1.0}});
    sph->set_orientation(+1);
    const GaussImageReport rs = gauss_image_check(*sph, 33, 33, Vec3(0, 0, 1));
    CHECK_FALSE(rs.contained());
    CHECK(rs.min_dot < -0.5);
}

TEST_CASE("completeness probe: plane ray diverges with length R") {
    auto pl = make_builtin("plane");
    const double R = 7.0;
    const auto reps =
        completeness_probe(*pl, {Ray{0, 0, 1, 0, R}});
    CHECK(reps[0].length == doctest::Approx(R).epsilon(1e-9));
    CHECK(reps[0].diverging);
    CHECK_FALSE(reps[0].hit_domain_edge);
}

TEST_CASE("completeness probe: truncated cap has a finite edge") {
    // Graph z = r^2/2 over the unit disc; the induced radial length to the
    // edge is integral_0^1 sqrt(1+r^2) dr.
    auto cap = make_callable_surface(
        [](double s, double t) {
            return Vec3(s, t, 0.5 * (s * s + t * t));
        },
        Domain::disc(1.0));
    const auto reps = completeness_probe(*cap, {Ray{0, 0, 1, 0, 10}});
    CHECK(reps[0].hit_domain_edge);
    const double expect = oracles::simpson(
        [](double r) { return std::sqrt(1 + r * r); }, 0, 1, 512);
    CHECK(reps[0].length == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("completeness probe: cigar radial ray keeps accumulating length") {
    auto cig = make_builtin("cigar", {{"r0", 1.0}, {"a", 1.0}});
    const auto reps = completeness_probe(*cig, {Ray{0, 0, 1, 0, 10}});
    CHECK(reps[0].hit_domain_edge); // parameter disc ends at r_outer
    CHECK(reps[0].diverging);       // integrand grows toward the rim
    // quadrature of the closed-form profile metric sqrt(1 + h'(r)^2),
    // h(r) = r artanh(r)
    auto hp = [](double r) {
        return std::atanh(r) + r / (1 - r * r);
    };
    const double expect = oracles::simpson(
        [&](double r) { return std::sqrt(1 + hp(r) * hp(r)); }, 0, 0.98,
        20000);
    CHECK(reps[0].length == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("expression surface matches the builtin paraboloid") {
    auto es = make_expression_surface("s", "t", "(s^2+t^2)/2",
                                      Domain::rect(-1, 1, -1, 1));
    auto par = make_builtin("paraboloid", {{"c", 1.0}});
    for (double s : {-0.7, 0.25}) {
        for (double t : {0.4, -0.35}) {
            const CurvatureData a = principal_curvatures(*es, s, t);
            const CurvatureData b = principal_curvatures(*par, s, t);
            CHECK(a.kappa1 == doctest::Approx(b.kappa1).epsilon(1e-7));
            CHECK(a.kappa2 == doctest::Approx(b.kappa2).epsilon(1e-7));
        }
    }
}

TEST_CASE("expression grammar coverage and errors") {
    const Expr e = Expr::parse("exp(s) + cosh(t) - sqrt(1 + 0) * ln(exp(1))");
    CHECK(e.eval(0.3, -0.2) ==
          doctest::Approx(std::exp(0.3) + std::cosh(0.2) - 1).epsilon(1e-14));
    CHECK(Expr::parse("2^s^2").eval(2, 0) ==
          doctest::Approx(16.0)); // right associative
    CHECK(Expr::parse("-s^2").eval(3, 0) == doctest::Approx(-9.0));
    CHECK(Expr::parse("sin(pi/2)").eval(0, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Expr::parse("s +"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("tan(s)"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("(s"), ConfigError);
}

TEST_CASE("builtin family validation") {
    CHECK_THROWS_AS(make_builtin("helicoid"), InvalidInputError);
    CHECK_THROWS_AS(make_builtin("sphere", {{"radius", -1.0}}),
                    InvalidInputError);
    CHECK_THROWS_AS(make_builtin("paraboloid", {{"bogus", 1.0}}),
                    InvalidInputError);
    CHECK_THROWS_AS(make_builtin("cigar", {{"r_outer", 2.0}}),
                    InvalidInputError);
}
