#include "linelab/surfgeom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "linelab/expr.hpp"

namespace linelab {

// ---------------------------------------------------------------- Domain

Domain Domain::rect(double s0, double s1, double t0, double t1) {
    Domain d;
    d.kind = Kind::rect;
    d.s_min = s0;
    d.s_max = s1;
    d.t_min = t0;
    d.t_max = t1;
    return d;
}

Domain Domain::disc(double radius) {
    Domain d;
    d.kind = Kind::disc;
    d.r_outer = radius;
    return d;
}

Domain Domain::annulus(double r_inner, double r_outer) {
    Domain d;
    d.kind = Kind::annulus;
    d.r_inner = r_inner;
    d.r_outer = r_outer;
    return d;
}

bool Domain::contains(double s, double t) const {
    switch (kind) {
    case Kind::rect:
        return s >= s_min && s <= s_max && t >= t_min && t <= t_max;
    case Kind::disc:
        return s * s + t * t < r_outer * r_outer;
    case Kind::annulus: {
        const double r2 = s * s + t * t;
        return r2 >= r_inner * r_inner && r2 <= r_outer * r_outer;
    }
    }
    return false;
}

void Domain::bounds(double &s0, double &s1, double &t0, double &t1) const {
    if (kind == Kind::rect) {
        s0 = s_min;
        s1 = s_max;
        t0 = t_min;
        t1 = t_max;
    } else {
        s0 = t0 = -r_outer;
        s1 = t1 = r_outer;
    }
}

double Domain::scale() const {
    if (kind == Kind::rect)
        return std::max(s_max - s_min, t_max - t_min) / 2.0;
    return r_outer;
}

// --------------------------------------------- expression-backed surface

namespace {

class ExpressionSurface : public ParamSurface {
  public:
    ExpressionSurface(Expr x, Expr y, Expr z, Domain dom, double fd_step_rel)
        : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)),
          dom_(dom), h1_(fd_step_rel * dom.scale()) {}

    const Domain &domain() const override { return dom_; }

    Jet3 jet(double s, double t) const override;

  private:
    Vec3 pos(double s, double t) const {
        return Vec3(x_.eval(s, t), y_.eval(s, t), z_.eval(s, t));
    }

    Expr x_, y_, z_;
    Domain dom_;
    double h1_;
};

using Fn2 = std::function<Vec3(double, double)>;

// Central difference with one Richardson pass, per the derivative strategy
// for user-supplied surfaces.
Vec3 d1(const Fn2 &f, double s, double t, bool in_s, double h) {
    auto D = [&](double hh) -> Vec3 {
        return in_s ? (f(s + hh, t) - f(s - hh, t)) / (2 * hh)
                    : (f(s, t + hh) - f(s, t - hh)) / (2 * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Vec3 d2(const Fn2 &f, double s, double t, bool in_s, double h) {
    auto D = [&](double hh) -> Vec3 {
        return in_s ? (f(s + hh, t) - 2 * f(s, t) + f(s - hh, t)) / (hh * hh)
                    : (f(s, t + hh) - 2 * f(s, t) + f(s, t - hh)) / (hh * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Vec3 d2_mixed(const Fn2 &f, double s, double t, double h) {
    auto D = [&](double hh) -> Vec3 {
        return (f(s + hh, t + hh) - f(s + hh, t - hh) - f(s - hh, t + hh) +
                f(s - hh, t - hh)) /
               (4 * hh * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Jet3 fd_jet(const Fn2 &f, double s, double t, double h1) {
    Jet3 j;
    j.p = f(s, t);
    j.ps = d1(f, s, t, true, h1);
    j.pt = d1(f, s, t, false, h1);
    j.pss = d2(f, s, t, true, h1);
    j.ptt = d2(f, s, t, false, h1);
    j.pst = d2_mixed(f, s, t, h1);
    // Third derivatives differentiate the second-order fields with a wider
    // step; pure third-order central stencils drown in roundoff at h1.
    const double h3 = std::max(100 * h1, 1e-2);
    Fn2 fss = [&](double a, double b) { return d2(f, a, b, true, h1); };
    Fn2 ftt = [&](double a, double b) { return d2(f, a, b, false, h1); };
    Fn2 fst = [&](double a, double b) { return d2_mixed(f, a, b, h1); };
    j.psss = d1(fss, s, t, true, h3);
    j.psst = d1(fss, s, t, false, h3);
    j.pstt = d1(ftt, s, t, true, h3);
    j.pttt = d1(ftt, s, t, false, h3);
    (void)fst;
    return j;
}

Jet3 ExpressionSurface::jet(double s, double t) const {
    return fd_jet([this](double a, double b) { return pos(a, b); }, s, t, h1_);
}

} // namespace

std::shared_ptr<ParamSurface>
make_expression_surface(const std::string &expr_x, const std::string &expr_y,
                        const std::string &expr_z, const Domain &domain,
                        double fd_step_rel) {
    return std::make_shared<ExpressionSurface>(
        Expr::parse(expr_x), Expr::parse(expr_y), Expr::parse(expr_z), domain,
        fd_step_rel);
}

// ------------------------------------------------------- surface theory

namespace {

struct NormalData {
    Vec3 n;        // oriented unit normal
    Vec3 dn_s, dn_t;
};

NormalData normal_with_derivs(const Jet3 &j, double orient) {
    const Vec3 c = j.ps.cross(j.pt);
    const double cn = c.norm();
    const double scale = j.ps.norm() * j.pt.norm();
    if (cn <= 1e-8 * std::max(1.0, scale))
        throw DegenerateSurfaceError("surface not immersed at sample point");
    const Vec3 nh = c / cn;
    const Vec3 dc_s = j.pss.cross(j.pt) + j.ps.cross(j.pst);
    const Vec3 dc_t = j.pst.cross(j.pt) + j.ps.cross(j.ptt);
    NormalData out;
    out.n = orient * nh;
    out.dn_s = orient * (dc_s - nh.dot(dc_s) * nh) / cn;
    out.dn_t = orient * (dc_t - nh.dot(dc_t) * nh) / cn;
    return out;
}

} // namespace

FundamentalForms fundamental_forms(const ParamSurface &S, double s, double t) {
    const Jet3 j = S.jet(s, t);
    const NormalData nd = normal_with_derivs(j, S.orientation());
    FundamentalForms f;
    f.I << j.ps.dot(j.ps), j.ps.dot(j.pt), j.ps.dot(j.pt), j.pt.dot(j.pt);
    f.II << j.pss.dot(nd.n), j.pst.dot(nd.n), j.pst.dot(nd.n),
        j.ptt.dot(nd.n);
    f.normal = nd.n;
    return f;
}

namespace {

void check_conditioning(const Eigen::Matrix2d &I) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(I);
    const double lmin = es.eigenvalues()[0];
    const double lmax = es.eigenvalues()[1];
    if (!(lmin > 0) || lmax / lmin > 1e12)
        throw ChartDegenerateError(
            "first fundamental form too ill-conditioned");
}

} // namespace

CurvatureData principal_curvatures(const ParamSurface &S, double s, double t) {
    const Jet3 j = S.jet(s, t);
    const FundamentalForms f = fundamental_forms(S, s, t);
    check_conditioning(f.I);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(f.II, f.I);
    CurvatureData c;
    c.kappa2 = es.eigenvalues()[0];
    c.kappa1 = es.eigenvalues()[1];
    const Eigen::Vector2d v1 = es.eigenvectors().col(1);
    const Eigen::Vector2d v2 = es.eigenvectors().col(0);
    c.dir1 = (v1[0] * j.ps + v1[1] * j.pt).normalized();
    c.dir2 = (v2[0] * j.ps + v2[1] * j.pt).normalized();
    c.gap = c.kappa1 - c.kappa2;
    c.product = c.kappa1 * c.kappa2;
    return c;
}

Complex shape_deviator(const ParamSurface &S, double s, double t) {
    const FundamentalForms f = fundamental_forms(S, s, t);
    check_conditioning(f.I);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(f.I);
    const Eigen::Matrix2d Linv = es.operatorInverseSqrt();
    const Eigen::Matrix2d Sh = Linv * f.II * Linv; // symmetric shape operator
    return Complex(0.5 * (Sh(0, 0) - Sh(1, 1)),
                   0.5 * (Sh(0, 1) + Sh(1, 0)));
}

CongruencePoint normal_congruence(const ParamSurface &S, double s, double t) {
    const Jet3 j = S.jet(s, t);
    const NormalData nd = normal_with_derivs(j, S.orientation());
    OrientedLine line = line_from_point_dir(j.p, nd.n);

    auto tangent = [&](const Vec3 &dp, const Vec3 &dn) {
        // v = p - (p.n) n differentiated along the parameter direction.
        const Vec3 dv = dp - (dp.dot(nd.n) + j.p.dot(dn)) * nd.n -
                        j.p.dot(nd.n) * dn;
        return decompose_tangent(line, dn, dv);
    };
    return CongruencePoint{line, tangent(j.ps, nd.dn_s),
                           tangent(j.pt, nd.dn_t)};
}

GaussImageReport gauss_image_check(const ParamSurface &S, int ns, int nt,
                                   const Vec3 &pole, double tol) {
    double s0, s1, t0, t1;
    S.domain().bounds(s0, s1, t0, t1);
    GaussImageReport rep;
    rep.min_dot = 1.0;
    for (int i = 0; i < ns; ++i) {
        const double s = ns == 1 ? s0 : s0 + (s1 - s0) * i / (ns - 1);
        for (int k = 0; k < nt; ++k) {
            const double t = nt == 1 ? t0 : t0 + (t1 - t0) * k / (nt - 1);
            if (!S.domain().contains(s, t))
                continue;
            const FundamentalForms f = fundamental_forms(S, s, t);
            const double d = f.normal.dot(pole);
            rep.min_dot = std::min(rep.min_dot, d);
            if (std::abs(d) < tol)
                rep.boundary_samples.emplace_back(s, t);
        }
    }
    return rep;
}

std::vector<RayReport> completeness_probe(const ParamSurface &S,
                                          const std::vector<Ray> &rays,
                                          int panels) {
    panels = std::max(8, panels - panels % 8);
    std::vector<RayReport> out;
    out.reserve(rays.size());
    for (const Ray &ray : rays) {
        // Truncate at the domain boundary (bisection on containment).
        double tau_end = ray.tau_max;
        bool edge = false;
        auto inside = [&](double tau) {
            return S.domain().contains(ray.s0 + tau * ray.ds,
                                       ray.t0 + tau * ray.dt);
        };
        if (!inside(ray.tau_max)) {
            edge = true;
            double lo = 0, hi = ray.tau_max;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (inside(mid) ? lo : hi) = mid;
            }
            tau_end = lo;
        }

        // Composite midpoint rule; never samples the (possibly singular)
        // endpoint.
        const double dtau = tau_end / panels;
        std::vector<double> prefix(panels + 1, 0.0);
        for (int i = 0; i < panels; ++i) {
            const double tau = (i + 0.5) * dtau;
            const double s = ray.s0 + tau * ray.ds;
            const double t = ray.t0 + tau * ray.dt;
            const Jet3 j = S.jet(s, t);
            const Vec3 vel = ray.ds * j.ps + ray.dt * j.pt;
            prefix[i + 1] = prefix[i] + vel.norm() * dtau;
        }

        RayReport rep;
        rep.length = prefix[panels];
        rep.hit_domain_edge = edge;
        const double L8 = prefix[panels / 8];
        const double L4 = prefix[panels / 4];
        const double L2 = prefix[panels / 2];
        const double d2 = L2 - L4;
        const double d3 = rep.length - L2;
        (void)L8;
        rep.tail_ratio = d2 > 1e-300 ? d3 / d2 : 0.0;
        rep.diverging = rep.tail_ratio >= 0.75;
        if (!rep.diverging && rep.tail_ratio < 1.0)
            rep.extrapolated_limit =
                rep.length + d3 * rep.tail_ratio / (1.0 - rep.tail_ratio);
        else
            rep.extrapolated_limit = rep.length;
        out.push_back(rep);
    }
    return out;
}

} // namespace linelab
