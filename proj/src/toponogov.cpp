#include "linelab/toponogov.hpp"

#include <boost/math/differentiation/autodiff.hpp>
#include <cmath>

#include "linelab/parallel.hpp"

namespace linelab {

namespace {

template <class F> Jet3 autodiff_jet(F &&f, double s, double t) {
    namespace ad = boost::math::differentiation;
    auto const vars = ad::make_ftuple<double, 3, 3>(s, t);
    auto const &S = std::get<0>(vars);
    auto const &T = std::get<1>(vars);
    auto const comps = f(S, T);
    Jet3 j;
    for (int k = 0; k < 3; ++k) {
        auto const &c = comps[k];
        j.p[k] = c.derivative(0, 0);
        j.ps[k] = c.derivative(1, 0);
        j.pt[k] = c.derivative(0, 1);
        j.pss[k] = c.derivative(2, 0);
        j.pst[k] = c.derivative(1, 1);
        j.ptt[k] = c.derivative(0, 2);
        j.psss[k] = c.derivative(3, 0);
        j.psst[k] = c.derivative(2, 1);
        j.pstt[k] = c.derivative(1, 2);
        j.pttt[k] = c.derivative(0, 3);
    }
    return j;
}

double get_param(const std::map<std::string, double> &p,
                 const std::string &key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double> &p,
                    std::initializer_list<const char *> known,
                    const std::string &family) {
    for (const auto &[k, v] : p) {
        bool ok = false;
        for (const char *name : known)
            if (k == name)
                ok = true;
        if (!ok)
            throw InvalidInputError("unknown parameter '" + k +
                                    "' for family '" + family + "'");
    }
}

class PlaneSurface : public ParamSurface {
  public:
    explicit PlaneSurface(double extent)
        : dom_(Domain::rect(-extent, extent, -extent, extent)) {}
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        return autodiff_jet(
            [](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                return std::array{S + K, T + K, K};
            },
            s, t);
    }

  private:
    Domain dom_;
};

class SphereSurface : public ParamSurface {
  public:
    explicit SphereSurface(double radius)
        : r_(radius), dom_(Domain::rect(-3.0, 3.0, -1.2, 1.2)) {
        // Default inward orientation: principal curvatures +1/R.
        orient_ = -1.0;
    }
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        const double r = r_;
        return autodiff_jet(
            [r](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                return std::array{r * cos(T) * cos(S) + K,
                                  r * cos(T) * sin(S) + K, r * sin(T) + K};
            },
            s, t);
    }

  private:
    double r_;
    Domain dom_;
};

class CylinderSurface : public ParamSurface {
  public:
    explicit CylinderSurface(double radius)
        : r_(radius), dom_(Domain::rect(-3.0, 3.0, -1.0, 1.0)) {
        orient_ = -1.0; // inward: kappa = (1/R, 0)
    }
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        const double r = r_;
        return autodiff_jet(
            [r](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                return std::array{r * cos(S) + K, r * sin(S) + K, T + K};
            },
            s, t);
    }

  private:
    double r_;
    Domain dom_;
};

class ParaboloidSurface : public ParamSurface {
  public:
    ParaboloidSurface(double c, double extent)
        : c_(c), dom_(Domain::rect(-extent, extent, -extent, extent)) {}
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        const double c = c_;
        return autodiff_jet(
            [c](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                return std::array{S + K, T + K, (S * S + T * T) / (2 * c) + K};
            },
            s, t);
    }

  private:
    double c_;
    Domain dom_;
};

// Rotational cap z = (1/a) x artanh(x), x = r/r0. As a function of
// u = r^2/r0^2 this is g(u) = sum_k u^k/(2k-1), an even series, so the
// graph is analytic through the tip. The tip is umbilic; the surface is
// asymptotic to the cylinder r = r0 and its radius function matches
// r = r0 tanh(a z + 1) up to the tip region.
class CigarSurface : public ParamSurface {
  public:
    CigarSurface(double r0, double a, double r_inner, double r_outer)
        : r0_(r0), a_(a) {
        dom_ = r_inner > 0 ? Domain::annulus(r_inner, r_outer)
                           : Domain::disc(r_outer);
    }
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        const double u0 = (s * s + t * t) / (r0_ * r0_);
        const bool series = u0 < 0.04;
        const double r0 = r0_, a = a_;
        return autodiff_jet(
            [series, r0, a](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                const auto u = (S * S + T * T) / (r0 * r0) + K;
                std::decay_t<decltype(u)> g;
                if (series) {
                    // g(u) = sum_{k>=1} u^k/(2k-1), truncated far below
                    // double precision for u < 0.04.
                    g = 0 * u;
                    auto p = u;
                    for (int k = 1; k <= 12; ++k) {
                        g += p / (2 * k - 1);
                        p = p * u;
                    }
                } else {
                    const auto x = sqrt(u);
                    g = x * 0.5 * log((1 + x) / (1 - x));
                }
                return std::array{S + K, T + K, g / a + K};
            },
            s, t);
    }

  private:
    double r0_, a_;
    Domain dom_;
};

class ConvexGraphSurface : public ParamSurface {
  public:
    explicit ConvexGraphSurface(double extent)
        : dom_(Domain::rect(-extent, extent, -extent, extent)) {}
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override {
        return autodiff_jet(
            [](const auto &S, const auto &T) {
                const auto K = 0 * S + 0 * T;
                return std::array{S + K, T + K, S * S / 2 + cosh(T) - 1 + K};
            },
            s, t);
    }

  private:
    Domain dom_;
};

class CallableSurface : public ParamSurface {
  public:
    CallableSurface(std::function<Vec3(double, double)> f, Domain dom,
                    double fd_step_rel)
        : f_(std::move(f)), dom_(dom) {
        // Reuse the expression-surface differencing through a tiny shim:
        // expression surfaces and callable surfaces share fd jets, exposed
        // here by building the expressions... instead we duplicate the
        // stencil; see fd_jet in surfgeom.cpp.
        h1_ = fd_step_rel * dom.scale();
    }
    const Domain &domain() const override { return dom_; }
    Jet3 jet(double s, double t) const override;

  private:
    std::function<Vec3(double, double)> f_;
    Domain dom_;
    double h1_;
};

// Richardson-extrapolated central differences (same scheme as expression
// surfaces; kept local to avoid a public FD-jet entry point).
Vec3 cd1(const std::function<Vec3(double, double)> &f, double s, double t,
         bool in_s, double h) {
    auto D = [&](double hh) -> Vec3 {
        return in_s ? (f(s + hh, t) - f(s - hh, t)) / (2 * hh)
                    : (f(s, t + hh) - f(s, t - hh)) / (2 * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Vec3 cd2(const std::function<Vec3(double, double)> &f, double s, double t,
         bool in_s, double h) {
    auto D = [&](double hh) -> Vec3 {
        return in_s ? (f(s + hh, t) - 2 * f(s, t) + f(s - hh, t)) / (hh * hh)
                    : (f(s, t + hh) - 2 * f(s, t) + f(s, t - hh)) / (hh * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Vec3 cd2m(const std::function<Vec3(double, double)> &f, double s, double t,
          double h) {
    auto D = [&](double hh) -> Vec3 {
        return (f(s + hh, t + hh) - f(s + hh, t - hh) - f(s - hh, t + hh) +
                f(s - hh, t - hh)) /
               (4 * hh * hh);
    };
    return (4.0 * D(h / 2) - D(h)) / 3.0;
}

Jet3 CallableSurface::jet(double s, double t) const {
    Jet3 j;
    j.p = f_(s, t);
    j.ps = cd1(f_, s, t, true, h1_);
    j.pt = cd1(f_, s, t, false, h1_);
    j.pss = cd2(f_, s, t, true, h1_);
    j.ptt = cd2(f_, s, t, false, h1_);
    j.pst = cd2m(f_, s, t, h1_);
    const double h3 = std::max(100 * h1_, 1e-2);
    auto fss = [this](double a, double b) { return cd2(f_, a, b, true, h1_); };
    auto ftt = [this](double a, double b) { return cd2(f_, a, b, false, h1_); };
    j.psss = cd1(fss, s, t, true, h3);
    j.psst = cd1(fss, s, t, false, h3);
    j.pstt = cd1(ftt, s, t, true, h3);
    j.pttt = cd1(ftt, s, t, false, h3);
    return j;
}

} // namespace

std::shared_ptr<ParamSurface>
make_builtin(const std::string &name,
             const std::map<std::string, double> &params) {
    if (name == "plane") {
        reject_unknown(params, {"extent"}, name);
        const double e = get_param(params, "extent", 50.0);
        if (!(e > 0))
            throw InvalidInputError("plane: extent must be positive");
        return std::make_shared<PlaneSurface>(e);
    }
    if (name == "sphere") {
        reject_unknown(params, {"radius"}, name);
        const double r = get_param(params, "radius", 1.0);
        if (!(r > 0))
            throw InvalidInputError("sphere: radius must be positive");
        return std::make_shared<SphereSurface>(r);
    }
    if (name == "cylinder") {
        reject_unknown(params, {"radius"}, name);
        const double r = get_param(params, "radius", 1.0);
        if (!(r > 0))
            throw InvalidInputError("cylinder: radius must be positive");
        return std::make_shared<CylinderSurface>(r);
    }
    if (name == "paraboloid") {
        reject_unknown(params, {"c", "extent"}, name);
        const double c = get_param(params, "c", 1.0);
        const double e = get_param(params, "extent", 1.0);
        if (c == 0 || !(e > 0))
            throw InvalidInputError("paraboloid: need c != 0, extent > 0");
        return std::make_shared<ParaboloidSurface>(c, e);
    }
    if (name == "cigar") {
        reject_unknown(params, {"r0", "a", "r_inner", "r_outer"}, name);
        const double r0 = get_param(params, "r0", 1.0);
        const double a = get_param(params, "a", 1.0);
        const double ri = get_param(params, "r_inner", 0.0);
        const double ro = get_param(params, "r_outer", 0.98 * r0);
        if (!(r0 > 0) || !(a > 0) || ri < 0 || !(ro > ri) || ro >= r0)
            throw InvalidInputError(
                "cigar: need r0, a > 0 and 0 <= r_inner < r_outer < r0");
        return std::make_shared<CigarSurface>(r0, a, ri, ro);
    }
    if (name == "convex_graph") {
        reject_unknown(params, {"extent"}, name);
        const double e = get_param(params, "extent", 12.0);
        if (!(e > 0))
            throw InvalidInputError("convex_graph: extent must be positive");
        return std::make_shared<ConvexGraphSurface>(e);
    }
    throw InvalidInputError("unknown builtin family '" + name + "'");
}

std::shared_ptr<ParamSurface>
make_callable_surface(std::function<Vec3(double, double)> position,
                      const Domain &domain, double fd_step_rel) {
    return std::make_shared<CallableSurface>(std::move(position), domain,
                                             fd_step_rel);
}

// ------------------------------------------------------------- profiles

namespace {

class TanhProfile : public ToponogovProfile {
  public:
    TanhProfile(double r0, double a) : r0_(r0), a_(a) {}
    double r(double z, double) const override {
        return r0_ * std::tanh(a_ * z);
    }
    double r_z(double z, double) const override {
        const double c = std::cosh(a_ * z);
        return r0_ * a_ / (c * c);
    }
    double r_zz(double z, double) const override {
        const double c = std::cosh(a_ * z);
        return -2 * r0_ * a_ * a_ * std::tanh(a_ * z) / (c * c);
    }
    double r0(double) const override { return r0_; }

  private:
    double r0_, a_;
};

class LinearProfile : public ToponogovProfile {
  public:
    explicit LinearProfile(double r0) : r0_(r0) {}
    double r(double z, double) const override { return r0_ * (1 + z); }
    double r_z(double, double) const override { return r0_; }
    double r_zz(double, double) const override { return 0; }
    double r0(double) const override {
        return std::numeric_limits<double>::infinity();
    }

  private:
    double r0_;
};

class SineProfile : public ToponogovProfile {
  public:
    explicit SineProfile(double r0) : r0_(r0) {}
    double r(double z, double) const override { return r0_ * std::sin(z); }
    double r_z(double z, double) const override { return r0_ * std::cos(z); }
    double r_zz(double z, double) const override { return -r0_ * std::sin(z); }
    double r0(double) const override { return r0_; }

  private:
    double r0_;
};

} // namespace

std::shared_ptr<ToponogovProfile> make_tanh_profile(double r0, double a) {
    if (!(r0 > 0) || !(a > 0))
        throw InvalidInputError("tanh profile: need r0, a > 0");
    return std::make_shared<TanhProfile>(r0, a);
}

std::shared_ptr<ToponogovProfile> make_linear_profile(double r0) {
    return std::make_shared<LinearProfile>(r0);
}

std::shared_ptr<ToponogovProfile> make_sine_profile(double r0) {
    return std::make_shared<SineProfile>(r0);
}

ProfileCheckReport profile_check(const ToponogovProfile &p, int nz, int nphi,
                                 double z_max, double slack,
                                 double limit_tol) {
    ProfileCheckReport rep;
    rep.worst_rz = std::numeric_limits<double>::infinity();
    rep.worst_rzz = -std::numeric_limits<double>::infinity();
    double r0_scale = 0;
    bool r0_finite = true;
    for (int j = 0; j < nphi; ++j) {
        const double phi = 2 * M_PI * j / nphi;
        const double r0 = p.r0(phi);
        if (!std::isfinite(r0))
            r0_finite = false;
        else
            r0_scale = std::max(r0_scale, std::abs(r0));
        for (int i = 1; i <= nz; ++i) {
            const double z = z_max * i / nz;
            const double rz = p.r_z(z, phi);
            const double rzz = p.r_zz(z, phi);
            if (rz < rep.worst_rz) {
                rep.worst_rz = rz;
                rep.worst_rz_z = z;
                rep.worst_rz_phi = phi;
            }
            if (rzz > rep.worst_rzz) {
                rep.worst_rzz = rzz;
                rep.worst_rzz_z = z;
                rep.worst_rzz_phi = phi;
            }
            if (std::isfinite(r0))
                rep.max_r_minus_r0 =
                    std::max(rep.max_r_minus_r0, p.r(z, phi) - r0);
            else
                rep.max_r_minus_r0 = std::numeric_limits<double>::infinity();
        }
        if (std::isfinite(r0))
            rep.approach_gap =
                std::max(rep.approach_gap, std::abs(p.r(z_max, phi) - r0));
        else
            rep.approach_gap = std::numeric_limits<double>::infinity();
        rep.rz_at_zmax =
            std::max(rep.rz_at_zmax, std::abs(p.r_z(z_max, phi)));
    }
    rep.monotone_ok = rep.worst_rz >= -slack;
    rep.concave_ok = rep.worst_rzz <= slack;
    rep.bounded_ok = r0_finite && rep.max_r_minus_r0 <= 1e-6;
    const double scale = r0_finite && r0_scale > 0 ? r0_scale : 1.0;
    rep.limits_ok = r0_finite && rep.approach_gap <= limit_tol * scale &&
                    rep.rz_at_zmax <= limit_tol * scale;
    return rep;
}

std::shared_ptr<ParamSurface>
surface_from_profile(std::shared_ptr<const ToponogovProfile> p, double z0,
                     double z1) {
    if (!(z1 > z0))
        throw InvalidInputError("surface_from_profile: need z1 > z0");
    auto pos = [p](double z, double phi) {
        const double r = p->r(z, phi);
        return Vec3(r * std::cos(phi), r * std::sin(phi), z);
    };
    return make_callable_surface(pos, Domain::rect(z0, z1, 0.0, 2 * M_PI),
                                 1e-4);
}

GapSweepResult gap_sweep(const ParamSurface &S,
                         const std::vector<double> &scales, double rel_tol,
                         int base_n, int max_refine, int threads) {
    if (scales.empty())
        throw InvalidInputError("gap_sweep: no region scales given");
    for (size_t i = 1; i < scales.size(); ++i)
        if (!(scales[i] > scales[i - 1]))
            throw InvalidInputError("gap_sweep: scales must increase");

    const double R = scales.back();
    if (base_n % 2 == 0)
        ++base_n; // odd node counts keep grids nested and include the origin

    GapSweepResult res;
    res.radii = scales;
    std::vector<double> prev;
    int n = base_n;
    for (int level = 0; level <= max_refine; ++level, n = 2 * (n - 1) + 1) {
        std::vector<double> gap(n * n,
                                std::numeric_limits<double>::quiet_NaN());
        parallel_for(
            n, threads,
            [&](int i) {
                const double s = -R + 2.0 * R * i / (n - 1);
                for (int j = 0; j < n; ++j) {
                    const double t = -R + 2.0 * R * j / (n - 1);
                    if (!S.domain().contains(s, t) ||
                        s * s + t * t > R * R + 1e-12)
                        continue;
                    gap[i * n + j] = principal_curvatures(S, s, t).gap;
                }
            });

        std::vector<double> mins(scales.size(),
                                 std::numeric_limits<double>::infinity());
        for (int i = 0; i < n; ++i) {
            const double s = -R + 2.0 * R * i / (n - 1);
            for (int j = 0; j < n; ++j) {
                const double g = gap[i * n + j];
                if (std::isnan(g))
                    continue;
                const double t = -R + 2.0 * R * j / (n - 1);
                const double r2 = s * s + t * t;
                for (size_t k = 0; k < scales.size(); ++k)
                    if (r2 <= scales[k] * scales[k] + 1e-12)
                        mins[k] = std::min(mins[k], g);
            }
        }

        res.min_gap = mins;
        res.grid_n = n;
        if (!prev.empty()) {
            bool stable = true;
            for (size_t k = 0; k < mins.size(); ++k)
                if (std::abs(mins[k] - prev[k]) >
                    rel_tol * std::max(std::abs(mins[k]), 1e-9))
                    stable = false;
            if (stable)
                break;
        }
        prev = mins;
    }

    // Log-log trend over the positive entries; reported, not asserted.
    int m = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < res.radii.size(); ++k) {
        if (res.min_gap[k] <= 1e-12)
            continue;
        const double x = std::log(res.radii[k]);
        const double y = std::log(res.min_gap[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m != (int)res.radii.size())
        res.trend = "zero-attained";
    else {
        const double denom = m * sxx - sx * sx;
        res.loglog_slope = denom != 0 ? (m * sxy - sx * sy) / denom : 0;
        res.trend = res.loglog_slope < -0.1 ? "decreasing" : "flat";
    }
    return res;
}

} // namespace linelab
