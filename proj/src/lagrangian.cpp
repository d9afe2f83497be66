#include "linelab/lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include "linelab/parallel.hpp"

namespace linelab {

namespace {

// Chart image of a tangent as a real 4-vector with eta scaled to the
// section's length scale (the auxiliary Euclidean coordinates).
Eigen::Vector4d chart_vec(const LineTangent &X, double eta_scale) {
    const ChartTangent t = push_to_chart(X);
    return Eigen::Vector4d(t.dxi.real(), t.dxi.imag(),
                           t.deta.real() / eta_scale,
                           t.deta.imag() / eta_scale);
}

Complex as_complex_pair_det(const Eigen::Vector4d &a,
                            const Eigen::Vector4d &b) {
    const Complex a1(a[0], a[1]), a2(a[2], a[3]);
    const Complex b1(b[0], b[1]), b2(b[2], b[3]);
    return a1 * b2 - b1 * a2;
}

} // namespace

double lagrangian_residual(const CongruencePoint &cp, double eta_scale) {
    const double n1 = aux_norm(cp.dX1, eta_scale);
    const double n2 = aux_norm(cp.dX2, eta_scale);
    if (n1 < 1e-14 || n2 < 1e-14)
        throw DegenerateCongruenceError(
            "lagrangian_residual: degenerate tangent plane");
    return std::abs(omega(cp.dX1, cp.dX2)) / (n1 * n2 * eta_scale);
}

TangentPlaneClass complex_point_defect(const CongruencePoint &cp,
                                       double eta_scale, double sig_tol) {
    const Eigen::Vector4d x1 = chart_vec(cp.dX1, eta_scale);
    const Eigen::Vector4d x2 = chart_vec(cp.dX2, eta_scale);
    const double n1 = x1.norm(), n2 = x2.norm();
    if (n1 < 1e-14 || n2 < 1e-14)
        throw DegenerateCongruenceError(
            "complex_point_defect: degenerate tangent plane");

    TangentPlaneClass out;

    // Geometric detector: projection of J dXi onto the aux-orthogonal
    // complement of span(dX1, dX2). J is applied on the line, not assumed
    // to be multiplication by i in the chart.
    Eigen::Matrix<double, 4, 2> B;
    B.col(0) = x1;
    B.col(1) = x2;
    const Eigen::Matrix2d BtB = B.transpose() * B;
    const Eigen::Matrix<double, 2, 4> solveB = BtB.inverse() * B.transpose();
    auto defect_of = [&](const LineTangent &X) {
        const Eigen::Vector4d jx = chart_vec(apply_J(X), eta_scale);
        const Eigen::Vector4d q = jx - B * (solveB * jx);
        return q.norm() / jx.norm();
    };
    out.defect = defect_of(cp.dX1) + defect_of(cp.dX2);

    // Chart discriminant.
    out.rho = as_complex_pair_det(x1, x2);

    // Induced signature of G on the plane, from the normalized Gram.
    Eigen::Matrix2d g;
    g(0, 0) = metric_G(cp.dX1, cp.dX1);
    g(0, 1) = g(1, 0) = metric_G(cp.dX1, cp.dX2);
    g(1, 1) = metric_G(cp.dX2, cp.dX2);
    const double es2 = eta_scale * eta_scale;
    const double det_hat = g.determinant() / (n1 * n1 * n2 * n2 * es2);
    if (det_hat < -sig_tol)
        out.signature = PlaneSignature::lorentz;
    else if (det_hat > sig_tol)
        out.signature = PlaneSignature::definite;
    else
        out.signature = PlaneSignature::degenerate;
    return out;
}

// ------------------------------------------------------ LagrangianSection

namespace {

double bounding_radius(const ParamSurface &S, double s0, double hs, int ns,
                       double t0, double ht, int nt) {
    double scale = 0;
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            const double s = s0 + hs * i, t = t0 + ht * j;
            if (S.domain().contains(s, t))
                scale = std::max(scale, S.position(s, t).norm());
        }
    return std::max(scale, 1e-9);
}

} // namespace

LagrangianSection::LagrangianSection(std::shared_ptr<const ParamSurface> S,
                                     int ns, int nt)
    : surf_(std::move(S)), ns_(ns), nt_(nt) {
    double s1, t1;
    surf_->domain().bounds(s0_, s1, t0_, t1);
    hs_ = (s1 - s0_) / (ns_ - 1);
    ht_ = (t1 - t0_) / (nt_ - 1);
    eta_scale_ = bounding_radius(*surf_, s0_, hs_, ns_, t0_, ht_, nt_);
}

LagrangianSection::LagrangianSection(std::shared_ptr<const ParamSurface> S,
                                     double s0, double s1, double t0,
                                     double t1, int ns, int nt)
    : surf_(std::move(S)), s0_(s0), t0_(t0), ns_(ns), nt_(nt) {
    hs_ = (s1 - s0) / (ns_ - 1);
    ht_ = (t1 - t0) / (nt_ - 1);
    eta_scale_ = bounding_radius(*surf_, s0_, hs_, ns_, t0_, ht_, nt_);
}

std::pair<double, double>
LagrangianSection::params_of_xi(const Complex &xi,
                                std::pair<double, double> &seed) const {
    double s = seed.first, t = seed.second;
    auto xi_at = [&](double a, double b) {
        return to_chart(normal_congruence(*surf_, a, b).line).xi;
    };
    const double h = 1e-6 * std::max(std::abs(hs_), std::abs(ht_)) +
                     1e-9 * surf_->domain().scale();
    for (int it = 0; it < 60; ++it) {
        const Complex f = xi_at(s, t) - xi;
        if (std::abs(f) < 1e-12) {
            seed = {s, t};
            return seed;
        }
        const Complex fs = (xi_at(s + h, t) - xi_at(s - h, t)) / (2 * h);
        const Complex ft = (xi_at(s, t + h) - xi_at(s, t - h)) / (2 * h);
        Eigen::Matrix2d Jm;
        Jm << fs.real(), ft.real(), fs.imag(), ft.imag();
        const Eigen::Vector2d step = Jm.colPivHouseholderQr().solve(
            Eigen::Vector2d(f.real(), f.imag()));
        s -= step[0];
        t -= step[1];
        if (!std::isfinite(s) || !std::isfinite(t))
            break;
    }
    const Complex f = xi_at(s, t) - xi;
    if (std::abs(f) < 1e-9) {
        seed = {s, t};
        return seed;
    }
    throw SolverError("params_of_xi: Newton inversion of the Gauss chart "
                      "did not converge");
}

Complex LagrangianSection::eta_of_xi(const Complex &xi,
                                     std::pair<double, double> &seed) const {
    const auto [s, t] = params_of_xi(xi, seed);
    return to_chart(normal_congruence(*surf_, s, t).line).eta;
}

// ------------------------------------------------------------------ Loop

Loop Loop::circle(double cs, double ct, double radius, int n) {
    Loop l;
    l.vertices.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2 * M_PI * k / n;
        l.vertices.emplace_back(cs + radius * std::cos(a),
                                ct + radius * std::sin(a));
    }
    return l;
}

Loop Loop::polygon(std::vector<Eigen::Vector2d> verts) {
    if (verts.size() < 3)
        throw InvalidInputError("Loop::polygon: need at least 3 vertices");
    Loop l;
    l.vertices = std::move(verts);
    return l;
}

Loop Loop::reversed() const {
    Loop l;
    l.vertices.assign(vertices.rbegin(), vertices.rend());
    return l;
}

Loop Loop::then(const Loop &other) const {
    Loop l;
    l.vertices = vertices;
    l.vertices.push_back(vertices.front());
    l.vertices.insert(l.vertices.end(), other.vertices.begin(),
                      other.vertices.end());
    l.vertices.push_back(other.vertices.front());
    return l;
}

IndexReport make_index_report(int winding) {
    IndexReport r;
    r.winding = winding;
    r.maslov = 2 * winding;
    r.analytic_index = r.maslov + 2;
    r.unparam_dim = r.analytic_index - 3;
    return r;
}

int winding_number(const std::function<Complex(double, double)> &f,
                   const std::vector<Eigen::Vector2d> &samples,
                   double min_abs_rel, int max_refine) {
    if (samples.size() < 3)
        throw InvalidInputError("winding_number: need at least 3 samples");
    std::vector<Eigen::Vector2d> pts = samples;
    for (int level = 0;; ++level) {
        std::vector<Complex> vals(pts.size());
        double vmax = 0;
        for (size_t k = 0; k < pts.size(); ++k) {
            vals[k] = f(pts[k][0], pts[k][1]);
            vmax = std::max(vmax, std::abs(vals[k]));
        }
        for (const Complex &v : vals)
            if (std::abs(v) <= min_abs_rel * vmax)
                throw ComplexPointOnLoopError(
                    "winding_number: field vanishes on the loop");

        double total = 0;
        bool resolved = true;
        for (size_t k = 0; k < pts.size(); ++k) {
            const double jump =
                std::arg(vals[(k + 1) % pts.size()] / vals[k]);
            if (std::abs(jump) >= M_PI / 2) {
                resolved = false;
                break;
            }
            total += jump;
        }
        if (resolved) {
            const double w = total / (2 * M_PI);
            const double rounded = std::round(w);
            if (std::abs(w - rounded) > 0.1)
                throw ResolutionError(
                    "winding_number: phase sum far from an integer");
            return (int)rounded;
        }
        if (level >= max_refine)
            throw ResolutionError(
                "winding_number: could not resolve phase jumps");
        std::vector<Eigen::Vector2d> finer;
        finer.reserve(2 * pts.size());
        for (size_t k = 0; k < pts.size(); ++k) {
            finer.push_back(pts[k]);
            finer.push_back(0.5 * (pts[k] + pts[(k + 1) % pts.size()]));
        }
        pts.swap(finer);
    }
}

IndexReport maslov_index(const LagrangianSection &sec, const Loop &loop,
                         double min_abs_rel, int max_refine) {
    const int w = winding_number(
        [&](double s, double t) { return sec.rho_at(s, t); }, loop.vertices,
        min_abs_rel, max_refine);
    return make_index_report(w);
}

// ------------------------------------------------------------ SectionGrid

SectionGrid::SectionGrid(int ns, int nt, double s0, double t0, double hs,
                         double ht, double eta_scale)
    : ns_(ns), nt_(nt), s0_(s0), t0_(t0), hs_(hs), ht_(ht),
      eta_scale_(eta_scale), v_(ns * nt) {}

SectionGrid SectionGrid::from_section(const LagrangianSection &sec) {
    SectionGrid g(sec.ns(), sec.nt(), sec.s_node(0), sec.t_node(0), sec.hs(),
                  sec.ht(), sec.length_scale());
    for (int i = 0; i < sec.ns(); ++i)
        for (int j = 0; j < sec.nt(); ++j)
            g.value(i, j) =
                to_chart(sec.at(sec.s_node(i), sec.t_node(j)).line);
    return g;
}

CongruencePoint SectionGrid::point(int i, int j) const {
    if (i < 1 || i >= ns_ - 1 || j < 1 || j >= nt_ - 1)
        throw InvalidInputError("SectionGrid::point: interior nodes only");
    const LineChart &c = value(i, j);
    const ChartTangent ts{
        (value(i + 1, j).xi - value(i - 1, j).xi) / (2 * hs_),
        (value(i + 1, j).eta - value(i - 1, j).eta) / (2 * hs_)};
    const ChartTangent tt{
        (value(i, j + 1).xi - value(i, j - 1).xi) / (2 * ht_),
        (value(i, j + 1).eta - value(i, j - 1).eta) / (2 * ht_)};
    return CongruencePoint{from_chart(c), pull_from_chart(c, ts),
                           pull_from_chart(c, tt)};
}

double SectionGrid::residual(int i, int j) const {
    return lagrangian_residual(point(i, j), eta_scale_);
}

double SectionGrid::max_interior_residual() const {
    double worst = 0;
    for (int i = 1; i < ns_ - 1; ++i)
        for (int j = 1; j < nt_ - 1; ++j)
            worst = std::max(worst, residual(i, j));
    return worst;
}

SectionGrid perturb_lagrangian(const LagrangianSection &sec,
                               const PerturbationPotential &pot) {
    const int ns = sec.ns(), nt = sec.nt();
    SectionGrid out(ns, nt, sec.s_node(0), sec.t_node(0), sec.hs(), sec.ht(),
                    sec.length_scale());

    std::vector<double> phi(ns * nt);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            phi[i * nt + j] = pot.phi(sec.s_node(i), sec.t_node(j));
    auto dphi = [&](int i, int j) {
        auto val = [&](int a, int b) { return phi[a * nt + b]; };
        double ds, dt;
        if (i == 0)
            ds = (-3 * val(0, j) + 4 * val(1, j) - val(2, j)) / (2 * sec.hs());
        else if (i == ns - 1)
            ds = (3 * val(i, j) - 4 * val(i - 1, j) + val(i - 2, j)) /
                 (2 * sec.hs());
        else
            ds = (val(i + 1, j) - val(i - 1, j)) / (2 * sec.hs());
        if (j == 0)
            dt = (-3 * val(i, 0) + 4 * val(i, 1) - val(i, 2)) / (2 * sec.ht());
        else if (j == nt - 1)
            dt = (3 * val(i, j) - 4 * val(i, j - 1) + val(i, j - 2)) /
                 (2 * sec.ht());
        else
            dt = (val(i, j + 1) - val(i, j - 1)) / (2 * sec.ht());
        return Eigen::Vector2d(ds, dt);
    };

    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const CongruencePoint cp = sec.at(sec.s_node(i), sec.t_node(j));
            const TangentPlaneClass cls =
                complex_point_defect(cp, sec.length_scale());
            if (cls.signature != PlaneSignature::lorentz)
                throw CannotInvertGError(
                    "perturb_lagrangian: section not totally real (induced "
                    "metric not Lorentz) at a grid node");
            Eigen::Matrix2d g;
            g(0, 0) = metric_G(cp.dX1, cp.dX1);
            g(0, 1) = g(1, 0) = metric_G(cp.dX1, cp.dX2);
            g(1, 1) = metric_G(cp.dX2, cp.dX2);
            const Eigen::Vector2d coef = g.inverse() * dphi(i, j);
            const LineTangent grad = lin_comb(coef[0], cp.dX1, coef[1], cp.dX2);
            const ChartTangent dc = push_to_chart(apply_J(grad));
            const LineChart base = to_chart(cp.line);
            out.value(i, j) = LineChart{base.xi + pot.epsilon * dc.dxi,
                                        base.eta + pot.epsilon * dc.deta};
        }
    }
    return out;
}

// --------------------------------------------------------- classification

std::optional<int>
cell_winding(const std::function<Complex(double, double)> &f, double s0,
             double s1, double t0, double t1, double floor, int max_refine) {
    int per_edge = 1;
    for (int level = 0; level <= max_refine; ++level, per_edge *= 2) {
        std::vector<Complex> vals;
        vals.reserve(4 * per_edge);
        auto edge = [&](double as, double at, double bs, double bt) {
            for (int k = 0; k < per_edge; ++k) {
                const double u = (double)k / per_edge;
                vals.push_back(f(as + u * (bs - as), at + u * (bt - at)));
            }
        };
        edge(s0, t0, s1, t0);
        edge(s1, t0, s1, t1);
        edge(s1, t1, s0, t1);
        edge(s0, t1, s0, t0);

        bool ok = true;
        for (const Complex &v : vals)
            if (std::abs(v) <= floor) {
                ok = false;
                break;
            }
        if (!ok)
            return std::nullopt;

        double total = 0;
        bool resolved = true;
        for (size_t k = 0; k < vals.size(); ++k) {
            const double jump =
                std::arg(vals[(k + 1) % vals.size()] / vals[k]);
            if (std::abs(jump) >= M_PI / 2) {
                resolved = false;
                break;
            }
            total += jump;
        }
        if (resolved) {
            const double w = total / (2 * M_PI);
            const double rounded = std::round(w);
            if (std::abs(w - rounded) > 0.1)
                return std::nullopt;
            return (int)rounded;
        }
    }
    return std::nullopt;
}

GridClassification classify_grid(const LagrangianSection &sec,
                                 const DetectorThresholds &thr, int threads) {
    const int ns = sec.ns(), nt = sec.nt();
    GridClassification out;
    out.ns = ns;
    out.nt = nt;
    const int n = ns * nt;
    out.gap.assign(n, 0);
    out.product.assign(n, 0);
    out.kappa1.assign(n, 0);
    out.kappa2.assign(n, 0);
    out.residual.assign(n, 0);
    out.defect.assign(n, 0);
    out.abs_rho.assign(n, 0);
    out.signature.assign(n, PlaneSignature::degenerate);
    out.valid.assign(n, 0);

    parallel_for(ns, threads, [&](int i) {
        const double s = sec.s_node(i);
        for (int j = 0; j < nt; ++j) {
            const double t = sec.t_node(j);
            const int id = i * nt + j;
            if (!sec.node_valid(i, j))
                continue;
            const CurvatureData cd = principal_curvatures(sec.surface(), s, t);
            const CongruencePoint cp = sec.at(s, t);
            const TangentPlaneClass cls =
                complex_point_defect(cp, sec.length_scale());
            out.valid[id] = 1;
            out.gap[id] = cd.gap;
            out.product[id] = cd.product;
            out.kappa1[id] = cd.kappa1;
            out.kappa2[id] = cd.kappa2;
            out.residual[id] = lagrangian_residual(cp, sec.length_scale());
            out.defect[id] = cls.defect;
            out.abs_rho[id] = std::abs(cls.rho);
            out.signature[id] = cls.signature;
        }
    });

    out.min_gap = std::numeric_limits<double>::infinity();
    out.max_residual = 0;
    for (int id = 0; id < n; ++id) {
        if (!out.valid[id])
            continue;
        out.min_gap = std::min(out.min_gap, out.gap[id]);
        out.max_residual = std::max(out.max_residual, out.residual[id]);
    }

    const double noise_floor = 1e-12;
    auto dev = [&](double s, double t) {
        return shape_deviator(sec.surface(), s, t);
    };
    auto rho = [&](double s, double t) { return sec.rho_at(s, t); };
    for (int i = 0; i + 1 < ns; ++i) {
        for (int j = 0; j + 1 < nt; ++j) {
            const int c00 = i * nt + j, c10 = (i + 1) * nt + j;
            const int c01 = i * nt + j + 1, c11 = (i + 1) * nt + j + 1;
            if (!(out.valid[c00] && out.valid[c10] && out.valid[c01] &&
                  out.valid[c11]))
                continue;
            const double s0 = sec.s_node(i), s1 = sec.s_node(i + 1);
            const double t0 = sec.t_node(j), t1 = sec.t_node(j + 1);

            bool umbilic = out.gap[c00] < thr.gap && out.gap[c10] < thr.gap &&
                           out.gap[c01] < thr.gap && out.gap[c11] < thr.gap;
            if (!umbilic) {
                const auto w = cell_winding(dev, s0, s1, t0, t1, noise_floor);
                umbilic = w.has_value() && *w != 0;
            }
            if (umbilic)
                out.umbilic_cells.emplace_back(i, j);

            auto below = [&](int id) {
                return out.defect[id] < thr.defect &&
                       out.abs_rho[id] < thr.rho;
            };
            bool complex_cell =
                below(c00) && below(c10) && below(c01) && below(c11);
            if (!complex_cell) {
                const auto w = cell_winding(rho, s0, s1, t0, t1, noise_floor);
                complex_cell = w.has_value() && *w != 0;
            }
            if (complex_cell)
                out.complex_cells.emplace_back(i, j);
        }
    }
    out.cells_coincide = out.umbilic_cells == out.complex_cells;
    return out;
}

} // namespace linelab
