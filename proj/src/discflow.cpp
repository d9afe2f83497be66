#include "linelab/discflow.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace linelab {

namespace {

// One residual row: res = sum over (node, coeff) of coeff * f(node), the
// discrete (d_x + i d_y) at the row's node. Radial differences are central
// (one-sided on the boundary ring); angular differences use 1/(2 sin dth)
// and are exact on degree-one trigonometric polynomials, which makes the
// whole stencil exact on maps affine in z and conj(z).
struct StencilRow {
    int node = 0;
    double weight = 0;
    std::vector<std::pair<int, Complex>> terms;
    bool one_sided = false;
};

struct StencilTable {
    std::vector<StencilRow> rows; // one per non-center node
    double total_weight = 0;
};

StencilTable build_stencil(const DiscMesh &m) {
    StencilTable tab;
    const double dr = m.dr();
    const double dth = m.dtheta();
    const double ang = 1.0 / (2 * std::sin(dth));
    tab.rows.reserve(m.n_r * m.n_theta);
    for (int i = 1; i <= m.n_r; ++i) {
        const double r = m.r(i);
        const double w = (i == m.n_r) ? r * (dr / 2) * dth : r * dr * dth;
        for (int j = 0; j < m.n_theta; ++j) {
            StencilRow row;
            row.node = m.idx(i, j);
            row.weight = w;
            const Complex phase = std::polar(1.0, m.theta(j));
            if (i < m.n_r) {
                row.terms.emplace_back(m.idx(i + 1, j), phase / (2 * dr));
                row.terms.emplace_back(m.idx(i - 1, j), -phase / (2 * dr));
            } else {
                row.one_sided = true;
                row.terms.emplace_back(m.idx(i, j), 3.0 * phase / (2 * dr));
                row.terms.emplace_back(m.idx(i - 1, j),
                                       -4.0 * phase / (2 * dr));
                row.terms.emplace_back(m.idx(i - 2, j), phase / (2 * dr));
            }
            const Complex iphase = Complex(0, 1) * phase * ang / r;
            row.terms.emplace_back(m.idx(i, j + 1), iphase);
            row.terms.emplace_back(m.idx(i, j - 1), -iphase);
            tab.rows.push_back(std::move(row));
            tab.total_weight += w;
        }
    }
    return tab;
}

Complex apply_row(const StencilRow &row, const std::vector<Complex> &f) {
    Complex acc = 0;
    for (const auto &[node, c] : row.terms)
        acc += c * f[node];
    return acc;
}

double norm_from_table(const StencilTable &tab, const DiscMesh &m) {
    double acc = 0;
    for (const StencilRow &row : tab.rows)
        acc += row.weight * (std::norm(apply_row(row, m.xi)) +
                             std::norm(apply_row(row, m.eta)));
    return std::sqrt(acc / tab.total_weight);
}

// Complex gradient of E = 1/2 dbar_norm^2 with respect to every node value
// (dE/dx + i dE/dy per node; xi and eta components are independent).
void gradient_from_table(const StencilTable &tab, const DiscMesh &m,
                         std::vector<Complex> &gxi,
                         std::vector<Complex> &geta) {
    gxi.assign(m.nodes(), Complex(0));
    geta.assign(m.nodes(), Complex(0));
    for (const StencilRow &row : tab.rows) {
        const double wn = row.weight / tab.total_weight;
        const Complex rxi = apply_row(row, m.xi);
        const Complex reta = apply_row(row, m.eta);
        for (const auto &[node, c] : row.terms) {
            gxi[node] += wn * rxi * std::conj(c);
            geta[node] += wn * reta * std::conj(c);
        }
    }
}

struct NodeJets {
    Eigen::Vector4d xr, xt;        // first derivatives in (r, theta)
    Eigen::Vector4d xrr, xrt, xtt; // second derivatives
};

Eigen::Vector4d pack(const Complex &xi, const Complex &eta) {
    return Eigen::Vector4d(xi.real(), xi.imag(), eta.real(), eta.imag());
}

Eigen::Vector4d node_value(const DiscMesh &m, int i, int j) {
    const int n = m.idx(i, j);
    return pack(m.xi[n], m.eta[n]);
}

NodeJets node_jets(const DiscMesh &m, int i, int j, bool second = true) {
    const double dr = m.dr();
    const double dth = m.dtheta();
    const double sang = 2 * std::sin(dth);
    const double cang = 2 * (1 - std::cos(dth));
    NodeJets out;
    auto val = [&](int a, int b) { return node_value(m, a, b); };
    if (i < m.n_r)
        out.xr = (val(i + 1, j) - val(i - 1, j)) / (2 * dr);
    else
        out.xr =
            (3 * val(i, j) - 4 * val(i - 1, j) + val(i - 2, j)) / (2 * dr);
    out.xt = (val(i, j + 1) - val(i, j - 1)) / sang;
    if (!second)
        return out;
    out.xtt = (val(i, j + 1) - 2 * val(i, j) + val(i, j - 1)) / cang;
    auto dth_at = [&](int a) -> Eigen::Vector4d {
        return (val(a, j + 1) - val(a, j - 1)) / sang;
    };
    if (i < m.n_r) {
        out.xrr = (val(i + 1, j) - 2 * val(i, j) + val(i - 1, j)) / (dr * dr);
        out.xrt = (dth_at(i + 1) - dth_at(i - 1)) / (2 * dr);
    } else {
        out.xrr = (2 * val(i, j) - 5 * val(i - 1, j) + 4 * val(i - 2, j) -
                   val(i - 3, j)) /
                  (dr * dr);
        out.xrt =
            (3 * dth_at(i) - 4 * dth_at(i - 1) + dth_at(i - 2)) / (2 * dr);
    }
    return out;
}

Eigen::Matrix2d induced_metric(const Eigen::Matrix4d &G,
                               const NodeJets &jets) {
    Eigen::Matrix2d g;
    g(0, 0) = jets.xr.dot(G * jets.xr);
    g(0, 1) = g(1, 0) = jets.xr.dot(G * jets.xt);
    g(1, 1) = jets.xt.dot(G * jets.xt);
    return g;
}

bool spacelike(const Eigen::Matrix2d &g) {
    return g(0, 0) > 0 && g.determinant() > 0;
}

} // namespace

// ------------------------------------------------------- residual / norm

DbarResidual dbar_residual(const DiscMesh &mesh, int ring, int spoke) {
    if (ring < 1 || ring > mesh.n_r)
        throw InvalidInputError("dbar_residual: ring out of range");
    const double dr = mesh.dr();
    const double ang = 1.0 / (2 * std::sin(mesh.dtheta()));
    const Complex phase = std::polar(1.0, mesh.theta(spoke));
    auto comp = [&](const std::vector<Complex> &f) {
        Complex radial;
        if (ring < mesh.n_r)
            radial = (f[mesh.idx(ring + 1, spoke)] -
                      f[mesh.idx(ring - 1, spoke)]) /
                     (2 * dr);
        else
            radial = (3.0 * f[mesh.idx(ring, spoke)] -
                      4.0 * f[mesh.idx(ring - 1, spoke)] +
                      f[mesh.idx(ring - 2, spoke)]) /
                     (2 * dr);
        const Complex angular = (f[mesh.idx(ring, spoke + 1)] -
                                 f[mesh.idx(ring, spoke - 1)]) *
                                ang / mesh.r(ring);
        return phase * (radial + Complex(0, 1) * angular);
    };
    DbarResidual res;
    res.xi = comp(mesh.xi);
    res.eta = comp(mesh.eta);
    res.one_sided = ring == mesh.n_r;
    return res;
}

double dbar_norm(const DiscMesh &mesh) {
    return norm_from_table(build_stencil(mesh), mesh);
}

// --------------------------------------------------------- section chart

CongruenceSectionChart::CongruenceSectionChart(LagrangianSection sec)
    : sec_(std::move(sec)) {}

Complex CongruenceSectionChart::eta(const Complex &xi,
                                    std::pair<double, double> &seed) const {
    return sec_.eta_of_xi(xi, seed);
}

std::pair<double, double>
CongruenceSectionChart::initial_seed(const Complex &xi) const {
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> arg{sec_.s_node(sec_.ns() / 2),
                                  sec_.t_node(sec_.nt() / 2)};
    for (int i = 0; i < sec_.ns(); ++i)
        for (int j = 0; j < sec_.nt(); ++j) {
            if (!sec_.node_valid(i, j))
                continue;
            const double s = sec_.s_node(i), t = sec_.t_node(j);
            const Complex x = to_chart(sec_.at(s, t).line).xi;
            const double d = std::abs(x - xi);
            if (d < best) {
                best = d;
                arg = {s, t};
            }
        }
    return arg;
}

// -------------------------------------------------------------- init_disc

DiscMesh init_disc(const SectionChart &section, const Complex &center,
                   double radius, int n_r, int n_theta) {
    if (n_r < 4 || n_theta < 8)
        throw InvalidInputError(
            "init_disc: mesh too coarse (need n_r >= 4, n_theta >= 8)");
    if (radius < 0)
        throw InvalidInputError("init_disc: negative radius");
    DiscMesh m(n_r, n_theta);
    m.boundary_seed.resize(n_theta);

    std::pair<double, double> seed = section.initial_seed(center + radius);
    for (int j = 0; j < n_theta; ++j) {
        const Complex xi_b = center + radius * std::polar(1.0, m.theta(j));
        const Complex eta_b = section.eta(xi_b, seed);
        m.xi[m.idx(n_r, j)] = xi_b;
        m.eta[m.idx(n_r, j)] = eta_b;
        m.boundary_seed[j] = seed;
    }

    if (radius == 0) { // degenerate circle: constant disc
        for (int i = 0; i < n_r; ++i)
            for (int j = 0; j < n_theta; ++j) {
                m.xi[m.idx(i, j)] = m.xi[m.idx(n_r, 0)];
                m.eta[m.idx(i, j)] = m.eta[m.idx(n_r, 0)];
            }
        return m;
    }

    // Discrete harmonic extension: polar 5-point Laplacian, center closed
    // by the ring-1 mean, solved directly.
    using SpMat = Eigen::SparseMatrix<Complex>;
    const int N = m.nodes();
    std::vector<Eigen::Triplet<Complex>> trip;
    Eigen::VectorXcd rhs_xi = Eigen::VectorXcd::Zero(N);
    Eigen::VectorXcd rhs_eta = Eigen::VectorXcd::Zero(N);

    trip.emplace_back(0, 0, Complex(1));
    for (int j = 0; j < n_theta; ++j)
        trip.emplace_back(0, m.idx(1, j), Complex(-1.0 / n_theta));

    const double dr = m.dr(), dth = m.dtheta();
    for (int i = 1; i <= n_r; ++i) {
        for (int j = 0; j < n_theta; ++j) {
            const int row = m.idx(i, j);
            if (i == n_r) {
                trip.emplace_back(row, row, Complex(1));
                rhs_xi[row] = m.xi[row];
                rhs_eta[row] = m.eta[row];
                continue;
            }
            const double r = m.r(i);
            const double c_rr = 1.0 / (dr * dr);
            const double c_r = 1.0 / (2 * r * dr);
            // trig-exact angular weight: the discrete Laplacian then
            // annihilates maps affine in z and conj(z) exactly
            const double c_tt = 1.0 / (r * r * 2 * (1 - std::cos(dth)));
            trip.emplace_back(row, m.idx(i + 1, j), Complex(c_rr + c_r));
            trip.emplace_back(row, m.idx(i - 1, j), Complex(c_rr - c_r));
            trip.emplace_back(row, m.idx(i, j + 1), Complex(c_tt));
            trip.emplace_back(row, m.idx(i, j - 1), Complex(c_tt));
            trip.emplace_back(row, row, Complex(-2 * c_rr - 2 * c_tt));
        }
    }
    SpMat A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("init_disc: harmonic system factorization failed");
    const Eigen::VectorXcd sol_xi = lu.solve(rhs_xi);
    const Eigen::VectorXcd sol_eta = lu.solve(rhs_eta);
    if (lu.info() != Eigen::Success)
        throw SolverError("init_disc: harmonic solve failed");
    for (int n = 0; n < N; ++n) {
        m.xi[n] = sol_xi[n];
        m.eta[n] = sol_eta[n];
    }
    return m;
}

// ------------------------------------------------------------- spacelike

bool node_spacelike(const DiscMesh &mesh, int ring, int spoke) {
    const NodeJets jets = node_jets(mesh, ring, spoke, false);
    const Eigen::Matrix4d G = metric_matrix_chart(mesh.chart(ring, spoke));
    return spacelike(induced_metric(G, jets));
}

bool all_spacelike(const DiscMesh &mesh) {
    for (int i = 1; i <= mesh.n_r; ++i)
        for (int j = 0; j < mesh.n_theta; ++j)
            if (!node_spacelike(mesh, i, j))
                return false;
    return true;
}

// ------------------------------------------------- mean curvature vector

Eigen::Vector4d mean_curvature_vector(const DiscMesh &mesh, int ring,
                                      int spoke) {
    const NodeJets jets = node_jets(mesh, ring, spoke);
    const Eigen::Vector4d x0 = node_value(mesh, ring, spoke);

    auto metric_at = [&](const Eigen::Vector4d &x) {
        return metric_matrix_chart(
            LineChart{Complex(x[0], x[1]), Complex(x[2], x[3])});
    };
    const Eigen::Matrix4d G = metric_at(x0);
    const Eigen::Matrix2d g = induced_metric(G, jets);
    if (!spacelike(g))
        throw FlowBreakdownError(
            "mean_curvature_vector: node is not spacelike");
    const Eigen::Matrix2d ginv = g.inverse();

    // Ambient Christoffels by central differences of the chart metric.
    const double h = 1e-4;
    Eigen::Matrix4d dG[4];
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d xp = x0, xm = x0;
        xp[k] += h;
        xm[k] -= h;
        dG[k] = (metric_at(xp) - metric_at(xm)) / (2 * h);
    }
    const Eigen::Matrix4d Ginv = G.inverse();
    double Gamma[4][4][4];
    for (int k = 0; k < 4; ++k)
        for (int mi = 0; mi < 4; ++mi)
            for (int ni = 0; ni < 4; ++ni) {
                double acc = 0;
                for (int l = 0; l < 4; ++l)
                    acc += Ginv(k, l) *
                           (dG[mi](l, ni) + dG[ni](l, mi) - dG[l](mi, ni));
                Gamma[k][mi][ni] = 0.5 * acc;
            }

    auto gamma_term = [&](const Eigen::Vector4d &a,
                          const Eigen::Vector4d &b) {
        Eigen::Vector4d out = Eigen::Vector4d::Zero();
        for (int k = 0; k < 4; ++k) {
            double acc = 0;
            for (int mi = 0; mi < 4; ++mi)
                for (int ni = 0; ni < 4; ++ni)
                    acc += Gamma[k][mi][ni] * a[mi] * b[ni];
            out[k] = acc;
        }
        return out;
    };

    const Eigen::Vector4d second[2][2] = {{jets.xrr, jets.xrt},
                                          {jets.xrt, jets.xtt}};
    const Eigen::Vector4d first[2] = {jets.xr, jets.xt};
    Eigen::Vector4d tension = Eigen::Vector4d::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            tension +=
                ginv(a, b) * (second[a][b] + gamma_term(first[a], first[b]));

    // The flat-parameter Christoffel correction is tangent to the disc, so
    // the G-orthogonal projection onto the normal space removes it.
    Eigen::Vector4d tangential = Eigen::Vector4d::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            tangential += ginv(a, b) * tension.dot(G * first[a]) * first[b];
    return tension - tangential;
}

// --------------------------------------------------------------- run_flow

namespace {

double boundary_defect(const DiscMesh &m, const SectionChart *section,
                       std::vector<std::pair<double, double>> &seeds) {
    if (!section)
        return 0;
    double worst = 0;
    for (int j = 0; j < m.n_theta; ++j) {
        const int n = m.idx(m.n_r, j);
        const Complex want = section->eta(m.xi[n], seeds[j]);
        worst = std::max(worst, std::abs(m.eta[n] - want));
    }
    return worst;
}

void project_boundary(DiscMesh &m, const SectionChart *section,
                      std::vector<std::pair<double, double>> &seeds) {
    if (!section)
        return;
    for (int j = 0; j < m.n_theta; ++j) {
        const int n = m.idx(m.n_r, j);
        m.eta[n] = section->eta(m.xi[n], seeds[j]);
    }
}

void average_center(DiscMesh &m) {
    Complex sx = 0, se = 0;
    for (int j = 0; j < m.n_theta; ++j) {
        sx += m.xi[m.idx(1, j)];
        se += m.eta[m.idx(1, j)];
    }
    m.xi[0] = sx / (double)m.n_theta;
    m.eta[0] = se / (double)m.n_theta;
}

bool has_nan(const DiscMesh &m) {
    for (const Complex &v : m.xi)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return true;
    for (const Complex &v : m.eta)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return true;
    return false;
}

} // namespace

FlowResult run_flow(DiscMesh initial, const SectionChart *section,
                    const FlowParams &params) {
    FlowResult out;
    StencilTable tab = build_stencil(initial);

    if (section && initial.boundary_seed.empty()) {
        initial.boundary_seed.resize(initial.n_theta);
        for (int j = 0; j < initial.n_theta; ++j)
            initial.boundary_seed[j] = section->initial_seed(
                initial.xi[initial.idx(initial.n_r, j)]);
    }
    std::vector<std::pair<double, double>> seeds = initial.boundary_seed;

    DiscMesh cur = std::move(initial);
    double dt = params.dt;
    double time = 0;
    double cur_norm = norm_from_table(tab, cur);
    bool space_ok = all_spacelike(cur);

    out.trajectory.push_back(
        {0, 0.0, cur_norm, boundary_defect(cur, section, seeds), space_ok});

    std::vector<Complex> gxi, geta;
    std::vector<Eigen::Vector4d> field(cur.nodes());
    int total_halvings = 0;

    for (int step = 1; step <= params.max_steps; ++step) {
        if (params.target_residual > 0 && cur_norm <= params.target_residual) {
            out.reached_target = true;
            break;
        }

        bool field_ok = true;
        if (params.scheme == FlowScheme::dbar_descent) {
            gradient_from_table(tab, cur, gxi, geta);
        } else {
            for (int i = 1; i <= cur.n_r && field_ok; ++i)
                for (int j = 0; j < cur.n_theta; ++j) {
                    try {
                        field[cur.idx(i, j)] =
                            mean_curvature_vector(cur, i, j);
                    } catch (const FlowBreakdownError &) {
                        field_ok = false;
                        break;
                    }
                }
            if (!field_ok) {
                out.failed = true;
                out.failure_reason =
                    "non-spacelike node encountered by neutral_mcf";
                break;
            }
        }

        bool accepted = false;
        for (int attempt = 0; attempt <= params.max_halvings; ++attempt) {
            DiscMesh trial = cur;
            std::vector<std::pair<double, double>> trial_seeds = seeds;
            if (params.scheme == FlowScheme::dbar_descent) {
                for (int n = 1; n < trial.nodes(); ++n) {
                    trial.xi[n] -= dt * gxi[n];
                    trial.eta[n] -= dt * geta[n];
                }
            } else {
                for (int n = 1; n < trial.nodes(); ++n) {
                    const Eigen::Vector4d &Hn = field[n];
                    trial.xi[n] += dt * Complex(Hn[0], Hn[1]);
                    trial.eta[n] += dt * Complex(Hn[2], Hn[3]);
                }
            }
            bool valid = true;
            try {
                project_boundary(trial, section, trial_seeds);
            } catch (const SolverError &) {
                valid = false;
            }
            if (valid) {
                average_center(trial);
                valid = !has_nan(trial);
            }
            if (!valid) {
                dt /= 2;
                continue;
            }
            const double trial_norm = norm_from_table(tab, trial);
            const bool decreased = trial_norm <= cur_norm + params.slack;
            if (decreased || !params.retry_on_increase) {
                cur = std::move(trial);
                seeds = std::move(trial_seeds);
                cur_norm = trial_norm;
                time += dt;
                accepted = true;
                if (decreased)
                    dt = std::min(dt * 1.05, params.dt); // cautious regrowth
                else {
                    dt /= 2;
                    if (++total_halvings > params.max_halvings) {
                        out.failed = true;
                        out.failure_reason =
                            "residual kept increasing after repeated dt "
                            "halvings";
                    }
                }
                break;
            }
            dt /= 2;
        }
        if (!accepted) {
            out.failed = true;
            out.failure_reason = "dt underflow: residual would not decrease";
        }
        if (out.failed)
            break;

        if (step % params.spacelike_check_every == 0 ||
            step == params.max_steps)
            space_ok = all_spacelike(cur);
        out.trajectory.push_back({step, time, cur_norm,
                                  boundary_defect(cur, section, seeds),
                                  space_ok});
    }

    if (params.target_residual > 0 && cur_norm <= params.target_residual)
        out.reached_target = true;
    cur.boundary_seed = seeds;
    out.mesh = std::move(cur);
    return out;
}

std::pair<int, int> expected_dimension(int mu) {
    const int I = mu + 2;
    return {I, I - 3};
}

} // namespace linelab
