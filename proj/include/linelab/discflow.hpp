#pragma once

#include <memory>
#include <string>
#include <vector>

#include "linelab/lagrangian.hpp"

namespace linelab {

/// Discrete map from the unit disc into chart coordinates of L on a polar
/// grid: n_r rings of n_theta spokes plus the center node. Ring n_r is the
/// boundary.
struct DiscMesh {
    int n_r = 0, n_theta = 0;
    std::vector<Complex> xi, eta; // size 1 + n_r * n_theta; index 0 = center
    /// Newton warm-start parameters per boundary spoke (filled by
    /// init_disc, advanced by run_flow).
    std::vector<std::pair<double, double>> boundary_seed;

    DiscMesh() = default;
    DiscMesh(int nr, int ntheta)
        : n_r(nr), n_theta(ntheta), xi(1 + nr * ntheta),
          eta(1 + nr * ntheta) {}

    double dr() const { return 1.0 / n_r; }
    double dtheta() const { return 2 * M_PI / n_theta; }
    double r(int i) const { return i * dr(); }
    double theta(int j) const { return j * dtheta(); }
    int idx(int i, int j) const {
        if (i == 0)
            return 0;
        const int jm = ((j % n_theta) + n_theta) % n_theta;
        return 1 + (i - 1) * n_theta + jm;
    }
    LineChart chart(int i, int j) const {
        return LineChart{xi[idx(i, j)], eta[idx(i, j)]};
    }
    int nodes() const { return 1 + n_r * n_theta; }
};

/// Boundary condition: the section of L as a graph eta(xi) over the Gauss
/// chart.
class SectionChart {
  public:
    virtual ~SectionChart() = default;
    virtual Complex eta(const Complex &xi,
                        std::pair<double, double> &seed) const = 0;
    virtual std::pair<double, double>
    initial_seed(const Complex &xi) const = 0;
};

/// Graph of a normal-congruence section, inverted by warm-started Newton.
class CongruenceSectionChart : public SectionChart {
  public:
    explicit CongruenceSectionChart(LagrangianSection sec);
    Complex eta(const Complex &xi,
                std::pair<double, double> &seed) const override;
    std::pair<double, double>
    initial_seed(const Complex &xi) const override;

  private:
    LagrangianSection sec_;
};

/// Discrete Cauchy-Riemann defect (d_x + i d_y) of (xi, eta) at a node, by
/// the polar chain rule with trig-exact angular differences. Boundary nodes
/// use a one-sided radial stencil and are flagged.
struct DbarResidual {
    Complex xi;
    Complex eta;
    bool one_sided = false;
};

DbarResidual dbar_residual(const DiscMesh &mesh, int ring, int spoke);

/// Area-weighted root-mean-square of the residual field over all non-center
/// nodes (the discrete L^2 norm normalized by the covered area).
double dbar_norm(const DiscMesh &mesh);

/// Harmonic initial disc: boundary nodes on the section over the given
/// chart circle, interior by a direct solve of the polar 5-point Laplace
/// system, center closed by the ring-1 mean.
DiscMesh init_disc(const SectionChart &section, const Complex &center,
                   double radius, int n_r, int n_theta);

/// Induced-metric classification of the disc tangent plane at a node:
/// positive definite G-Gram = spacelike.
bool node_spacelike(const DiscMesh &mesh, int ring, int spoke);
bool all_spacelike(const DiscMesh &mesh);

/// Mean curvature vector in chart coordinates: trace over the induced
/// metric of the second fundamental form, with ambient Christoffel symbols
/// from central differences of the chart metric (step 1e-4), projected
/// G-orthogonally onto the normal space. Requires a spacelike node; throws
/// FlowBreakdownError otherwise.
Eigen::Vector4d mean_curvature_vector(const DiscMesh &mesh, int ring,
                                      int spoke);

enum class FlowScheme { dbar_descent, neutral_mcf };

struct FlowParams {
    FlowScheme scheme = FlowScheme::dbar_descent;
    double dt = 1e-3;
    int max_steps = 5000;
    double target_residual = 0.0; // 0 = run to max_steps
    int max_halvings = 20;
    double slack = 1e-10;           // accepted-step monotonicity slack
    int spacelike_check_every = 50; // full sweep cadence
    /// dbar_descent rejects an increasing trial and retries at dt/2, which
    /// enforces per-step monotonicity. neutral_mcf is not a dbar gradient
    /// flow, so it takes the step and halves dt afterwards instead (still
    /// at most max_halvings times).
    bool retry_on_increase = true;
};

struct FlowRecord {
    int step = 0;
    double time = 0;
    double dbar_norm = 0;
    double max_boundary_defect = 0;
    bool spacelike_ok = false;
};

struct FlowResult {
    DiscMesh mesh;
    std::vector<FlowRecord> trajectory;
    bool failed = false;
    std::string failure_reason;
    bool reached_target = false;
};

/// Evolves the disc toward holomorphicity. Every node (boundary included)
/// takes the scheme update, then boundary nodes are re-projected onto the
/// section (eta <- section(xi)) and the center is reset to the ring-1 mean.
/// dt halves on residual increase (up to max_halvings, then breakdown).
/// With section == nullptr the boundary stays fixed (degenerate Dirichlet
/// mode used by stationarity tests).
FlowResult run_flow(DiscMesh initial, const SectionChart *section,
                    const FlowParams &params);

/// Index bookkeeping: I = mu + 2 and the unparameterized dimension I - 3.
std::pair<int, int> expected_dimension(int mu);

} // namespace linelab
