#ifndef ULSPH_FORCES_HPP
#define ULSPH_FORCES_HPP

#include "ulsph/core.hpp"
#include "ulsph/kernel.hpp"
#include "ulsph/material.hpp"
#include "ulsph/neighbor.hpp"
#include "ulsph/particles.hpp"

#include <atomic>
#include <vector>

namespace ulsph {

enum class Method
{
    OG,  // original shear discretization
    GNOG // penalty-augmented shear discretization
};

enum class RiemannMode
{
    Standard,
    MeanPressure // dissipation-free variant, used by reversibility tests
};

struct RiemannState
{
    Real rho, U, P, c;
};

inline Real riemann_pstar(const RiemannState &L, const RiemannState &R)
{
    Real zL = L.rho * L.c;
    Real zR = R.rho * R.c;
    assert(zL + zR > 0);
    return (zL * R.P + zR * L.P + zL * zR * (L.U - R.U)) / (zL + zR);
}

template <int D>
struct RhsBuffers
{
    std::vector<Real> drho_dt;
    std::vector<Vec<D>> acc_p;
    std::vector<Vec<D>> acc_s;
    std::vector<Mat<D>> grad_v;
    Vec<D> g = Vec<D>::Zero();

    void resize(std::size_t n)
    {
        drho_dt.assign(n, 0.0);
        acc_p.assign(n, Vec<D>::Zero());
        acc_s.assign(n, Vec<D>::Zero());
        grad_v.assign(n, Mat<D>::Zero());
    }
};

/// dRho_i/dt = rho_i sum_j (v_ij . e_ij) dW/dr V_j.
/// Wall dummies are excluded; clamped neighbors participate normally.
template <int D>
void compute_density_rate(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                          std::vector<Real> &out, int n_threads)
{
    out.assign(ps.size(), 0.0);
    parallel_for(ps.size(), n_threads, [&](std::size_t i) {
        if (ps.kind[i] != ParticleKind::Free)
            return;
        Real sum = 0.0;
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
        {
            int p = table.adj_pair[a];
            int sgn = table.adj_sign[a];
            int j = sgn > 0 ? table.pairs[p].second : table.pairs[p].first;
            if (ps.kind[j] == ParticleKind::Wall)
                continue;
            Vec<D> eij = Real(sgn) * table.e[p];
            sum += (ps.vel[i] - ps.vel[j]).dot(eij) * table.dwdr[p] * ps.vol[j];
        }
        out[i] = ps.rho[i] * sum;
    });
}

/// Correction matrices for every non-wall particle; wall neighbors are
/// excluded from the moment sum. Returns the number of particles that fell
/// back to the identity.
template <int D>
int compute_correction_matrices(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                                std::vector<Mat<D>> &out, int n_threads)
{
    out.assign(ps.size(), Mat<D>::Identity());
    std::atomic<int> uncorrected{0};
    parallel_for(ps.size(), n_threads, [&](std::size_t i) {
        if (ps.kind[i] == ParticleKind::Wall)
            return;
        Mat<D> moment = Mat<D>::Zero();
        bool any = false;
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
        {
            int p = table.adj_pair[a];
            int sgn = table.adj_sign[a];
            int j = sgn > 0 ? table.pairs[p].second : table.pairs[p].first;
            if (ps.kind[j] == ParticleKind::Wall)
                continue;
            if (table.dist[p] <= 0)
                continue;
            any = true;
            Vec<D> rij = Real(sgn) * table.dist[p] * table.e[p];
            moment += (table.dwdr[p] / table.dist[p] * ps.vol[j]) * (rij * rij.transpose());
        }
        if (!any)
        {
            ++uncorrected;
            return;
        }
        moment = Real(0.5) * (moment + moment.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Mat<D>> eig(moment);
        Real lmax = 0, lmin = std::numeric_limits<Real>::infinity();
        for (int k = 0; k < D; ++k)
        {
            Real v = std::abs(eig.eigenvalues()[k]);
            lmax = std::max(lmax, v);
            lmin = std::min(lmin, v);
        }
        if (!(lmin > 0) || lmax / lmin > 1e6)
        {
            ++uncorrected;
            return;
        }
        Mat<D> B = -moment.inverse();
        if (!B.allFinite())
        {
            ++uncorrected;
            return;
        }
        out[i] = B;
    });
    return uncorrected.load();
}

/// Corrected velocity gradient; exact for spatially linear velocity fields.
template <int D>
void compute_velocity_gradients(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                                const std::vector<Mat<D>> &B, std::vector<Mat<D>> &out,
                                int n_threads)
{
    out.assign(ps.size(), Mat<D>::Zero());
    parallel_for(ps.size(), n_threads, [&](std::size_t i) {
        if (ps.kind[i] == ParticleKind::Wall)
            return;
        Mat<D> g = Mat<D>::Zero();
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
        {
            int p = table.adj_pair[a];
            int sgn = table.adj_sign[a];
            int j = sgn > 0 ? table.pairs[p].second : table.pairs[p].first;
            if (ps.kind[j] == ParticleKind::Wall)
                continue;
            Vec<D> gradW = (Real(sgn) * table.dwdr[p]) * table.e[p];
            g += ((ps.vel[j] - ps.vel[i]) * (B[i] * gradW).transpose()) * ps.vol[j];
        }
        out[i] = g;
    });
}

/// Riemann pressure acceleration. The inter-particle Riemann problem is
/// projected on the axis from i to j so that approaching pairs raise P*
/// (upwind dissipation). Wall dummies act as mirrored static partners.
template <int D>
void compute_pressure_accel(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                            const std::vector<Material> &materials, RiemannMode mode,
                            std::vector<Vec<D>> &out, int n_threads)
{
    out.assign(ps.size(), Vec<D>::Zero());
    parallel_for(ps.size(), n_threads, [&](std::size_t i) {
        if (ps.kind[i] == ParticleKind::Wall)
            return;
        const Material &mi = materials[ps.body[i]];
        Vec<D> acc = Vec<D>::Zero();
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
        {
            int p = table.adj_pair[a];
            int sgn = table.adj_sign[a];
            int j = sgn > 0 ? table.pairs[p].second : table.pairs[p].first;
            if (table.dwdr[p] == 0.0)
                continue;
            Vec<D> eij = Real(sgn) * table.e[p]; // unit j -> i
            Vec<D> axis = -eij;                  // Riemann axis i -> j
            RiemannState L{ps.rho[i], ps.vel[i].dot(axis), ps.p[i], mi.c0};
            RiemannState R;
            if (ps.kind[j] == ParticleKind::Wall)
            {
                // free-slip mirror: reflect the normal velocity component,
                // keep the tangential one so the wall exerts no friction
                Vec<D> n = ps.normal[j];
                Vec<D> vm = n.isZero() ? Vec<D>::Zero()
                                       : Vec<D>(ps.vel[i] - 2.0 * ps.vel[i].dot(n) * n);
                R = RiemannState{ps.rho[i], vm.dot(axis), ps.p[i], mi.c0};
            }
            else
            {
                const Material &mj = materials[ps.body[j]];
                R = RiemannState{ps.rho[j], ps.vel[j].dot(axis), ps.p[j], mj.c0};
            }
            Real pstar = mode == RiemannMode::Standard ? riemann_pstar(L, R)
                                                       : Real(0.5) * (L.P + R.P);
            if (ps.kind[j] == ParticleKind::Wall)
                pstar = std::max(pstar, Real(0)); // unilateral contact: no adhesion
            acc += pstar * table.dwdr[p] * ps.vol[j] * eij;
        }
        out[i] = (-2.0 / ps.rho[i]) * acc;
    });
}

/// Deviation between the actual pair velocity difference and its linear
/// prediction from the corrected gradients; zero for any affine field.
template <int D>
Vec<D> hourglass_velocity_error(const Vec<D> &vi, const Vec<D> &vj,
                                const Mat<D> &grad_i, const Mat<D> &grad_j,
                                const Vec<D> &rij)
{
    return (vi - vj) - Real(0.5) * ((grad_i + grad_j) * rij);
}

/// Advance the per-pair penalty integral by one acoustic step. gamma_bar
/// attenuates each increment under plastic flow; cross-body pairs use the
/// arithmetic means of G and xi. Returns the number of skipped
/// near-coincident pairs.
template <int D>
int accumulate_penalty(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                       const std::vector<Mat<D>> &grad_v,
                       const std::vector<Material> &materials, Real dp, Real dt,
                       PairAccumulator<D> &acc, int n_threads)
{
    assert(dt > 0);
    std::atomic<int> skipped{0};
    parallel_for(table.pairs.size(), n_threads, [&](std::size_t p) {
        auto [i, j] = table.pairs[p];
        if (ps.kind[i] == ParticleKind::Wall || ps.kind[j] == ParticleKind::Wall)
            return;
        if (ps.failed[i] || ps.failed[j])
        {
            acc.f[p] = Vec<D>::Zero();
            return;
        }
        if (table.dwdr[p] == 0.0)
            return;
        Real d = table.dist[p];
        const Material &mi = materials[ps.body[i]];
        const Material &mj = materials[ps.body[j]];
        if (d < 1e-6 * dp)
        {
            ++skipped;
            return;
        }
        Vec<D> rij = d * table.e[p];
        Vec<D> vhat = hourglass_velocity_error(ps.vel[i], ps.vel[j], grad_v[i], grad_v[j], rij);
        Real gamma_bar = 0.5 * (ps.gamma[i] + ps.gamma[j]);
        Real coeff = 0.5 * (mi.xi + mj.xi) * 0.5 * (mi.G + mj.G);
        acc.f[p] += (coeff * gamma_bar * table.dwdr[p] / d * ps.vol[i] * ps.vol[j] * dt) * vhat;
    });
    return skipped.load();
}

/// Shear acceleration gather. OG uses the pair-summed stress divergence;
/// GNOG adds the accumulated penalty (acc may be null for OG). Failed
/// particles drop out of the shear interaction entirely.
template <int D>
void compute_shear_accel(const ParticleSystem<D> &ps, const NeighborTable<D> &table,
                         Method method, const PairAccumulator<D> *acc,
                         std::vector<Vec<D>> &out, int n_threads)
{
    out.assign(ps.size(), Vec<D>::Zero());
    parallel_for(ps.size(), n_threads, [&](std::size_t i) {
        if (ps.kind[i] == ParticleKind::Wall || ps.failed[i])
            return;
        Vec<D> sum = Vec<D>::Zero();
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
        {
            int p = table.adj_pair[a];
            int sgn = table.adj_sign[a];
            int j = sgn > 0 ? table.pairs[p].second : table.pairs[p].first;
            if (ps.kind[j] == ParticleKind::Wall || ps.failed[j])
                continue;
            Vec<D> eij = Real(sgn) * table.e[p];
            sum += ((ps.sigma_s[i] + ps.sigma_s[j]) * eij) * (table.dwdr[p] * ps.vol[j]);
            if (method == Method::GNOG)
                sum += (Real(sgn) / ps.vol[i]) * acc->f[p];
        }
        out[i] = sum / ps.rho[i];
    });
}

} // namespace ulsph

#endif
