#ifndef ULSPH_DIAGNOSTICS_HPP
#define ULSPH_DIAGNOSTICS_HPP

#include "ulsph/core.hpp"
#include "ulsph/material.hpp"
#include "ulsph/neighbor.hpp"
#include "ulsph/particles.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace ulsph {

template <int D>
Real von_mises_stress(const Mat<D> &sigma_s)
{
    return std::sqrt(3.0 * j2_invariant(sigma_s));
}

template <int D>
Real von_mises_strain(const Mat<D> &eps_s)
{
    return std::sqrt(2.0 / 3.0 * eps_s.squaredNorm());
}

struct EnergyReport
{
    Real kinetic = 0;
    Real strain = 0;
    Real total = 0;
    Real time = 0;
};

/// Kinetic plus state-based elastic strain energy; clamped and wall
/// particles are excluded. body < 0 sums the whole system.
template <int D>
EnergyReport energy_report(const ParticleSystem<D> &ps,
                           const std::vector<Material> &materials,
                           Real time = 0, int body = -1)
{
    EnergyReport r;
    r.time = time;
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        if (ps.kind[i] != ParticleKind::Free)
            continue;
        if (body >= 0 && ps.body[i] != body)
            continue;
        const Material &m = materials[ps.body[i]];
        r.kinetic += 0.5 * ps.mass[i] * ps.vel[i].squaredNorm();
        r.strain += ps.vol[i] * (ps.p[i] * ps.p[i] / (2.0 * m.K) +
                                 ps.sigma_s[i].squaredNorm() / (4.0 * m.G));
    }
    r.total = r.kinetic + r.strain;
    return r;
}

template <int D>
struct MomentumReport
{
    Vec<D> linear = Vec<D>::Zero();
    Vec<3> angular = Vec<3>::Zero(); // z component only in 2D
};

template <int D>
MomentumReport<D> momentum_report(const ParticleSystem<D> &ps, const Vec<D> &center)
{
    MomentumReport<D> r;
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        if (ps.kind[i] != ParticleKind::Free)
            continue;
        r.linear += ps.mass[i] * ps.vel[i];
        Vec<D> d = ps.pos[i] - center;
        if constexpr (D == 2)
            r.angular[2] += ps.mass[i] * (d[0] * ps.vel[i][1] - d[1] * ps.vel[i][0]);
        else
            r.angular += ps.mass[i] * d.cross(ps.vel[i]);
    }
    return r;
}

/// Coefficient of variation of the nearest-neighbor distance over interior
/// particles (neighbor count >= median); zero on a perfect lattice, large
/// for zigzag or clumped distributions.
template <int D>
Real uniformity_metric(const ParticleSystem<D> &ps, const NeighborTable<D> &table)
{
    std::vector<int> counts;
    counts.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps.kind[i] != ParticleKind::Wall)
            counts.push_back(table.neighbor_count(static_cast<int>(i)));
    if (counts.empty())
        return 0.0;
    std::vector<int> sorted = counts;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    int median = sorted[sorted.size() / 2];

    std::vector<Real> nn;
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        if (ps.kind[i] == ParticleKind::Wall)
            continue;
        if (table.neighbor_count(static_cast<int>(i)) < median)
            continue;
        Real best = std::numeric_limits<Real>::infinity();
        for (int a = table.adj_begin[i]; a < table.adj_begin[i + 1]; ++a)
            best = std::min(best, table.dist[table.adj_pair[a]]);
        if (std::isfinite(best))
            nn.push_back(best);
    }
    if (nn.size() < 2)
        return 0.0;
    Real mean = 0;
    for (Real d : nn)
        mean += d;
    mean /= static_cast<Real>(nn.size());
    Real var = 0;
    for (Real d : nn)
        var += (d - mean) * (d - mean);
    var /= static_cast<Real>(nn.size());
    return std::sqrt(var) / mean;
}

} // namespace ulsph

#endif
