#ifndef ULSPH_NEIGHBOR_HPP
#define ULSPH_NEIGHBOR_HPP

#include "ulsph/core.hpp"
#include "ulsph/kernel.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ulsph {

struct NonFinitePosition : std::runtime_error
{
    int particle_id;
    explicit NonFinitePosition(int id)
        : std::runtime_error("non-finite position for particle " + std::to_string(id)),
          particle_id(id) {}
};

/// Canonical-pair neighbor table. Pairs are stored once with i < j; the
/// per-particle adjacency view carries an orientation sign so that the unit
/// vector seen from particle a always points a <- neighbor.
/// Topology is fixed between rebuilds; geometry (r_ij, e_ij, dWdr) is
/// refreshed from current positions via refresh_geometry().
template <int D>
struct NeighborTable
{
    std::vector<std::pair<int, int>> pairs; // i < j, lexicographically sorted
    std::vector<Real> dist;
    std::vector<Vec<D>> e;    // unit vector from j to i
    std::vector<Real> dwdr;   // kernel derivative at current distance

    std::vector<int> adj_begin; // size n+1
    std::vector<int> adj_pair;
    std::vector<std::int8_t> adj_sign; // +1 when the particle is 'i' of the pair

    std::size_t n_particles() const { return adj_begin.empty() ? 0 : adj_begin.size() - 1; }
    std::size_t n_pairs() const { return pairs.size(); }

    int neighbor_count(int a) const { return adj_begin[a + 1] - adj_begin[a]; }

    void refresh_geometry(const std::vector<Vec<D>> &positions, const KernelSpec &spec)
    {
        for (std::size_t p = 0; p < pairs.size(); ++p)
        {
            Vec<D> rij = positions[pairs[p].first] - positions[pairs[p].second];
            Real d = rij.norm();
            dist[p] = d;
            e[p] = d > 0 ? Vec<D>(rij / d) : Vec<D>::Zero();
            dwdr[p] = kernel_grad_mag(d, spec);
        }
    }
};

template <int D>
NeighborTable<D> build_neighbor_table(const std::vector<Vec<D>> &positions,
                                      const KernelSpec &spec)
{
    const std::size_t n = positions.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!positions[i].allFinite())
            throw NonFinitePosition(static_cast<int>(i));

    const Real cell = spec.cutoff;
    Vec<D> lo = Vec<D>::Constant(0), hi = Vec<D>::Constant(0);
    if (n > 0)
    {
        lo = hi = positions[0];
        for (const auto &x : positions)
        {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
    }

    Eigen::Array<int, D, 1> dims;
    for (int k = 0; k < D; ++k)
        dims[k] = std::max(1, static_cast<int>(std::floor((hi[k] - lo[k]) / cell)) + 1);

    auto cell_of = [&](const Vec<D> &x) {
        Eigen::Array<int, D, 1> c;
        for (int k = 0; k < D; ++k)
            c[k] = std::clamp(static_cast<int>(std::floor((x[k] - lo[k]) / cell)), 0, dims[k] - 1);
        return c;
    };
    auto flat = [&](const Eigen::Array<int, D, 1> &c) {
        int f = 0;
        for (int k = D - 1; k >= 0; --k)
            f = f * dims[k] + c[k];
        return f;
    };

    int n_cells = 1;
    for (int k = 0; k < D; ++k)
        n_cells *= dims[k];

    // counting-sort particles into cells; particle ids stay ascending per cell
    std::vector<int> cell_count(n_cells + 1, 0);
    std::vector<int> pcell(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        pcell[i] = flat(cell_of(positions[i]));
        ++cell_count[pcell[i] + 1];
    }
    for (int c = 0; c < n_cells; ++c)
        cell_count[c + 1] += cell_count[c];
    std::vector<int> cell_items(n);
    {
        std::vector<int> cursor(cell_count.begin(), cell_count.end() - 1);
        for (std::size_t i = 0; i < n; ++i)
            cell_items[cursor[pcell[i]]++] = static_cast<int>(i);
    }

    NeighborTable<D> table;
    const Real cutoff2 = spec.cutoff * spec.cutoff;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto ci = cell_of(positions[i]);
        Eigen::Array<int, D, 1> c;
        // scan the 3^D neighborhood
        int n_scan = 1;
        for (int k = 0; k < D; ++k)
            n_scan *= 3;
        for (int s = 0; s < n_scan; ++s)
        {
            int t = s;
            bool ok = true;
            for (int k = 0; k < D; ++k)
            {
                c[k] = ci[k] + (t % 3) - 1;
                t /= 3;
                if (c[k] < 0 || c[k] >= dims[k])
                {
                    ok = false;
                    break;
                }
            }
            if (!ok)
                continue;
            int fc = flat(c);
            for (int idx = cell_count[fc]; idx < cell_count[fc + 1]; ++idx)
            {
                int j = cell_items[idx];
                if (j <= static_cast<int>(i))
                    continue;
                Vec<D> rij = positions[i] - positions[j];
                if (rij.squaredNorm() < cutoff2)
                    table.pairs.emplace_back(static_cast<int>(i), j);
            }
        }
    }
    std::sort(table.pairs.begin(), table.pairs.end());

    table.dist.resize(table.pairs.size());
    table.e.resize(table.pairs.size());
    table.dwdr.resize(table.pairs.size());
    table.refresh_geometry(positions, spec);

    // adjacency, per-list sorted by neighbor id
    std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbor, signed pair idx+1)
    for (std::size_t p = 0; p < table.pairs.size(); ++p)
    {
        auto [a, b] = table.pairs[p];
        adj[a].emplace_back(b, static_cast<int>(p) + 1);
        adj[b].emplace_back(a, -(static_cast<int>(p) + 1));
    }
    table.adj_begin.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        table.adj_begin[i + 1] = table.adj_begin[i] + static_cast<int>(adj[i].size());
    table.adj_pair.resize(2 * table.pairs.size());
    table.adj_sign.resize(2 * table.pairs.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        std::sort(adj[i].begin(), adj[i].end());
        int at = table.adj_begin[i];
        for (auto [nbr, signed_p] : adj[i])
        {
            (void)nbr;
            table.adj_pair[at] = std::abs(signed_p) - 1;
            table.adj_sign[at] = signed_p > 0 ? 1 : -1;
            ++at;
        }
    }
    return table;
}

/// Per-pair penalty accumulator, aligned with the canonical pair list.
/// Reading a pair in (j,i) orientation negates the stored vector.
template <int D>
struct PairAccumulator
{
    std::vector<Vec<D>> f; // indexed like NeighborTable::pairs

    static std::uint64_t key(int a, int b)
    {
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    }
};

/// Pairs surviving a rebuild keep their value; new pairs start at zero,
/// departed pairs are dropped (re-entering pairs restart at zero).
template <int D>
PairAccumulator<D> carry_over(const PairAccumulator<D> &old_acc,
                              const NeighborTable<D> &old_table,
                              const NeighborTable<D> &new_table)
{
    std::unordered_map<std::uint64_t, Vec<D>> lookup;
    lookup.reserve(old_table.pairs.size());
    for (std::size_t p = 0; p < old_table.pairs.size(); ++p)
        lookup.emplace(PairAccumulator<D>::key(old_table.pairs[p].first,
                                               old_table.pairs[p].second),
                       old_acc.f[p]);
    PairAccumulator<D> acc;
    acc.f.resize(new_table.pairs.size(), Vec<D>::Zero());
    for (std::size_t p = 0; p < new_table.pairs.size(); ++p)
    {
        auto it = lookup.find(PairAccumulator<D>::key(new_table.pairs[p].first,
                                                      new_table.pairs[p].second));
        if (it != lookup.end())
            acc.f[p] = it->second;
    }
    return acc;
}

} // namespace ulsph

#endif
