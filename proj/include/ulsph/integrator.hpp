#ifndef ULSPH_INTEGRATOR_HPP
#define ULSPH_INTEGRATOR_HPP

#include "ulsph/core.hpp"
#include "ulsph/forces.hpp"
#include "ulsph/kernel.hpp"
#include "ulsph/material.hpp"
#include "ulsph/neighbor.hpp"
#include "ulsph/particles.hpp"

#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace ulsph {

struct SolverAbort : std::runtime_error
{
    Real time;
    SolverAbort(const std::string &what, Real t) : std::runtime_error(what), time(t) {}
};

struct SolverOptions
{
    Method method = Method::GNOG;
    RiemannMode riemann = RiemannMode::Standard;
    int n_threads = 1;
    Real cfl_ad = 0.2;
    Real cfl_ac = 0.4;
    Real velocity_floor = 0.05; // fraction of c0 bounding the advection step
    long max_substeps = -1;     // abort budget, < 0 means unlimited
    Real mach_limit = 2.0;      // abort when max speed exceeds this times c0, <= 0 disables
};

/// Dual-criteria explicit solver: neighbor topology, correction matrices and
/// penalty carry-over are refreshed once per advection cycle; state advances
/// in position-based Verlet acoustic substeps.
template <int D>
class Solver
{
  public:
    Solver(ParticleSystem<D> ps, std::vector<Material> materials, KernelSpec spec,
           SolverOptions opt = {})
        : ps_(std::move(ps)), materials_(std::move(materials)), spec_(spec), opt_(opt)
    {
        rhs_.resize(ps_.size());
        ps_.refresh_volumes();
    }

    Real time() const { return t_; }
    void set_time(Real t) { t_ = t; }
    const ParticleSystem<D> &particles() const { return ps_; }
    ParticleSystem<D> &particles() { return ps_; }
    const std::vector<Material> &materials() const { return materials_; }
    const KernelSpec &kernel_spec() const { return spec_; }
    const NeighborTable<D> &neighbors() const { return table_; }
    const PairAccumulator<D> &accumulator() const { return acc_; }
    PairAccumulator<D> &accumulator() { return acc_; }
    const std::vector<Mat<D>> &correction_matrices() const { return B_; }
    SolverOptions &options() { return opt_; }
    long substeps() const { return substeps_; }
    int uncorrected_particles() const { return uncorrected_; }
    void set_gravity(const Vec<D> &g) { rhs_.g = g; }

    Real max_speed() const
    {
        Real v = 0;
        for (std::size_t i = 0; i < ps_.size(); ++i)
            if (ps_.kind[i] == ParticleKind::Free || ps_.kind[i] == ParticleKind::Prescribed)
                v = std::max(v, ps_.vel[i].norm());
        return v;
    }

    Real advection_dt() const
    {
        Real c0min = materials_.front().c0;
        for (const auto &m : materials_)
            c0min = std::min(c0min, m.c0);
        return opt_.cfl_ad * spec_.h / std::max(max_speed(), opt_.velocity_floor * c0min);
    }

    Real acoustic_dt() const
    {
        Real c0max = 0;
        for (const auto &m : materials_)
            c0max = std::max(c0max, m.c0);
        return opt_.cfl_ac * spec_.h / (c0max + max_speed());
    }

    /// Rebuild topology at the current positions and load saved pair
    /// accumulator values, so a resumed run continues where it left off.
    void prime(const std::vector<std::tuple<int, int, Vec<D>>> &saved)
    {
        table_ = build_neighbor_table(ps_.pos, spec_);
        acc_.f.assign(table_.pairs.size(), Vec<D>::Zero());
        std::unordered_map<std::uint64_t, std::size_t> index;
        index.reserve(table_.pairs.size());
        for (std::size_t p = 0; p < table_.pairs.size(); ++p)
            index.emplace(PairAccumulator<D>::key(table_.pairs[p].first, table_.pairs[p].second), p);
        for (const auto &[a, b, v] : saved)
        {
            auto it = index.find(PairAccumulator<D>::key(a, b));
            if (it != index.end())
                acc_.f[it->second] = v;
        }
    }

    /// Neighbor rebuild, penalty carry-over, correction matrices.
    void rebuild()
    {
        NeighborTable<D> fresh = build_neighbor_table(ps_.pos, spec_);
        if (table_.n_particles() == ps_.size())
            acc_ = carry_over(acc_, table_, fresh);
        else
            acc_.f.assign(fresh.pairs.size(), Vec<D>::Zero());
        table_ = std::move(fresh);
        uncorrected_ = compute_correction_matrices(ps_, table_, B_, opt_.n_threads);
    }

    /// One position-based Verlet acoustic step of length dt.
    void acoustic_step(Real dt)
    {
        const std::size_t n = ps_.size();
        const int nt = opt_.n_threads;

        table_.refresh_geometry(ps_.pos, spec_);
        compute_density_rate(ps_, table_, rhs_.drho_dt, nt);

        parallel_for(n, nt, [&](std::size_t i) {
            if (ps_.kind[i] == ParticleKind::Prescribed)
            {
                ps_.pos[i] += 0.5 * dt * ps_.vel[i];
                return;
            }
            if (ps_.kind[i] != ParticleKind::Free)
                return;
            ps_.pos[i] += 0.5 * dt * ps_.vel[i];
            ps_.rho[i] += 0.5 * dt * rhs_.drho_dt[i];
            ps_.vol[i] = ps_.mass[i] / ps_.rho[i];
        });

        table_.refresh_geometry(ps_.pos, spec_);

        parallel_for(n, nt, [&](std::size_t i) {
            if (ps_.kind[i] != ParticleKind::Free)
                return;
            const Material &m = materials_[ps_.body[i]];
            Real p = eos_pressure(ps_.rho[i], m);
            auto fu = apply_failure(p, ps_.failed[i] != 0, m);
            ps_.p[i] = fu.p;
            ps_.failed[i] = fu.failed ? 1 : 0;
        });

        compute_velocity_gradients(ps_, table_, B_, rhs_.grad_v, nt);

        parallel_for(n, nt, [&](std::size_t i) {
            if (ps_.kind[i] != ParticleKind::Free)
                return;
            const Material &m = materials_[ps_.body[i]];
            Mat<D> eps_dot = strain_rate(rhs_.grad_v[i]);
            Mat<D> eps_s_dot = deviatoric(eps_dot);
            ps_.eps_s_acc[i] += dt * eps_s_dot;

            Mat<D> trial = deviatoric<D>(ps_.sigma_s[i] + dt * elastic_shear_rate(eps_s_dot, m.G));
            if (m.plastic && yield_function(j2_invariant(trial), ps_.alpha[i], m) > 0)
            {
                Real lam = plastic_multiplier_rate(ps_.sigma_s[i], eps_dot, m);
                Mat<D> rate = plastic_shear_rate(ps_.sigma_s[i], eps_s_dot, lam, m);
                Mat<D> sigma = deviatoric<D>(ps_.sigma_s[i] + dt * rate);
                Real alpha = hardening_update(ps_.alpha[i], lam, dt);
                auto mapped = return_mapping(sigma, alpha, m);
                ps_.sigma_s[i] = mapped.sigma_s;
                ps_.gamma[i] = mapped.gamma;
                ps_.alpha[i] = alpha;
            }
            else
            {
                ps_.sigma_s[i] = trial;
                ps_.gamma[i] = 1.0;
            }
        });

        if (opt_.method == Method::GNOG)
        {
            if (acc_.f.size() != table_.pairs.size())
                acc_.f.assign(table_.pairs.size(), Vec<D>::Zero());
            accumulate_penalty(ps_, table_, rhs_.grad_v, materials_, spec_.dp, dt, acc_, nt);
        }

        compute_pressure_accel(ps_, table_, materials_, opt_.riemann, rhs_.acc_p, nt);
        compute_shear_accel(ps_, table_, opt_.method,
                            opt_.method == Method::GNOG ? &acc_ : nullptr, rhs_.acc_s, nt);

        parallel_for(n, nt, [&](std::size_t i) {
            if (ps_.kind[i] == ParticleKind::Prescribed)
            {
                ps_.pos[i] += 0.5 * dt * ps_.vel[i];
                return;
            }
            if (ps_.kind[i] != ParticleKind::Free)
            {
                ps_.vel[i].setZero();
                return;
            }
            ps_.vel[i] += dt * (rhs_.acc_p[i] + rhs_.acc_s[i] + rhs_.g);
            ps_.pos[i] += 0.5 * dt * ps_.vel[i];
        });

        compute_density_rate(ps_, table_, rhs_.drho_dt, nt);
        parallel_for(n, nt, [&](std::size_t i) {
            if (ps_.kind[i] != ParticleKind::Free)
                return;
            ps_.rho[i] += 0.5 * dt * rhs_.drho_dt[i];
            ps_.vol[i] = ps_.mass[i] / ps_.rho[i];
        });

        ++substeps_;
        t_ += dt;
    }

    /// One advection cycle: rebuild, then acoustic substeps covering the
    /// advection interval, the last one truncated to land on the boundary.
    /// `t_limit` optionally clips the cycle to a global end time.
    Real advance_cycle(Real t_limit = -1)
    {
        rebuild();
        Real dt_ad = advection_dt();
        if (t_limit > 0)
            dt_ad = std::min(dt_ad, t_limit - t_);
        if (dt_ad <= 0)
            return 0;
        Real elapsed = 0;
        while (elapsed < dt_ad * (1.0 - 1e-12))
        {
            Real dt = std::min(acoustic_dt(), dt_ad - elapsed);
            dt = std::min(dt, dt_ad);
            if (!(dt > 0) || !std::isfinite(dt))
                throw SolverAbort("degenerate acoustic step", t_);
            acoustic_step(dt);
            elapsed += dt;
            if (opt_.max_substeps >= 0 && substeps_ > opt_.max_substeps)
                throw SolverAbort("substep budget exceeded", t_);
        }
        Real v = max_speed();
        if (!std::isfinite(v))
            throw SolverAbort("non-finite velocity", t_);
        if (opt_.mach_limit > 0)
        {
            Real c0max = 0;
            for (const auto &m : materials_)
                c0max = std::max(c0max, m.c0);
            if (v > opt_.mach_limit * c0max)
                throw SolverAbort("runaway velocity exceeds the weakly-compressible regime",
                                  t_);
        }
        return elapsed;
    }

    void advance_to(Real t_end)
    {
        while (t_ < t_end * (1.0 - 1e-12))
            if (advance_cycle(t_end) <= 0)
                break;
    }

  private:
    ParticleSystem<D> ps_;
    std::vector<Material> materials_;
    KernelSpec spec_;
    SolverOptions opt_;
    NeighborTable<D> table_;
    PairAccumulator<D> acc_;
    std::vector<Mat<D>> B_;
    RhsBuffers<D> rhs_;
    Real t_ = 0;
    long substeps_ = 0;
    int uncorrected_ = 0;
};

} // namespace ulsph

#endif
