#ifndef ULSPH_PARTICLES_HPP
#define ULSPH_PARTICLES_HPP

#include "ulsph/core.hpp"

#include <cstdint>
#include <vector>

namespace ulsph {

enum class ParticleKind : std::uint8_t
{
    Free = 0,
    Clamped = 1,    // frozen state, participates as neighbor
    Wall = 2,       // static dummy, pressure interaction only
    Prescribed = 3, // moves with a fixed velocity, otherwise frozen
};

/// Structure-of-arrays particle state.
template <int D>
struct ParticleSystem
{
    std::vector<Vec<D>> pos;
    std::vector<Vec<D>> vel;
    std::vector<Real> rho;
    std::vector<Real> mass;
    std::vector<Real> vol; // mass / rho, refreshed after density updates
    std::vector<Real> p;
    std::vector<Mat<D>> sigma_s;   // deviatoric stress (return-mapped state)
    std::vector<Mat<D>> eps_s_acc; // accumulated deviatoric strain, output only
    std::vector<Real> alpha;       // hardening factor
    std::vector<Real> gamma;       // return-mapping scale, 1 when elastic
    std::vector<std::uint8_t> failed;
    std::vector<int> body;
    std::vector<ParticleKind> kind;
    std::vector<Vec<D>> normal; // wall plane normal; zero for non-wall particles

    std::size_t size() const { return pos.size(); }

    void add(const Vec<D> &x, const Vec<D> &v, Real rho0, Real m, int body_id,
             ParticleKind k = ParticleKind::Free)
    {
        pos.push_back(x);
        vel.push_back(v);
        rho.push_back(rho0);
        mass.push_back(m);
        vol.push_back(m / rho0);
        p.push_back(0.0);
        sigma_s.push_back(Mat<D>::Zero());
        eps_s_acc.push_back(Mat<D>::Zero());
        alpha.push_back(0.0);
        gamma.push_back(1.0);
        failed.push_back(0);
        body.push_back(body_id);
        kind.push_back(k);
        normal.push_back(Vec<D>::Zero());
    }

    void refresh_volumes()
    {
        for (std::size_t i = 0; i < size(); ++i)
            vol[i] = mass[i] / rho[i];
    }
};

} // namespace ulsph

#endif
