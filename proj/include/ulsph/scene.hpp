#ifndef ULSPH_SCENE_HPP
#define ULSPH_SCENE_HPP

#include "ulsph/core.hpp"
#include "ulsph/material.hpp"
#include "ulsph/particles.hpp"

#include <string>
#include <vector>

namespace ulsph {

/// Lagrangian point observer bound to the particle nearest `target` at t = 0.
template <int D>
struct Observer
{
    std::string name;
    Vec<D> target = Vec<D>::Zero();
    int particle = -1;
    Vec<D> initial_pos = Vec<D>::Zero();
};

template <int D>
struct Scene
{
    std::string name;
    Real dp = 0;
    ParticleSystem<D> particles;
    std::vector<Material> materials; // indexed by body id
    std::vector<Observer<D>> observers;
    Real default_end_time = 0;
    Vec<D> centroid = Vec<D>::Zero(); // initial centroid of free particles

    // scene-specific analytic references, zero when not applicable
    Real analytic_period = 0;     // oscillating plate, (1 - nu^2) variant
    Real analytic_period_nu4 = 0; // as printed with (1 - nu^4)
};

Scene<2> build_oscillating_plate(int H_over_dp, Real v_f);
Scene<2> build_colliding_rings(Real v0_factor, Real dp = 0.001);
Scene<2> build_spinning_plate();
Scene<2> build_hvi(Real dp = 0.0002);
Scene<3> build_bending_column(int L_over_dp);

enum class TaylorKind
{
    Round, // resolution = R/dp (6 or 12)
    Square // resolution = L/dp (10, 20 or 30)
};
Scene<3> build_taylor_bar(TaylorKind kind, int resolution);

/// Oscillating-plate mode shape, zero at the clamp and maximal at the tip.
Real plate_mode_shape(Real x, Real L);

/// 2 when the scene is planar, 3 otherwise; throws on unknown names.
int scene_dim(const std::string &name);

bool scene_known(const std::string &name);
std::vector<std::string> scene_names();

template <int D>
void bind_observers(Scene<D> &scene)
{
    for (auto &obs : scene.observers)
    {
        Real best = std::numeric_limits<Real>::infinity();
        for (std::size_t i = 0; i < scene.particles.size(); ++i)
        {
            if (scene.particles.kind[i] != ParticleKind::Free)
                continue;
            Real d = (scene.particles.pos[i] - obs.target).squaredNorm();
            if (d < best)
            {
                best = d;
                obs.particle = static_cast<int>(i);
            }
        }
        if (obs.particle >= 0)
            obs.initial_pos = scene.particles.pos[obs.particle];
    }
}

template <int D>
Vec<D> free_centroid(const ParticleSystem<D> &ps)
{
    Vec<D> c = Vec<D>::Zero();
    Real m = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        if (ps.kind[i] != ParticleKind::Free)
            continue;
        c += ps.mass[i] * ps.pos[i];
        m += ps.mass[i];
    }
    return m > 0 ? Vec<D>(c / m) : c;
}

} // namespace ulsph

#endif
