#include "ulsph/scene.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace ulsph {

namespace {

// cell-centered lattice over [lo, hi), cropped by a predicate
template <int D, typename Keep>
void fill_lattice(ParticleSystem<D> &ps, const Vec<D> &lo, const Vec<D> &hi, Real dp,
                  Real rho0, int body, ParticleKind kind, const Vec<D> &vel,
                  Keep &&keep)
{
    Real mass = rho0 * std::pow(dp, D);
    Eigen::Array<int, D, 1> n;
    for (int k = 0; k < D; ++k)
        n[k] = std::max(1, static_cast<int>(std::llround((hi[k] - lo[k]) / dp)));
    Eigen::Array<int, D, 1> idx = Eigen::Array<int, D, 1>::Zero();
    while (true)
    {
        Vec<D> x;
        for (int k = 0; k < D; ++k)
            x[k] = lo[k] + (idx[k] + 0.5) * dp;
        if (keep(x))
            ps.add(x, vel, rho0, mass, body, kind);
        int k = 0;
        for (; k < D; ++k)
        {
            if (++idx[k] < n[k])
                break;
            idx[k] = 0;
        }
        if (k == D)
            break;
    }
}

template <int D>
auto keep_all()
{
    return [](const Vec<D> &) { return true; };
}

} // namespace

Real plate_mode_shape(Real x, Real L)
{
    Real k = 1.875 / L;
    return (std::sin(k * L) + std::sinh(k * L)) * (std::cos(k * x) - std::cosh(k * x)) -
           (std::cos(k * L) + std::cosh(k * L)) * (std::sin(k * x) - std::sinh(k * x));
}

Scene<2> build_oscillating_plate(int H_over_dp, Real v_f)
{
    const Real L = 0.2, H = 0.02;
    const Real dp = H / H_over_dp;
    Scene<2> scene;
    scene.name = "oscillating_plate";
    scene.dp = dp;
    scene.materials = {Material::elastic(1000.0, 2e6, 0.3975)};
    const Material &m = scene.materials[0];

    const int n_clamp = 3; // one support radius (2.6 dp) left of the clamp plane
    Real fL = plate_mode_shape(L, L);
    fill_lattice<2>(scene.particles, Vec<2>(-n_clamp * dp, 0.0), Vec<2>(L, H), dp,
                    m.rho0, 0, ParticleKind::Free, Vec<2>::Zero(), keep_all<2>());
    for (std::size_t i = 0; i < scene.particles.size(); ++i)
    {
        Real x = scene.particles.pos[i][0];
        if (x < 0)
            scene.particles.kind[i] = ParticleKind::Clamped;
        else
            scene.particles.vel[i] = Vec<2>(0.0, v_f * m.c0 * plate_mode_shape(x, L) / fL);
    }

    Real k = 1.875 / L;
    Real k4H2 = k * k * k * k * H * H;
    Real omega2 = m.E * k4H2 / (12.0 * m.rho0 * (1.0 - m.nu * m.nu));
    Real omega2_nu4 = m.E * k4H2 / (12.0 * m.rho0 * (1.0 - std::pow(m.nu, 4)));
    scene.analytic_period = 2.0 * pi / std::sqrt(omega2);
    scene.analytic_period_nu4 = 2.0 * pi / std::sqrt(omega2_nu4);
    scene.default_end_time = 3.0 * scene.analytic_period;

    scene.observers.push_back({"tail_mid", Vec<2>(L, H / 2)});
    bind_observers(scene);
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

Scene<2> build_colliding_rings(Real v0_factor, Real dp)
{
    const Real Ri = 0.03, Ro = 0.04, gap_centers = 0.09;
    Scene<2> scene;
    scene.name = "colliding_rings";
    scene.dp = dp;
    scene.materials = {Material::elastic(1200.0, 1e7, 0.4),
                       Material::elastic(1200.0, 1e7, 0.4)};
    Real v0 = v0_factor * scene.materials[0].c0;

    for (int b = 0; b < 2; ++b)
    {
        Real cx = (b == 0 ? -0.5 : 0.5) * gap_centers;
        Vec<2> vel(b == 0 ? v0 : -v0, 0.0);
        Vec<2> lo(cx - Ro, -Ro), hi(cx + Ro, Ro);
        fill_lattice<2>(scene.particles, lo, hi, dp, scene.materials[b].rho0, b,
                        ParticleKind::Free, vel, [&](const Vec<2> &x) {
                            Real r = (x - Vec<2>(cx, 0.0)).norm();
                            return r >= Ri && r <= Ro;
                        });
    }
    scene.default_end_time = 0.012;
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

Scene<2> build_spinning_plate()
{
    const Real side = 1.0, omega = 50.0, dp = 0.05;
    Scene<2> scene;
    scene.name = "spinning_plate";
    scene.dp = dp;
    scene.materials = {Material::elastic(1100.0, 1.7e7, 0.45)};
    fill_lattice<2>(scene.particles, Vec<2>(-side / 2, -side / 2), Vec<2>(side / 2, side / 2),
                    dp, scene.materials[0].rho0, 0, ParticleKind::Free, Vec<2>::Zero(),
                    keep_all<2>());
    for (std::size_t i = 0; i < scene.particles.size(); ++i)
    {
        const Vec<2> &x = scene.particles.pos[i];
        scene.particles.vel[i] = Vec<2>(-omega * x[1], omega * x[0]);
    }
    scene.default_end_time = 2.0 * pi / omega; // one revolution
    scene.observers.push_back({"corner", Vec<2>(side / 2, side / 2)});
    bind_observers(scene);
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

Scene<2> build_hvi(Real dp)
{
    const Real target_w = 0.002, target_h = 0.05;
    const Real radius = 0.005, v0 = 3100.0;
    Scene<2> scene;
    scene.name = "hvi";
    scene.dp = dp;
    Material alu = Material::j2_plastic(2785.0, 7.417e10, 0.344, 3e8);
    alu.c0 = 5328.0; // stated sound speed overrides the E,nu-derived value
    alu.p_min = -8e8;
    scene.materials = {alu, alu}; // 0 = projectile, 1 = target

    Real cx = -radius - 0.5 * dp;
    fill_lattice<2>(scene.particles, Vec<2>(cx - radius, -radius), Vec<2>(cx + radius, radius),
                    dp, alu.rho0, 0, ParticleKind::Free, Vec<2>(v0, 0.0),
                    [&](const Vec<2> &x) { return (x - Vec<2>(cx, 0.0)).norm() <= radius; });
    fill_lattice<2>(scene.particles, Vec<2>(0.0, -target_h / 2), Vec<2>(target_w, target_h / 2),
                    dp, alu.rho0, 1, ParticleKind::Free, Vec<2>::Zero(), keep_all<2>());
    scene.default_end_time = 8e-6;
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

Scene<3> build_bending_column(int L_over_dp)
{
    const Real L = 1.0, H = 6.0;
    const Real dp = L / L_over_dp;
    Scene<3> scene;
    scene.name = "bending_column";
    scene.dp = dp;
    scene.materials = {Material::elastic(1100.0, 1.7e7, 0.45)};
    Vec<3> v0 = 10.0 * Vec<3>(std::sqrt(3.0) / 2.0, 0.5, 0.0);

    fill_lattice<3>(scene.particles, Vec<3>(0, 0, -3 * dp), Vec<3>(L, L, H), dp,
                    scene.materials[0].rho0, 0, ParticleKind::Free, Vec<3>::Zero(),
                    keep_all<3>());
    for (std::size_t i = 0; i < scene.particles.size(); ++i)
    {
        if (scene.particles.pos[i][2] < 0)
            scene.particles.kind[i] = ParticleKind::Clamped;
        else
            scene.particles.vel[i] = v0;
    }
    scene.default_end_time = 0.6;
    scene.observers.push_back({"s", Vec<3>(1.0, 1.0, 6.0)});
    bind_observers(scene);
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

Scene<3> build_taylor_bar(TaylorKind kind, int resolution)
{
    Scene<3> scene;
    scene.dp = 0;
    Real bar_r = 0, bar_side = 0, bar_len = 0, speed = 0, wall_extent = 0;
    if (kind == TaylorKind::Round)
    {
        scene.name = "taylor_bar_round";
        bar_r = 3.91e-3;
        bar_len = 2.346e-2;
        scene.dp = bar_r / resolution;
        speed = 373.0;
        scene.materials = {Material::j2_plastic(2700.0, 7.82e10, 0.3, 2.9e8)};
        wall_extent = 3.0 * bar_r;
        scene.default_end_time = 8e-5;
    }
    else
    {
        scene.name = "taylor_bar_square";
        bar_side = 0.006;
        bar_len = 0.03;
        scene.dp = bar_side / resolution;
        speed = 227.0;
        scene.materials = {Material::j2_plastic(8930.0, 1.17e11, 0.35, 4e8, 1e8)};
        wall_extent = 2.0 * bar_side;
        scene.default_end_time = 6e-5;
    }
    const Real dp = scene.dp;
    const Real gap = 0.5 * dp; // bar is just about to touch the wall at t = 0
    const Real rho0 = scene.materials[0].rho0;

    if (kind == TaylorKind::Round)
        fill_lattice<3>(scene.particles, Vec<3>(-bar_r, -bar_r, gap),
                        Vec<3>(bar_r, bar_r, gap + bar_len), dp, rho0, 0,
                        ParticleKind::Free, Vec<3>(0, 0, -speed), [&](const Vec<3> &x) {
                            return x[0] * x[0] + x[1] * x[1] <= bar_r * bar_r;
                        });
    else
        fill_lattice<3>(scene.particles, Vec<3>(-bar_side / 2, -bar_side / 2, gap),
                        Vec<3>(bar_side / 2, bar_side / 2, gap + bar_len), dp, rho0, 0,
                        ParticleKind::Free, Vec<3>(0, 0, -speed), keep_all<3>());

    // rigid frictionless wall: 3 dummy layers below z = 0
    fill_lattice<3>(scene.particles, Vec<3>(-wall_extent, -wall_extent, -3 * dp),
                    Vec<3>(wall_extent, wall_extent, 0.0), dp, rho0, 0,
                    ParticleKind::Wall, Vec<3>::Zero(), keep_all<3>());
    for (std::size_t i = 0; i < scene.particles.size(); ++i)
        if (scene.particles.kind[i] == ParticleKind::Wall)
            scene.particles.normal[i] = Vec<3>(0, 0, 1);

    if (kind == TaylorKind::Square)
        scene.observers.push_back({"s", Vec<3>(0.003, 0.0, 0.0)});
    bind_observers(scene);
    scene.centroid = free_centroid(scene.particles);
    return scene;
}

int scene_dim(const std::string &name)
{
    static const std::map<std::string, int> dims = {
        {"oscillating_plate", 2}, {"colliding_rings", 2}, {"spinning_plate", 2},
        {"hvi", 2},               {"bending_column", 3},  {"taylor_bar_round", 3},
        {"taylor_bar_square", 3}};
    auto it = dims.find(name);
    if (it == dims.end())
        throw std::invalid_argument("unknown scene: " + name);
    return it->second;
}

bool scene_known(const std::string &name)
{
    try
    {
        scene_dim(name);
        return true;
    }
    catch (const std::invalid_argument &)
    {
        return false;
    }
}

std::vector<std::string> scene_names()
{
    return {"oscillating_plate", "colliding_rings", "spinning_plate", "hvi",
            "bending_column",    "taylor_bar_round", "taylor_bar_square"};
}

} // namespace ulsph
