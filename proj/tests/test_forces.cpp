#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ulsph/forces.hpp"

#include <random>

using namespace ulsph;

namespace {

struct Cloud
{
    ParticleSystem<2> ps;
    NeighborTable<2> table;
    KernelSpec spec;
    std::vector<Material> materials;
    std::vector<Mat<2>> B;
};

// jittered lattice patch; interior particles have full support
Cloud make_cloud(int half_n, Real jitter, unsigned seed, Real rho0 = 1000.0)
{
    Cloud c;
    c.spec = KernelSpec::from_spacing(0.01, 2);
    c.materials = {Material::elastic(rho0, 2e6, 0.3975)};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<Real> u(-jitter, jitter);
    Real dp = c.spec.dp;
    for (int ix = -half_n; ix <= half_n; ++ix)
        for (int iy = -half_n; iy <= half_n; ++iy)
            c.ps.add(Vec<2>(ix * dp + u(rng), iy * dp + u(rng)), Vec<2>::Zero(), rho0,
                     rho0 * dp * dp, 0);
    c.table = build_neighbor_table(c.ps.pos, c.spec);
    compute_correction_matrices(c.ps, c.table, c.B, 1);
    return c;
}

int center_index(const Cloud &c)
{
    int best = 0;
    Real bd = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < c.ps.size(); ++i)
    {
        Real d = c.ps.pos[i].squaredNorm();
        if (d < bd)
        {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace

TEST_CASE("riemann pstar")
{
    RiemannState a{1000.0, 3.0, 5e4, 50.0};
    CHECK(riemann_pstar(a, a) == doctest::Approx(5e4).epsilon(1e-14));

    // equal pressures and impedances, approach speed 2 -> P + z
    RiemannState L{1.0, 1.0, 7.0, 2.0}, R{1.0, -1.0, 7.0, 2.0};
    CHECK(riemann_pstar(L, R) == doctest::Approx(7.0 + 2.0).epsilon(1e-14));

    // swapping L/R while negating both velocities leaves P* unchanged
    RiemannState L2{1200.0, 2.5, 3e3, 80.0}, R2{900.0, -1.5, 4e3, 60.0};
    RiemannState L3{900.0, 1.5, 4e3, 60.0}, R3{1200.0, -2.5, 3e3, 80.0};
    CHECK(riemann_pstar(L2, R2) == doctest::Approx(riemann_pstar(L3, R3)).epsilon(1e-14));
}

TEST_CASE("continuity rate: translation, compression, rotation")
{
    Cloud c = make_cloud(5, 0.0, 1);
    int mid = center_index(c);
    std::vector<Real> drho;

    for (auto &v : c.ps.vel)
        v = Vec<2>(1.7, -0.4);
    compute_density_rate(c.ps, c.table, drho, 1);
    CHECK(std::abs(drho[mid]) < 1e-10);

    // radial compression v = -r: div v = -2, rate = +2 rho
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = -c.ps.pos[i];
    compute_density_rate(c.ps, c.table, drho, 1);
    CHECK(drho[mid] == doctest::Approx(2.0 * c.ps.rho[mid]).epsilon(0.1));

    // rigid rotation: radial projections vanish pairwise on the symmetric stencil
    Real omega = 3.0;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = omega * Vec<2>(-c.ps.pos[i][1], c.ps.pos[i][0]);
    compute_density_rate(c.ps, c.table, drho, 1);
    CHECK(std::abs(drho[mid]) < 1e-10 * c.ps.rho[mid] * omega);
}

TEST_CASE("pressure acceleration: constant field, repulsion, momentum neutrality")
{
    Cloud c = make_cloud(5, 0.0, 2);
    int mid = center_index(c);
    std::vector<Vec<2>> acc;

    Real P = 1234.5;
    for (auto &p : c.ps.p)
        p = P;
    compute_pressure_accel(c.ps, c.table, c.materials, RiemannMode::Standard, acc, 1);
    CHECK(acc[mid].norm() < 1e-10 * P);

    // head-on two-particle approach: equal and opposite repulsion
    ParticleSystem<2> two;
    KernelSpec s = c.spec;
    two.add(Vec<2>(0, 0), Vec<2>(1, 0), 1000.0, 1e-3, 0);
    two.add(Vec<2>(s.h, 0), Vec<2>(-1, 0), 1000.0, 1e-3, 0);
    auto t2 = build_neighbor_table(two.pos, s);
    compute_pressure_accel(two, t2, c.materials, RiemannMode::Standard, acc, 1);
    CHECK(acc[0][0] < 0.0); // pushed apart
    CHECK(acc[1][0] > 0.0);
    CHECK(acc[0][0] == doctest::Approx(-acc[1][0]).epsilon(1e-12));
    CHECK(std::abs(acc[0][1]) < 1e-14);

    // random cloud: total momentum rate vanishes by pair antisymmetry
    Cloud r = make_cloud(4, 0.3 * c.spec.dp, 3);
    std::mt19937 rng(4);
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    Real scale = 0;
    for (std::size_t i = 0; i < r.ps.size(); ++i)
    {
        r.ps.vel[i] = Vec<2>(u(rng), u(rng));
        r.ps.p[i] = 1e4 * u(rng);
        scale += std::abs(r.ps.p[i]) * r.ps.mass[i];
    }
    compute_pressure_accel(r.ps, r.table, r.materials, RiemannMode::Standard, acc, 1);
    Vec<2> total = Vec<2>::Zero();
    for (std::size_t i = 0; i < r.ps.size(); ++i)
        total += r.ps.mass[i] * acc[i];
    CHECK(total.norm() < 1e-9 * scale);
}

TEST_CASE("velocity gradient reproduces linear fields exactly")
{
    Cloud c = make_cloud(5, 0.2 * 0.01, 7);
    Mat<2> A;
    A << 0.3, -1.2, 0.7, 2.1;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = A * c.ps.pos[i] + Vec<2>(0.5, -0.25);
    std::vector<Mat<2>> grad;
    compute_velocity_gradients(c.ps, c.table, c.B, grad, 1);
    int mid = center_index(c);
    CHECK((grad[mid] - A).cwiseAbs().maxCoeff() < 1e-10);

    // uniform field
    for (auto &v : c.ps.vel)
        v = Vec<2>(2.0, 3.0);
    compute_velocity_gradients(c.ps, c.table, c.B, grad, 1);
    CHECK(grad[mid].cwiseAbs().maxCoeff() < 1e-10);

    // rigid rotation: antisymmetric gradient, zero strain rate
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = 5.0 * Vec<2>(-c.ps.pos[i][1], c.ps.pos[i][0]);
    compute_velocity_gradients(c.ps, c.table, c.B, grad, 1);
    CHECK(strain_rate(grad[mid]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(grad[mid](0, 1) == doctest::Approx(-5.0).epsilon(1e-10));
}

TEST_CASE("hourglass velocity error")
{
    Mat<2> A;
    A << 1.0, 0.5, -0.3, 2.0;
    Vec<2> rij(0.01, -0.004);
    Vec<2> vi = A * Vec<2>(0.02, 0.03), vj = A * (Vec<2>(0.02, 0.03) - rij);
    CHECK(hourglass_velocity_error(vi, vj, A, A, rij).norm() < 1e-14);

    // antisymmetry under orientation flip
    Mat<2> Gi, Gj;
    Gi << 1, 2, 3, 4;
    Gj << -1, 0, 2, 1;
    Vec<2> va(0.3, -0.1), vb(-0.2, 0.8);
    Vec<2> fwd = hourglass_velocity_error(va, vb, Gi, Gj, rij);
    Vec<2> rev = hourglass_velocity_error(vb, va, Gj, Gi, Vec<2>(-rij));
    CHECK((fwd + rev).norm() < 1e-14);
}

TEST_CASE("penalty accumulation: direct increment, additivity, plastic damping")
{
    // two particles with unit volumes, |r| = h, xi = 4, G = 1
    Material m = Material::elastic(1.0, 2.6, 0.3); // G = E/(2(1+nu)) = 1
    CHECK(m.G == doctest::Approx(1.0).epsilon(1e-12));
    KernelSpec s = KernelSpec::from_spacing(1.0, 2);
    ParticleSystem<2> ps;
    ps.add(Vec<2>(0, 0), Vec<2>(1, 0), 1.0, 1.0, 0); // vhat = vi - vj = e_x
    ps.add(Vec<2>(s.h, 0), Vec<2>(0, 0), 1.0, 1.0, 0);
    auto table = build_neighbor_table(ps.pos, s);
    REQUIRE(table.pairs.size() == 1);
    std::vector<Mat<2>> zero_grad(2, Mat<2>::Zero());
    std::vector<Material> mats = {m};

    PairAccumulator<2> acc;
    acc.f.assign(1, Vec<2>::Zero());
    accumulate_penalty(ps, table, zero_grad, mats, s.dp, 0.1, acc, 1);
    Real dwdr = kernel_grad_mag(s.h, s);
    CHECK(acc.f[0][0] == doctest::Approx(0.4 * dwdr / s.h).epsilon(1e-12));
    CHECK(acc.f[0][0] < 0.0); // increment points in -x
    CHECK(acc.f[0][1] == 0.0);

    // two half steps equal one full step for a constant integrand
    PairAccumulator<2> half;
    half.f.assign(1, Vec<2>::Zero());
    accumulate_penalty(ps, table, zero_grad, mats, s.dp, 0.05, half, 1);
    accumulate_penalty(ps, table, zero_grad, mats, s.dp, 0.05, half, 1);
    CHECK(half.f[0][0] == doctest::Approx(acc.f[0][0]).epsilon(1e-14));

    // gamma < 1 strictly shrinks the increment
    ps.gamma[0] = 0.5;
    PairAccumulator<2> damped;
    damped.f.assign(1, Vec<2>::Zero());
    accumulate_penalty(ps, table, zero_grad, mats, s.dp, 0.1, damped, 1);
    CHECK(std::abs(damped.f[0][0]) < std::abs(acc.f[0][0]));
    CHECK(damped.f[0][0] == doctest::Approx(0.75 * acc.f[0][0]).epsilon(1e-12));
}

TEST_CASE("penalty is silent on affine velocity fields")
{
    Cloud c = make_cloud(5, 0.25 * 0.01, 11);
    Mat<2> A;
    A << -0.8, 1.4, 0.6, 0.9;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = A * c.ps.pos[i] + Vec<2>(1.0, -2.0);
    std::vector<Mat<2>> grad;
    compute_velocity_gradients(c.ps, c.table, c.B, grad, 1);
    PairAccumulator<2> acc;
    acc.f.assign(c.table.pairs.size(), Vec<2>::Zero());
    for (int step = 0; step < 50; ++step)
        accumulate_penalty(c.ps, c.table, grad, c.materials, c.spec.dp, 1e-5, acc, 1);

    std::vector<Vec<2>> og, gnog;
    compute_shear_accel<2>(c.ps, c.table, Method::OG, nullptr, og, 1);
    compute_shear_accel<2>(c.ps, c.table, Method::GNOG, &acc, gnog, 1);
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        CHECK((gnog[i] - og[i]).norm() <= 1e-10);
}

TEST_CASE("shear acceleration: zero stress, constant stress, momentum neutrality")
{
    Cloud c = make_cloud(5, 0.0, 13);
    int mid = center_index(c);
    std::vector<Vec<2>> acc;
    compute_shear_accel<2>(c.ps, c.table, Method::OG, nullptr, acc, 1);
    CHECK(acc[mid].norm() == 0.0);

    Mat<2> sig;
    sig << 2e4, -1e4, -1e4, -2e4;
    for (auto &t : c.ps.sigma_s)
        t = sig;
    compute_shear_accel<2>(c.ps, c.table, Method::OG, nullptr, acc, 1);
    CHECK(acc[mid].norm() < 1e-10 * sig.norm());

    Cloud r = make_cloud(4, 0.3 * 0.01, 17);
    std::mt19937 rng(18);
    std::uniform_real_distribution<Real> u(-1e4, 1e4);
    Real scale = 0;
    for (std::size_t i = 0; i < r.ps.size(); ++i)
    {
        Mat<2> raw;
        raw << u(rng), u(rng), u(rng), u(rng);
        r.ps.sigma_s[i] = deviatoric<2>(strain_rate(raw));
        scale += r.ps.sigma_s[i].norm() * r.ps.mass[i];
    }
    compute_shear_accel<2>(r.ps, r.table, Method::OG, nullptr, acc, 1);
    Vec<2> total = Vec<2>::Zero();
    for (std::size_t i = 0; i < r.ps.size(); ++i)
        total += r.ps.mass[i] * acc[i];
    CHECK(total.norm() < 1e-9 * scale);
}

TEST_CASE("penalty term conserves momentum exactly and vanishes when empty")
{
    Cloud c = make_cloud(4, 0.3 * 0.01, 19);
    std::mt19937 rng(20);
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = Vec<2>(u(rng), u(rng)); // non-affine: penalty active
    std::vector<Mat<2>> grad;
    compute_velocity_gradients(c.ps, c.table, c.B, grad, 1);
    PairAccumulator<2> acc;
    acc.f.assign(c.table.pairs.size(), Vec<2>::Zero());
    accumulate_penalty(c.ps, c.table, grad, c.materials, c.spec.dp, 1e-4, acc, 1);

    std::vector<Vec<2>> og, gnog;
    compute_shear_accel<2>(c.ps, c.table, Method::OG, nullptr, og, 1);
    compute_shear_accel<2>(c.ps, c.table, Method::GNOG, &acc, gnog, 1);
    Vec<2> total = Vec<2>::Zero();
    Real scale = 0;
    bool any_diff = false;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
    {
        total += c.ps.mass[i] * (gnog[i] - og[i]);
        scale += c.ps.mass[i] * (gnog[i] - og[i]).norm();
        any_diff = any_diff || (gnog[i] - og[i]).norm() > 0;
    }
    CHECK(any_diff);
    CHECK(total.norm() <= 1e-12 * scale);

    // all-zero accumulators: GNOG gather bit-matches OG
    PairAccumulator<2> empty;
    empty.f.assign(c.table.pairs.size(), Vec<2>::Zero());
    compute_shear_accel<2>(c.ps, c.table, Method::GNOG, &empty, gnog, 1);
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        CHECK(gnog[i] == og[i]);
}

TEST_CASE("failed particles drop shear and penalty but keep pressure")
{
    Cloud c = make_cloud(3, 0.0, 23);
    int mid = center_index(c);
    Mat<2> sig;
    sig << 1e4, 2e3, 2e3, -1e4;
    for (auto &t : c.ps.sigma_s)
        t = sig;
    c.ps.failed[mid] = 1;

    std::vector<Vec<2>> acc;
    compute_shear_accel<2>(c.ps, c.table, Method::OG, nullptr, acc, 1);
    CHECK(acc[mid].norm() == 0.0);

    std::vector<Mat<2>> grad(c.ps.size(), Mat<2>::Zero());
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        c.ps.vel[i] = Vec<2>(i % 3 * 0.1, 0.0);
    PairAccumulator<2> pacc;
    pacc.f.assign(c.table.pairs.size(), Vec<2>::Zero());
    accumulate_penalty(c.ps, c.table, grad, c.materials, c.spec.dp, 1e-4, pacc, 1);
    for (std::size_t p = 0; p < c.table.pairs.size(); ++p)
        if (c.table.pairs[p].first == mid || c.table.pairs[p].second == mid)
            CHECK(pacc.f[p] == Vec<2>::Zero());

    for (auto &p : c.ps.p)
        p = 5e4;
    compute_pressure_accel(c.ps, c.table, c.materials, RiemannMode::Standard, acc, 1);
    // failed particle still sees pressure forces (nonzero for asymmetric velocities)
    bool nonzero = false;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        nonzero = nonzero || acc[i].norm() > 0;
    CHECK(nonzero);
}

TEST_CASE("wall dummies: pressure only, mirrored state")
{
    KernelSpec s = KernelSpec::from_spacing(0.01, 2);
    std::vector<Material> mats = {Material::elastic(1000.0, 2e6, 0.3975)};
    ParticleSystem<2> ps;
    ps.add(Vec<2>(0, 0), Vec<2>(0, -1.0), 1000.0, 0.1, 0); // free, moving toward wall
    ps.add(Vec<2>(0, -s.h), Vec<2>(0, 0), 1000.0, 0.1, 0, ParticleKind::Wall);
    auto table = build_neighbor_table(ps.pos, s);
    REQUIRE(table.pairs.size() == 1);

    std::vector<Real> drho;
    compute_density_rate(ps, table, drho, 1);
    CHECK(drho[0] == 0.0); // wall neighbor excluded from continuity

    std::vector<Vec<2>> acc;
    compute_pressure_accel(ps, table, mats, RiemannMode::Standard, acc, 1);
    CHECK(acc[0][1] > 0.0);      // wall pushes the approaching particle back
    CHECK(acc[1].norm() == 0.0); // wall itself never accelerates

    Mat<2> sig;
    sig << 1e4, 0, 0, -1e4;
    ps.sigma_s[0] = ps.sigma_s[1] = sig;
    compute_shear_accel<2>(ps, table, Method::OG, nullptr, acc, 1);
    CHECK(acc[0].norm() == 0.0); // no shear across the wall pair
}

TEST_CASE("free-slip wall: no tangential drag, no adhesion, normal repulsion")
{
    KernelSpec s = KernelSpec::from_spacing(0.01, 2);
    std::vector<Material> mats = {Material::elastic(1000.0, 2e6, 0.3975)};
    auto make = [&](const Vec<2> &vel, Real pressure) {
        ParticleSystem<2> ps;
        ps.add(Vec<2>(0, 0), vel, 1000.0, 0.1, 0);
        ps.p[0] = pressure;
        // two diagonal wall dummies so pair axes have tangential components
        for (Real dx : {-0.5 * s.h, 0.5 * s.h})
        {
            ps.add(Vec<2>(dx, -0.7 * s.h), Vec<2>::Zero(), 1000.0, 0.1, 0,
                   ParticleKind::Wall);
            ps.normal.back() = Vec<2>(0, 1);
        }
        return ps;
    };
    std::vector<Vec<2>> acc;

    // tangential slide: the mirrored state matches the slip velocity, so the
    // wall exerts no force at all
    ParticleSystem<2> slide = make(Vec<2>(2.0, 0.0), 0.0);
    auto table = build_neighbor_table(slide.pos, s);
    compute_pressure_accel(slide, table, mats, RiemannMode::Standard, acc, 1);
    CHECK(acc[0].norm() < 1e-12);

    // tension near the wall: unilateral contact never pulls
    ParticleSystem<2> pull = make(Vec<2>::Zero(), -1e5);
    table = build_neighbor_table(pull.pos, s);
    compute_pressure_accel(pull, table, mats, RiemannMode::Standard, acc, 1);
    CHECK(acc[0].norm() < 1e-12);

    // normal approach: repulsion along the wall normal only
    ParticleSystem<2> hit = make(Vec<2>(0.0, -2.0), 0.0);
    table = build_neighbor_table(hit.pos, s);
    compute_pressure_accel(hit, table, mats, RiemannMode::Standard, acc, 1);
    CHECK(acc[0][1] > 0.0);
    CHECK(std::abs(acc[0][0]) < 1e-9 * acc[0][1]);
}

TEST_CASE("thread count does not change results")
{
    Cloud c = make_cloud(6, 0.3 * 0.01, 29);
    std::mt19937 rng(30);
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    for (std::size_t i = 0; i < c.ps.size(); ++i)
    {
        c.ps.vel[i] = Vec<2>(u(rng), u(rng));
        c.ps.p[i] = 1e4 * u(rng);
    }
    std::vector<Real> d1, d4;
    compute_density_rate(c.ps, c.table, d1, 1);
    compute_density_rate(c.ps, c.table, d4, 4);
    CHECK(d1 == d4);
    std::vector<Vec<2>> a1, a4;
    compute_pressure_accel(c.ps, c.table, c.materials, RiemannMode::Standard, a1, 1);
    compute_pressure_accel(c.ps, c.table, c.materials, RiemannMode::Standard, a4, 4);
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        CHECK(a1[i] == a4[i]);
}
