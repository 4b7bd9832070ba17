#ifndef ULSPH_MATERIAL_HPP
#define ULSPH_MATERIAL_HPP

#include "ulsph/core.hpp"

#include <cassert>
#include <cmath>
#include <optional>

namespace ulsph {

struct Material
{
    Real rho0 = 0;
    Real E = 0;
    Real nu = 0;
    Real K = 0;
    Real G = 0;
    Real c0 = 0;
    bool plastic = false;
    Real sigmaY = 0;
    Real kappa = 0;
    std::optional<Real> p_min; // tensile failure threshold (negative pressure)
    Real xi = 4.0;             // hourglass coefficient

    static Material elastic(Real rho0, Real E, Real nu, Real xi = 4.0)
    {
        Material m;
        m.rho0 = rho0;
        m.E = E;
        m.nu = nu;
        m.K = E / (3.0 * (1.0 - 2.0 * nu));
        m.G = E / (2.0 * (1.0 + nu));
        m.c0 = std::sqrt(m.K / rho0);
        m.xi = xi;
        return m;
    }

    static Material j2_plastic(Real rho0, Real E, Real nu, Real sigmaY,
                               Real kappa = 0.0, Real xi = 0.2)
    {
        Material m = elastic(rho0, E, nu, xi);
        m.plastic = true;
        m.sigmaY = sigmaY;
        m.kappa = kappa;
        return m;
    }
};

inline Real eos_pressure(Real rho, const Material &mat)
{
    assert(rho > 0);
    return mat.c0 * mat.c0 * (rho - mat.rho0);
}

template <int D>
Mat<D> strain_rate(const Mat<D> &grad_v)
{
    return Real(0.5) * (grad_v + grad_v.transpose());
}

template <int D>
Mat<D> deviatoric(const Mat<D> &t)
{
    return t - (t.trace() / Real(D)) * Mat<D>::Identity();
}

template <int D>
Mat<D> elastic_shear_rate(const Mat<D> &eps_s_dot, Real G)
{
    return 2.0 * G * eps_s_dot;
}

template <int D>
Real j2_invariant(const Mat<D> &sigma_s)
{
    return 0.5 * sigma_s.squaredNorm();
}

inline Real yield_function(Real J2, Real alpha, const Material &mat)
{
    return std::sqrt(2.0 * J2) - std::sqrt(2.0 / 3.0) * (mat.kappa * alpha + mat.sigmaY);
}

/// Plastic multiplier rate, clamped to zero on unloading. The degenerate
/// branch guards stress states with vanishing deviatoric magnitude.
template <int D>
Real plastic_multiplier_rate(const Mat<D> &sigma_s, const Mat<D> &eps_dot,
                             const Material &mat)
{
    Real J2 = j2_invariant(sigma_s);
    Real norm = std::sqrt(2.0 * J2);
    if (norm < 1e-12 * mat.G)
        return 0.0;
    Real rate = sigma_s.cwiseProduct(eps_dot).sum() /
                ((1.0 + mat.kappa / (3.0 * mat.G)) * norm);
    return std::max(rate, 0.0);
}

template <int D>
Mat<D> plastic_shear_rate(const Mat<D> &sigma_s, const Mat<D> &eps_s_dot,
                          Real lambda_dot, const Material &mat)
{
    Mat<D> rate = elastic_shear_rate(eps_s_dot, mat.G);
    if (lambda_dot > 0.0)
    {
        Real J2 = j2_invariant(sigma_s);
        assert(J2 > 0);
        rate -= lambda_dot * (std::sqrt(2.0) * mat.G / std::sqrt(J2)) * sigma_s;
    }
    return rate;
}

template <int D>
struct ReturnMapResult
{
    Mat<D> sigma_s;
    Real gamma;
};

/// Radial return mapping. gamma < 1 exactly when the trial state is outside
/// the yield surface; the mapped state satisfies f = 0.
template <int D>
ReturnMapResult<D> return_mapping(const Mat<D> &sigma_s, Real alpha, const Material &mat)
{
    Real J2 = j2_invariant(sigma_s);
    Real f = yield_function(J2, alpha, mat);
    if (f <= 0.0)
        return {sigma_s, 1.0};
    assert(J2 > 0); // f > 0 with J2 = 0 is impossible for sigmaY >= 0
    Real gamma = (mat.kappa * alpha + mat.sigmaY) / std::sqrt(3.0 * J2);
    return {Mat<D>(gamma * sigma_s), gamma};
}

inline Real hardening_update(Real alpha, Real lambda_dot, Real dt)
{
    assert(dt > 0);
    return alpha + std::sqrt(2.0 / 3.0) * lambda_dot * dt;
}

/// Tensile failure: a particle fails when its pressure drops below p_min;
/// failed particles never carry negative pressure again.
struct FailureUpdate
{
    Real p;
    bool failed;
};

inline FailureUpdate apply_failure(Real p, bool failed, const Material &mat)
{
    if (!mat.p_min)
        return {p, failed};
    if (failed)
        return {std::max(p, 0.0), true};
    if (p < *mat.p_min)
        return {p, true};
    return {p, false};
}

} // namespace ulsph

#endif
