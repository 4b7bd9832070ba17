#ifndef ULSPH_KERNEL_HPP
#define ULSPH_KERNEL_HPP

#include "ulsph/core.hpp"

#include <cassert>
#include <stdexcept>

namespace ulsph {

/// Quintic Wendland kernel with support radius 2h and h = 1.3 dp.
struct KernelSpec
{
    Real dp = 0;
    Real h = 0;
    Real cutoff = 0;
    int dim = 2;

    static KernelSpec from_spacing(Real dp, int dim)
    {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("KernelSpec: dim must be 2 or 3");
        KernelSpec s;
        s.dp = dp;
        s.h = 1.3 * dp;
        s.cutoff = 2.0 * s.h;
        s.dim = dim;
        return s;
    }

    Real alpha() const
    {
        return dim == 2 ? 7.0 / (4.0 * pi * h * h)
                        : 21.0 / (16.0 * pi * h * h * h);
    }
};

inline Real kernel_value(Real r, const KernelSpec &spec)
{
    assert(r >= 0);
    Real q = r / spec.h;
    if (q >= 2.0)
        return 0.0;
    Real s = 1.0 - 0.5 * q;
    Real s2 = s * s;
    return spec.alpha() * s2 * s2 * (2.0 * q + 1.0);
}

inline Real kernel_grad_mag(Real r, const KernelSpec &spec)
{
    assert(r >= 0);
    Real q = r / spec.h;
    if (q >= 2.0)
        return 0.0;
    Real s = 1.0 - 0.5 * q;
    return -5.0 * q * spec.alpha() * s * s * s / spec.h;
}

/// Kernel-gradient correction matrix B_i from cached pair geometry.
/// The moment matrix is symmetric because grad W is radial; a near-singular
/// moment (condition number > 1e6) or an empty neighborhood falls back to
/// the identity and bumps `uncorrected_count`.
template <int D>
struct CorrectionResult
{
    Mat<D> B;
    bool corrected;
};

template <int D, typename NeighborRange>
CorrectionResult<D> correction_matrix(const NeighborRange &neighbors)
{
    // neighbors yields tuples (r_ij vector i<-j, distance, dWdr, V_j)
    Mat<D> moment = Mat<D>::Zero();
    bool any = false;
    for (const auto &[rij, dist, dwdr, vol] : neighbors)
    {
        if (dist <= 0)
            continue;
        any = true;
        moment += (dwdr / dist * vol) * (rij * rij.transpose());
    }
    if (!any)
        return {Mat<D>::Identity(), false};

    moment = Real(0.5) * (moment + moment.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Mat<D>> eig(moment);
    Real lmax = 0, lmin = std::numeric_limits<Real>::infinity();
    for (int k = 0; k < D; ++k)
    {
        Real a = std::abs(eig.eigenvalues()[k]);
        lmax = std::max(lmax, a);
        lmin = std::min(lmin, a);
    }
    if (!(lmin > 0) || lmax / lmin > 1e6)
        return {Mat<D>::Identity(), false};

    Mat<D> B = -moment.inverse();
    if (!B.allFinite())
        return {Mat<D>::Identity(), false};
    return {B, true};
}

} // namespace ulsph

#endif
