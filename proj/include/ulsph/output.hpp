#ifndef ULSPH_OUTPUT_HPP
#define ULSPH_OUTPUT_HPP

#include "ulsph/core.hpp"
#include "ulsph/diagnostics.hpp"
#include "ulsph/neighbor.hpp"
#include "ulsph/particles.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ulsph {

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline std::ofstream open_out(const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    return out;
}

/// Canonical CSV snapshot. Column order is a documented contract:
/// id,body,x,y[,z],vx,vy[,vz],rho,p,vm_stress,vm_strain,gamma,failed
template <int D>
void write_snapshot_csv(const std::string &path, const ParticleSystem<D> &ps,
                        const std::string &config_header, Real time)
{
    std::ofstream out = open_out(path);
    out.precision(12);
    if (!config_header.empty())
        out << "# " << config_header << "\n";
    out << "# time=" << time << "\n";
    out << "id,body";
    const char *ax = "xyz";
    for (int k = 0; k < D; ++k)
        out << ',' << ax[k];
    for (int k = 0; k < D; ++k)
        out << ",v" << ax[k];
    out << ",rho,p,vm_stress,vm_strain,gamma,failed\n";
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        out << i << ',' << ps.body[i];
        for (int k = 0; k < D; ++k)
            out << ',' << ps.pos[i][k];
        for (int k = 0; k < D; ++k)
            out << ',' << ps.vel[i][k];
        out << ',' << ps.rho[i] << ',' << ps.p[i] << ',' << von_mises_stress(ps.sigma_s[i])
            << ',' << von_mises_strain(ps.eps_s_acc[i]) << ',' << ps.gamma[i] << ','
            << int(ps.failed[i]) << "\n";
    }
    if (!out)
        throw IoError("write failed: " + path);
}

/// Legacy-VTK point cloud, optional export for visualization tools.
template <int D>
void write_snapshot_vtk(const std::string &path, const ParticleSystem<D> &ps, Real time)
{
    std::ofstream out = open_out(path);
    out.precision(9);
    out << "# vtk DataFile Version 3.0\nparticles t=" << time << "\nASCII\n"
        << "DATASET POLYDATA\nPOINTS " << ps.size() << " double\n";
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        for (int k = 0; k < 3; ++k)
            out << (k < D ? ps.pos[i][k] : 0.0) << (k == 2 ? '\n' : ' ');
    }
    out << "POINT_DATA " << ps.size() << "\nSCALARS vm_stress double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < ps.size(); ++i)
        out << von_mises_stress(ps.sigma_s[i]) << "\n";
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < ps.size(); ++i)
        out << ps.p[i] << "\n";
    if (!out)
        throw IoError("write failed: " + path);
}

/// Append-style CSV for observers/energies: fixed column set, header first.
class TimeSeriesWriter
{
  public:
    TimeSeriesWriter() = default;
    TimeSeriesWriter(const std::string &path, const std::string &config_header,
                     const std::vector<std::string> &columns)
        : out_(open_out(path))
    {
        out_.precision(12);
        if (!config_header.empty())
            out_ << "# " << config_header << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c)
            out_ << (c ? "," : "") << columns[c];
        out_ << "\n";
    }

    void row(const std::vector<Real> &values)
    {
        for (std::size_t c = 0; c < values.size(); ++c)
            out_ << (c ? "," : "") << values[c];
        out_ << "\n";
    }

    void flush() { out_.flush(); }

  private:
    std::ofstream out_;
};

/// Full-precision resume state: particle fields plus pair accumulators
/// (the penalty integral is state). Values round-trip via hexfloat.
template <int D>
struct ResumeState
{
    Real time = 0;
    ParticleSystem<D> particles;
    std::vector<std::tuple<int, int, Vec<D>>> accumulators;
};

template <int D>
void write_state(const std::string &path, const ParticleSystem<D> &ps,
                 const NeighborTable<D> &table, const PairAccumulator<D> &acc, Real time)
{
    std::FILE *f = std::fopen(path.c_str(), "w");
    if (!f)
        throw IoError("cannot open for writing: " + path);
    std::fprintf(f, "ulsph-state dim %d n %zu time %a\n", D, ps.size(), time);
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        std::fprintf(f, "p %d %d %d", ps.body[i], int(ps.kind[i]), int(ps.failed[i]));
        auto vecout = [&](const auto &v, int rows, int cols) {
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    std::fprintf(f, " %a", v(r, c));
        };
        vecout(ps.pos[i], D, 1);
        vecout(ps.vel[i], D, 1);
        std::fprintf(f, " %a %a %a %a", ps.rho[i], ps.mass[i], ps.alpha[i], ps.gamma[i]);
        vecout(ps.sigma_s[i], D, D);
        vecout(ps.eps_s_acc[i], D, D);
        std::fprintf(f, "\n");
    }
    std::size_t live = 0;
    for (std::size_t p = 0; p < acc.f.size(); ++p)
        if (!acc.f[p].isZero())
            ++live;
    std::fprintf(f, "accumulators %zu\n", live);
    for (std::size_t p = 0; p < acc.f.size(); ++p)
    {
        if (acc.f[p].isZero())
            continue;
        std::fprintf(f, "a %d %d", table.pairs[p].first, table.pairs[p].second);
        for (int k = 0; k < D; ++k)
            std::fprintf(f, " %a", acc.f[p][k]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

template <int D>
ResumeState<D> read_state(const std::string &path)
{
    std::FILE *f = std::fopen(path.c_str(), "r");
    if (!f)
        throw IoError("cannot open for reading: " + path);
    ResumeState<D> st;
    int dim = 0;
    std::size_t n = 0;
    if (std::fscanf(f, "ulsph-state dim %d n %zu time %la\n", &dim, &n, &st.time) != 3 ||
        dim != D)
    {
        std::fclose(f);
        throw IoError("bad state file: " + path);
    }
    auto &ps = st.particles;
    for (std::size_t i = 0; i < n; ++i)
    {
        int body, kind, failed;
        if (std::fscanf(f, " p %d %d %d", &body, &kind, &failed) != 3)
        {
            std::fclose(f);
            throw IoError("truncated state file: " + path);
        }
        Vec<D> pos, vel;
        Mat<D> sig, eps;
        Real rho, mass, alpha, gamma;
        auto rd = [&](Real &x) { return std::fscanf(f, " %la", &x) == 1; };
        bool ok = true;
        for (int k = 0; k < D; ++k)
            ok = ok && rd(pos[k]);
        for (int k = 0; k < D; ++k)
            ok = ok && rd(vel[k]);
        ok = ok && rd(rho) && rd(mass) && rd(alpha) && rd(gamma);
        for (int r = 0; r < D; ++r)
            for (int c = 0; c < D; ++c)
                ok = ok && rd(sig(r, c));
        for (int r = 0; r < D; ++r)
            for (int c = 0; c < D; ++c)
                ok = ok && rd(eps(r, c));
        if (!ok)
        {
            std::fclose(f);
            throw IoError("truncated state file: " + path);
        }
        ps.add(pos, vel, rho, mass, body, static_cast<ParticleKind>(kind));
        ps.rho.back() = rho;
        ps.vol.back() = mass / rho;
        ps.sigma_s.back() = sig;
        ps.eps_s_acc.back() = eps;
        ps.alpha.back() = alpha;
        ps.gamma.back() = gamma;
        ps.failed.back() = static_cast<std::uint8_t>(failed);
    }
    std::size_t n_acc = 0;
    if (std::fscanf(f, " accumulators %zu", &n_acc) == 1)
    {
        for (std::size_t p = 0; p < n_acc; ++p)
        {
            int a, b;
            Vec<D> v;
            bool ok = std::fscanf(f, " a %d %d", &a, &b) == 2;
            for (int k = 0; k < D; ++k)
                ok = ok && std::fscanf(f, " %la", &v[k]) == 1;
            if (!ok)
            {
                std::fclose(f);
                throw IoError("truncated accumulator block: " + path);
            }
            st.accumulators.emplace_back(a, b, v);
        }
    }
    std::fclose(f);
    return st;
}

} // namespace ulsph

#endif
