#ifndef ULSPH_RUNNER_HPP
#define ULSPH_RUNNER_HPP

#include "ulsph/config.hpp"
#include "ulsph/diagnostics.hpp"
#include "ulsph/integrator.hpp"
#include "ulsph/output.hpp"
#include "ulsph/scene.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace ulsph {

inline std::string zero_pad(long n, int width = 6)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*ld", width, n);
    return buf;
}

/// Drives one scene to its end time: per-cycle observer/energy sampling into
/// series.csv, periodic snapshots + resume state, final state. Returns the
/// process exit code (0 done, 2 numerical abort with a diagnostic snapshot).
template <int D>
int run_scene(Scene<D> &scene, const RunConfig &cfg, std::ostream &log = std::cerr)
{
    for (auto &m : scene.materials)
    {
        cfg.material.apply(m);
        if (cfg.xi)
            m.xi = *cfg.xi;
    }

    SolverOptions opt;
    opt.method = cfg.method;
    opt.n_threads = std::max(1, cfg.threads);
    Solver<D> solver(scene.particles, scene.materials, KernelSpec::from_spacing(scene.dp, D), opt);

    if (!cfg.resume.empty())
    {
        ResumeState<D> st = read_state<D>(cfg.resume);
        st.particles.normal = scene.particles.normal; // walls are static, not serialized
        solver.particles() = st.particles;
        solver.particles().refresh_volumes();
        solver.set_time(st.time);
        solver.prime(st.accumulators);
        // observers were bound against the build-time ordering, which the
        // state file preserves, so the indices stay valid
    }

    const Real t_end = cfg.end_time > 0 ? cfg.end_time : scene.default_end_time;
    // generous budget against runaway step shrinkage: a healthy run needs
    // about (t_end - t0) / dt_ac substeps at the initial acoustic step size
    Real dt_ac0 = solver.acoustic_dt();
    if (dt_ac0 > 0 && std::isfinite(dt_ac0) && t_end > solver.time())
        solver.options().max_substeps =
            50 * (1 + static_cast<long>((t_end - solver.time()) / dt_ac0));
    const std::string header = cfg.describe();
    std::filesystem::create_directories(cfg.out);
    auto path = [&](const std::string &name) { return cfg.out + "/" + name; };

    std::vector<std::string> cols = {"time"};
    const char *ax = "xyz";
    for (const auto &obs : scene.observers)
        for (int k = 0; k < D; ++k)
            cols.push_back(obs.name + "_" + ax[k]);
    cols.insert(cols.end(), {"e_kinetic", "e_strain", "e_total"});
    for (int k = 0; k < D; ++k)
        cols.push_back(std::string("p_") + ax[k]);
    if constexpr (D == 2)
        cols.push_back("L_z");
    else
        cols.insert(cols.end(), {"L_x", "L_y", "L_z"});
    cols.push_back("uniformity");
    TimeSeriesWriter series(path("series.csv"), header, cols);

    auto sample = [&]() {
        const auto &ps = solver.particles();
        std::vector<Real> row = {solver.time()};
        for (const auto &obs : scene.observers)
            for (int k = 0; k < D; ++k)
                row.push_back(obs.particle >= 0 ? ps.pos[obs.particle][k] : 0.0);
        EnergyReport e = energy_report(ps, solver.materials(), solver.time());
        row.insert(row.end(), {e.kinetic, e.strain, e.total});
        MomentumReport<D> mom = momentum_report(ps, scene.centroid);
        for (int k = 0; k < D; ++k)
            row.push_back(mom.linear[k]);
        if constexpr (D == 2)
            row.push_back(mom.angular[2]);
        else
            for (int k = 0; k < 3; ++k)
                row.push_back(mom.angular[k]);
        row.push_back(solver.neighbors().n_particles() == ps.size()
                          ? uniformity_metric(ps, solver.neighbors())
                          : 0.0);
        series.row(row);
    };

    long snap_index = 0;
    auto snapshot = [&](bool with_state) {
        std::string tag = zero_pad(snap_index++);
        write_snapshot_csv(path("snapshot_" + tag + ".csv"), solver.particles(), header,
                           solver.time());
        if (with_state)
            write_state(path("state_" + tag + ".dat"), solver.particles(), solver.neighbors(),
                        solver.accumulator(), solver.time());
    };

    try
    {
        if (cfg.resume.empty())
        {
            // sample the initial state before any table exists
            sample();
            if (cfg.snapshot_every > 0)
            {
                write_snapshot_csv(path("snapshot_" + zero_pad(snap_index++) + ".csv"),
                                   solver.particles(), header, solver.time());
            }
        }
        Real next_snap = cfg.snapshot_every > 0
                             ? solver.time() + cfg.snapshot_every
                             : std::numeric_limits<Real>::infinity();
        while (solver.time() < t_end * (1.0 - 1e-12))
        {
            if (solver.advance_cycle(t_end) <= 0)
                break;
            sample();
            if (solver.time() >= next_snap * (1.0 - 1e-12))
            {
                snapshot(true);
                next_snap += cfg.snapshot_every;
            }
        }
        series.flush();
        write_snapshot_csv(path("final.csv"), solver.particles(), header, solver.time());
        write_state(path("final_state.dat"), solver.particles(), solver.neighbors(),
                    solver.accumulator(), solver.time());
    }
    catch (const NonFinitePosition &e)
    {
        log << "abort at t=" << solver.time() << ": " << e.what() << "\n";
        series.flush();
        write_snapshot_csv(path("abort.csv"), solver.particles(), header, solver.time());
        return 2;
    }
    catch (const SolverAbort &e)
    {
        log << "abort at t=" << e.time << ": " << e.what() << "\n";
        series.flush();
        write_snapshot_csv(path("abort.csv"), solver.particles(), header, solver.time());
        return 2;
    }
    return 0;
}

} // namespace ulsph

#endif
