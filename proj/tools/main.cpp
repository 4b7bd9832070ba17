#include "ulsph/config.hpp"
#include "ulsph/runner.hpp"
#include "ulsph/scene.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace ulsph;

int dispatch(RunConfig &cfg)
{
    const std::string &name = cfg.scene;
    if (name == "oscillating_plate")
    {
        auto scene = build_oscillating_plate(cfg.ratio > 0 ? cfg.ratio : 20, cfg.vf);
        return run_scene(scene, cfg);
    }
    if (name == "colliding_rings")
    {
        auto scene = build_colliding_rings(cfg.v0_factor, cfg.dp > 0 ? cfg.dp : 0.001);
        return run_scene(scene, cfg);
    }
    if (name == "spinning_plate")
    {
        auto scene = build_spinning_plate();
        return run_scene(scene, cfg);
    }
    if (name == "hvi")
    {
        auto scene = build_hvi(cfg.dp > 0 ? cfg.dp : 2e-4);
        return run_scene(scene, cfg);
    }
    if (name == "bending_column")
    {
        auto scene = build_bending_column(cfg.ratio > 0 ? cfg.ratio : 6);
        return run_scene(scene, cfg);
    }
    if (name == "taylor_bar_round")
    {
        auto scene = build_taylor_bar(TaylorKind::Round, cfg.ratio > 0 ? cfg.ratio : 6);
        return run_scene(scene, cfg);
    }
    if (name == "taylor_bar_square")
    {
        auto scene = build_taylor_bar(TaylorKind::Square, cfg.ratio > 0 ? cfg.ratio : 10);
        return run_scene(scene, cfg);
    }
    std::cerr << "unknown scene '" << name << "'; available:";
    for (const auto &s : scene_names())
        std::cerr << ' ' << s;
    std::cerr << "\n";
    return 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"dimension-generic updated-Lagrangian SPH solver for elastic "
                 "and plastic solids"};
    app.footer("Environment overrides use the ULSPH_ prefix "
               "(ULSPH_SCENE, ULSPH_METHOD, ULSPH_END_TIME, ...).");

    ulsph::RunConfig cfg;
    std::string config_path, method_text, xi_text;

    app.add_option("--config", config_path, "key=value config file ([run]/[material] sections)");
    app.add_option("--scene", cfg.scene, "scene name (see --list-scenes)");
    app.add_option("--ratio", cfg.ratio, "resolution ratio (scene-specific meaning)");
    app.add_option("--dp", cfg.dp, "particle spacing, overrides the scene default");
    app.add_option("--method", method_text, "og | gnog (default gnog)");
    app.add_option("--xi", xi_text, "hourglass-control coefficient override");
    app.add_option("--end-time", cfg.end_time, "override the scene end time");
    app.add_option("--out", cfg.out, "output directory (default ./out)");
    app.add_option("--snapshot-every", cfg.snapshot_every, "snapshot interval in seconds");
    app.add_option("--threads", cfg.threads, "worker threads (default 1)");
    app.add_flag("--deterministic,!--no-deterministic", cfg.deterministic,
                 "deterministic reductions (default on)");
    app.add_option("--resume", cfg.resume, "resume from a saved state file");
    app.add_option("--vf", cfg.vf, "oscillating plate velocity factor");
    app.add_option("--v0-factor", cfg.v0_factor, "colliding rings speed / c0");
    bool list_scenes = false;
    app.add_flag("--list-scenes", list_scenes, "print available scenes and exit");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        std::cout << app.help();
        return 0;
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    if (list_scenes)
    {
        for (const auto &s : ulsph::scene_names())
            std::cout << s << "\n";
        return 0;
    }

    try
    {
        // precedence: config file < environment < command-line flags
        ulsph::RunConfig base;
        if (!config_path.empty())
            ulsph::parse_config_file(config_path, base);
        ulsph::apply_env_overrides(base);
        auto keep = [&](const char *flag) { return app.count(flag) > 0; };
        if (!keep("--scene"))
            cfg.scene = base.scene;
        if (!keep("--ratio"))
            cfg.ratio = base.ratio;
        if (!keep("--dp"))
            cfg.dp = base.dp;
        if (!keep("--method"))
            cfg.method = base.method;
        if (!keep("--xi"))
            cfg.xi = base.xi;
        if (!keep("--end-time"))
            cfg.end_time = base.end_time;
        if (!keep("--out"))
            cfg.out = base.out;
        if (!keep("--snapshot-every"))
            cfg.snapshot_every = base.snapshot_every;
        if (!keep("--threads"))
            cfg.threads = base.threads;
        if (!keep("--deterministic") && !keep("--no-deterministic"))
            cfg.deterministic = base.deterministic;
        if (!keep("--resume"))
            cfg.resume = base.resume;
        if (!keep("--vf"))
            cfg.vf = base.vf;
        if (!keep("--v0-factor"))
            cfg.v0_factor = base.v0_factor;
        cfg.material = base.material;
        if (app.count("--method") > 0)
            cfg.method = ulsph::parse_method(method_text);
        if (app.count("--xi") > 0)
            cfg.xi = std::stod(xi_text);

        if (cfg.scene.empty())
        {
            std::cerr << "missing --scene\n\n" << app.help();
            return 1;
        }
        return dispatch(cfg);
    }
    catch (const ulsph::ConfigError &e)
    {
        std::cerr << e.what() << "\n";
        return 1;
    }
    catch (const ulsph::IoError &e)
    {
        std::cerr << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
