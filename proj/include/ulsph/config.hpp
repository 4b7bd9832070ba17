#ifndef ULSPH_CONFIG_HPP
#define ULSPH_CONFIG_HPP

#include "ulsph/core.hpp"
#include "ulsph/forces.hpp"
#include "ulsph/material.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace ulsph {

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Optional per-run material overrides ([material] block in config files).
struct MaterialOverride
{
    std::optional<Real> rho0, E, nu, sigmaY, kappa, p_min, xi;

    void apply(Material &m) const;
};

struct RunConfig
{
    std::string scene;
    int ratio = -1;      // resolution ratio, scene-specific meaning
    Real dp = 0;         // explicit spacing; 0 uses the scene default
    Method method = Method::GNOG;
    std::optional<Real> xi; // hourglass-coefficient override for all bodies
    Real end_time = 0;      // 0 uses the scene default
    std::string out = "out";
    Real snapshot_every = 0; // 0 disables periodic snapshots
    int threads = 1;
    bool deterministic = true;
    std::string resume;
    Real vf = 0.05;        // oscillating plate initial-velocity factor
    Real v0_factor = 0.06; // colliding rings speed as a fraction of c0
    MaterialOverride material;

    /// Resolved key=value view, used as the provenance header of outputs.
    std::string describe() const;
};

/// Flat key=value file with optional [run] / [material] section headers.
/// Unknown keys and malformed values are rejected by name.
void parse_config_file(const std::string &path, RunConfig &cfg);

/// Environment overrides: ULSPH_<KEY> mirrors the corresponding flag
/// (e.g. ULSPH_METHOD, ULSPH_END_TIME, ULSPH_OUT).
void apply_env_overrides(RunConfig &cfg);

Method parse_method(const std::string &text); // throws ConfigError

} // namespace ulsph

#endif
