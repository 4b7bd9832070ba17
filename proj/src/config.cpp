#include "ulsph/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ulsph {

namespace {

Real parse_real(const std::string &key, const std::string &value)
{
    try
    {
        std::size_t used = 0;
        Real v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
    }
}

int parse_int(const std::string &key, const std::string &value)
{
    try
    {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError("key '" + key + "' expects an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw ConfigError("key '" + key + "' expects a boolean, got '" + value + "'");
}

std::string trim(const std::string &s)
{
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

void set_key(RunConfig &cfg, const std::string &section, const std::string &key,
             const std::string &value)
{
    if (section == "material")
    {
        auto &m = cfg.material;
        if (key == "rho0")
            m.rho0 = parse_real(key, value);
        else if (key == "E")
            m.E = parse_real(key, value);
        else if (key == "nu")
            m.nu = parse_real(key, value);
        else if (key == "sigmaY")
            m.sigmaY = parse_real(key, value);
        else if (key == "kappa")
            m.kappa = parse_real(key, value);
        else if (key == "p_min")
            m.p_min = parse_real(key, value);
        else if (key == "xi")
            m.xi = parse_real(key, value);
        else
            throw ConfigError("unknown material key '" + key + "'");
        return;
    }
    if (key == "scene")
        cfg.scene = value;
    else if (key == "ratio")
        cfg.ratio = parse_int(key, value);
    else if (key == "dp")
        cfg.dp = parse_real(key, value);
    else if (key == "method")
        cfg.method = parse_method(value);
    else if (key == "xi")
        cfg.xi = parse_real(key, value);
    else if (key == "end_time" || key == "end-time")
        cfg.end_time = parse_real(key, value);
    else if (key == "out")
        cfg.out = value;
    else if (key == "snapshot_every" || key == "snapshot-every")
        cfg.snapshot_every = parse_real(key, value);
    else if (key == "threads")
        cfg.threads = parse_int(key, value);
    else if (key == "deterministic")
        cfg.deterministic = parse_bool(key, value);
    else if (key == "resume")
        cfg.resume = value;
    else if (key == "vf")
        cfg.vf = parse_real(key, value);
    else if (key == "v0_factor" || key == "v0-factor")
        cfg.v0_factor = parse_real(key, value);
    else
        throw ConfigError("unknown key '" + key + "'");
}

} // namespace

Method parse_method(const std::string &text)
{
    if (text == "og")
        return Method::OG;
    if (text == "gnog")
        return Method::GNOG;
    throw ConfigError("method '" + text + "' not implemented; valid methods: og, gnog");
}

void MaterialOverride::apply(Material &m) const
{
    bool rederive = rho0 || E || nu;
    if (rho0)
        m.rho0 = *rho0;
    if (E)
        m.E = *E;
    if (nu)
        m.nu = *nu;
    if (rederive)
    {
        m.K = m.E / (3.0 * (1.0 - 2.0 * m.nu));
        m.G = m.E / (2.0 * (1.0 + m.nu));
        m.c0 = std::sqrt(m.K / m.rho0);
    }
    if (sigmaY)
    {
        m.sigmaY = *sigmaY;
        m.plastic = true;
    }
    if (kappa)
        m.kappa = *kappa;
    if (p_min)
        m.p_min = *p_min;
    if (xi)
        m.xi = *xi;
}

void parse_config_file(const std::string &path, RunConfig &cfg)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[' && t.back() == ']')
        {
            section = trim(t.substr(1, t.size() - 2));
            if (section != "run" && section != "material")
                throw ConfigError("unknown section '" + section + "'");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        set_key(cfg, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

void apply_env_overrides(RunConfig &cfg)
{
    static const std::map<std::string, std::string> keys = {
        {"ULSPH_SCENE", "scene"},           {"ULSPH_RATIO", "ratio"},
        {"ULSPH_DP", "dp"},                 {"ULSPH_METHOD", "method"},
        {"ULSPH_XI", "xi"},                 {"ULSPH_END_TIME", "end_time"},
        {"ULSPH_OUT", "out"},               {"ULSPH_SNAPSHOT_EVERY", "snapshot_every"},
        {"ULSPH_THREADS", "threads"},       {"ULSPH_DETERMINISTIC", "deterministic"},
        {"ULSPH_RESUME", "resume"},         {"ULSPH_VF", "vf"},
        {"ULSPH_V0_FACTOR", "v0_factor"}};
    for (const auto &[env, key] : keys)
        if (const char *v = std::getenv(env.c_str()))
            set_key(cfg, "run", key, v);
}

std::string RunConfig::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "scene=" << scene << " ratio=" << ratio << " dp=" << dp
       << " method=" << (method == Method::OG ? "og" : "gnog");
    if (xi)
        os << " xi=" << *xi;
    os << " end_time=" << end_time << " out=" << out
       << " snapshot_every=" << snapshot_every << " threads=" << threads
       << " deterministic=" << (deterministic ? "true" : "false");
    if (!resume.empty())
        os << " resume=" << resume;
    os << " vf=" << vf << " v0_factor=" << v0_factor;
    return os.str();
}

} // namespace ulsph
