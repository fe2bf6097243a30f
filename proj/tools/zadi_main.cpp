// zadi: solver and experiment harness for the 2-d Zakai-type SPDE.
//
// Subcommands: solve | stability | converge | diverge | cost | levy-check.
// Flags: --config PATH, --preset NAME, --seed U64, --threads N, --out DIR.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "zadi/harness.hpp"
#include "zadi/io.hpp"
#include "zadi/stability.hpp"
#include "zadi/stencils.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KV = std::map<std::string, std::string>;

const std::set<std::string> kKnownKeys = {
    "scheme", "seed", "out", "threads",
    "T", "N", "k", "x0", "y0", "x_min", "x_max", "y_min", "y_max",
    "h_x", "h_y", "initial",
    "mu_x", "mu_y", "rho_x", "rho_y", "rho_xy",
    "kappa1", "theta1", "xi1", "r1", "rho_11", "rho_21", "rho_3",
    "tol", "max_iter",
    "mode", "levels", "h_levels", "k_levels", "hy_fixed", "L",
    "rho_steps", "rhoxy_steps", "rho_max", "lattice_n",
    "m_sub", "samples", "rho", "dump_path",
};

KV parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    KV kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(key))
            throw ConfigError("unknown config key: " + key);
        kv[key] = val;
    }
    return kv;
}

KV preset_values(const std::string& name) {
    if (name.empty()) return {};
    if (name == "paper-sec5") {
        return {
            {"T", "1"},      {"x0", "2"},      {"y0", "2"},
            {"x_min", "-8"}, {"x_max", "12"},  {"y_min", "-8"}, {"y_max", "12"},
            {"mu_x", "0.0809"}, {"mu_y", "0.0809"},
            {"rho_x", "0.2"},   {"rho_y", "0.2"}, {"rho_xy", "0.45"},
            {"scheme", "adi-milstein"}, {"initial", "dirac"},
            {"h_x", "0.125"},   {"h_y", "0.125"}, {"k", "0.001953125"},
            {"L", "20"},
        };
    }
    if (name == "paper-sec6") {
        return {
            {"T", "1"},      {"x0", "2"},     {"y0", "1.4"},
            {"x_min", "-3"}, {"x_max", "7"},  {"y_min", "0"}, {"y_max", "1.5"},
            {"r1", "0.05"},  {"xi1", "0.5"},  {"theta1", "0.4"}, {"kappa1", "2"},
            {"rho_11", "0.3"}, {"rho_21", "0.2"}, {"rho_3", "0.5"},
            {"scheme", "adi-milstein-heston"}, {"initial", "dirac"},
            {"h_x", "0.625"}, {"h_y", "0.025"}, {"k", "0.25"},
            {"L", "10"},
        };
    }
    throw ConfigError("unknown preset: " + name);
}

class Config {
public:
    Config(KV kv, std::optional<std::uint64_t> seed_flag) : kv_(std::move(kv)) {
        if (seed_flag) kv_["seed"] = std::to_string(*seed_flag);
        if (!kv_.count("seed"))
            throw ConfigError("no seed given (set seed= in the config or pass --seed)");
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }
    std::string str_or(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }
    double num(const std::string& key) const { return to_num(key, str(key)); }
    double num_or(const std::string& key, double dflt) const {
        return has(key) ? num(key) : dflt;
    }
    int integer(const std::string& key) const {
        return static_cast<int>(std::llround(num(key)));
    }
    int integer_or(const std::string& key, int dflt) const {
        return has(key) ? integer(key) : dflt;
    }
    std::uint64_t seed() const { return std::stoull(str("seed")); }

    std::vector<double> num_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_num(key, item));
        if (out.empty()) throw ConfigError("empty list for key: " + key);
        return out;
    }

    json to_json() const {
        json j;
        for (const auto& [k, v] : kv_) j[k] = v;
        return j;
    }

private:
    static double to_num(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key " + key + ": not a number: '" + s + "'");
        }
    }

    KV kv_;
};

zadi::ModelParams model_from(const Config& c) {
    zadi::ModelParams p;
    p.mu_x = c.num_or("mu_x", 0.0);
    p.mu_y = c.num_or("mu_y", 0.0);
    p.rho_x = c.num_or("rho_x", 0.0);
    p.rho_y = c.num_or("rho_y", 0.0);
    p.rho_xy = c.num_or("rho_xy", 0.0);
    return p;
}

zadi::SpdeProblem problem_from(const Config& c) {
    zadi::SpdeProblem prob;
    prob.params = model_from(c);
    prob.T = c.num_or("T", 1.0);
    prob.x0 = c.num_or("x0", 2.0);
    prob.y0 = c.num_or("y0", 2.0);
    prob.x_min = c.num_or("x_min", -8.0);
    prob.x_max = c.num_or("x_max", 12.0);
    prob.y_min = c.num_or("y_min", -8.0);
    prob.y_max = c.num_or("y_max", 12.0);
    const std::string ini = c.str_or("initial", "dirac");
    if (ini == "dirac")
        prob.initial = zadi::InitialKind::Dirac;
    else if (ini == "gaussian")
        prob.initial = zadi::InitialKind::Gaussian;
    else
        throw ConfigError("initial must be dirac or gaussian, got " + ini);
    return prob;
}

zadi::HestonProblem heston_from(const Config& c) {
    zadi::HestonProblem prob;
    prob.params.kappa1 = c.num_or("kappa1", 2.0);
    prob.params.theta1 = c.num_or("theta1", 0.4);
    prob.params.xi1 = c.num_or("xi1", 0.5);
    prob.params.r1 = c.num_or("r1", 0.05);
    prob.params.rho_11 = c.num_or("rho_11", 0.3);
    prob.params.rho_21 = c.num_or("rho_21", 0.2);
    prob.params.rho_3 = c.num_or("rho_3", 0.5);
    prob.T = c.num_or("T", 1.0);
    prob.x0 = c.num_or("x0", 2.0);
    prob.y0 = c.num_or("y0", 1.4);
    prob.x_min = c.num_or("x_min", -3.0);
    prob.x_max = c.num_or("x_max", 7.0);
    prob.y_min = c.num_or("y_min", 0.0);
    prob.y_max = c.num_or("y_max", 1.5);
    return prob;
}

zadi::TimeGrid timegrid_from(const Config& c, double T) {
    if (c.has("N")) return zadi::TimeGrid(T, c.integer("N"));
    const double k = c.num("k");
    const int N = static_cast<int>(std::lround(T / k));
    if (std::abs(N * k - T) > 1e-12 * T) throw ConfigError("k does not divide T");
    return zadi::TimeGrid(T, N);
}

fs::path ensure_out_dir(const Config& c, const std::string& out_flag) {
    fs::path dir = out_flag.empty() ? fs::path(c.str_or("out", ".")) : fs::path(out_flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory " + dir.string());
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const Config& c) {
    json j{{"tool", zadi::kVersion}, {"command", command}, {"config", c.to_json()}};
    zadi::write_json((dir / "manifest.json").string(), j);
}

// --- subcommands -------------------------------------------------------------

int cmd_solve(const Config& c, const fs::path& out) {
    const std::string scheme = c.str_or("scheme", "adi-milstein");
    const zadi::SchemeKind kind = zadi::scheme_from_string(scheme);
    const std::uint64_t seed = c.seed();

    zadi::Field result = [&] {
        if (kind == zadi::SchemeKind::AdiMilsteinHeston ||
            kind == zadi::SchemeKind::AdiMilsteinHestonModified ||
            kind == zadi::SchemeKind::AdiEulerHeston) {
            const zadi::HestonProblem prob = heston_from(c);
            const zadi::Grid2D g = prob.grid(c.num("h_x"), c.num("h_y"));
            const zadi::TimeGrid tg = timegrid_from(c, prob.T);
            const double delta = tg.k / zadi::sub_step_count(tg.k);
            const std::size_t cells =
                static_cast<std::size_t>(std::llround(prob.T / delta));
            const zadi::PathLattice lat =
                zadi::draw_lattice(cells, delta, prob.params.rho_3, seed);
            const zadi::HestonPath path =
                zadi::heston_path_from_lattice(lat, prob.T, tg.k);
            return zadi::evolve_heston(zadi::dirac_initial(g, prob.x0, prob.y0),
                                       prob.params, tg, path, kind);
        }
        const zadi::SpdeProblem prob = problem_from(c);
        const zadi::Grid2D g = prob.grid(c.num("h_x"), c.num("h_y"));
        const zadi::TimeGrid tg = timegrid_from(c, prob.T);
        const zadi::BrownianPath path =
            zadi::draw_path(std::max(tg.N, 1), prob.params.rho_xy, seed, tg.k);
        const double tol = c.num_or("tol", 1e-10);
        const int max_iter = c.integer_or("max_iter", 0);
        return zadi::evolve(prob.initial_field(g), kind, prob.params, tg, path, tol,
                            max_iter);
    }();

    zadi::write_field_csv((out / "field.csv").string(), result);
    zadi::write_json((out / "summary.json").string(), zadi::field_summary(result));
    return 0;
}

int cmd_stability(const Config& c, const fs::path& out) {
    const zadi::ModelParams p = model_from(c);
    const std::string mode = c.str_or("mode", "report");

    json rep;
    const zadi::AssumptionCheck chk = zadi::check_assumption(p);
    rep["assumption"] = {{"pass", chk.pass}, {"lhs", chk.lhs}};
    const auto cfl = zadi::explicit_cfl_bounds(p);
    rep["explicit_cfl"] = {{"k_over_hx2", cfl[0]}, {"k_over_hy2", cfl[1]}};
    if (chk.pass) {
        const zadi::StabilityMargins m = zadi::margins(p);
        rep["margins"] = {{"beta", m.beta}, {"theta0", m.theta0}, {"theta", m.theta}};
        const double h_min = std::min(c.num_or("h_x", 0.015625), c.num_or("h_y", 0.015625));
        rep["advisory_k"] =
            zadi::advisory_timestep(p, c.num_or("T", 1.0), h_min, 1.0, 1.0);
    }
    zadi::write_json((out / "stability.json").string(), rep);

    if (mode == "region") {
        const int rs = c.integer_or("rho_steps", 20);
        const int xs = c.integer_or("rhoxy_steps", 21);
        const double rho_max = c.num_or("rho_max", 0.95);
        std::vector<zadi::ModelParams> cells;
        for (int a = 0; a < rs; ++a)
            for (int b = 0; b < xs; ++b) {
                zadi::ModelParams q = p;
                q.rho_x = q.rho_y = rho_max * a / (rs - 1);
                q.rho_xy = -1.0 + 2.0 * b / (xs - 1);
                cells.push_back(q);
            }
        const auto rows = zadi::stability_region_sweep(
            cells, c.num_or("k", 0.001953125), c.num_or("h_x", 0.125),
            zadi::SchemeKind::AdiMilstein, c.integer_or("lattice_n", 101));
        zadi::write_region_csv((out / "region.csv").string(), rows);
    }
    return 0;
}

int cmd_converge(const Config& c, const fs::path& out) {
    const std::string mode = c.str_or("mode", "h");
    const int L = c.integer_or("L", 20);
    const std::uint64_t seed = c.seed();

    zadi::ExperimentResult res;
    if (mode == "h") {
        const zadi::SpdeProblem prob = problem_from(c);
        const zadi::SchemeKind kind =
            zadi::scheme_from_string(c.str_or("scheme", "adi-milstein"));
        const std::vector<double> hs =
            c.has("h_levels") ? c.num_list("h_levels")
                              : std::vector<double>{0.5, 0.25, 0.125, 0.0625};
        res = zadi::convergence_in_h(kind, prob, c.num("k"), hs, L, seed);
    } else if (mode == "k") {
        const zadi::SpdeProblem prob = problem_from(c);
        const zadi::SchemeKind kind =
            zadi::scheme_from_string(c.str_or("scheme", "adi-milstein"));
        const std::vector<double> ks =
            c.has("k_levels") ? c.num_list("k_levels")
                              : std::vector<double>{0.25, 0.0625, 0.015625, 0.00390625};
        res = zadi::convergence_in_k(kind, prob, c.num("h_x"), ks, L, seed);
    } else if (mode == "proxy-h") {
        const zadi::HestonProblem prob = heston_from(c);
        const zadi::SchemeKind kind =
            zadi::scheme_from_string(c.str_or("scheme", "adi-milstein-heston"));
        res = zadi::proxy_convergence_h(kind, prob, c.num("k"), c.num("h_x"),
                                        c.num("h_y"), c.integer_or("levels", 3), L, seed);
    } else if (mode == "proxy-k") {
        const zadi::HestonProblem prob = heston_from(c);
        const zadi::SchemeKind kind =
            zadi::scheme_from_string(c.str_or("scheme", "adi-milstein-heston"));
        res = zadi::proxy_convergence_k(kind, prob, c.num("h_x"), c.num("h_y"),
                                        c.num("k"), c.integer_or("levels", 3), L, seed);
    } else {
        throw ConfigError("converge mode must be h, k, proxy-h or proxy-k");
    }

    zadi::write_experiment_csv((out / "convergence.csv").string(), res);
    zadi::write_json((out / "convergence.json").string(),
                     json{{"fitted_slope", res.fitted_slope},
                          {"slope_stderr", res.slope_stderr}});
    std::cout << "fitted slope " << res.fitted_slope << " (stderr " << res.slope_stderr
              << ")\n";
    return 0;
}

int cmd_diverge(const Config& c, const fs::path& out) {
    const zadi::SpdeProblem prob = problem_from(c);
    const std::vector<double> hx =
        c.has("h_levels") ? c.num_list("h_levels")
                          : std::vector<double>{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    const zadi::ExperimentResult res = zadi::divergence_study(
        prob, c.num_or("k", 0.25), hx, c.num_or("hy_fixed", 0.5), c.seed());
    zadi::write_experiment_csv((out / "divergence.csv").string(), res);
    zadi::write_json((out / "divergence.json").string(),
                     json{{"fitted_slope", res.fitted_slope},
                          {"slope_stderr", res.slope_stderr}});
    std::cout << "fitted slope " << res.fitted_slope << " (stderr " << res.slope_stderr
              << ")\n";
    return 0;
}

int cmd_cost(const Config& c, const fs::path& out) {
    const zadi::HestonProblem prob = heston_from(c);
    const std::vector<zadi::SchemeKind> kinds = {
        zadi::SchemeKind::AdiEulerHeston, zadi::SchemeKind::AdiMilsteinHeston,
        zadi::SchemeKind::AdiMilsteinHestonModified};
    const auto rows = zadi::cost_study(kinds, prob, c.integer_or("levels", 3), c.seed());
    zadi::write_cost_csv((out / "cost.csv").string(), rows);
    return 0;
}

int cmd_levy_check(const Config& c, const fs::path& out) {
    const double k = c.num_or("k", 0.0625);
    const int m_sub = c.integer_or("m_sub", 64);
    const int samples = c.integer_or("samples", 10000);
    const double rho = c.num_or("rho", 0.0);
    const std::uint64_t seed = c.seed();

    double worst_identity = 0.0, mean = 0.0, mean2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const zadi::LevyAreaSample a = zadi::levy_area(k, m_sub, rho, zadi::derive_stream(seed, s));
        double dot = 0.0;
        for (int i = 0; i < m_sub; ++i) dot += a.dw[i] * a.db[i];
        const double lhs = a.a_xy + a.a_yx;
        const double rhs = a.delta_w * a.delta_b - dot;
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / scale);
        mean += a.a_xy;
        mean2 += a.a_xy * a.a_xy;
    }
    mean /= samples;
    mean2 /= samples;
    const double var = mean2 - mean * mean;
    const double var_oracle = k * k * (m_sub - 1) / (2.0 * m_sub);
    const double se_mean = std::sqrt(var / samples);

    json rep{{"k", k},
             {"m_sub", m_sub},
             {"samples", samples},
             {"rho", rho},
             {"worst_identity_rel_err", worst_identity},
             {"mean_a_xy", mean},
             {"mean_se", se_mean},
             {"var_a_xy", var},
             {"var_oracle", var_oracle},
             {"identity_ok", worst_identity < 1e-12},
             {"mean_ok", std::abs(mean) < 4.0 * se_mean},
             {"var_ok", std::abs(var - var_oracle) < 0.05 * var_oracle}};
    zadi::write_json((out / "levy_check.json").string(), rep);
    std::cout << rep.dump(2) << '\n';

    if (c.has("dump_path")) {
        const int n = 64;
        zadi::BrownianPath bp = zadi::draw_path(n, rho, seed, k);
        std::vector<zadi::LevyAreaSample> lv;
        for (int i = 0; i < n; ++i)
            lv.push_back(zadi::levy_area(bp.steps[i], k, m_sub, rho,
                                         zadi::derive_stream(seed, 100000 + i)));
        zadi::write_path_csv((out / c.str("dump_path")).string(), bp, &lv);
    }
    const bool ok = rep["identity_ok"].get<bool>() && rep["mean_ok"].get<bool>() &&
                    rep["var_ok"].get<bool>();
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-d Zakai SPDE Milstein finite-difference solver"};
    app.require_subcommand(1);

    std::string config_path, preset, out_flag;
    std::optional<std::uint64_t> seed_flag;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value configuration file");
        sub->add_option("--preset", preset, "parameter preset (paper-sec5, paper-sec6)");
        sub->add_option("--seed", seed_flag, "master seed (overrides the config)");
        sub->add_option("--threads", threads, "worker threads, 0 = auto");
        sub->add_option("--out", out_flag, "output directory");
    };

    CLI::App* solve = app.add_subcommand("solve", "run one path and write the field");
    CLI::App* stability = app.add_subcommand("stability", "assumption, CFL, margins, region");
    CLI::App* converge = app.add_subcommand("converge", "convergence studies");
    CLI::App* diverge = app.add_subcommand("diverge", "fixed-k divergence study");
    CLI::App* cost = app.add_subcommand("cost", "per-level cost study");
    CLI::App* levy = app.add_subcommand("levy-check", "Levy-area audit");
    for (CLI::App* sub : {solve, stability, converge, diverge, cost, levy}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        KV kv = preset_values(preset);
        if (!config_path.empty())
            for (auto& [key, value] : parse_config_file(config_path)) kv[key] = value;
        const Config c(std::move(kv), seed_flag);
        zadi::set_threads(threads > 0 ? threads : c.integer_or("threads", 0));
        const fs::path out = ensure_out_dir(c, out_flag);

        int rc = 0;
        if (solve->parsed()) {
            write_manifest(out, "solve", c);
            rc = cmd_solve(c, out);
        } else if (stability->parsed()) {
            write_manifest(out, "stability", c);
            rc = cmd_stability(c, out);
        } else if (converge->parsed()) {
            write_manifest(out, "converge", c);
            rc = cmd_converge(c, out);
        } else if (diverge->parsed()) {
            write_manifest(out, "diverge", c);
            rc = cmd_diverge(c, out);
        } else if (cost->parsed()) {
            write_manifest(out, "cost", c);
            rc = cmd_cost(c, out);
        } else if (levy->parsed()) {
            write_manifest(out, "levy-check", c);
            rc = cmd_levy_check(c, out);
        }
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const zadi::IterationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const zadi::TridiagSingularError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
