#include "zadi/io.hpp"

#include <fstream>
#include <iomanip>

namespace zadi {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << std::setprecision(17);
    return os;
}

}  // namespace

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream os = open_out(path);
    os << "x,y,value\n";
    const Grid2D& g = f.grid();
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_y; ++j)
            os << g.x(i) << ',' << g.y(j) << ',' << f(i, j) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

nlohmann::json field_summary(const Field& f) {
    const Grid2D& g = f.grid();
    int bi = 0, bj = 0;
    double best = f(0, 0);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_y; ++j)
            if (f(i, j) > best) {
                best = f(i, j);
                bi = i;
                bj = j;
            }
    return nlohmann::json{{"mass", mass(f)},
                          {"min", min_value(f)},
                          {"max", max_value(f)},
                          {"argmax", {{"x", g.x(bi)}, {"y", g.y(bj)}}}};
}

void write_experiment_csv(const std::string& path, const ExperimentResult& r) {
    std::ofstream os = open_out(path);
    os << "level,h_x,h_y,k,error,seconds\n";
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        const LevelResult& lv = r.levels[i];
        os << i << ',' << lv.h_x << ',' << lv.h_y << ',' << lv.k << ',' << lv.error
           << ',' << lv.seconds << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_region_csv(const std::string& path, const std::vector<RegionCell>& rows) {
    std::ofstream os = open_out(path);
    os << "rho_x,rho_y,rho_xy,assumption_pass,sup_moment2,stable\n";
    for (const auto& r : rows)
        os << r.rho_x << ',' << r.rho_y << ',' << r.rho_xy << ','
           << (r.assumption_pass ? 1 : 0) << ',' << r.sup_moment2 << ','
           << (r.stable ? 1 : 0) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream os = open_out(path);
    os << "rho_x,rho_y,rho_xy,error\n";
    for (const auto& r : rows)
        os << r.rho_x << ',' << r.rho_y << ',' << r.rho_xy << ',' << r.error << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_cost_csv(const std::string& path, const std::vector<CostRow>& rows) {
    std::ofstream os = open_out(path);
    os << "scheme,level,h_x,h_y,k,seconds\n";
    for (const auto& r : rows)
        os << to_string(r.kind) << ',' << r.level << ',' << r.h_x << ',' << r.h_y << ','
           << r.k << ',' << r.seconds << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_path_csv(const std::string& path, const BrownianPath& bp,
                    const std::vector<LevyAreaSample>* levy) {
    std::ofstream os = open_out(path);
    os << (levy ? "n,z_x,z_y_tilde,a_xy,a_yx\n" : "n,z_x,z_y_tilde\n");
    for (std::size_t n = 0; n < bp.steps.size(); ++n) {
        os << n << ',' << bp.steps[n].z_x << ',' << bp.steps[n].z_y_tilde;
        if (levy) os << ',' << (*levy)[n].a_xy << ',' << (*levy)[n].a_yx;
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os = open_out(path);
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace zadi
