#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "zadi/harness.hpp"
#include "zadi/model.hpp"
#include "zadi/stability.hpp"
#include "zadi/stochastic.hpp"

namespace zadi {

inline constexpr const char* kVersion = "zadi 0.1.0";

// header x,y,value; one row per interior node
void write_field_csv(const std::string& path, const Field& f);

// {mass, min, max, argmax:{x,y}}
nlohmann::json field_summary(const Field& f);

// header level,h_x,h_y,k,error,seconds
void write_experiment_csv(const std::string& path, const ExperimentResult& r);

// header rho_x,rho_y,rho_xy,assumption_pass,sup_moment2,stable
void write_region_csv(const std::string& path, const std::vector<RegionCell>& rows);

// header rho_x,rho_y,rho_xy,error
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// header scheme,level,h_x,h_y,k,seconds
void write_cost_csv(const std::string& path, const std::vector<CostRow>& rows);

// header n,z_x,z_y_tilde with optional a_xy,a_yx columns
void write_path_csv(const std::string& path, const BrownianPath& bp,
                    const std::vector<LevyAreaSample>* levy = nullptr);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace zadi
