#pragma once

#include "gkaw/solver.hpp"

#include <string>
#include <vector>

namespace gkaw {

// Strict INI-style run document with sections [pde], [solver], [initial],
// [output]. Unknown sections or keys, duplicate keys and malformed values are
// ConfigErrors naming the offender. Initial data is offset + harmonic lists
// (the expression grammar is trig-free, so periodic data is specified as
// harmonics directly).
struct RunConfig {
    Registry reg;
    ParamValues params;
    Expr a, b, c, f;

    Grid grid;
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias = true;
    int diagnostics_stride = 100;
    std::vector<std::string> monitors{"C1", "C2"};

    struct Harmonic {
        int k = 1;
        double amp = 0.0;
        double phase = 0.0;
    };
    double offset = 0.0;
    std::vector<Harmonic> sines, cosines;

    std::string csv_path;
    std::string summary_path;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// offset + sum of amp*sin(2*pi*k*j/N + phase) + amp*cos(...) on the grid nodes
Eigen::VectorXd initial_field(const RunConfig& rc);

// Binds monitor names to integrands: C1 -> u, C2 -> u^2/2, C3 -> the energy
// density of the constant-coefficient family (refused with ConfigError when
// a, b or c depends on t).
SolverConfig make_solver_config(const RunConfig& rc);

} // namespace gkaw
