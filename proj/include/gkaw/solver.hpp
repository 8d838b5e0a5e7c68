#pragma once

#include "gkaw/compile.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace gkaw {

// periodic interval [0, L) sampled at x_j = j L / N
struct Grid {
    double L = 6.283185307179586476925286766559; // 2*pi
    int N = 256;
};

// named conserved-integral diagnostic; the integrand may reference t,
// parameters, u and x-derivatives of u (computed spectrally), but not x
struct Monitor {
    std::string name;
    Expr integrand;
};

struct SolverConfig {
    Grid grid;
    double dt = 1e-3;
    double t_end = 1.0;
    Expr a, b, c; // coefficient expressions in t
    Expr f;       // nonlinearity expression in u
    ParamValues params;
    Registry reg;
    bool dealias = true;
    int diagnostics_stride = 100;
    std::vector<Monitor> monitors;
    double ceiling = 1e8; // BlowUp threshold on max|u|
};

struct SolverState {
    double t = 0.0;
    Eigen::VectorXcd u_hat; // full-length spectrum, conjugate-symmetric
};

struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<double> integrals; // one per monitor, trapezoid quadrature
    double umax = 0.0;
    double l2 = 0.0;
};

// Integrating-factor classical RK4 for u_t = a(t)u_xxxxx + b(t)u_xxx +
// c(t)f(u)u_x on the periodic grid. The linear symbol i(a k^5 - b k^3) is
// absorbed through the exponential of its exact antiderivative when a and b
// admit closed antiderivatives, otherwise through per-interval 4-point
// Gauss-Legendre quadrature; the nonlinear term is evaluated pseudospectrally
// with 2/3-rule dealiasing (Nyquist mode always zeroed).
class Solver {
public:
    explicit Solver(SolverConfig cfg); // compiles and validates; ConfigError
    const SolverConfig& config() const { return cfg_; }
    std::vector<std::string> monitor_names() const;

    SolverState make_state(const Eigen::VectorXd& u0, double t0 = 0.0) const;
    // one IFRK4 step of size cfg.dt; throws BlowUp above the ceiling
    void step(SolverState& s) const;
    DiagnosticsRecord diagnostics(const SolverState& s) const;
    // records every diagnostics_stride steps including initial and final times
    std::pair<SolverState, std::vector<DiagnosticsRecord>> evolve(const Eigen::VectorXd& u0) const;

private:
    Eigen::VectorXcd nonlinear(const Eigen::VectorXcd& u_hat, double t) const;
    // integral of the linear phase (a k^5 - b k^3) over [t0, t1], split into
    // the k^5 and k^3 moments
    std::pair<double, double> phase_moments(double t0, double t1) const;
    Eigen::VectorXcd phase_factor(double t0, double t1) const;
    Eigen::VectorXd field(const Eigen::VectorXcd& u_hat) const;

    SolverConfig cfg_;
    CompiledExpr a_, b_, c_, f_;
    CompiledExpr anti_a_, anti_b_; // closed antiderivatives when available
    bool closed_phase_ = false;
    std::vector<CompiledExpr> monitors_;
    Eigen::VectorXd k_;     // wavenumbers per spectral index
    Eigen::VectorXd mask_;  // dealias/Nyquist mask
    mutable Eigen::FFT<double> fft_;
};

// header `t,<monitor names>,umax,l2`; 17 significant digits, '\n' endings
std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                            const std::vector<std::string>& monitor_names);

} // namespace gkaw
