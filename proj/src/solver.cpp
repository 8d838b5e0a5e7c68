#include "gkaw/solver.hpp"

#include <cmath>
#include <cstdio>

namespace gkaw {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool has_int_marker(const Expr& e) {
    if (e.kind() == Kind::Int) return true;
    for (const Expr& kid : e.n().kids)
        if (has_int_marker(kid)) return true;
    return false;
}

void check_coefficient(const Expr& e, const char* slot) {
    Dependencies d = dependencies(e);
    if (d.on_x || !d.jets.empty())
        throw ConfigError(std::string("coefficient ") + slot + " must depend on t only");
}

void check_nonlinearity(const Expr& e) {
    Dependencies d = dependencies(e);
    if (d.on_t || d.on_x)
        throw ConfigError("nonlinearity f must depend on u only");
    for (const JetVar& j : d.jets)
        if (j.dep != Dep::U || j.x_ord != 0)
            throw ConfigError("nonlinearity f must depend on u only");
}

// 4-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGx[4] = {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
                           0.86113631159405258};
constexpr double kGw[4] = {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
                           0.34785484513745386};

} // namespace

Solver::Solver(SolverConfig cfg) : cfg_(std::move(cfg)) {
    if (!(cfg_.grid.L > 0)) throw ConfigError("grid length L must be positive");
    if (!power_of_two(cfg_.grid.N) || cfg_.grid.N < 16)
        throw ConfigError("grid size N must be a power of two >= 16");
    if (!(cfg_.dt > 0)) throw ConfigError("time step dt must be positive");
    if (cfg_.diagnostics_stride < 1) throw ConfigError("diagnostics_stride must be >= 1");

    check_coefficient(cfg_.a, "a");
    check_coefficient(cfg_.b, "b");
    check_coefficient(cfg_.c, "c");
    check_nonlinearity(cfg_.f);
    a_ = CompiledExpr(cfg_.a, cfg_.reg, cfg_.params);
    b_ = CompiledExpr(cfg_.b, cfg_.reg, cfg_.params);
    c_ = CompiledExpr(cfg_.c, cfg_.reg, cfg_.params);
    f_ = CompiledExpr(cfg_.f, cfg_.reg, cfg_.params);

    // exact linear phase when both antiderivatives close
    Expr anti_a = integral(a_.folded(), IntVar::T);
    Expr anti_b = integral(b_.folded(), IntVar::T);
    closed_phase_ = !has_int_marker(anti_a) && !has_int_marker(anti_b);
    if (closed_phase_) {
        anti_a_ = CompiledExpr(anti_a, cfg_.reg);
        anti_b_ = CompiledExpr(anti_b, cfg_.reg);
    }

    for (const Monitor& m : cfg_.monitors) {
        CompiledExpr ce(m.integrand, cfg_.reg, cfg_.params);
        if (ce.uses_x())
            throw ConfigError("monitor '" + m.name +
                              "' depends on x; periodic-cell monitors must be x-free");
        monitors_.push_back(std::move(ce));
    }

    const int n = cfg_.grid.N;
    k_.resize(n);
    mask_.resize(n);
    for (int j = 0; j < n; ++j) {
        int m = j <= n / 2 ? j : j - n;
        k_[j] = 2.0 * kPi * m / cfg_.grid.L;
        bool keep = cfg_.dealias ? 3 * std::abs(m) <= n : std::abs(m) < n / 2;
        if (j == n / 2) keep = false; // Nyquist has no conjugate partner
        mask_[j] = keep ? 1.0 : 0.0;
    }
}

std::vector<std::string> Solver::monitor_names() const {
    std::vector<std::string> names;
    for (const Monitor& m : cfg_.monitors) names.push_back(m.name);
    return names;
}

Eigen::VectorXd Solver::field(const Eigen::VectorXcd& u_hat) const {
    Eigen::VectorXcd phys(u_hat.size());
    fft_.inv(phys, u_hat);
    return phys.real();
}

SolverState Solver::make_state(const Eigen::VectorXd& u0, double t0) const {
    if (u0.size() != cfg_.grid.N) throw ConfigError("initial field size does not match grid");
    if (!u0.allFinite()) throw ConfigError("initial field must be finite");
    SolverState s;
    s.t = t0;
    Eigen::VectorXcd u0c = u0.cast<std::complex<double>>();
    fft_.fwd(s.u_hat, u0c);
    s.u_hat[cfg_.grid.N / 2] = 0.0; // drop the partnerless Nyquist mode
    return s;
}

std::pair<double, double> Solver::phase_moments(double t0, double t1) const {
    if (closed_phase_)
        return {anti_a_.at_t(t1) - anti_a_.at_t(t0), anti_b_.at_t(t1) - anti_b_.at_t(t0)};
    double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    double ia = 0.0, ib = 0.0;
    for (int i = 0; i < 4; ++i) {
        double tq = mid + half * kGx[i];
        ia += kGw[i] * a_.at_t(tq);
        ib += kGw[i] * b_.at_t(tq);
    }
    return {half * ia, half * ib};
}

Eigen::VectorXcd Solver::phase_factor(double t0, double t1) const {
    auto [ma, mb] = phase_moments(t0, t1);
    Eigen::VectorXcd e(k_.size());
    for (Eigen::Index j = 0; j < k_.size(); ++j) {
        double k = k_[j];
        double phi = ma * k * k * k * k * k - mb * k * k * k;
        e[j] = std::complex<double>(std::cos(phi), std::sin(phi));
    }
    return e;
}

Eigen::VectorXcd Solver::nonlinear(const Eigen::VectorXcd& u_hat, double t) const {
    const std::complex<double> I(0.0, 1.0);
    Eigen::VectorXcd ud = u_hat.cwiseProduct(mask_.cast<std::complex<double>>());
    Eigen::VectorXcd ux_hat = ud;
    for (Eigen::Index j = 0; j < k_.size(); ++j) ux_hat[j] *= I * k_[j];
    Eigen::VectorXd u = field(ud);
    Eigen::VectorXd ux = field(ux_hat);
    double umax = u.cwiseAbs().maxCoeff();
    if (!(umax <= cfg_.ceiling))
        throw BlowUp("solution exceeded the blow-up ceiling (max|u| = " + std::to_string(umax) +
                         ")",
                     t);
    Eigen::VectorXd w(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) w[j] = f_.at_u(u[j]) * ux[j];
    Eigen::VectorXcd w_hat;
    Eigen::VectorXcd wc = w.cast<std::complex<double>>();
    fft_.fwd(w_hat, wc);
    double ct = c_.at_t(t);
    for (Eigen::Index j = 0; j < w_hat.size(); ++j) w_hat[j] *= ct * mask_[j];
    return w_hat;
}

void Solver::step(SolverState& s) const {
    const double h = cfg_.dt, t = s.t;
    Eigen::VectorXcd e_half = phase_factor(t, t + 0.5 * h);
    Eigen::VectorXcd e_full = phase_factor(t, t + h);
    Eigen::VectorXcd e_second = phase_factor(t + 0.5 * h, t + h);

    Eigen::VectorXcd a1 = nonlinear(s.u_hat, t);
    Eigen::VectorXcd a2 =
        nonlinear(e_half.cwiseProduct(s.u_hat + (0.5 * h) * a1), t + 0.5 * h);
    Eigen::VectorXcd a3 =
        nonlinear(e_half.cwiseProduct(s.u_hat) + (0.5 * h) * a2, t + 0.5 * h);
    Eigen::VectorXcd a4 =
        nonlinear(e_full.cwiseProduct(s.u_hat) + h * e_second.cwiseProduct(a3), t + h);

    s.u_hat = e_full.cwiseProduct(s.u_hat + (h / 6.0) * a1) +
              (h / 6.0) * (e_second.cwiseProduct(2.0 * a2 + 2.0 * a3) + a4);
    s.t = t + h;
}

DiagnosticsRecord Solver::diagnostics(const SolverState& s) const {
    const int n = cfg_.grid.N;
    const double dx = cfg_.grid.L / n;
    const std::complex<double> I(0.0, 1.0);
    DiagnosticsRecord rec;
    rec.t = s.t;
    int depth = 0;
    for (const CompiledExpr& m : monitors_) depth = std::max(depth, m.max_u_deriv());
    std::vector<Eigen::VectorXd> jets;
    Eigen::VectorXcd d = s.u_hat;
    for (int k = 0; k <= std::max(depth, 0); ++k) {
        jets.push_back(field(d));
        for (Eigen::Index j = 0; j < d.size(); ++j) d[j] *= I * k_[j];
    }
    const Eigen::VectorXd& u = jets[0];
    rec.umax = u.cwiseAbs().maxCoeff();
    rec.l2 = std::sqrt(dx * u.squaredNorm());
    std::vector<double> point(jets.size());
    for (const CompiledExpr& m : monitors_) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < jets.size(); ++k) point[k] = jets[k][j];
            EvalFrame frame;
            frame.t = s.t;
            frame.jets = point.data();
            frame.max_jet = static_cast<int>(jets.size()) - 1;
            acc += m(frame);
        }
        rec.integrals.push_back(dx * acc);
    }
    return rec;
}

std::pair<SolverState, std::vector<DiagnosticsRecord>> Solver::evolve(
    const Eigen::VectorXd& u0) const {
    if (!(cfg_.t_end > 0)) throw ConfigError("t_end must be positive");
    SolverState s = make_state(u0);
    const double t0 = s.t;
    long n_steps = std::llround(cfg_.t_end / cfg_.dt);
    if (n_steps < 1) n_steps = 1;
    std::vector<DiagnosticsRecord> records;
    records.push_back(diagnostics(s));
    for (long i = 0; i < n_steps; ++i) {
        step(s);
        s.t = t0 + (i + 1) * cfg_.dt; // keep time exact against accumulation
        if ((i + 1) % cfg_.diagnostics_stride == 0 || i + 1 == n_steps)
            records.push_back(diagnostics(s));
    }
    return {std::move(s), std::move(records)};
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                            const std::vector<std::string>& monitor_names) {
    std::string out = "t";
    for (const std::string& name : monitor_names) out += "," + name;
    out += ",umax,l2\n";
    char buf[64];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    for (const DiagnosticsRecord& r : records) {
        cell(r.t);
        for (double v : r.integrals) {
            out += ',';
            cell(v);
        }
        out += ',';
        cell(r.umax);
        out += ',';
        cell(r.l2);
        out += '\n';
    }
    return out;
}

} // namespace gkaw
