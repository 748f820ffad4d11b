#include "abm/pde.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "abm/analytic.hpp"
#include "abm/errors.hpp"
#include "abm/oracle.hpp"

namespace abm {

std::span<const double> PriceGrid::slice(std::size_t time_index) const {
    const std::size_t n = s_nodes.size();
    return {values.data() + time_index * n, n};
}

double PriceGrid::value_at(double s) const {
    const std::size_t n = s_nodes.size();
    if (n < 2 || s < s_nodes.front() || s > s_nodes.back())
        throw GridError("PriceGrid::value_at: spot outside the grid domain");
    const auto last = slice(tau_nodes.size() - 1);
    const double ds = s_nodes[1] - s_nodes[0];
    if (n < 4) {
        const std::size_t i = std::min<std::size_t>(
            static_cast<std::size_t>((s - s_nodes.front()) / ds), n - 2);
        const double w = (s - s_nodes[i]) / ds;
        return (1.0 - w) * last[i] + w * last[i + 1];
    }
    // 4-point Lagrange around the containing cell; O(ds^4), so readout error
    // never limits the scheme's second-order convergence.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>((s - s_nodes.front()) / ds);
    i = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double acc = 0.0;
    for (std::ptrdiff_t j = i; j < i + 4; ++j) {
        double basis = 1.0;
        for (std::ptrdiff_t l = i; l < i + 4; ++l) {
            if (l == j) continue;
            basis *= (s - s_nodes[l]) / (s_nodes[j] - s_nodes[l]);
        }
        acc += basis * last[j];
    }
    return acc;
}

double pde_residual(const std::function<double(double, double)>& price_fn,
                    const PdeOperator& op, const MarketState& ms) {
    validate(ms);
    if (!(ms.tau() > 0.0))
        throw std::domain_error("pde_residual: tau must be positive (payoff kink)");
    if (!(op.sigma_s > 0.0))
        throw std::domain_error("pde_residual: sigma_s must be positive");

    const double s = ms.spot;
    const double t = ms.valuation_time;
    const double hs = 1e-4 * std::max(1.0, std::fabs(s));
    const double ht = 1e-6;

    const double v = price_fn(s, t);
    const double vm2 = price_fn(s - 2.0 * hs, t);
    const double vm1 = price_fn(s - hs, t);
    const double vp1 = price_fn(s + hs, t);
    const double vp2 = price_fn(s + 2.0 * hs, t);
    const double v_s = (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * hs);
    const double v_ss =
        (-vm2 + 16.0 * vm1 - 30.0 * v + 16.0 * vp1 - vp2) / (12.0 * hs * hs);

    const double tm2 = price_fn(s, t - 2.0 * ht);
    const double tm1 = price_fn(s, t - ht);
    const double tp1 = price_fn(s, t + ht);
    const double tp2 = price_fn(s, t + 2.0 * ht);
    const double v_t = (tm2 - 8.0 * tm1 + 8.0 * tp1 - tp2) / (12.0 * ht);

    return v_t + (op.rate - op.yield) * s * v_s +
           0.5 * op.sigma_s * op.sigma_s * v_ss - op.rate * v;
}

namespace {

struct Tridiag {
    std::vector<double> lower, diag, upper; // interior rows 1..n-1
};

// M = I - theta * dt * L for the interior nodes.
Tridiag implicit_matrix(const std::vector<double>& s, double a, double r,
                        double sigma, double dt, double theta) {
    const std::size_t n = s.size() - 1;
    const double ds = s[1] - s[0];
    Tridiag m;
    m.lower.resize(n + 1);
    m.diag.resize(n + 1);
    m.upper.resize(n + 1);
    const double diff = 0.5 * sigma * sigma / (ds * ds);
    for (std::size_t j = 1; j < n; ++j) {
        const double adv = a * s[j] / (2.0 * ds);
        m.lower[j] = -theta * dt * (diff - adv);
        m.diag[j] = 1.0 - theta * dt * (-2.0 * diff - r);
        m.upper[j] = -theta * dt * (diff + adv);
    }
    return m;
}

// rhs = (I + (1 - theta) dt L) v_old, interior rows.
void explicit_rhs(const std::vector<double>& s, double a, double r, double sigma,
                  double dt, double theta, const std::vector<double>& v,
                  std::vector<double>& rhs) {
    const std::size_t n = s.size() - 1;
    const double ds = s[1] - s[0];
    const double diff = 0.5 * sigma * sigma / (ds * ds);
    const double w = (1.0 - theta) * dt;
    for (std::size_t j = 1; j < n; ++j) {
        const double adv = a * s[j] / (2.0 * ds);
        rhs[j] = v[j] + w * ((diff - adv) * v[j - 1] + (-2.0 * diff - r) * v[j] +
                             (diff + adv) * v[j + 1]);
    }
}

void thomas_solve(const Tridiag& m, std::vector<double>& rhs,
                  std::vector<double>& v, std::size_t n) {
    static thread_local std::vector<double> scratch;
    scratch.assign(n + 1, 0.0);
    // forward elimination over interior rows
    double d = m.diag[1];
    v[1] = rhs[1] / d;
    for (std::size_t j = 2; j < n; ++j) {
        scratch[j] = m.upper[j - 1] / d;
        d = m.diag[j] - m.lower[j] * scratch[j];
        v[j] = (rhs[j] - m.lower[j] * v[j - 1]) / d;
    }
    for (std::size_t j = n - 1; j >= 2; --j) v[j - 1] -= scratch[j] * v[j];
}

int psor_solve(const Tridiag& m, const std::vector<double>& rhs,
               const std::vector<double>& obstacle, std::vector<double>& v,
               std::size_t n) {
    constexpr double omega = 1.2;
    constexpr double tol = 1e-10;
    constexpr int max_sweeps = 10000;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double worst = 0.0;
        for (std::size_t j = 1; j < n; ++j) {
            const double gs =
                (rhs[j] - m.lower[j] * v[j - 1] - m.upper[j] * v[j + 1]) / m.diag[j];
            const double candidate = v[j] + omega * (gs - v[j]);
            const double next = std::max(obstacle[j], candidate);
            worst = std::max(worst, std::fabs(next - v[j]));
            v[j] = next;
        }
        if (worst < tol) return sweep;
    }
    std::ostringstream msg;
    msg << "psor: no convergence after " << max_sweeps
        << " sweeps (omega=" << omega << ", tol=" << tol << ")";
    throw SolverError(msg.str());
}

double boundary_value(OptionKind kind, double s, double strike, double r,
                      double q, double tau) {
    const double fwd = s * std::exp(-q * tau) - strike * std::exp(-r * tau);
    return std::max(kind == OptionKind::call ? fwd : -fwd, 0.0);
}

PriceGrid degenerate_grid(const MarketState& ms, const OptionContract& oc,
                          const GridSpec& gs) {
    // sigma_s = 0 or tau = 0: the surface is the discounted forward
    // intrinsic, spanned around spot, forward and strike.
    const double q = effective_yield(ms, oc.underlying);
    const double a = ms.rate - q;
    const double tau = ms.tau();
    const double m = ms.spot * std::exp(a * tau);
    double lo = std::min({ms.spot, m, oc.strike});
    double hi = std::max({ms.spot, m, oc.strike});
    const double pad = std::max(1.0, 0.5 * (hi - lo));
    lo -= pad;
    hi += pad;

    PriceGrid grid;
    grid.s_nodes.resize(gs.n_s + 1);
    const double ds = (hi - lo) / gs.n_s;
    for (int i = 0; i <= gs.n_s; ++i) grid.s_nodes[i] = lo + i * ds;
    grid.tau_nodes = {0.0, tau};
    if (tau == 0.0) grid.tau_nodes = {0.0};
    grid.values.reserve(grid.tau_nodes.size() * grid.s_nodes.size());
    for (double tp : grid.tau_nodes) {
        for (double s : grid.s_nodes) {
            grid.values.push_back(
                tp == 0.0 ? intrinsic_payoff(oc.kind, s, oc.strike)
                          : boundary_value(oc.kind, s, oc.strike, ms.rate, q, tp));
        }
    }
    return grid;
}

PriceGrid solve_pde(const MarketState& ms, const OptionContract& oc,
                    const GridSpec& gs, bool american) {
    validate(ms);
    if (gs.n_s < 50 || gs.n_tau < 50)
        throw std::invalid_argument("solve_pde: need n_s >= 50 and n_tau >= 50");
    if (gs.width_in_stddevs < 6.0)
        throw std::invalid_argument("solve_pde: width_in_stddevs must be >= 6");

    const double tau = ms.tau();
    if (tau == 0.0 || ms.sigma_s == 0.0) return degenerate_grid(ms, oc, gs);

    const double q = effective_yield(ms, oc.underlying);
    const double a = ms.rate - q;
    const TerminalLaw law = terminal_law(ms, oc.underlying);

    double lo = std::min(ms.spot, law.mean) - gs.width_in_stddevs * law.stddev;
    double hi = std::max(ms.spot, law.mean) + gs.width_in_stddevs * law.stddev;
    double ds = (hi - lo) / gs.n_s;
    if (oc.strike > lo && oc.strike < hi) {
        // shift by less than half a cell so the payoff kink sits on a node
        const double cells = (oc.strike - lo) / ds;
        const double shift = (cells - std::round(cells)) * ds;
        lo += shift;
        hi += shift;
    }
    if (ms.spot < lo || ms.spot > hi)
        throw GridError("solve_pde: valuation spot outside the grid domain");

    PriceGrid grid;
    grid.s_nodes.resize(gs.n_s + 1);
    for (int i = 0; i <= gs.n_s; ++i) grid.s_nodes[i] = lo + i * ds;
    grid.s_nodes.back() = hi;
    const double dt = tau / gs.n_tau;
    grid.tau_nodes.resize(gs.n_tau + 1);
    for (int j = 0; j <= gs.n_tau; ++j) grid.tau_nodes[j] = j * dt;
    grid.tau_nodes.back() = tau;

    const std::size_t n = gs.n_s;
    std::vector<double> v(n + 1), obstacle(n + 1), rhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        obstacle[i] = intrinsic_payoff(oc.kind, grid.s_nodes[i], oc.strike);
        v[i] = obstacle[i];
    }
    grid.values.reserve((gs.n_tau + 1) * (n + 1));
    grid.values.insert(grid.values.end(), v.begin(), v.end());

    const Tridiag m_impl =
        implicit_matrix(grid.s_nodes, a, ms.rate, ms.sigma_s, dt, 1.0);
    const Tridiag m_cn =
        implicit_matrix(grid.s_nodes, a, ms.rate, ms.sigma_s, dt, 0.5);

    for (int step = 1; step <= gs.n_tau; ++step) {
        const bool rannacher = step <= 2;
        const double theta = rannacher ? 1.0 : 0.5;
        const Tridiag& mat = rannacher ? m_impl : m_cn;
        const double t_new = grid.tau_nodes[step];

        explicit_rhs(grid.s_nodes, a, ms.rate, ms.sigma_s, dt, theta, v, rhs);

        double b_lo = boundary_value(oc.kind, lo, oc.strike, ms.rate, q, t_new);
        double b_hi = boundary_value(oc.kind, hi, oc.strike, ms.rate, q, t_new);
        if (american) {
            b_lo = std::max(b_lo, obstacle.front());
            b_hi = std::max(b_hi, obstacle.back());
        }
        v[0] = b_lo;
        v[n] = b_hi;

        if (american) {
            // psor reads the boundary values through v[0] and v[n]
            psor_solve(mat, rhs, obstacle, v, n);
        } else {
            rhs[1] -= mat.lower[1] * b_lo;
            rhs[n - 1] -= mat.upper[n - 1] * b_hi;
            thomas_solve(mat, rhs, v, n);
        }
        grid.values.insert(grid.values.end(), v.begin(), v.end());
    }
    return grid;
}

} // namespace

PriceGrid solve_european(const MarketState& ms, const OptionContract& oc,
                         const GridSpec& gs) {
    return solve_pde(ms, oc, gs, false);
}

PriceGrid solve_american(const MarketState& ms, const OptionContract& oc,
                         const GridSpec& gs) {
    return solve_pde(ms, oc, gs, true);
}

} // namespace abm
