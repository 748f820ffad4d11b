#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "abm/market.hpp"

namespace abm {

/// Coefficients of the pricing PDE
///   dv/dt + (r - q) S dv/dS + 1/2 sigma_s^2 d2v/dS2 - r v = 0.
/// Unlike the lognormal case there is no S^2 factor on the diffusion term.
/// Futures options use yield = rate, which removes the drift term.
struct PdeOperator {
    double rate = 0.0;
    double yield = 0.0;
    double sigma_s = 0.0;
};

struct GridSpec {
    int n_s = 400;                 // spatial intervals (n_s + 1 nodes)
    int n_tau = 400;               // time steps
    double width_in_stddevs = 8.0; // half-width, in terminal stddevs
};

/// Uniform (S, tau) lattice with the solved option values. tau runs from 0
/// (payoff) to the contract horizon, S may extend well below zero.
/// values is time-major: values[j * s_nodes.size() + i] is slice j, node i.
struct PriceGrid {
    std::vector<double> s_nodes;
    std::vector<double> tau_nodes;
    std::vector<double> values;

    std::span<const double> slice(std::size_t time_index) const;

    /// Option value at spot s on the final (valuation-time) slice,
    /// 4-point Lagrange interpolation. Throws GridError outside the domain.
    double value_at(double s) const;
};

/// Residual of the pricing PDE for a closed-form price function v(S, t),
/// evaluated at (ms.spot, ms.valuation_time) with fourth-order central
/// differences (dS = 1e-4 max(1,|S|), dt = 1e-6). An exact solution yields
/// a residual at the finite-difference noise floor (~1e-6); formulas that
/// do not solve the PDE sit orders of magnitude above it.
/// Throws std::domain_error at tau = 0 (payoff kink) or sigma_s = 0.
double pde_residual(const std::function<double(double spot, double time)>& price_fn,
                    const PdeOperator& op, const MarketState& ms);

/// Crank-Nicolson solve of the European problem, with the first two steps
/// fully implicit (Rannacher) to damp the payoff-kink oscillation. The
/// domain is centred on the forward, stretched to cover the valuation spot,
/// and shifted by at most half a cell so the strike lies on a node.
/// Dirichlet boundaries carry the discounted forward-intrinsic values.
PriceGrid solve_european(const MarketState& ms, const OptionContract& oc,
                         const GridSpec& gs = {});

/// Same scheme with the early-exercise constraint enforced every time step
/// by projected SOR (omega = 1.2, tolerance 1e-10, at most 10000 sweeps).
/// The returned surface dominates both the intrinsic value and the
/// European solution node by node. Throws SolverError on non-convergence.
PriceGrid solve_american(const MarketState& ms, const OptionContract& oc,
                         const GridSpec& gs = {});

} // namespace abm
