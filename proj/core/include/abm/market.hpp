#pragma once

#include <algorithm>

namespace abm {

enum class OptionKind { call, put };
enum class Exercise { european, american };

/// What the option is written on. Futures are priced with the dividend
/// yield pinned to the risk-free rate; no_dividend pins it to zero.
enum class Underlying { no_dividend, dividend_yield, futures };

/// Market inputs. Spot and strike are unconstrained in sign: the underlying
/// follows an arithmetic Brownian motion and may trade below zero.
/// sigma_s is the standard deviation of price *changes* per sqrt-year
/// (price units), not a return volatility.
struct MarketState {
    double spot = 0.0;
    double rate = 0.0;           // continuously compounded, per year
    double yield = 0.0;          // continuous dividend yield, per year
    double valuation_time = 0.0; // t, years
    double maturity_time = 0.0;  // T, years
    double sigma_s = 0.0;        // price units per sqrt-year

    double tau() const { return maturity_time - valuation_time; }
};

struct OptionContract {
    OptionKind kind = OptionKind::call;
    Exercise exercise = Exercise::european;
    double strike = 0.0; // sign-unconstrained
    Underlying underlying = Underlying::no_dividend;
};

/// Price plus analytic sensitivities. vega is w.r.t. sigma_s
/// (price units per (price units / sqrt-year)), theta is dV/dt at fixed
/// maturity, rho is dV/dr.
struct PriceQuote {
    double price = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double vega = 0.0;
    double theta = 0.0;
    double rho = 0.0;
};

/// The effective normal standard deviation h over [t, T] and the
/// standardized moneyness d = (S - K e^{-(r-q) tau}) / h. Both depend on
/// (t, T) only through tau.
struct VarianceHorizon {
    double h = 0.0;
    double d = 0.0;
};

/// Throws std::domain_error when a field is non-finite, tau < 0,
/// or sigma_s < 0.
void validate(const MarketState& ms);

/// Dividend yield actually used in pricing: 0 for no_dividend, the quoted
/// yield for dividend_yield, and the risk-free rate for futures.
double effective_yield(const MarketState& ms, Underlying underlying);

inline double intrinsic_payoff(OptionKind kind, double s, double strike) {
    return kind == OptionKind::call ? std::max(s - strike, 0.0)
                                    : std::max(strike - s, 0.0);
}

} // namespace abm
