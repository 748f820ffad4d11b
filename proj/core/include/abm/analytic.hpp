#pragma once

#include <optional>

#include "abm/market.hpp"

namespace abm {

/// Effective normal standard deviation over a horizon tau:
///   h = sigma_s * sqrt((1 - e^{-2 a tau}) / (2 a)),   a = r - q.
/// Evaluated through a Taylor series for |a * tau| < 1e-6 to avoid the 0/0,
/// reducing to exactly sigma_s * sqrt(tau) at a = 0.
/// Throws std::domain_error for negative tau or sigma_s, or non-finite input.
double effective_stddev(double sigma_s, double r_minus_q, double tau);

/// h together with the standardized moneyness d for a given contract.
VarianceHorizon variance_horizon(const MarketState& ms, const OptionContract& oc);

/// Closed-form European price and Greeks for all three underlying kinds.
/// tau = 0 and sigma_s = 0 return the discounted degenerate (intrinsic /
/// forward-intrinsic) values, so the pricer is total on the closure of the
/// domain. American contracts are rejected; use the pde module.
PriceQuote price_european(const MarketState& ms, const OptionContract& oc);

/// Deliberately wrong call price obtained by setting the risk-neutral drift
/// to r instead of r*S (no-dividend underlying). Kept as a negative control:
/// it fails the pricing PDE and put-call parity, but coincides with the
/// correct formula when r = 0.
double price_naive_call(const MarketState& ms, double strike);

/// (call - put) - (S e^{-q tau} - K e^{-r tau}). Zero up to rounding for
/// every valid input.
double parity_gap(const MarketState& ms, double strike,
                  Underlying underlying = Underlying::no_dividend);

/// tau -> infinity limit of the call price:
///   S N(k S) + sigma_s / sqrt(2 r) * n(k S),  k = sqrt(2 r) / sigma_s.
/// Finite and positive even at spot = 0, where it equals
/// sigma_s / (2 sqrt(r pi)). Throws std::domain_error unless r > 0.
double perpetual_call(double spot, double sigma_s, double rate);

/// Scan window for upper_bound_crossing. The default step matches the
/// figure-data resolution; crossings narrower than one step are not hunted.
struct CrossingScan {
    double lo = 0.05;
    double hi = 100.0;
    double step = 0.05;
};

/// Spot S* where the call price crosses the underlying price
/// (call(S*) = S*), a feature specific to sign-unrestricted underlyings.
/// Scans [lo, hi] for a sign change of call(S) - S and refines the bracket
/// by bisection to 1e-9 in S. Returns nullopt when the scan finds no sign
/// change.
std::optional<double> upper_bound_crossing(double sigma_s, double rate,
                                           double strike, double tau,
                                           const CrossingScan& scan = {});

} // namespace abm
