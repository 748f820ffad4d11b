#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "abm/market.hpp"

namespace abm {

struct ImpliedResult {
    double sigma_s = 0.0;
    int iterations = 0;
    double residual = 0.0; // |model price - market price| at the solution
};

/// Inverts a European market price to sigma_s. Newton steps on the analytic
/// vega inside a bisection bracket grown geometrically from [1e-12, 1];
/// the price is strictly increasing in sigma_s, so the search is global.
/// ms.sigma_s is ignored. Throws ArbitrageError below the no-arbitrage
/// lower bound (there is no upper bound at S: the underlying may be
/// negative) and SolverError after 200 iterations.
ImpliedResult implied_sigma(const MarketState& ms, const OptionContract& oc,
                            double market_price);

/// Ordered price observations on a fixed sampling clock.
/// timestamps are day serials, used only for ordering checks; the
/// estimator converts steps to years via year_fraction_per_step.
struct PriceSeries {
    std::vector<long> timestamps;
    std::vector<double> prices;
    double year_fraction_per_step = 1.0 / 252.0;
};

/// sqrt(Var[dS] / dt) with the unbiased (n-1) sample variance of first
/// price differences. Throws DataError with fewer than 3 observations.
double historical_sigma(const PriceSeries& ps);

/// Reads a `date,price` CSV (ISO-8601 dates, decimal prices). Malformed
/// rows and non-increasing dates raise DataError naming the line number.
PriceSeries parse_price_series_csv(std::istream& in,
                                   double year_fraction_per_step = 1.0 / 252.0);
PriceSeries load_price_series_csv(const std::string& path,
                                  double year_fraction_per_step = 1.0 / 252.0);

} // namespace abm
