#include "abm/calibration.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "abm/analytic.hpp"
#include "abm/errors.hpp"

namespace abm {

namespace {

double price_at_sigma(MarketState ms, const OptionContract& oc, double sigma,
                      PriceQuote* quote_out = nullptr) {
    ms.sigma_s = sigma;
    const PriceQuote q = price_european(ms, oc);
    if (quote_out) *quote_out = q;
    return q.price;
}

} // namespace

ImpliedResult implied_sigma(const MarketState& ms, const OptionContract& oc,
                            double market_price) {
    MarketState base = ms;
    base.sigma_s = 0.0;
    validate(base);
    if (oc.exercise != Exercise::european)
        throw std::invalid_argument("implied_sigma: European contracts only");
    if (!std::isfinite(market_price))
        throw std::domain_error("implied_sigma: non-finite market price");
    if (!(base.tau() > 0.0))
        throw std::domain_error("implied_sigma: tau must be positive");

    // No-arbitrage lower bound: the sigma -> 0 price (discounted forward
    // intrinsic). There is no upper bound at the spot: the underlying may go
    // negative, so the call is not capped by S.
    const double floor_price = price_at_sigma(base, oc, 0.0);
    if (market_price < floor_price - 1e-12)
        throw ArbitrageError("implied_sigma: price below the no-arbitrage lower bound");
    if (market_price <= floor_price)
        return {0.0, 0, floor_price - market_price};

    // Geometric bracket growth; price is strictly increasing and unbounded
    // in sigma_s, so this terminates.
    double lo = 1e-12, hi = 1.0;
    while (price_at_sigma(base, oc, hi) < market_price) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e12)
            throw SolverError("implied_sigma: bracket growth failed");
    }

    double sigma = std::min(std::max(0.5 * (lo + hi), 1e-6), hi);
    PriceQuote quote;
    for (int it = 1; it <= 200; ++it) {
        const double f = price_at_sigma(base, oc, sigma, &quote) - market_price;
        if (f > 0.0) {
            hi = sigma;
        } else {
            lo = sigma;
        }
        if (std::fabs(f) <= 1e-12 * std::max(1.0, std::fabs(market_price)))
            return {sigma, it, std::fabs(f)};
        double next = sigma - f / quote.vega;
        if (!std::isfinite(next) || next <= lo || next >= hi)
            next = 0.5 * (lo + hi); // bisection safeguard
        if (std::fabs(next - sigma) <= 1e-14 * std::max(1.0, sigma))
            return {next, it, std::fabs(f)};
        sigma = next;
    }
    throw SolverError("implied_sigma: no convergence in 200 iterations");
}

double historical_sigma(const PriceSeries& ps) {
    const std::size_t n = ps.prices.size();
    if (n < 3)
        throw DataError("historical_sigma: need at least 3 observations");
    if (!(ps.year_fraction_per_step > 0.0))
        throw DataError("historical_sigma: year_fraction_per_step must be positive");

    const std::size_t m = n - 1; // number of first differences, >= 2
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        mean += (ps.prices[i + 1] - ps.prices[i]) / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dev = (ps.prices[i + 1] - ps.prices[i]) - mean;
        ss += dev * dev;
    }
    const double variance = ss / static_cast<double>(m - 1); // unbiased
    return std::sqrt(variance / ps.year_fraction_per_step);
}

namespace {

// days since 1970-01-01, proleptic Gregorian (Howard Hinnant's algorithm)
long days_from_civil(int y, int mo, int d) {
    y -= mo <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (mo + (mo > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

bool parse_iso_date(const std::string& text, long& serial) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9') return false;
    const int y = std::stoi(text.substr(0, 4));
    const int mo = std::stoi(text.substr(5, 2));
    const int d = std::stoi(text.substr(8, 2));
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    serial = days_from_civil(y, mo, d);
    return true;
}

} // namespace

PriceSeries parse_price_series_csv(std::istream& in, double year_fraction_per_step) {
    PriceSeries ps;
    ps.year_fraction_per_step = year_fraction_per_step;

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw DataError("price series csv: empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,price")
        throw DataError("price series csv: line 1: expected header 'date,price'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        std::ostringstream err;
        err << "price series csv: line " << line_no << ": ";
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw DataError(err.str() + "expected exactly one comma");
        long serial = 0;
        if (!parse_iso_date(line.substr(0, comma), serial))
            throw DataError(err.str() + "malformed ISO-8601 date");
        const std::string num = line.substr(comma + 1);
        std::size_t used = 0;
        double price = 0.0;
        try {
            price = std::stod(num, &used);
        } catch (const std::exception&) {
            throw DataError(err.str() + "malformed price");
        }
        if (used != num.size() || !std::isfinite(price))
            throw DataError(err.str() + "malformed price");
        if (!ps.timestamps.empty() && serial <= ps.timestamps.back())
            throw DataError(err.str() + "dates must be strictly increasing");
        ps.timestamps.push_back(serial);
        ps.prices.push_back(price);
    }
    return ps;
}

PriceSeries load_price_series_csv(const std::string& path,
                                  double year_fraction_per_step) {
    std::ifstream in(path);
    if (!in)
        throw DataError("price series csv: cannot open '" + path + "'");
    return parse_price_series_csv(in, year_fraction_per_step);
}

} // namespace abm
