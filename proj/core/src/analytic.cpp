#include "abm/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "abm/normal.hpp"

namespace abm {

namespace {

// CDF/PDF extended to the infinite moneyness reached in the degenerate
// (h = 0) branches.
double cdf_ext(double d) {
    if (std::isinf(d)) return d > 0.0 ? 1.0 : 0.0;
    return std_normal_cdf(d);
}

double pdf_ext(double d) {
    if (std::isinf(d)) return 0.0;
    return std_normal_pdf(d);
}

// (1 - e^{-2 a tau}) / (2 a): the squared horizon scale, h^2 / sigma_s^2.
double horizon_scale2(double a, double tau) {
    const double x = a * tau;
    if (std::fabs(x) < 1e-6) {
        // tau * (1 - x + (2/3) x^2 - (1/3) x^3), error below 1e-18 relative
        return tau * (1.0 + x * (-1.0 + x * (2.0 / 3.0 - x / 3.0)));
    }
    return -std::expm1(-2.0 * x) / (2.0 * a);
}

// d/da of horizon_scale2, needed for rho.
double horizon_scale2_da(double a, double tau) {
    const double x = a * tau;
    if (std::fabs(x) < 1e-3) {
        return -tau * tau * (1.0 + x * (-4.0 / 3.0 + x * (1.0 - x * 8.0 / 15.0)));
    }
    const double e = std::exp(-2.0 * x);
    return (2.0 * x * e - (1.0 - e)) / (2.0 * a * a);
}

struct Kernel {
    double tau = 0.0;
    double q = 0.0;       // effective yield
    double a = 0.0;       // rate - q
    double scale = 0.0;   // h / sigma_s = sqrt(horizon_scale2)
    double h = 0.0;
    double disc_q = 0.0;  // e^{-q tau}
    double kfwd = 0.0;    // K e^{-a tau}
    double money = 0.0;   // S - K e^{-a tau}
    double d = 0.0;       // money / h; +-inf or 0 when h = 0
};

Kernel make_kernel(const MarketState& ms, double strike, Underlying underlying) {
    Kernel k;
    k.tau = ms.tau();
    k.q = effective_yield(ms, underlying);
    k.a = ms.rate - k.q;
    k.scale = std::sqrt(horizon_scale2(k.a, k.tau));
    k.h = ms.sigma_s * k.scale;
    k.disc_q = std::exp(-k.q * k.tau);
    k.kfwd = strike * std::exp(-k.a * k.tau);
    k.money = ms.spot - k.kfwd;
    if (k.h > 0.0) {
        k.d = k.money / k.h;
    } else if (k.money > 0.0) {
        k.d = std::numeric_limits<double>::infinity();
    } else if (k.money < 0.0) {
        k.d = -std::numeric_limits<double>::infinity();
    } else {
        k.d = 0.0;
    }
    return k;
}

} // namespace

void validate(const MarketState& ms) {
    if (!std::isfinite(ms.spot) || !std::isfinite(ms.rate) ||
        !std::isfinite(ms.yield) || !std::isfinite(ms.valuation_time) ||
        !std::isfinite(ms.maturity_time) || !std::isfinite(ms.sigma_s))
        throw std::domain_error("MarketState: non-finite field");
    if (ms.tau() < 0.0)
        throw std::domain_error("MarketState: maturity before valuation time");
    if (ms.sigma_s < 0.0)
        throw std::domain_error("MarketState: negative sigma_s");
}

double effective_yield(const MarketState& ms, Underlying underlying) {
    switch (underlying) {
        case Underlying::no_dividend: return 0.0;
        case Underlying::dividend_yield: return ms.yield;
        case Underlying::futures: return ms.rate;
    }
    throw std::invalid_argument("effective_yield: unknown underlying kind");
}

double effective_stddev(double sigma_s, double r_minus_q, double tau) {
    if (!std::isfinite(sigma_s) || !std::isfinite(r_minus_q) || !std::isfinite(tau))
        throw std::domain_error("effective_stddev: non-finite argument");
    if (tau < 0.0)
        throw std::domain_error("effective_stddev: negative tau");
    if (sigma_s < 0.0)
        throw std::domain_error("effective_stddev: negative sigma_s");
    return sigma_s * std::sqrt(horizon_scale2(r_minus_q, tau));
}

VarianceHorizon variance_horizon(const MarketState& ms, const OptionContract& oc) {
    validate(ms);
    const Kernel k = make_kernel(ms, oc.strike, oc.underlying);
    return {k.h, k.d};
}

PriceQuote price_european(const MarketState& ms, const OptionContract& oc) {
    validate(ms);
    if (oc.exercise != Exercise::european)
        throw std::invalid_argument(
            "price_european: American exercise is not supported here; "
            "use the pde module");

    const Kernel k = make_kernel(ms, oc.strike, oc.underlying);
    const bool is_call = oc.kind == OptionKind::call;

    const double n_call = cdf_ext(k.d);
    const double n_put = cdf_ext(-k.d); // == 1 - n_call exactly
    const double nd = pdf_ext(k.d);

    PriceQuote out;
    if (k.h == 0.0) {
        // tau = 0 or sigma_s = 0: discounted forward intrinsic.
        const double v = std::max(is_call ? k.money : -k.money, 0.0);
        out.price = k.disc_q * v;
        out.delta = is_call ? k.disc_q * n_call : -k.disc_q * n_put;
        out.gamma = 0.0;
        out.vega = k.disc_q * k.scale * nd;
        out.theta = 0.0;
        out.rho = 0.0;
        return out;
    }

    const double price_call = k.disc_q * k.h * (k.d * n_call + nd);
    const double price_put = k.disc_q * k.h * (nd - k.d * n_put);
    out.price = std::max(is_call ? price_call : price_put, 0.0);

    out.delta = is_call ? k.disc_q * n_call : -k.disc_q * n_put;
    out.gamma = k.disc_q * nd / k.h;
    out.vega = k.disc_q * k.scale * nd;

    // d/dtau of h is sigma^2 e^{-2 a tau} / (2h) = sigma e^{-2 a tau} / (2 scale).
    const double h_dtau = ms.sigma_s * std::exp(-2.0 * k.a * k.tau) / (2.0 * k.scale);
    const double kfwd_dtau = oc.strike * k.a * std::exp(-k.a * k.tau);
    const double theta_call =
        k.q * price_call - k.disc_q * (h_dtau * nd + n_call * kfwd_dtau);
    out.theta = is_call ? theta_call
                        : theta_call - k.q * ms.spot * k.disc_q +
                              ms.rate * oc.strike * std::exp(-ms.rate * k.tau);

    if (oc.underlying == Underlying::futures) {
        // q tracks r, so only the discount factor sees the rate.
        out.rho = -k.tau * out.price;
    } else {
        // Rate enters through a = r - q alone.
        const double h_da =
            ms.sigma_s * horizon_scale2_da(k.a, k.tau) / (2.0 * k.scale);
        const double kfwd_da = oc.strike * k.tau * std::exp(-k.a * k.tau);
        const double rho_call = k.disc_q * (h_da * nd + n_call * kfwd_da);
        out.rho = is_call ? rho_call
                          : rho_call - oc.strike * k.tau * std::exp(-ms.rate * k.tau);
    }
    return out;
}

double price_naive_call(const MarketState& ms, double strike) {
    validate(ms);
    const double tau = ms.tau();
    const double disc = std::exp(-ms.rate * tau);
    const double vol = ms.sigma_s * std::sqrt(tau);
    const double money = ms.spot + ms.rate * tau - strike;
    if (vol == 0.0) return disc * std::max(money, 0.0);
    const double d_n = money / vol;
    return disc * vol * (d_n * std_normal_cdf(d_n) + std_normal_pdf(d_n));
}

double parity_gap(const MarketState& ms, double strike, Underlying underlying) {
    OptionContract oc{OptionKind::call, Exercise::european, strike, underlying};
    const double call = price_european(ms, oc).price;
    oc.kind = OptionKind::put;
    const double put = price_european(ms, oc).price;
    const double q = effective_yield(ms, underlying);
    const double tau = ms.tau();
    return (call - put) -
           (ms.spot * std::exp(-q * tau) - strike * std::exp(-ms.rate * tau));
}

double perpetual_call(double spot, double sigma_s, double rate) {
    if (!std::isfinite(spot) || !std::isfinite(sigma_s) || !std::isfinite(rate))
        throw std::domain_error("perpetual_call: non-finite argument");
    if (!(rate > 0.0))
        throw std::domain_error("perpetual_call: requires rate > 0, the limit diverges");
    if (sigma_s < 0.0)
        throw std::domain_error("perpetual_call: negative sigma_s");
    if (sigma_s == 0.0) return std::max(spot, 0.0);
    const double root2r = std::sqrt(2.0 * rate);
    const double z = root2r / sigma_s * spot;
    return spot * std_normal_cdf(z) + sigma_s / root2r * std_normal_pdf(z);
}

std::optional<double> upper_bound_crossing(double sigma_s, double rate,
                                           double strike, double tau,
                                           const CrossingScan& scan) {
    if (!(scan.step > 0.0) || !(scan.hi > scan.lo))
        throw std::invalid_argument("upper_bound_crossing: bad scan window");

    MarketState ms;
    ms.rate = rate;
    ms.maturity_time = tau;
    ms.sigma_s = sigma_s;
    const OptionContract oc{OptionKind::call, Exercise::european, strike,
                            Underlying::no_dividend};
    auto excess = [&](double s) {
        MarketState m = ms;
        m.spot = s;
        return price_european(m, oc).price - s;
    };

    double prev_s = scan.lo;
    double prev_f = excess(prev_s);
    for (double s = scan.lo + scan.step; prev_s < scan.hi;
         s = std::min(s + scan.step, scan.hi)) {
        const double f = excess(s);
        if (prev_f == 0.0) return prev_s;
        if (prev_f * f <= 0.0) {
            // bisect to 1e-9 in S
            double lo = prev_s, hi = s, flo = prev_f;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                const double fm = excess(mid);
                if (fm == 0.0) return mid;
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev_s = s;
        prev_f = f;
        if (s >= scan.hi) break;
    }
    return std::nullopt;
}

} // namespace abm
