#include "abm/oracle.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "abm/analytic.hpp"
#include "abm/normal.hpp"

namespace abm {

TerminalLaw terminal_law(const MarketState& ms, Underlying underlying) {
    validate(ms);
    const double q = effective_yield(ms, underlying);
    const double a = ms.rate - q;
    const double tau = ms.tau();
    const double growth = std::exp(a * tau);
    return {ms.spot * growth, effective_stddev(ms.sigma_s, a, tau) * growth};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_rule: n < 1");
    std::vector<double> x(n), w(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev initial guess, Newton on the three-term recurrence.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            deriv = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / deriv;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * deriv * deriv);
    }
    return {x, w};
}

namespace {

const std::pair<std::vector<double>, std::vector<double>>& cached_rule(int n) {
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::scoped_lock lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre_rule(n)).first;
    return it->second;
}

// Exact Gaussian partial moment: integral over z in [alpha, beta] of
// (m + s z - K) n(z) dz, with infinite limits allowed.
double partial_moment(double m, double s, double strike, double alpha, double beta) {
    auto cdf = [](double z) {
        return std::isinf(z) ? (z > 0.0 ? 1.0 : 0.0) : std_normal_cdf(z);
    };
    auto pdf = [](double z) { return std::isinf(z) ? 0.0 : std_normal_pdf(z); };
    return (m - strike) * (cdf(beta) - cdf(alpha)) - s * (pdf(beta) - pdf(alpha));
}

// Gauss-Legendre integral over z in [a, b] of payoff(m + s z) n(z) dz,
// where payoff is linear on [a, b].
double body_integral(double m, double s, double strike, bool call, double a,
                     double b, int n_nodes) {
    if (!(b > a)) return 0.0;
    const auto& [nodes, weights] = cached_rule(n_nodes);
    const double mid = 0.5 * (a + b);
    const double len = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double z = mid + len * nodes[i];
        const double payoff = call ? (m + s * z - strike) : (strike - m - s * z);
        acc += weights[i] * payoff * std_normal_pdf(z);
    }
    return acc * len;
}

} // namespace

double price_by_quadrature(const MarketState& ms, const OptionContract& oc,
                           int n_nodes) {
    validate(ms);
    if (oc.exercise != Exercise::european)
        throw std::invalid_argument("price_by_quadrature: European contracts only");
    if (n_nodes < 16)
        throw std::invalid_argument("price_by_quadrature: n_nodes must be >= 16");

    const TerminalLaw law = terminal_law(ms, oc.underlying);
    const double disc = std::exp(-ms.rate * ms.tau());
    if (law.stddev == 0.0)
        return disc * intrinsic_payoff(oc.kind, law.mean, oc.strike);

    const double m = law.mean;
    const double s = law.stddev;
    const double z_kink = (oc.strike - m) / s;
    constexpr double kWindow = 6.0; // quadrature covers +-6 sd, tails are exact
    const bool call = oc.kind == OptionKind::call;

    double expectation;
    if (call) {
        if (z_kink >= kWindow) {
            expectation = partial_moment(m, s, oc.strike, z_kink,
                                         std::numeric_limits<double>::infinity());
        } else {
            const double lo = std::max(z_kink, -kWindow);
            expectation = body_integral(m, s, oc.strike, true, lo, kWindow, n_nodes);
            expectation += partial_moment(m, s, oc.strike, kWindow,
                                          std::numeric_limits<double>::infinity());
            if (z_kink < -kWindow)
                expectation += partial_moment(m, s, oc.strike, z_kink, -kWindow);
        }
    } else {
        if (z_kink <= -kWindow) {
            expectation = -partial_moment(m, s, oc.strike,
                                          -std::numeric_limits<double>::infinity(),
                                          z_kink);
        } else {
            const double hi = std::min(z_kink, kWindow);
            expectation = body_integral(m, s, oc.strike, false, -kWindow, hi, n_nodes);
            expectation += -partial_moment(m, s, oc.strike,
                                           -std::numeric_limits<double>::infinity(),
                                           -kWindow);
            if (z_kink > kWindow)
                expectation += -partial_moment(m, s, oc.strike, kWindow, z_kink);
        }
    }
    return disc * expectation;
}

namespace {

// splitmix64: state i of the stream started at seed, finalized.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    // 53-bit mantissa, offset by half an ulp: strictly inside (0, 1).
    return (static_cast<double>(splitmix64_at(seed, index) >> 11) + 0.5) *
           0x1.0p-53;
}

McEstimate price_by_mc(const MarketState& ms, const OptionContract& oc,
                       const McConfig& cfg) {
    validate(ms);
    if (oc.exercise != Exercise::european)
        throw std::invalid_argument("price_by_mc: European contracts only");
    if (cfg.n_paths < 2)
        throw std::invalid_argument("price_by_mc: n_paths must be >= 2");

    const TerminalLaw law = terminal_law(ms, oc.underlying);
    const double disc = std::exp(-ms.rate * ms.tau());
    if (law.stddev == 0.0)
        return {disc * intrinsic_payoff(oc.kind, law.mean, oc.strike), 0.0};

    const std::uint64_t n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n_units; ++i) {
        const double z = std_normal_inv_cdf(counter_uniform(cfg.seed, i));
        double y = intrinsic_payoff(oc.kind, law.mean + law.stddev * z, oc.strike);
        if (cfg.antithetic) {
            y = 0.5 * (y + intrinsic_payoff(oc.kind, law.mean - law.stddev * z,
                                            oc.strike));
        }
        sum += y;
        sum_sq += y * y;
    }
    const double n = static_cast<double>(n_units);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {disc * mean, disc * std::sqrt(var / n)};
}

} // namespace abm
