// Command-line pricer for options on an arithmetic-Brownian underlying:
// closed forms, quadrature and Monte Carlo oracles, finite-difference PDE
// solves, implied and historical sigma, figure-data export and a
// cross-method validation battery.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "abm/analytic.hpp"
#include "abm/calibration.hpp"
#include "abm/errors.hpp"
#include "abm/oracle.hpp"
#include "abm/pde.hpp"

namespace {

using nlohmann::json;

constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    bool json = false;
    int precision = 12;
};

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

struct PricingRequest {
    std::string kind = "call";
    std::string exercise = "european";
    std::string underlying = "no-dividend";
    std::string method = "analytic";
    double spot = 0.0;
    double strike = 0.0;
    double sigma = 0.0;
    double rate = 0.0;
    double yield = 0.0;
    double tau = 0.0;
    // method knobs
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    bool no_antithetic = false;
    int nodes = 64;
    int n_s = 400;
    int n_tau = 400;
    double width = 8.0;
    std::string grid_out;
};

abm::OptionKind parse_kind(const std::string& s) {
    if (s == "call") return abm::OptionKind::call;
    if (s == "put") return abm::OptionKind::put;
    throw std::invalid_argument("unknown option kind '" + s + "'");
}

abm::Underlying parse_underlying(const std::string& s) {
    if (s == "no-dividend") return abm::Underlying::no_dividend;
    if (s == "dividend-yield") return abm::Underlying::dividend_yield;
    if (s == "futures") return abm::Underlying::futures;
    throw std::invalid_argument("unknown underlying kind '" + s + "'");
}

abm::MarketState market_of(const PricingRequest& r) {
    abm::MarketState ms;
    ms.spot = r.spot;
    ms.sigma_s = r.sigma;
    ms.rate = r.rate;
    ms.yield = r.yield;
    ms.valuation_time = 0.0;
    ms.maturity_time = r.tau;
    return ms;
}

abm::OptionContract contract_of(const PricingRequest& r) {
    abm::OptionContract oc;
    oc.kind = parse_kind(r.kind);
    oc.exercise = r.exercise == "american" ? abm::Exercise::american
                                           : abm::Exercise::european;
    oc.strike = r.strike;
    oc.underlying = parse_underlying(r.underlying);
    return oc;
}

void write_grid_csv(const abm::PriceGrid& grid, const std::string& path,
                    int precision) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "tau,spot,value\n";
    for (std::size_t j = 0; j < grid.tau_nodes.size(); ++j) {
        const auto slice = grid.slice(j);
        for (std::size_t i = 0; i < grid.s_nodes.size(); ++i)
            out << fmt(grid.tau_nodes[j], precision) << ','
                << fmt(grid.s_nodes[i], precision) << ','
                << fmt(slice[i], precision) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

json request_json(const PricingRequest& r) {
    json j;
    j["kind"] = r.kind;
    j["exercise"] = r.exercise;
    j["underlying"] = r.underlying;
    j["method"] = r.method;
    j["spot"] = r.spot;
    j["strike"] = r.strike;
    j["sigma"] = r.sigma;
    j["rate"] = r.rate;
    j["yield"] = r.yield;
    j["tau"] = r.tau;
    if (r.method == "mc") {
        j["paths"] = r.paths;
        j["seed"] = r.seed;
        j["antithetic"] = !r.no_antithetic;
    }
    if (r.method == "quadrature") j["nodes"] = r.nodes;
    if (r.method == "pde") {
        j["n_s"] = r.n_s;
        j["n_tau"] = r.n_tau;
        j["width"] = r.width;
    }
    return j;
}

int cmd_price(const PricingRequest& r, const GlobalOpts& g) {
    const abm::MarketState ms = market_of(r);
    const abm::OptionContract oc = contract_of(r);

    if (oc.exercise == abm::Exercise::american && r.method != "pde")
        throw std::invalid_argument("American exercise requires --method pde");
    if (r.method == "naive" &&
        (oc.kind != abm::OptionKind::call ||
         oc.underlying != abm::Underlying::no_dividend))
        throw std::invalid_argument(
            "--method naive is defined only for calls on the no-dividend kind");

    json out;
    out["schema_version"] = 1;
    out["command"] = "price";
    out["request"] = request_json(r);

    if (r.method == "analytic") {
        const abm::PriceQuote q = abm::price_european(ms, oc);
        out["result"]["price"] = q.price;
        out["result"]["greeks"] = {{"delta", q.delta}, {"gamma", q.gamma},
                                   {"vega", q.vega},   {"theta", q.theta},
                                   {"rho", q.rho}};
        if (!g.json) {
            std::cout << "price " << fmt(q.price, g.precision) << "\n"
                      << "delta " << fmt(q.delta, g.precision) << "\n"
                      << "gamma " << fmt(q.gamma, g.precision) << "\n"
                      << "vega  " << fmt(q.vega, g.precision) << "\n"
                      << "theta " << fmt(q.theta, g.precision) << "\n"
                      << "rho   " << fmt(q.rho, g.precision) << "\n";
        }
    } else if (r.method == "quadrature") {
        const double p = abm::price_by_quadrature(ms, oc, r.nodes);
        out["result"]["price"] = p;
        if (!g.json) std::cout << "price " << fmt(p, g.precision) << "\n";
    } else if (r.method == "mc") {
        const abm::McEstimate e =
            abm::price_by_mc(ms, oc, {r.paths, r.seed, !r.no_antithetic});
        out["result"]["price"] = e.price;
        out["result"]["standard_error"] = e.standard_error;
        if (!g.json)
            std::cout << "price " << fmt(e.price, g.precision) << "\n"
                      << "se    " << fmt(e.standard_error, g.precision) << "\n";
    } else if (r.method == "pde") {
        const abm::GridSpec gs{r.n_s, r.n_tau, r.width};
        const abm::PriceGrid grid =
            oc.exercise == abm::Exercise::american
                ? abm::solve_american(ms, oc, gs)
                : abm::solve_european(ms, oc, gs);
        const double p = grid.value_at(ms.spot);
        out["result"]["price"] = p;
        if (!r.grid_out.empty()) write_grid_csv(grid, r.grid_out, g.precision);
        if (!g.json) std::cout << "price " << fmt(p, g.precision) << "\n";
    } else if (r.method == "naive") {
        const double p = abm::price_naive_call(ms, oc.strike);
        out["result"]["price"] = p;
        if (!g.json) std::cout << "price " << fmt(p, g.precision) << "\n";
    } else {
        throw std::invalid_argument("unknown method '" + r.method + "'");
    }

    if (g.json) std::cout << out.dump() << "\n";
    return 0;
}

struct FigureSpec {
    double strike;
    double sigma;
    double rate;
    double tau;
    double s_min;
    double s_max;
    bool with_put;        // figures 1-2 tabulate call and put
    bool with_underlying; // figures 3-4 tabulate call and the diagonal
};

FigureSpec figure_spec(int id) {
    switch (id) {
        case 1: return {5.0, 3.0, 0.05, 0.5, -15.0, 25.0, true, false};
        case 2: return {-5.0, 3.0, 0.05, 0.5, -15.0, 25.0, true, false};
        case 3: return {5.0, 3.0, 0.05, 5.0, 0.0, 25.0, false, true};
        case 4: return {5.0, 12.0, 0.05, 0.5, 0.0, 25.0, false, true};
        default: throw std::invalid_argument("figure id must be 1, 2, 3 or 4");
    }
}

int cmd_figure(int id, const std::string& out_path, std::optional<double> smin,
               std::optional<double> smax, double step, const GlobalOpts& g) {
    FigureSpec spec = figure_spec(id);
    if (smin) spec.s_min = *smin;
    if (smax) spec.s_max = *smax;
    if (!(step > 0.0)) throw std::invalid_argument("--step must be positive");

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw IoError("cannot open '" + out_path + "' for writing");
        out = &file;
    }

    abm::MarketState ms;
    ms.sigma_s = spec.sigma;
    ms.rate = spec.rate;
    ms.maturity_time = spec.tau;
    const abm::OptionContract call{abm::OptionKind::call, abm::Exercise::european,
                                   spec.strike, abm::Underlying::no_dividend};
    const abm::OptionContract put{abm::OptionKind::put, abm::Exercise::european,
                                  spec.strike, abm::Underlying::no_dividend};

    *out << (spec.with_put ? "spot,call,put" : "spot,call,underlying") << "\n";
    const long n_steps = std::lround((spec.s_max - spec.s_min) / step);
    for (long i = 0; i <= n_steps; ++i) {
        ms.spot = spec.s_min + static_cast<double>(i) * step;
        const double c = abm::price_european(ms, call).price;
        *out << fmt(ms.spot, g.precision) << ',' << fmt(c, g.precision) << ',';
        if (spec.with_put) {
            *out << fmt(abm::price_european(ms, put).price, g.precision);
        } else {
            *out << fmt(ms.spot, g.precision);
        }
        *out << '\n';
    }
    if (!*out) throw IoError("write failed");
    return 0;
}

int cmd_implied(const PricingRequest& r, double market_price,
                const GlobalOpts& g) {
    const abm::ImpliedResult res =
        abm::implied_sigma(market_of(r), contract_of(r), market_price);
    if (g.json) {
        json out;
        out["schema_version"] = 1;
        out["command"] = "implied";
        out["request"] = request_json(r);
        out["request"]["price"] = market_price;
        out["result"] = {{"sigma", res.sigma_s},
                         {"iterations", res.iterations},
                         {"residual", res.residual}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "sigma " << fmt(res.sigma_s, g.precision) << "\n"
                  << "iterations " << res.iterations << "\n"
                  << "residual " << fmt(res.residual, g.precision) << "\n";
    }
    return 0;
}

int cmd_histvol(const std::string& csv_path, double dt, const GlobalOpts& g) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open '" + csv_path + "'");
    const abm::PriceSeries ps = abm::parse_price_series_csv(in, dt);
    const double sigma = abm::historical_sigma(ps);
    if (g.json) {
        json out;
        out["schema_version"] = 1;
        out["command"] = "histvol";
        out["request"] = {{"path", csv_path}, {"dt", dt}};
        out["result"] = {{"sigma", sigma},
                         {"observations", ps.prices.size()}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "sigma " << fmt(sigma, g.precision) << "\n";
    }
    return 0;
}

// Cross-method validation battery. Each check prints one PASS/FAIL line;
// the command exits non-zero if any check fails.
int cmd_validate(const GlobalOpts& g) {
    struct Check {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Check> checks;

    {
        std::mt19937_64 rng(20240422);
        std::uniform_real_distribution<double> spot(-50.0, 50.0);
        std::uniform_real_distribution<double> vol(1e-3, 20.0);
        std::uniform_real_distribution<double> rate(-0.05, 0.2);
        std::uniform_real_distribution<double> horizon(1e-3, 10.0);
        std::uniform_int_distribution<int> kind(0, 2);
        double worst_parity = 0.0, worst_quad = 0.0;
        for (int i = 0; i < 2000; ++i) {
            abm::MarketState ms;
            ms.spot = spot(rng);
            ms.sigma_s = vol(rng);
            ms.rate = rate(rng);
            ms.yield = rate(rng);
            ms.maturity_time = horizon(rng);
            const auto u = static_cast<abm::Underlying>(kind(rng));
            const double k = spot(rng);
            worst_parity =
                std::max(worst_parity, std::fabs(abm::parity_gap(ms, k, u)));
            const abm::OptionContract oc{abm::OptionKind::call,
                                         abm::Exercise::european, k, u};
            worst_quad = std::max(
                worst_quad, std::fabs(abm::price_by_quadrature(ms, oc) -
                                      abm::price_european(ms, oc).price));
        }
        checks.push_back({"parity-sweep", worst_parity <= 1e-10,
                          "max |gap| = " + fmt(worst_parity, 3)});
        checks.push_back({"quadrature-agreement", worst_quad <= 1e-9,
                          "max |diff| = " + fmt(worst_quad, 3)});
    }
    {
        abm::MarketState ms;
        ms.spot = 5;
        ms.sigma_s = 3;
        ms.rate = 0.05;
        ms.maturity_time = 0.5;
        const abm::PdeOperator op{0.05, 0.0, 3.0};
        auto correct = [](double s, double t) {
            abm::MarketState m;
            m.spot = s;
            m.sigma_s = 3;
            m.rate = 0.05;
            m.valuation_time = t;
            m.maturity_time = 0.5;
            return abm::price_european(
                       m, {abm::OptionKind::call, abm::Exercise::european, 5.0,
                           abm::Underlying::no_dividend})
                .price;
        };
        auto naive = [](double s, double t) {
            abm::MarketState m;
            m.spot = s;
            m.sigma_s = 3;
            m.rate = 0.05;
            m.valuation_time = t;
            m.maturity_time = 0.5;
            return abm::price_naive_call(m, 5.0);
        };
        const double res_ok = std::fabs(abm::pde_residual(correct, op, ms));
        const double res_bad = std::fabs(abm::pde_residual(naive, op, ms));
        checks.push_back({"pde-residual-discrimination",
                          res_ok <= 1e-5 && res_bad > 1e-3,
                          "correct " + fmt(res_ok, 3) + ", naive " +
                              fmt(res_bad, 3)});
    }
    {
        // the dividend-yield form with q = r must reproduce the direct
        // driftless futures formula
        auto direct = [](double f, double k, double sigma, double r, double tau) {
            const double vol = sigma * std::sqrt(tau);
            const double d = (f - k) / vol;
            const double cdf = 0.5 * std::erfc(-d * 0.70710678118654752440);
            const double pdf =
                0.39894228040143267794 * std::exp(-0.5 * d * d);
            return std::exp(-r * tau) * vol * (d * cdf + pdf);
        };
        double worst = 0.0;
        for (double f : {-10.0, 0.0, 4.0, 25.0}) {
            abm::MarketState ms;
            ms.spot = f;
            ms.sigma_s = 2.5;
            ms.rate = 0.07;
            ms.yield = 0.07;
            ms.maturity_time = 1.25;
            const abm::OptionContract as_yield{abm::OptionKind::call,
                                               abm::Exercise::european, 3.0,
                                               abm::Underlying::dividend_yield};
            const abm::OptionContract as_futures{abm::OptionKind::call,
                                                 abm::Exercise::european, 3.0,
                                                 abm::Underlying::futures};
            const double ref = direct(f, 3.0, 2.5, 0.07, 1.25);
            worst = std::max(
                worst, std::fabs(abm::price_european(ms, as_yield).price - ref));
            worst = std::max(
                worst, std::fabs(abm::price_european(ms, as_futures).price - ref));
        }
        checks.push_back(
            {"futures-q-equals-r", worst <= 1e-12, "max |diff| = " + fmt(worst, 3)});
    }
    {
        double worst = 0.0;
        for (double s : {-4.0, 0.0, 3.0, 8.0}) {
            abm::MarketState ms;
            ms.spot = s;
            ms.sigma_s = 3;
            ms.rate = 0.0;
            ms.maturity_time = 0.5;
            const abm::OptionContract oc{abm::OptionKind::call,
                                         abm::Exercise::european, 5.0,
                                         abm::Underlying::no_dividend};
            worst = std::max(worst, std::fabs(abm::price_naive_call(ms, 5.0) -
                                              abm::price_european(ms, oc).price));
        }
        checks.push_back({"zero-rate-coincidence", worst <= 1e-12,
                          "max |diff| = " + fmt(worst, 3)});
    }

    bool all_ok = true;
    json out;
    out["schema_version"] = 1;
    out["command"] = "validate";
    for (const Check& c : checks) {
        all_ok = all_ok && c.ok;
        if (g.json) {
            out["checks"].push_back({{"name", c.name}, {"pass", c.ok},
                                     {"detail", c.detail}});
        } else {
            std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << " (" << c.detail
                      << ")\n";
        }
    }
    if (g.json) {
        out["pass"] = all_ok;
        std::cout << out.dump() << "\n";
    }
    return all_ok ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"European and American option pricing for an underlying that "
                 "follows an arithmetic Brownian motion"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts global;
    app.add_flag("--json", global.json, "emit a stable JSON document");
    app.add_option("--precision", global.precision,
                   "significant digits for numeric text output")
        ->check(CLI::Range(1, 17));

    PricingRequest req;
    auto add_market_opts = [&](CLI::App* cmd, bool with_sigma) {
        cmd->add_option("--kind", req.kind, "call or put")
            ->check(CLI::IsMember({"call", "put"}));
        cmd->add_option("--underlying", req.underlying,
                        "no-dividend, dividend-yield or futures")
            ->check(CLI::IsMember({"no-dividend", "dividend-yield", "futures"}));
        cmd->add_option("--spot", req.spot, "underlying price (may be negative)");
        cmd->add_option("--strike", req.strike, "strike (may be negative)");
        if (with_sigma)
            cmd->add_option("--sigma", req.sigma,
                            "sigma_s, price units per sqrt-year");
        cmd->add_option("--rate", req.rate, "risk-free rate, per year");
        cmd->add_option("--yield", req.yield,
                        "continuous dividend yield (dividend-yield kind)");
        cmd->add_option("--tau", req.tau, "time to maturity, years");
    };

    CLI::App* price = app.add_subcommand("price", "price one option");
    add_market_opts(price, true);
    price->add_option("--exercise", req.exercise, "european or american")
        ->check(CLI::IsMember({"european", "american"}));
    price->add_option("--method", req.method,
                      "analytic, quadrature, mc, pde or naive")
        ->check(CLI::IsMember({"analytic", "quadrature", "mc", "pde", "naive"}));
    price->add_option("--paths", req.paths, "Monte Carlo paths");
    price->add_option("--seed", req.seed, "Monte Carlo seed");
    price->add_flag("--no-antithetic", req.no_antithetic,
                    "disable antithetic pairing");
    price->add_option("--nodes", req.nodes, "quadrature nodes");
    price->add_option("--ns", req.n_s, "PDE spatial intervals");
    price->add_option("--ntau", req.n_tau, "PDE time steps");
    price->add_option("--width", req.width, "PDE half-width in terminal stddevs");
    price->add_option("--grid-out", req.grid_out,
                      "write the PDE grid as tau,spot,value CSV");

    int figure_id = 0;
    std::string fig_out;
    double fig_step = 0.05;
    std::optional<double> fig_smin, fig_smax;
    CLI::App* figure =
        app.add_subcommand("figure", "tabulate price curves as CSV");
    figure->add_option("id", figure_id, "figure number (1-4)")->required();
    figure->add_option("--out", fig_out, "output path (default: stdout)");
    figure->add_option("--smin", fig_smin, "override the spot range start");
    figure->add_option("--smax", fig_smax, "override the spot range end");
    figure->add_option("--step", fig_step, "spot increment");

    CLI::App* validate =
        app.add_subcommand("validate", "run the cross-method validation battery");

    double market_price = 0.0;
    CLI::App* implied =
        app.add_subcommand("implied", "invert a market price to sigma_s");
    add_market_opts(implied, false);
    implied->add_option("--price", market_price, "observed option price")
        ->required();

    std::string hv_path;
    double hv_dt = 1.0 / 252.0;
    CLI::App* histvol =
        app.add_subcommand("histvol", "estimate sigma_s from a price series");
    histvol->add_option("csv", hv_path, "date,price CSV file")->required();
    histvol->add_option("--dt", hv_dt, "year fraction per step (default 1/252)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalidInput;
    }

    try {
        if (price->parsed()) return cmd_price(req, global);
        if (figure->parsed())
            return cmd_figure(figure_id, fig_out, fig_smin, fig_smax, fig_step,
                              global);
        if (validate->parsed()) return cmd_validate(global);
        if (implied->parsed()) return cmd_implied(req, market_price, global);
        if (histvol->parsed()) return cmd_histvol(hv_path, hv_dt, global);
    } catch (const abm::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return 0;
}
