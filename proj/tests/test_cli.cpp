#include <catch2/catch.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef ABMPRICER_BIN
#error "ABMPRICER_BIN must point at the CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(ABMPRICER_BIN) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

double value_of(const std::string& out, const std::string& key) {
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind(key, 0) == 0)
            return std::stod(line.substr(key.size()));
    }
    FAIL("key '" << key << "' not found in output:\n" << out);
    return 0.0;
}

std::vector<std::array<double, 3>> read_csv_rows(const std::string& path,
                                                 std::string& header) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::getline(in, header);
    std::vector<std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::array<double, 3> row{};
        std::size_t pos = 0;
        for (int c = 0; c < 3; ++c) {
            const std::size_t comma = line.find(',', pos);
            row[c] = std::stod(line.substr(pos, comma - pos));
            pos = comma == std::string::npos ? line.size() : comma + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

const std::string kAnchorArgs =
    "price --kind call --underlying no-dividend --spot 0 --strike -5 "
    "--sigma 3 --rate 0.05 --tau 0.5";

} // namespace

TEST_CASE("price command") {
    SECTION("negative-strike anchor") {
        const RunResult r = run(kAnchorArgs);
        REQUIRE(r.exit_code == 0);
        CHECK(value_of(r.out, "price") == Approx(4.88).margin(0.01));
        CHECK(value_of(r.out, "delta") == Approx(0.9900339070).margin(1e-6));
    }
    SECTION("intrinsic value at expiry") {
        const RunResult r =
            run("price --kind call --spot 7 --strike 5 --sigma 3 --rate 0.05 --tau 0");
        REQUIRE(r.exit_code == 0);
        CHECK(value_of(r.out, "price") == 2.0);
    }
    SECTION("Monte Carlo runs are reproducible") {
        const std::string args =
            "price --kind call --spot 5 --strike 5 --sigma 3 --rate 0.05 "
            "--tau 0.5 --method mc --paths 100000 --seed 7";
        const RunResult a = run(args);
        const RunResult b = run(args);
        REQUIRE(a.exit_code == 0);
        CHECK(a.out == b.out);
        CHECK(value_of(a.out, "se") > 0.0);
    }
    SECTION("methods agree on the benchmark") {
        const std::string base =
            "price --kind call --spot 5 --strike 5 --sigma 3 --rate 0.05 --tau 0.5";
        const double analytic = value_of(run(base).out, "price");
        CHECK(value_of(run(base + " --method quadrature").out, "price") ==
              Approx(analytic).margin(1e-9));
        CHECK(value_of(run(base + " --method pde").out, "price") ==
              Approx(analytic).margin(1e-3));
    }
    SECTION("American put via the PDE method") {
        const RunResult r = run(
            "price --kind put --exercise american --method pde --spot 5 "
            "--strike 5 --sigma 3 --rate 0.05 --tau 0.5 --ns 200 --ntau 200");
        REQUIRE(r.exit_code == 0);
        CHECK(value_of(r.out, "price") >= 0.7755);
    }
    SECTION("PDE grid export") {
        const RunResult r = run(
            "price --kind call --method pde --spot 5 --strike 5 --sigma 3 "
            "--rate 0.05 --tau 0.5 --ns 50 --ntau 50 --grid-out /tmp/abm_grid.csv");
        REQUIRE(r.exit_code == 0);
        std::ifstream grid("/tmp/abm_grid.csv");
        std::string header;
        std::getline(grid, header);
        CHECK(header == "tau,spot,value");
        std::size_t rows = 0;
        for (std::string line; std::getline(grid, line);) ++rows;
        CHECK(rows == 51u * 51u);
    }
}

TEST_CASE("figure command emits the documented CSV") {
    SECTION("figure 2 hits the anchor at spot 0") {
        REQUIRE(run("figure 2 --out /tmp/abm_fig2.csv").exit_code == 0);
        std::string header;
        const auto rows = read_csv_rows("/tmp/abm_fig2.csv", header);
        CHECK(header == "spot,call,put");
        CHECK(rows.size() == 801);
        CHECK(rows.front()[0] == Approx(-15.0));
        CHECK(rows.back()[0] == Approx(25.0));
        bool found = false;
        for (const auto& row : rows) {
            if (std::fabs(row[0]) < 1e-12) {
                found = true;
                CHECK(row[1] == Approx(4.88).margin(0.01));
            }
        }
        CHECK(found);
    }
    SECTION("figure 1 satisfies parity row by row") {
        REQUIRE(run("figure 1 --out /tmp/abm_fig1.csv").exit_code == 0);
        std::string header;
        const auto rows = read_csv_rows("/tmp/abm_fig1.csv", header);
        CHECK(header == "spot,call,put");
        const double disc_k = 5.0 * std::exp(-0.025);
        for (const auto& row : rows)
            CHECK(row[1] - row[2] == Approx(row[0] - disc_k).margin(1e-9));
    }
    SECTION("figure 3 crosses the spot diagonal above 1") {
        REQUIRE(run("figure 3 --out /tmp/abm_fig3.csv").exit_code == 0);
        std::string header;
        const auto rows = read_csv_rows("/tmp/abm_fig3.csv", header);
        CHECK(header == "spot,call,underlying");
        CHECK(rows.size() == 501);
        double crossing = -1.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double prev = rows[i - 1][1] - rows[i - 1][2];
            const double cur = rows[i][1] - rows[i][2];
            if (prev > 0.0 && cur <= 0.0) crossing = rows[i][0];
        }
        CHECK(crossing > 1.0);
        CHECK(crossing < 1.5);
    }
    SECTION("file output is LF-terminated with no trailing delimiter") {
        std::ifstream in("/tmp/abm_fig1.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        CHECK(text.find('\r') == std::string::npos);
        CHECK(text.find(",\n") == std::string::npos);
        CHECK(text.back() == '\n');
    }
    SECTION("rejects unknown figure ids") {
        CHECK(run("figure 9 --out /tmp/abm_fig9.csv").exit_code == 2);
    }
}

TEST_CASE("validate command passes on a fresh build") {
    const RunResult r = run("validate");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS parity-sweep") != std::string::npos);
}

TEST_CASE("implied and histvol commands") {
    SECTION("price then implied round-trips sigma") {
        const RunResult p = run(
            "price --kind call --spot 5 --strike 5 --sigma 3 --rate 0.05 "
            "--tau 0.5 --precision 17");
        const double price = value_of(p.out, "price");
        std::ostringstream cmd;
        cmd.precision(17);
        cmd << "implied --kind call --spot 5 --strike 5 --rate 0.05 --tau 0.5 "
            << "--price " << price;
        const RunResult r = run(cmd.str());
        REQUIRE(r.exit_code == 0);
        CHECK(value_of(r.out, "sigma") == Approx(3.0).epsilon(1e-8));
    }
    SECTION("histvol fixtures") {
        {
            std::ofstream csv("/tmp/abm_hv1.csv");
            csv << "date,price\n2019-01-01,10\n2019-01-02,11\n2019-01-03,10\n"
                   "2019-01-04,11\n2019-01-05,10\n";
        }
        const RunResult r = run("histvol /tmp/abm_hv1.csv");
        REQUIRE(r.exit_code == 0);
        CHECK(value_of(r.out, "sigma") == Approx(18.3303).margin(1e-4));
        {
            std::ofstream csv("/tmp/abm_hv2.csv");
            csv << "date,price\n2019-01-01,3\n2019-01-02,5\n2019-01-03,7\n";
        }
        CHECK(value_of(run("histvol /tmp/abm_hv2.csv").out, "sigma") == 0.0);
    }
}

TEST_CASE("JSON output is byte-stable") {
    const std::string args = kAnchorArgs + " --json";
    const RunResult a = run(args);
    const RunResult b = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"schema_version\":1") != std::string::npos);
    CHECK(a.out.find("\"price\":4.883622426402308") != std::string::npos);
}

TEST_CASE("exit codes distinguish failure classes") {
    SECTION("invalid input is 2") {
        CHECK(run("price --kind straddle --spot 5 --strike 5 --sigma 3 --tau 0.5",
                  true)
                  .exit_code == 2);
        CHECK(run("price --kind call --exercise american --spot 5 --strike 5 "
                  "--sigma 3 --tau 0.5",
                  true)
                  .exit_code == 2);
        CHECK(run("price --kind put --method naive --spot 5 --strike 5 --sigma 3 "
                  "--tau 0.5",
                  true)
                  .exit_code == 2);
        CHECK(run("implied --kind call --spot 7 --strike 5 --rate 0.05 --tau 0.5 "
                  "--price 0.5",
                  true)
                  .exit_code == 2); // below the no-arbitrage floor
        CHECK(run("nonsense", true).exit_code == 2);
    }
    SECTION("I/O failure is 4") {
        CHECK(run("histvol /nonexistent/abm.csv", true).exit_code == 4);
        CHECK(run("figure 1 --out /nonexistent/dir/fig.csv", true).exit_code == 4);
    }
    SECTION("malformed series content is invalid input, 2") {
        {
            std::ofstream csv("/tmp/abm_hv_bad.csv");
            csv << "date,price\n2019-01-01,10\nnot-a-date,11\n";
        }
        const RunResult r = run("histvol /tmp/abm_hv_bad.csv", true);
        CHECK(r.exit_code == 2);
        CHECK(r.out.find("line 3") != std::string::npos);
    }
    SECTION("help exits clean") {
        CHECK(run("--help").exit_code == 0);
        CHECK(run("price --help").exit_code == 0);
    }
}
