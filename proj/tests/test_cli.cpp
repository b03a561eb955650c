#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <pendnf/cli.hpp>

using namespace pendnf;

namespace
{

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args, const char *max_order = nullptr)
{
    args.insert(args.begin(), "pend-nf");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, max_order);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string &text)
{
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        v.push_back(l);
    }
    return v;
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> v;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) {
        v.push_back(f);
    }
    return v;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / "pend-nf-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

int shell(const std::string &cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Verify, Identity51Order200)
{
    const auto r = invoke({"verify", "--suite", "identity51", "--order", "200"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("PASS identity51.order_200"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Verify, LegendreWithTolerance)
{
    const auto r = invoke({"verify", "--suite", "legendre", "--tol", "1e-12"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("PASS legendre.grid50"), std::string::npos);
}

TEST(Verify, OrderZeroIsUsageError)
{
    EXPECT_EQ(invoke({"verify", "--suite", "identity51", "--order", "0"}).code, 2);
}

TEST(Verify, FailureExitsOne)
{
    // Below double-precision resolution, so the grid check must fail.
    const auto r = invoke({"verify", "--suite", "legendre", "--tol", "1e-30"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAIL legendre.grid50"), std::string::npos);
}

TEST(Verify, JsonReportSortedByName)
{
    const auto r = invoke({"verify", "--suite", "elliptic", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    std::string prev;
    for (const auto &c : j["checks"]) {
        const auto name = c["name"].get<std::string>();
        EXPECT_LT(prev, name);
        prev = name;
        EXPECT_TRUE(c.contains("measured"));
        EXPECT_TRUE(c.contains("tolerance"));
    }
}

TEST(Verify, AllSuitesPass)
{
    const auto r = invoke({"verify", "--suite", "all"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Usage, Errors)
{
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"bogus"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--suite", "nope"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--format", "csv"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--tol", "-1"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--unknown-flag"}).code, 2);
    EXPECT_EQ(invoke({"coeffs"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "nope"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "g0", "--format", "xml"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "g0", "--order", "0"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "calU", "--order", "1"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "U", "--physical", "--I", "abc"}).code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "U", "--physical", "--g", "0"}).code, 2);
}

TEST(Usage, HelpExitsZero)
{
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("trajectory"), std::string::npos);
    EXPECT_EQ(invoke({"coeffs", "--help"}).code, 0);
}

TEST(Coeffs, CalUCsv)
{
    const auto r = invoke({"coeffs", "--series", "calU", "--order", "6", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 9u);
    EXPECT_EQ(rows[0].rfind("# series=calU", 0), 0u);
    EXPECT_NE(rows[0].find("normalized g=1 32Ig=1"), std::string::npos);
    EXPECT_EQ(rows[1], "power,num,den");
    EXPECT_EQ(rows[2], "0,0,1");
    EXPECT_EQ(rows[3], "1,1,1");
    EXPECT_EQ(rows[4], "2,2,1");
    EXPECT_EQ(rows[5], "3,-4,1");
    EXPECT_EQ(rows[6], "4,20,1");
    EXPECT_EQ(rows[7], "5,-132,1");
    EXPECT_EQ(rows[8], "6,1008,1");
}

TEST(Coeffs, G0Json)
{
    const auto r = invoke({"coeffs", "--series", "g0", "--order", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["series"], "g0");
    EXPECT_EQ(j["order"], 2);
    EXPECT_EQ(j["coeffs"], nlohmann::json::parse(R"([["1","1"],["4","1"],["12","1"]])"));
    EXPECT_EQ(series_from_json(j), build_g0_series(2));
}

TEST(Coeffs, PhysicalScaling)
{
    const auto r = invoke({"coeffs", "--series", "calU", "--order", "3", "--format", "json", "--physical",
                           "--I", "0.25", "--g", "3/2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NE(j["normalization"].get<std::string>().find("physical"), std::string::npos);
    const auto s = series_from_json(j);
    const mpq_class I(1, 4), g(3, 2);
    EXPECT_EQ(s, to_physical(build_calU_series(3), SeriesKind::calU, I, g));
    EXPECT_EQ(s[1], g);
}

TEST(Coeffs, DecimalParsingIsExact)
{
    EXPECT_EQ(cli::parse_rational("0.1"), mpq_class(1, 10));
    EXPECT_EQ(cli::parse_rational("-2.5e-3"), mpq_class(-1, 400));
    EXPECT_EQ(cli::parse_rational("3/12"), mpq_class(1, 4));
    EXPECT_EQ(cli::parse_rational("12E2"), mpq_class(1200));
    EXPECT_THROW(cli::parse_rational("1.2.3"), cli::usage_error);
    EXPECT_THROW(cli::parse_rational("1/0"), cli::usage_error);
    EXPECT_THROW(cli::parse_rational(""), cli::usage_error);
}

TEST(Coeffs, MaxOrderCap)
{
    const auto r = invoke({"coeffs", "--series", "g0", "--order", "50", "--format", "csv"}, "5");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 2u + 6u);
    EXPECT_EQ(invoke({"coeffs", "--series", "g0"}, "zero").code, 2);
    EXPECT_EQ(invoke({"coeffs", "--series", "g0"}, "0").code, 2);
}

TEST(Trajectory, ClosedCsvConservesEnergy)
{
    const auto r = invoke({"trajectory", "--method", "closed", "--h", "0.3", "--t1", "10", "--dt", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 1002u);
    EXPECT_EQ(rows[0], "t,B,beta,energy,method");
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i]);
        ASSERT_EQ(f.size(), 5u);
        EXPECT_EQ(f[4], "closed");
        const double e = std::stod(f[3]);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    EXPECT_LE((hi - lo) / hi, 1e-11);
    EXPECT_EQ(split(rows[1])[0], "0");
    EXPECT_EQ(split(rows.back())[0], cli::fmt17(10.0));
}

TEST(Trajectory, SeventeenDigitsRoundTrip)
{
    const auto r = invoke({"trajectory", "--h", "0.6", "--t1", "1", "--dt", "0.25"});
    ASSERT_EQ(r.code, 0);
    const auto f = split(lines(r.out)[3]);
    const auto s = closed_form_state(0.5, Modulus::from_h(0.6), PendulumParams{});
    EXPECT_EQ(std::stod(f[1]), s.B);
    EXPECT_EQ(std::stod(f[2]), s.beta);
}

TEST(Trajectory, EnergySelectsSameOrbit)
{
    const PendulumParams par{};
    const double U = libration_energy(Modulus::from_h(0.3), par);
    const auto a = invoke({"trajectory", "--h", "0.3", "--t1", "2", "--dt", "0.5"});
    const auto b = invoke({"trajectory", "--energy", cli::fmt17(U), "--t1", "2", "--dt", "0.5"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    const auto la = lines(a.out), lb = lines(b.out);
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 1; i < la.size(); ++i) {
        EXPECT_NEAR(std::stod(split(la[i])[2]), std::stod(split(lb[i])[2]), 1e-12);
    }
}

TEST(Trajectory, AllMethodsAndWrapped)
{
    for (const char *m : {"closed", "series", "normal", "rk"}) {
        const auto r = invoke({"trajectory", "--method", m, "--h", "0.5", "--t1", "1", "--dt", "0.5", "--wrapped"});
        ASSERT_EQ(r.code, 0) << m << ": " << r.err;
        const auto rows = lines(r.out);
        EXPECT_EQ(rows[0], "t,B,beta,energy,method,beta_wrapped");
        EXPECT_EQ(split(rows[1])[4], m);
    }
    const auto j = invoke({"trajectory", "--h", "0.5", "--t1", "1", "--dt", "0.5", "--format", "json"});
    ASSERT_EQ(j.code, 0);
    EXPECT_EQ(nlohmann::json::parse(j.out).size(), 3u);
}

TEST(Trajectory, UsageErrors)
{
    EXPECT_EQ(invoke({"trajectory"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "0.3", "--energy", "1"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "0.3", "--method", "euler"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "1.5"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--energy", "-1"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "0.3", "--dt", "0"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "0.3", "--format", "text"}).code, 2);
    EXPECT_EQ(invoke({"trajectory", "--h", "0.3", "--method", "rk", "--tol", "1e-3"}).code, 2);
}

TEST(Map, ForwardInverseRoundTrip)
{
    const auto f = invoke({"map", "--p", "0.05", "--q", "0.2", "--format", "json"});
    ASSERT_EQ(f.code, 0) << f.err;
    const auto jf = nlohmann::json::parse(f.out);
    EXPECT_NEAR(jf["energy"].get<double>() / jf["normal_form_energy"].get<double>(), 1, 1e-10);
    const auto i = invoke({"map", "--B", cli::fmt17(jf["B"].get<double>()), "--beta",
                           cli::fmt17(jf["beta"].get<double>()), "--format", "json"});
    ASSERT_EQ(i.code, 0) << i.err;
    const auto ji = nlohmann::json::parse(i.out);
    EXPECT_NEAR(ji["p"].get<double>(), 0.05, 1e-10);
    EXPECT_NEAR(ji["q"].get<double>(), 0.2, 1e-10);
}

TEST(Map, TextAndErrors)
{
    const auto t = invoke({"map", "--p", "0", "--q", "0"});
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("B = 0"), std::string::npos);
    EXPECT_EQ(invoke({"map", "--p", "0.1"}).code, 2);
    EXPECT_EQ(invoke({"map", "--p", "0.1", "--q", "0.1", "--B", "1", "--beta", "0"}).code, 2);
    EXPECT_EQ(invoke({"map", "--B", "0", "--beta", "1"}).code, 2);
    EXPECT_EQ(invoke({"map", "--p", "0.1", "--q", "0.1", "--format", "csv"}).code, 2);
}

TEST(Output, DeterministicFiles)
{
    const auto a = scratch("a.csv"), b = scratch("b.csv");
    const std::vector<std::string> base{"trajectory", "--method", "normal", "--h", "0.4", "--t1", "3", "--dt", "0.1"};
    auto args = base;
    args.insert(args.end(), {"--output", a.string()});
    ASSERT_EQ(invoke(args).code, 0);
    args = base;
    args.insert(args.end(), {"--output", b.string()});
    ASSERT_EQ(invoke(args).code, 0);
    const auto ta = slurp(a);
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, slurp(b));
    EXPECT_EQ(ta.find('\r'), std::string::npos);

    const auto c = scratch("c.json"), d = scratch("d.json");
    ASSERT_EQ(invoke({"coeffs", "--series", "W", "--order", "30", "--output", c.string()}).code, 0);
    ASSERT_EQ(invoke({"coeffs", "--series", "W", "--order", "30", "--output", d.string()}).code, 0);
    EXPECT_EQ(slurp(c), slurp(d));
}

TEST(Output, UnwritablePath)
{
    EXPECT_EQ(invoke({"coeffs", "--series", "g0", "--output", "/nonexistent-dir/x.json"}).code, 2);
}

TEST(Binary, ExitCodesAndEnvironment)
{
    const std::string bin = PEND_NF_BINARY;
    const auto out = scratch("bin.csv");
    EXPECT_EQ(shell(bin + " verify --suite theta > /dev/null"), 0);
    EXPECT_EQ(shell(bin + " verify --suite legendre --tol 1e-30 > /dev/null"), 1);
    EXPECT_EQ(shell(bin + " verify --suite identity51 --order 0 2> /dev/null"), 2);
    EXPECT_EQ(shell("PEND_NF_MAX_ORDER=3 " + bin + " coeffs --series g0 --order 10 --format csv > " +
                    out.string()),
              0);
    EXPECT_EQ(slurp(out), "# series=g0 var=x' order=3 normalized g=1 32Ig=1\npower,num,den\n0,1,1\n1,4,1\n2,12,1\n3,32,1\n");
}
