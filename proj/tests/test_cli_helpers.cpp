#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cli/cache.hpp"
#include "cli/charge_spec.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

using namespace stm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "stm_cli_helpers";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

cli::OutputRecord sample_record() {
    cli::OutputRecord r;
    r.command = "nu";
    r.version = "1.0.0";
    r.inputs = {{"m", "0.09"}, {"beta", "0,-1,inf"}};
    r.tolerance = {1e-10, 1e-14, 2000};
    r.columns = {"a", "b", "c"};
    r.add_row({0.1, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    r.add_row({1.0 / 3.0, -2.5e-300, 7.0}, false);
    return r;
}

}  // namespace

TEST(Config, DefaultsFileAndErrors) {
    cli::RunConfig c;
    EXPECT_EQ(c.rel_tol, 1e-10);
    EXPECT_EQ(c.format, "csv");
    const auto p = scratch("run.cfg");
    write_file(p, "# comment\nrel_tol = 1e-8   # trailing\n\nthreads=3\nformat = json\nseed = 99\nmc_samples=1000\n");
    cli::load_config(c, p.string());
    EXPECT_EQ(c.rel_tol, 1e-8);
    EXPECT_EQ(c.threads, 3u);
    EXPECT_EQ(c.format, "json");
    EXPECT_EQ(c.mc_seed, 99u);
    EXPECT_EQ(c.mc_samples, 1000u);
    EXPECT_EQ(c.abs_tol, 1e-14);  // untouched

    write_file(p, "bogus = 1\n");
    EXPECT_THROW(cli::load_config(c, p.string()), DomainError);
    write_file(p, "rel_tol = fast\n");
    EXPECT_THROW(cli::load_config(c, p.string()), DomainError);
    write_file(p, "rel_tol\n");
    EXPECT_THROW(cli::load_config(c, p.string()), DomainError);
    EXPECT_THROW(cli::load_config(c, scratch("missing.cfg").string()), DomainError);

    cli::RunConfig bad;
    bad.rel_tol = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = {};
    bad.format = "xml";
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Output, NumbersRoundTripExactly) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 5e-324})
        EXPECT_EQ(std::strtod(cli::format_number(v).c_str(), nullptr), v);
    EXPECT_EQ(cli::format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(cli::format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(cli::format_number(std::nan("")), "nan");
}

TEST(Output, CsvLayout) {
    std::ostringstream os;
    cli::write_csv(os, sample_record());
    const std::string expected =
        "# command=nu version=1.0.0\n"
        "# input m=0.09\n"
        "# input beta=0,-1,inf\n"
        "# tolerance=rel_tol:1e-10,abs_tol:1e-14,max_subdivisions:2000\n"
        "a,b,c,converged\n"
        "0.10000000000000001,inf,-inf,1\n"
        "0.33333333333333331,-2.5e-300,7,0\n";
    EXPECT_EQ(os.str(), expected);
}

TEST(Output, JsonRoundTrip) {
    const auto r = sample_record();
    std::ostringstream os;
    cli::write_json(os, r);
    const auto back = cli::from_json(nlohmann::ordered_json::parse(os.str()));
    EXPECT_EQ(back, r);
}

TEST(Output, JsonNanTravelsAsString) {
    auto r = sample_record();
    r.rows[0][0] = std::nan("");
    const auto j = cli::to_json(r);
    EXPECT_EQ(j["rows"][0]["a"], "nan");
    const auto back = cli::from_json(nlohmann::ordered_json::parse(j.dump()));
    EXPECT_TRUE(std::isnan(back.rows[0][0]));
    EXPECT_THROW(cli::number_from_json(nlohmann::ordered_json("fast")), DomainError);
}

TEST(Output, RowWidthChecked) {
    cli::OutputRecord r;
    r.columns = {"a"};
    EXPECT_THROW(r.add_row({1.0, 2.0}), std::logic_error);
}

TEST(ParseComplex, Forms) {
    EXPECT_EQ(cli::parse_complex("1.5"), cplx(1.5, 0));
    EXPECT_EQ(cli::parse_complex("2i"), cplx(0, 2));
    EXPECT_EQ(cli::parse_complex("-i"), cplx(0, -1));
    EXPECT_EQ(cli::parse_complex("i"), cplx(0, 1));
    EXPECT_EQ(cli::parse_complex("0.5-1e-3i"), cplx(0.5, -1e-3));
    EXPECT_EQ(cli::parse_complex("1e-3+2e+2i"), cplx(1e-3, 200));
    EXPECT_EQ(cli::parse_complex(" 3 + 4i "), cplx(3, 4));
    EXPECT_EQ(cli::parse_complex("+2"), cplx(2, 0));
    EXPECT_THROW(cli::parse_complex("abc"), DomainError);
    EXPECT_THROW(cli::parse_complex(""), DomainError);
    EXPECT_THROW(cli::parse_complex("1+2j"), DomainError);
}

TEST(ParseCharge, Kinds) {
    const Charge g = cli::parse_charge("gauss:2,0.5");
    EXPECT_NEAR(std::abs(g(0.5) - cplx(2.0 * std::exp(-1.0))), 0.0, 1e-15);
    const Charge p = cli::parse_charge("power:1-1i,1.5");
    EXPECT_NEAR(std::abs(p(4.0) - cplx(1, -1) / 8.0), 0.0, 1e-15);
    const Charge below = cli::parse_charge("power:1,0.5,trunc=below,2");
    EXPECT_NE(below(1.0), cplx(0.0));
    EXPECT_EQ(below(3.0), cplx(0.0));
    const Charge above = cli::parse_charge("power:1,2.5,trunc=above,2");
    EXPECT_EQ(above(1.0), cplx(0.0));
    EXPECT_NE(above(3.0), cplx(0.0));
    EXPECT_EQ(above.tail(), -2.5);
}

TEST(ParseCharge, Errors) {
    for (const char* bad : {"gauss", "gauss:1", "gauss:1,0", "gauss:1,-2", "power:1", "power:1,2,trunc=below",
                            "power:1,2,trunc=left,1", "power:1,2,trunc=below,0", "wave:1,2", "power:x,2",
                            "file:/nonexistent/grid.csv"})
        EXPECT_THROW(cli::parse_charge(bad), DomainError) << bad;
}

TEST(ParseCharge, GridFile) {
    const auto p = scratch("grid.csv");
    write_file(p, "# a sampled charge\n# head=1 tail=-3\nk,re,im\n0.5,0.5,0\n1,1,0.5\n2,0.25,0\n4,0.015625,0\n");
    const Charge c = cli::parse_charge("file:" + p.string());
    EXPECT_NEAR(std::abs(c(1.0) - cplx(1, 0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c(4.0) - cplx(0.015625)), 0.0, 1e-15);
    EXPECT_EQ(c.head(), 1.0);
    EXPECT_EQ(c.tail(), -3.0);
    // extension past the last node follows the declared tail
    EXPECT_NEAR(std::abs(c(8.0)), 0.015625 / 8.0, 1e-15);

    write_file(p, "0.5,0.5\n1,1\n");
    EXPECT_THROW(cli::parse_charge("file:" + p.string()), DomainError);
    write_file(p, "# head=1 tail=-3\n0.5,0.5,0,9\n");
    EXPECT_THROW(cli::parse_charge("file:" + p.string()), DomainError);
    write_file(p, "# head=1 tail=-3\n0.5,zero\n");
    EXPECT_THROW(cli::parse_charge("file:" + p.string()), DomainError);
}

TEST(Cache, SaveLoadAndStale) {
    const auto p = scratch("curve.csv");
    fs::remove(p);
    const cli::Tolerance tol{1e-10, 1e-14, 2000};
    {
        cli::SCurveCache c(p.string(), tol);
        EXPECT_FALSE(c.stale());
        EXPECT_EQ(c.size(), 0u);
        const auto r = c.s_of_m(MassParam(0.09), {});
        EXPECT_NEAR(r.value, 0.698075483760931, 1e-12);
        EXPECT_EQ(c.size(), 1u);
        c.insert(0.1, {0.25, 1e-13, 7});
        c.save();
    }
    {
        cli::SCurveCache c(p.string(), tol);
        EXPECT_FALSE(c.stale());
        EXPECT_EQ(c.size(), 2u);
        ASSERT_NE(c.find(0.1), nullptr);
        EXPECT_EQ(c.find(0.1)->value, 0.25);  // served from the file, not recomputed
        EXPECT_EQ(c.s_of_m(MassParam(0.1), {}).value, 0.25);
        EXPECT_NEAR(c.find(0.09)->value, 0.698075483760931, 1e-12);
        EXPECT_EQ(c.find(0.0900001), nullptr);
    }
    {
        cli::SCurveCache c(p.string(), {1e-8, 1e-14, 2000});
        EXPECT_TRUE(c.stale());
        EXPECT_EQ(c.size(), 0u);
        c.insert(0.1, {0.5, 0, 0});
        c.save();  // leaves the file alone
    }
    cli::SCurveCache again(p.string(), tol);
    EXPECT_EQ(again.size(), 2u);

    write_file(p, "m,s,residual\n0.1,0.2,0\n");  // no tolerance line
    EXPECT_TRUE(cli::SCurveCache(p.string(), tol).stale());
    write_file(p, "# tolerance=" + cli::tolerance_line(tol) + "\n0.1;0.2\n");
    EXPECT_THROW(cli::SCurveCache(p.string(), tol), DomainError);
}
