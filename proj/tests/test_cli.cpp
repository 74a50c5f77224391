#include "scav/app/commands.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace scav;
using namespace scav::app;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

const std::string kConfigs = SCAV_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("scav-test-cli-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

CliOptions opts(const fs::path& out) {
    CliOptions o;
    o.out = out.string();
    o.quiet = true;
    return o;
}

// A copy of rc.cfg next to its netlist, with one line replaced.
fs::path rc_variant(const fs::path& dir, const std::string& from, const std::string& to) {
    fs::create_directories(dir);
    fs::copy_file(kConfigs + "/rc.net", dir / "rc.net", fs::copy_options::overwrite_existing);
    auto text = slurp(kConfigs + "/rc.cfg");
    if (!from.empty()) {
        const auto at = text.find(from);
        REQUIRE(at != std::string::npos);
        text.replace(at, from.size(), to);
    }
    spit(dir / "rc.cfg", text);
    return dir / "rc.cfg";
}

}  // namespace

TEST_CASE("simulate an RC discharge end to end", "[cli]") {
    const auto out = scratch("rc");
    std::ostringstream so, se;
    CliOptions o;
    o.out = out.string();
    REQUIRE(cmd_simulate(kConfigs + "/rc.cfg", o, so, se) == 0);
    CHECK(so.str().rfind("netlist: E_in=", 0) == 0);
    CHECK(so.str().find("efficiency=\n") != std::string::npos);
    for (const char* f : {"trace.csv", "circuit.net", "report.csv", "energy.csv", "energy.svg", "summary.txt"})
        CHECK(fs::exists(out / f));

    const auto rep = io::read_csv((out / "report.csv").string());
    CHECK(rep.meta.at("kind") == "netlist");
    CHECK(rep.meta.count("config_hash") == 1);
    const auto& names = rep.col_text("quantity");
    const auto& values = rep.col("value");
    auto value = [&](const std::string& q) {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == q) return values[k];
        FAIL("missing quantity " << q);
        return 0.0;
    };
    // 1 V across 1 kOhm for 1 ms, capacitor held at 1 V
    CHECK(value("loss:resistive") == Approx(1e-6).epsilon(1e-6));
    CHECK(value("E_in") == Approx(1e-6).epsilon(1e-6));
    CHECK(std::isnan(value("efficiency")));
    CHECK(std::abs(value("relative_residual")) < 1e-9);
}

TEST_CASE("reruns are byte-identical", "[cli]") {
    const auto a = scratch("det-a"), b = scratch("det-b");
    REQUIRE(cmd_simulate(kConfigs + "/rc.cfg", opts(a)) == 0);
    REQUIRE(cmd_simulate(kConfigs + "/rc.cfg", opts(b)) == 0);
    for (const char* f : {"trace.csv", "report.csv", "energy.csv", "energy.svg", "circuit.net"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("the dt override changes the step", "[cli]") {
    const auto out = scratch("dt");
    auto o = opts(out);
    o.dt = 1e-5;
    REQUIRE(cmd_simulate(kConfigs + "/rc.cfg", o) == 0);
    const auto tr = io::read_csv((out / "trace.csv").string());
    REQUIRE(tr.rows() > 20);
    const auto& t = tr.col("t");
    const std::size_t k = t.size() / 2;
    CHECK(t[k + 1] - t[k] == Approx(1e-5));
}

TEST_CASE("malformed config exits 2 and writes nothing", "[cli]") {
    const auto dir = scratch("bad-key");
    const auto cfg = rc_variant(dir, "[run]", "[run]\nbogus = 1");
    const auto out = dir / "out";
    std::ostringstream so, se;
    CHECK(cmd_simulate(cfg.string(), opts(out), so, se) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(se.str().find("bogus") != std::string::npos);
    CHECK(se.str().find("line ") != std::string::npos);
}

TEST_CASE("sweep without a sweep section or with no values exits 2", "[cli]") {
    const auto dir = scratch("no-sweep");
    std::ostringstream so, se;
    CHECK(cmd_sweep(rc_variant(dir, "", "").string(), opts(dir / "out"), so, se) == 2);
    CHECK_FALSE(fs::exists(dir / "out"));

    const auto dir2 = scratch("empty-values");
    const auto cfg = rc_variant(dir2, "[run]", "[sweep]\nparameter = dt\nvalues =\n\n[run]");
    CHECK(cmd_sweep(cfg.string(), opts(dir2 / "out"), so, se) == 2);
    CHECK_FALSE(fs::exists(dir2 / "out"));
}

TEST_CASE("a missing config exits 2", "[cli]") {
    std::ostringstream so, se;
    CHECK(cmd_simulate("/nonexistent/x.cfg", {}, so, se) == 2);
}

TEST_CASE("report regenerates plots or fails cleanly", "[cli]") {
    const auto out = scratch("report");
    REQUIRE(cmd_simulate(kConfigs + "/rc.cfg", opts(out)) == 0);
    const auto svg = slurp(out / "energy.svg");
    fs::remove(out / "energy.svg");
    std::ostringstream so, se;
    CHECK(cmd_report(out.string(), {}, so, se) == 0);
    CHECK(slurp(out / "energy.svg") == svg);
    CHECK(so.str().find("E_in") != std::string::npos);

    CHECK(cmd_report((out / "nope").string(), {}, so, se) == 1);

    spit(out / "report.csv", "quantity,value,unit\nE_in,1\n");
    CHECK(cmd_report(out.string(), {}, so, se) == 1);
}

TEST_CASE("sweep over the time step", "[cli]") {
    const auto dir = scratch("dt-sweep");
    const auto cfg = rc_variant(dir, "[run]", "[sweep]\nparameter = dt\nvalues = 1u 2u 5u\n\n[run]");
    REQUIRE(cmd_sweep(cfg.string(), opts(dir / "out")) == 0);
    const auto t = io::read_csv((dir / "out" / "table.csv").string());
    CHECK(t.rows() == 3);
    CHECK(t.has("dt"));
    CHECK(t.has("status"));
    CHECK(fs::exists(dir / "out" / "sweep.svg"));
}

TEST_CASE("output directory precedence", "[cli]") {
    RunConfig rc;
    rc.path = "/x/y/fig3.cfg";
    CliOptions o;
    ::unsetenv(kOutRootEnv);
    CHECK(output_dir(rc, o) == fs::path("scav-out/fig3"));
    ::setenv(kOutRootEnv, "/tmp/root", 1);
    CHECK(output_dir(rc, o) == fs::path("/tmp/root/fig3"));
    rc.out = "cfg-out";
    CHECK(output_dir(rc, o) == fs::path("cfg-out"));
    o.out = "cli-out";
    CHECK(output_dir(rc, o) == fs::path("cli-out"));
    ::unsetenv(kOutRootEnv);
}

TEST_CASE("config parsing of the shipped scenarios", "[cli]") {
    for (const char* name : {"fig3", "full_cycle", "turns", "fig6", "fig6_flyback", "rc"}) {
        INFO(name);
        const auto rc = load_config(kConfigs + "/" + name + ".cfg");
        CHECK(rc.hash.size() == 16);
        CHECK(rc.step() > 0.0);
    }
    CHECK(load_config(kConfigs + "/fig3.cfg").kind == Kind::EmBoost);
    CHECK(load_config(kConfigs + "/fig6.cfg").sweep->parameter == "n_cells");
    CHECK(load_config(kConfigs + "/fig6_flyback.cfg").topology() == es::Topology::Flyback);
}

TEST_CASE("config semantic errors are parse errors", "[cli]") {
    const std::string dir = kConfigs + "/";
    auto bad = [&](const std::string& text) {
        INFO(text);
        CHECK_THROWS_AS(parse_config(text, dir + "inline.cfg"), ParseError);
    };
    bad("[run]\nkind = nope\n");
    bad("[run]\nkind = es-buck\ndevices = devices.cfg\n[cells]\nn_cells = 2.5\n");
    bad("[run]\nkind = es-buck\ndevices = devices.cfg\n[sweep]\nparameter = turns\nvalues = 1 2\n");
    bad("[run]\nkind = es-buck\ndevices = devices.cfg\n[sweep]\nparameter = n_cells\nvalues = 1 2.5\n");
    bad("[run]\nkind = es-buck\ndevices = devices.cfg\n[sweep]\nparameter = n_cells\nvalues = 3 2\n");
    bad("[run]\nkind = em-boost\ndevices = devices.cfg\n[boost]\nt_on = 30u\n");
    bad("[run]\nkind = em-boost\ndevices = missing.cfg\n");
    bad("[run]\nkind = netlist\n[netlist]\nfile = rc.net\n");
    try {
        (void)parse_config("[run]\nkind = em-boost\ndevices = devices.cfg\n[coil]\n  N = -3\n",
                           dir + "inline.cfg");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() >= 1);
    }
}
