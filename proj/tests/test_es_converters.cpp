#include "scav/es_converters.hpp"
#include "scav/circuit/netlist_io.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace scav;
using namespace scav::es;
using Catch::Approx;

namespace {

// Energy after pulling the plates apart at constant charge, built up from
// the work v^2/2 * (-dC) done on each small capacitance decrement. Steps are
// log-spaced because the integrand goes as 1/C^2.
double open_energy_by_work(double Q, double C_closed, double C_open, double C_par, int steps) {
    double E = 0.5 * Q * Q / (C_closed + C_par);
    const double r = std::pow(C_open / C_closed, 1.0 / steps);
    double C = C_closed;
    for (int k = 0; k < steps; ++k) {
        const double C_next = C * r;
        const double C_mid = std::sqrt(C * C_next);
        const double v = Q / (C_mid + C_par);
        E += 0.5 * v * v * (C - C_next);
        C = C_next;
    }
    return E;
}

CellDeviceModel ideal_cells() {
    CellDeviceModel d;
    d.R_on_cell = 1e-2;
    d.R_on_cell_diode = 1e-2;
    d.C_off_cell = 0.0;
    d.C_j_cell = 0.0;
    d.V_f = 0.0;
    return d;
}

std::vector<int> cell_range(int lo, int hi) {
    std::vector<int> v(static_cast<std::size_t>(hi - lo + 1));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

}  // namespace

TEST_CASE("constant-charge energy closed forms", "[es]") {
    CHECK(constant_charge_energy(1e-6, 1e-9, 10e-9) == Approx(0.45e-3).epsilon(1e-12));
    CHECK(constant_charge_energy(1e-6, 0.5e-9, 10e-9) == Approx(0.95e-3).epsilon(1e-12));
    CHECK(constant_charge_energy(1e-6, 10e-9, 1e-9) < 0.0);
    CHECK_THROWS_AS(constant_charge_energy(1e-6, 0.0, 1e-9), DomainError);
}

TEST_CASE("without parasitics the open energy is priming plus field work", "[es]") {
    EsGeneratorSpec g;
    const auto b = generation_cycle(g);
    CHECK(b.E_open - b.E_closed == Approx(b.W_field).epsilon(1e-12));
    CHECK(std::abs(b.n_gen - 1.0) < 1e-12);
    CHECK_FALSE(b.converted);
}

TEST_CASE("generation efficiency matches the incremental-work oracle", "[es]") {
    for (double C_open : {20e-12, 33e-12, 100e-12}) {
        for (double C_par : {0.0, 33e-12, 300e-12}) {
            EsGeneratorSpec g;
            g.C_open = C_open;
            g.C_par = C_par;
            const auto b = generation_cycle(g);
            const double E_open = open_energy_by_work(g.Q0(), g.C_closed, C_open, C_par, 10000);
            const double n_oracle = E_open / (b.W_field + b.E_closed);
            INFO("C_open " << C_open << " C_par " << C_par);
            CHECK(b.n_gen == Approx(n_oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("generation efficiency falls as parasitic capacitance grows", "[es]") {
    double prev = 2.0;
    for (double C_par : {0.0, 10e-12, 33e-12, 100e-12, 330e-12}) {
        EsGeneratorSpec g;
        g.C_par = C_par;
        const double n = generation_cycle(g).n_gen;
        CHECK(n < prev);
        CHECK(n >= 0.0);
        prev = n;
    }
}

TEST_CASE("doubling the priming voltage scales energies by four", "[es]") {
    EsGeneratorSpec a;
    a.C_par = 20e-12;
    auto b = a;
    b.V_prime *= 2.0;
    const auto ea = generation_cycle(a, 5e-12);
    const auto eb = generation_cycle(b, 5e-12);
    CHECK(eb.E_closed == Approx(4.0 * ea.E_closed).epsilon(1e-12));
    CHECK(eb.E_open == Approx(4.0 * ea.E_open).epsilon(1e-12));
    CHECK(eb.W_field == Approx(4.0 * ea.W_field).epsilon(1e-12));
    CHECK(eb.n_gen == Approx(ea.n_gen).epsilon(1e-12));

    CellDeviceModel dev;
    const auto ra = simulate_discharge(build_buck(a, dev, 10.0), a);
    const auto rb = simulate_discharge(build_buck(b, dev, 20.0), b);
    CHECK(rb.n_gen == Approx(ra.n_gen).epsilon(1e-12));
    CHECK(rb.n_conv == Approx(ra.n_conv).epsilon(0.10));
}

TEST_CASE("generator and device validation", "[es]") {
    EsGeneratorSpec g;
    g.C_closed = g.C_open;
    CHECK_THROWS_AS(generation_cycle(g), DomainError);
    g = {};
    g.C_par = -1e-12;
    CHECK_THROWS_AS(generation_cycle(g), DomainError);
    g = {};
    CHECK_THROWS_AS(generation_cycle(g, -1.0), DomainError);

    CellDeviceModel d;
    d.n_cells = 0;
    CHECK_THROWS_AS(build_buck({}, d, 10.0), DomainError);
    CHECK_THROWS_AS(build_buck({}, {}, 1e6), DomainError);
    ConverterParams c;
    c.L = 0.0;
    CHECK_THROWS_AS(build_flyback({}, {}, 10.0, c), DomainError);
}

TEST_CASE("cell scaling of device parameters", "[es]") {
    CellDeviceModel d;
    d.n_cells = 4;
    CHECK(d.R_on() == Approx(25.0));
    CHECK(d.C_off() == Approx(2e-12));
    CHECK(d.R_on_diode() == Approx(25.0));
    CHECK(d.C_j() == Approx(0.2e-12));
    CHECK(d.area() == Approx(0.06));
    CHECK(device_capacitance(Topology::Buck, d) == Approx(2e-12));
    CHECK(device_capacitance(Topology::Flyback, d) == Approx(2.2e-12));
}

TEST_CASE("converter netlists", "[es]") {
    EsGeneratorSpec g;
    g.C_par = 10e-12;
    CellDeviceModel d;
    d.n_cells = 7;
    for (auto topo : {Topology::Buck, Topology::Flyback}) {
        const auto c = build_converter(topo, g, d, 10.0);
        const double C_dev = device_capacitance(topo, d);
        INFO(to_string(topo));
        CHECK(c.V0 == Approx(g.Q0(C_dev) / (g.C_open + g.C_par + C_dev)).epsilon(1e-14));
        const auto nodes = c.netlist.node_names();
        CHECK(std::find(nodes.begin(), nodes.end(), kGenNode) != nodes.end());
        CHECK(c.roles.at("CG").kind == circuit::Role::Kind::Source);
        CHECK(c.roles.at("CO").kind == circuit::Role::Kind::Output);
        for (const auto& e : c.netlist.components()) CHECK(c.roles.contains(e.name));

        const auto back = circuit::parse_netlist(circuit::to_text(c.netlist, c.schedule));
        CHECK(back.netlist == c.netlist);
    }
}

TEST_CASE("buck discharge books energy consistently", "[es]") {
    EsGeneratorSpec g;
    const auto c = build_buck(g, {}, 10.0);
    const auto r = run_discharge(c, g);
    CHECK(r.breakdown.converted);
    CHECK(r.t_off > 0.0);
    CHECK(r.report.relative_residual() < 5e-3);
    CHECK(r.breakdown.n_conv > 0.0);
    CHECK(r.breakdown.n_conv <= 1.0);
    CHECK(r.breakdown.effectiveness == Approx(r.breakdown.n_gen * r.breakdown.n_conv));
    const auto& iL = r.trace.current("L1");
    CHECK(std::abs(iL.back()) < 1e-2 * *std::max_element(iL.begin(), iL.end()));
}

TEST_CASE("ideal devices convert nearly everything", "[es]") {
    EsGeneratorSpec g;
    ConverterParams conv;
    conv.R_L = 1e-3;
    for (auto topo : {Topology::Buck, Topology::Flyback}) {
        INFO(to_string(topo));
        const auto b = simulate_discharge(build_converter(topo, g, ideal_cells(), 10.0, conv), g);
        CHECK(b.n_conv >= 0.98);
        CHECK(b.n_conv <= 1.0 + 1e-6);
    }
}

TEST_CASE("more cells trade generation for conversion", "[es]") {
    EsGeneratorSpec g;
    CellDeviceModel two, twenty;
    two.n_cells = 2;
    twenty.n_cells = 20;
    const auto a = simulate_discharge(build_buck(g, two, 10.0), g);
    const auto b = simulate_discharge(build_buck(g, twenty, 10.0), g);
    CHECK(b.n_gen < a.n_gen);
    CHECK(b.n_conv > a.n_conv);
}

TEST_CASE("cell sweep shape", "[es][slow]") {
    EsGeneratorSpec g;
    const auto range = cell_range(1, 30);
    const auto buck = cell_sweep(g, {}, Topology::Buck, range, 10.0, {}, 4);
    const auto fly = cell_sweep(g, {}, Topology::Flyback, range, 10.0, {}, 4);
    REQUIRE(buck.failures() == 0);
    REQUIRE(fly.failures() == 0);

    const auto n_gen = buck.column("n_gen");
    const auto n_conv = buck.column("n_conv");
    for (std::size_t i = 1; i < range.size(); ++i) {
        CHECK(n_gen[i] < n_gen[i - 1]);
        CHECK(n_conv[i] >= n_conv[i - 1]);
    }
    for (const auto& r : buck.rows) {
        const double e = r.metrics.at("effectiveness");
        CHECK(e <= std::min(r.metrics.at("n_gen"), r.metrics.at("n_conv")) + 1e-15);
    }
    const auto a = buck.argmax();
    REQUIRE(a);
    CHECK(buck.rows[*a].value >= 5.0);
    CHECK(buck.rows[*a].value <= 15.0);
    const auto af = fly.argmax();
    REQUIRE(af);
    CHECK(buck.rows[*a].metrics.at("effectiveness") >= fly.rows[*af].metrics.at("effectiveness"));

    bool has_topology = false;
    for (const auto& [k, v] : buck.provenance) has_topology = has_topology || (k == "topology" && v == "buck");
    CHECK(has_topology);
}

TEST_CASE("cell sweep rejects an empty range", "[es]") {
    CHECK_THROWS_AS(cell_sweep({}, {}, Topology::Buck, {}, 10.0), DomainError);
}
