#include "scav/circuit/energy.hpp"
#include "scav/circuit/engine.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace scav;
using namespace scav::circuit;

namespace {

Netlist boost_fixture() {
    Netlist nl;
    nl.waveforms["vs"] = Waveform::dc(0.2);
    nl.voltage_source("V1", "in", "0", "vs", 10e-3);
    nl.inductor("L1", "in", "x", 1.5e-6, 28e-3);
    nl.add("S1", {"x", "0"}, Switch{0.1, 800e-12, "g"});
    nl.add("D1", {"x", "out"}, Diode{0.3, 0.05, 100e-12, kInf, -1.65});
    nl.capacitor("CO", "out", "0", 2e-3, 1.65);
    return nl;
}

RoleMap boost_roles() {
    return {{"V1", Role::source()},        {"L1", Role::loss("resistive")},
            {"S1", Role::loss("switch")},  {"D1", Role::loss("diode")},
            {"CO", Role::output()}};
}

GateSchedule boost_gates() {
    GateSchedule gs;
    gs.set("g", GateDrive::from_periodic({20e-6, 18e-6}));
    return gs;
}

}  // namespace

TEST_CASE("resistor across a DC source dissipates V^2 T / R", "[energy]") {
    const double V = 3.0, R = 50.0, T = 2e-3;
    Netlist nl;
    nl.waveforms["vs"] = Waveform::dc(V);
    nl.voltage_source("V1", "a", "0", "vs").resistor("R1", "a", "0", R);
    SimOptions opt;
    opt.gmin = 0.0;
    opt.dt = 1e-5;
    opt.t_stop = T;
    const auto tr = simulate(nl, {}, opt);
    const auto rep = energy_report(tr, {{"V1", Role::source()}, {"R1", Role::loss("resistive")}});
    CHECK(rep.loss("resistive") == Catch::Approx(V * V * T / R).epsilon(1e-12));
    CHECK(rep.total_in == Catch::Approx(V * V * T / R).epsilon(1e-12));
    CHECK_FALSE(rep.efficiency.has_value());
    CHECK(std::abs(rep.residual) < 1e-15);
}

TEST_CASE("gmin dissipation is booked as its own loss", "[energy]") {
    Netlist nl;
    nl.waveforms["vs"] = Waveform::dc(1.0);
    nl.voltage_source("V1", "a", "0", "vs").resistor("R1", "a", "0", 1e3);
    const auto tr = simulate(nl, {}, 1e-3, 1e-5);
    const auto rep = energy_report(tr, {{"V1", Role::source()}, {"R1", Role::loss("r")}});
    CHECK(rep.loss("shunt") == Catch::Approx(1e-12 * 1e-3).epsilon(1e-9));
    CHECK(std::abs(rep.residual) < 1e-18);
}

TEST_CASE("LC exchange books nothing but stored energy", "[energy]") {
    Netlist nl;
    nl.capacitor("C1", "a", "0", 1e-6, 2.0).inductor("L1", "a", "0", 1e-3);
    SimOptions opt;
    opt.gmin = 0.0;
    opt.dt = 1e-7;
    opt.t_stop = 1e-3;
    const auto tr = simulate(nl, {}, opt);
    const auto rep = energy_report(tr, {{"C1", Role::storage()}, {"L1", Role::storage()}});
    CHECK(rep.total_in == 0.0);
    // only the two short backward-Euler steps after t = 0 damp the tank
    CHECK(std::abs(rep.dE_stored) < 1e-6 * 2e-6);
    CHECK(rep.residual == Catch::Approx(-rep.dE_stored).margin(1e-20));
}

TEST_CASE("components without a role are listed", "[energy]") {
    Netlist nl;
    nl.capacitor("C1", "a", "0", 1e-6, 1.0).resistor("R1", "a", "0", 1.0).resistor("R2", "a", "0", 1.0);
    const auto tr = simulate(nl, {}, 1e-6, 1e-7);
    try {
        (void)energy_report(tr, {{"C1", Role::storage()}});
        FAIL("expected an error");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("R1") != std::string::npos);
        CHECK(msg.find("R2") != std::string::npos);
    }
}

TEST_CASE("role strings", "[energy]") {
    CHECK(Role::parse("source").kind == Role::Kind::Source);
    CHECK(Role::parse("loss:diode").mechanism == "diode");
    CHECK(Role::parse("loss:diode").str() == "loss:diode");
    CHECK_THROWS_AS(Role::parse("loss:"), DomainError);
    CHECK_THROWS_AS(Role::parse("sink"), DomainError);
}

TEST_CASE("switching converter balance closes and tightens with dt", "[energy]") {
    const auto nl = boost_fixture();
    double prev = 0.0;
    for (double dt : {40e-9, 20e-9, 10e-9}) {
        const auto tr = simulate(nl, boost_gates(), 200e-6, dt);
        const auto rep = energy_report(tr, boost_roles());
        REQUIRE(rep.total_in > 0.0);
        CHECK(rep.relative_residual() < 0.005);
        CHECK(rep.efficiency.has_value());
        // shrinks until it reaches round-off
        if (prev > 0.0) CHECK((rep.relative_residual() < prev || rep.relative_residual() < 1e-8));
        prev = rep.relative_residual();
    }
}

TEST_CASE("energy series ends on the report totals", "[energy]") {
    const auto tr = simulate(boost_fixture(), boost_gates(), 100e-6, 20e-9);
    const auto rep = energy_report(tr, boost_roles());
    const auto es = energy_series(tr, boost_roles());
    REQUIRE(es.t.size() == tr.samples());
    CHECK(es.E_in.front() == 0.0);
    CHECK(es.E_in.back() == Catch::Approx(rep.total_in).epsilon(1e-12));
    CHECK(es.E_out.back() == Catch::Approx(rep.total_out).epsilon(1e-12));
    for (const auto& [m, e] : rep.E_loss) CHECK(es.E_loss.at(m).back() == Catch::Approx(e).epsilon(1e-9));
    CHECK(es.dE_stored.back() == Catch::Approx(rep.dE_stored).epsilon(1e-9).margin(1e-15));
}

TEST_CASE("report over a sample range", "[energy]") {
    const auto tr = simulate(boost_fixture(), boost_gates(), 100e-6, 20e-9);
    const std::size_t mid = tr.samples() / 2;
    const auto a = energy_report(tr, boost_roles(), 0, mid);
    const auto b = energy_report(tr, boost_roles(), mid);
    const auto all = energy_report(tr, boost_roles());
    CHECK(a.total_in + b.total_in == Catch::Approx(all.total_in).epsilon(1e-12));
    CHECK_THROWS_AS(energy_report(tr, boost_roles(), mid, 1), DomainError);
}

TEST_CASE("steady-state check on a driven RC", "[energy]") {
    const double f = 1e3;
    Netlist nl;
    nl.waveforms["vs"] = Waveform::sine(1.0, f);
    nl.voltage_source("V1", "in", "0", "vs").resistor("R1", "in", "o", 1e3);
    nl.capacitor("C1", "o", "0", 0.1e-6);
    const auto tr = simulate(nl, {}, 10e-3, 1e-6);
    const auto rep = steady_state_check(tr, 1.0 / f, {"o"});
    REQUIRE(rep.window_deviation.size() == 10);
    // time constant 0.1 ms: transient is gone after the first period
    CHECK(rep.window_deviation.front() > 1e-3);
    CHECK(rep.window_deviation.back() < 1e-6);
    CHECK(rep.worst_signal == "o");
    const auto g = rep.grouped(5);
    REQUIRE(g.size() == 2);
    CHECK(g[1] < g[0]);
    CHECK_THROWS_AS(steady_state_check(tr, 4e-3), DomainError);
    CHECK_THROWS_AS(steady_state_check(tr, 0.0), DomainError);
}

TEST_CASE("linear interpolation helper", "[energy]") {
    const std::vector<double> t = {0.0, 1.0, 3.0}, y = {0.0, 2.0, 6.0};
    CHECK(sample_at(t, y, 0.5) == 1.0);
    CHECK(sample_at(t, y, 2.0) == 4.0);
    CHECK(sample_at(t, y, 3.0) == 6.0);
}
