#include "scav/circuit/engine.hpp"
#include "scav/circuit/energy.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace scav;
using namespace scav::circuit;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

// Half-wave rectifier integrated independently: RK4 on the capacitor voltage
// with the diode current max(0, (vs - v - Vf) / Ron), at a much finer step.
std::vector<double> rectifier_oracle(const std::vector<double>& times, double amp, double f,
                                     double Vf, double Ron, double R, double C) {
    auto dv = [&](double t, double v) {
        const double vs = amp * std::sin(2.0 * std::numbers::pi * f * t);
        const double id = std::max(0.0, (vs - v - Vf) / Ron);
        return (id - v / R) / C;
    };
    const double h = 1e-8;
    std::vector<double> out;
    double t = 0.0, v = 0.0;
    for (double target : times) {
        while (t + h <= target) {
            const double k1 = dv(t, v), k2 = dv(t + h / 2, v + h / 2 * k1),
                         k3 = dv(t + h / 2, v + h / 2 * k2), k4 = dv(t + h, v + h * k3);
            v += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            t += h;
        }
        const double r = target - t;
        out.push_back(v + r * dv(t, v));
    }
    return out;
}

}  // namespace

TEST_CASE("RC discharge matches the exponential", "[engine]") {
    Netlist nl;
    nl.capacitor("C1", "a", "0", 1e-6, 1.0).resistor("R1", "a", "0", 1e3);
    const auto tr = simulate(nl, {}, 5e-3, 1e-6);
    const auto v = tr.voltage("a");
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.samples(); ++k) {
        const double exact = std::exp(-tr.t[k] / 1e-3);
        worst = std::max(worst, std::abs(v[k] - exact));
    }
    CHECK(worst < 1e-3);  // 0.1% of the initial voltage
    CHECK(tr.t.back() == Catch::Approx(5e-3));
}

TEST_CASE("LC tank oscillates at 1/sqrt(LC) without losing energy", "[engine]") {
    const double L = 1e-3, C = 1e-6, w = 1.0 / std::sqrt(L * C);
    const double T = 2.0 * std::numbers::pi / w;
    Netlist nl;
    nl.capacitor("C1", "a", "0", C, 1.0).inductor("L1", "a", "0", L);
    SimOptions opt;
    opt.gmin = 0.0;
    opt.dt = T / 2000.0;
    opt.t_stop = 5.0 * T;
    const auto tr = simulate(nl, {}, opt);
    const auto v = tr.voltage("a");
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.samples(); ++k)
        worst = std::max(worst, std::abs(v[k] - std::cos(w * tr.t[k])));
    CHECK(worst < 1e-3);
    const double E0 = 0.5 * C;
    const auto& sc = tr.stored_energy("C1");
    const auto& sl = tr.stored_energy("L1");
    for (std::size_t k = 0; k < tr.samples(); ++k) REQUIRE(std::abs(sc[k] + sl[k] - E0) < 1e-6 * E0);
}

TEST_CASE("half-wave rectifier agrees with a brute-force integration", "[engine]") {
    const double amp = 5.0, f = 1e3, Vf = 0.7, Ron = 1.0, R = 100.0, C = 10e-6;
    Netlist nl;
    nl.waveforms["vs"] = Waveform::sine(amp, f);
    nl.voltage_source("V1", "in", "0", "vs");
    nl.add("D1", {"in", "out"}, Diode{Vf, Ron, 0.0});
    nl.resistor("RL", "out", "0", R).capacitor("CL", "out", "0", C);
    SimOptions opt;
    opt.dt = 1e-6;
    opt.t_stop = 3e-3;
    opt.gmin = 0.0;
    const auto tr = simulate(nl, {}, opt);
    const auto ref = rectifier_oracle(tr.t, amp, f, Vf, Ron, R, C);
    CHECK(max_abs_diff(tr.voltage("out"), ref) < 0.005 * amp);
    // conducts only near the positive peaks
    std::size_t on = 0;
    for (auto s : tr.device_state("D1")) on += s;
    CHECK(on > 0);
    CHECK(on < tr.samples() / 2);
}

TEST_CASE("structural errors are reported before solving", "[engine]") {
    SECTION("node with no path to ground") {
        Netlist nl;
        nl.resistor("R1", "a", "0", 1.0).resistor("R2", "b", "c", 1.0);
        CHECK_THROWS_AS(simulate(nl, {}, 1e-3, 1e-6), NetlistError);
    }
    SECTION("no ground at all") {
        Netlist nl;
        nl.resistor("R1", "a", "b", 1.0);
        CHECK_THROWS_AS(simulate(nl, {}, 1e-3, 1e-6), NetlistError);
    }
    SECTION("duplicate names") {
        Netlist nl;
        nl.resistor("R1", "a", "0", 1.0).resistor("R1", "a", "0", 2.0);
        CHECK_THROWS_AS(simulate(nl, {}, 1e-3, 1e-6), NetlistError);
    }
    SECTION("bad element values") {
        Netlist nl;
        nl.resistor("R1", "a", "0", -1.0);
        CHECK_THROWS_AS(simulate(nl, {}, 1e-3, 1e-6), NetlistError);
    }
    SECTION("bad options") {
        Netlist nl;
        nl.resistor("R1", "a", "0", 1.0);
        CHECK_THROWS_AS(simulate(nl, {}, 1e-3, 0.0), DomainError);
        SimOptions opt;
        opt.t_stop = 1e-3;
        opt.be_step_fraction = 0.0;
        CHECK_THROWS_AS(simulate(nl, {}, opt), DomainError);
    }
}

TEST_CASE("parallel voltage sources make a singular matrix", "[engine]") {
    Netlist nl;
    nl.waveforms["one"] = Waveform::dc(1.0);
    nl.waveforms["two"] = Waveform::dc(2.0);
    nl.voltage_source("V1", "a", "0", "one").voltage_source("V2", "a", "0", "two");
    nl.resistor("R1", "a", "0", 1.0);
    try {
        (void)simulate(nl, {}, 1e-6, 1e-7);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
        CHECK_FALSE(e.where().empty());
    }
}

TEST_CASE("diode states that never settle raise an error", "[engine]") {
    // Two diodes in series with no capacitance at the middle node turn on
    // one after the other, which needs two state flips in one step.
    Netlist nl;
    nl.waveforms["vs"] = Waveform::dc(5.0);
    nl.voltage_source("V1", "in", "0", "vs");
    nl.add("D1", {"in", "m"}, Diode{0.5, 1.0, 0.0});
    nl.add("D2", {"m", "out"}, Diode{0.5, 1.0, 0.0});
    nl.resistor("RL", "out", "0", 100.0);
    SimOptions opt;
    opt.dt = 1e-6;
    opt.t_stop = 1e-5;
    opt.max_alternations = 1;
    CHECK_THROWS_AS(simulate(nl, {}, opt), SolverError);
    opt.max_alternations = 64;
    const auto tr = simulate(nl, {}, opt);
    CHECK(tr.voltage("out").back() == Catch::Approx(4.0 * 100.0 / 102.0).epsilon(1e-6));
}

TEST_CASE("identical runs give identical traces", "[engine]") {
    Netlist nl;
    nl.waveforms["vs"] = Waveform::sine(2.0, 10e3);
    nl.voltage_source("V1", "in", "0", "vs", 0.1);
    nl.inductor("L1", "in", "x", 10e-6, 0.05);
    nl.add("S1", {"x", "0"}, Switch{0.1, 100e-12, "g"});
    nl.add("D1", {"x", "out"}, Diode{0.3, 0.05, 50e-12});
    nl.capacitor("C1", "out", "0", 10e-6, 1.0).resistor("RL", "out", "0", 50.0);
    GateSchedule gs;
    gs.set("g", GateDrive::from_periodic({10e-6, 4e-6}));
    const auto a = simulate(nl, gs, 2e-4, 20e-9);
    const auto b = simulate(nl, gs, 2e-4, 20e-9);
    CHECK(a.t == b.t);
    CHECK(a.v == b.v);
    CHECK(a.i == b.i);
    CHECK(a.state == b.state);
}

TEST_CASE("gate transitions land on sample times", "[engine]") {
    Netlist nl;
    nl.waveforms["vs"] = Waveform::dc(1.0);
    nl.voltage_source("V1", "in", "0", "vs");
    nl.add("S1", {"in", "o"}, Switch{1.0, 0.0, "g"});
    nl.resistor("R1", "o", "0", 1.0);
    GateSchedule gs;
    gs.set("g", GateDrive::from_intervals({{0.33e-6, 0.77e-6}}));
    const auto tr = simulate(nl, gs, 1e-6, 0.1e-6);
    bool hit_on = false, hit_off = false;
    for (double t : tr.t) {
        hit_on = hit_on || std::abs(t - 0.33e-6) < 1e-18;
        hit_off = hit_off || std::abs(t - 0.77e-6) < 1e-18;
    }
    CHECK(hit_on);
    CHECK(hit_off);
    const auto& s = tr.device_state("S1");
    for (std::size_t k = 0; k < tr.samples(); ++k)
        if (tr.t[k] > 0.34e-6 && tr.t[k] < 0.76e-6) REQUIRE(s[k] == 1);
}

TEST_CASE("an isolated variable capacitor keeps its charge", "[engine]") {
    const double C0 = 3.3e-9, C1 = 33e-12, V0 = 2.5, q0 = C0 * V0;
    Netlist nl;
    nl.waveforms["cv"] = Waveform::pwl({{0.0, C0}, {1e-3, C1}});
    nl.add("CG", {"g", "0"}, VarCapacitor{"cv", q0});
    SimOptions opt;
    opt.gmin = 0.0;
    opt.dt = 1e-6;
    opt.t_stop = 1e-3;
    const auto tr = simulate(nl, {}, opt);
    const auto v = tr.voltage("g");
    for (std::size_t k = 0; k < tr.samples(); ++k) {
        const double C = C0 + (C1 - C0) * tr.t[k] / 1e-3;
        REQUIRE(std::abs(C * v[k] - q0) < 1e-9 * q0);
    }
    CHECK(v.back() == Catch::Approx(q0 / C1).epsilon(1e-9));
    // stored energy rises by the mechanical work of separating the plates
    const auto& S = tr.stored_energy("CG");
    CHECK(S.back() - S.front() == Catch::Approx(0.5 * q0 * q0 * (1 / C1 - 1 / C0)).epsilon(1e-9));
}

TEST_CASE("a passive network never gains energy", "[engine]") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        Netlist nl;
        nl.capacitor("C1", "a", "0", 1e-6 * u(rng), 2.0 * u(rng));
        nl.inductor("L1", "a", "b", 1e-3 * u(rng), 0.0, 0.01 * u(rng));
        nl.resistor("R1", "b", "0", 10.0 * u(rng));
        nl.capacitor("C2", "b", "c", 2e-6 * u(rng), -1.0 * u(rng));
        nl.resistor("R2", "c", "0", 30.0 * u(rng));
        nl.inductor("L2", "c", "a", 0.5e-3 * u(rng));
        const auto tr = simulate(nl, {}, 2e-3, 0.5e-6);
        double prev = kInf;
        for (std::size_t k = 0; k < tr.samples(); ++k) {
            double E = 0.0;
            for (const auto& s : tr.stored) E += s[k];
            REQUIRE(E <= prev * (1.0 + 1e-12) + 1e-18);
            prev = E;
        }
        for (const char* r : {"R1", "R2"}) {
            const auto& w = tr.absorbed_energy(r);
            for (std::size_t k = 1; k < w.size(); ++k) REQUIRE(w[k] >= w[k - 1] - 1e-18);
        }
    }
}
