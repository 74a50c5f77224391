#include "scav/sweep.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace scav;
using namespace scav::sweep;
using Catch::Approx;

namespace {

SweepSpec grid(std::vector<double> v, std::string objective = "y") {
    SweepSpec s;
    s.parameter = "x";
    s.values = std::move(v);
    s.objective = std::move(objective);
    return s;
}

std::map<std::string, double> bump(double x) {
    return {{"y", -(x - 3.0) * (x - 3.0)}, {"x2", x * x}};
}

}  // namespace

TEST_CASE("bisection finds the square root", "[sweep]") {
    const auto r = bisect_scalar([](double x) { return x * x; }, 2.0, 0.0, 4.0, 1e-9, 1e-14);
    CHECK(r.x == Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(std::abs(r.fx - 2.0) <= 2e-9);
    CHECK(r.evaluations > 2);
}

TEST_CASE("bisection on a falling function", "[sweep]") {
    const auto r = bisect_scalar([](double x) { return 10.0 - x; }, 3.0, 0.0, 10.0, 1e-6, 1e-12);
    CHECK(r.x == Approx(7.0).epsilon(1e-6));
}

TEST_CASE("bisection stops at the width tolerance", "[sweep]") {
    // Step function: the target value is never hit.
    const auto r = bisect_scalar([](double x) { return x < 1.0 ? 0.0 : 2.0; }, 1.0, 0.0, 4.0, 1e-3, 1e-6);
    CHECK(r.x == Approx(1.0).margin(1e-5));
    CHECK(r.evaluations < 40);
}

TEST_CASE("bisection errors", "[sweep]") {
    auto sq = [](double x) { return x * x; };
    CHECK_THROWS_AS(bisect_scalar(sq, 100.0, 0.0, 4.0), DomainError);
    CHECK_THROWS_AS(bisect_scalar(sq, 1.0, 4.0, 0.0), DomainError);
    const auto end = bisect_scalar(sq, 16.0, 0.0, 4.0);
    CHECK(end.x == 4.0);
    CHECK(end.evaluations == 2);
}

TEST_CASE("sweep spec validation", "[sweep]") {
    CHECK_THROWS_AS(grid({}).validate(), DomainError);
    CHECK_THROWS_AS(grid({1, 1}).validate(), DomainError);
    CHECK_THROWS_AS(grid({2, 1}).validate(), DomainError);
    CHECK_THROWS_AS(grid({1, NAN}).validate(), DomainError);
    auto s = grid({1});
    s.parameter.clear();
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK_NOTHROW(grid({1, 2, 3}).validate());
}

TEST_CASE("grid sweep argmax", "[sweep]") {
    const auto t = run_sweep(grid({0, 1, 2, 3, 4, 5}), bump);
    REQUIRE(t.rows.size() == 6);
    REQUIRE(t.argmax());
    CHECK(t.rows[*t.argmax()].value == 3.0);
    CHECK(t.column("x2")[4] == 16.0);
    CHECK(t.columns() == std::vector<std::string>{"x2", "y"});
}

TEST_CASE("ties go to the smaller parameter value", "[sweep]") {
    const auto t = run_sweep(grid({1, 2, 4, 5}), bump);
    REQUIRE(t.argmax());
    CHECK(t.rows[*t.argmax()].value == 2.0);
}

TEST_CASE("parallel sweep equals serial sweep", "[sweep]") {
    std::vector<double> v;
    for (int i = 0; i < 37; ++i) v.push_back(0.25 * i);
    const auto a = run_sweep(grid(v), bump, 1);
    const auto b = run_sweep(grid(v), bump, 8);
    std::ostringstream sa, sb;
    a.write_csv(sa);
    b.write_csv(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("failed rows are kept and skipped", "[sweep]") {
    const auto t = run_sweep(grid({1, 2, 3, 4}), [](double x) {
        if (x == 3.0) throw std::runtime_error("boom");
        return bump(x);
    });
    CHECK(t.failures() == 1);
    CHECK(t.rows[2].failed);
    CHECK(t.rows[2].error == "boom");
    CHECK(std::isnan(t.column("y")[2]));
    REQUIRE(t.argmax());
    CHECK(t.rows[*t.argmax()].value == 2.0);
}

TEST_CASE("a sweep where every row fails throws", "[sweep]") {
    auto fail = [](double) -> std::map<std::string, double> { throw std::runtime_error("no"); };
    CHECK_THROWS_AS(run_sweep(grid({1, 2}), fail), DomainError);
    CHECK_THROWS_AS(run_sweep(grid({1, 2}), fail, 4), DomainError);
}

TEST_CASE("result table csv", "[sweep]") {
    auto t = run_sweep(grid({1, 2, 3}), [](double x) {
        if (x == 2.0) throw std::runtime_error("bad");
        return std::map<std::string, double>{{"y", x / 3.0}};
    });
    t.provenance.emplace_back("source", "unit");
    std::ostringstream os;
    t.write_csv(os);
    CHECK(os.str() ==
          "# source: unit\n"
          "# argmax: 3\n"
          "x,y,status\n"
          "1,0.3333333333,ok\n"
          "2,,failed\n"
          "3,1,ok\n");
}
