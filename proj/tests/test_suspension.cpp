#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "symflow/rng.hpp"
#include "symflow/suspension.hpp"

using namespace symflow;
using sft::PeriodicOrbit;
using sft::TransitionMatrix;
using sft::Word;
using susp::RoofFunction;
using susp::SuspensionFlow;
using thermo::LocallyConstantPotential;

namespace {

SuspensionFlow unit_full2() {
    const TransitionMatrix a = TransitionMatrix::full_shift(2);
    return SuspensionFlow(a, RoofFunction::constant(a, 1.0));
}

// roof rho(0) = 1, rho(1) = 2 on the full 2-shift
SuspensionFlow step_roof_full2(double second = 2.0) {
    const TransitionMatrix a = TransitionMatrix::full_shift(2);
    std::map<Word, double> table{{{0}, 1.0}, {{1}, second}};
    return SuspensionFlow(a, RoofFunction(a, LocallyConstantPotential(a, 1, std::move(table))));
}

TransitionMatrix rose2_edge_matrix() {
    return TransitionMatrix({{1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}, {1, 1, 0, 1}});
}

} // namespace

TEST_CASE("roof validation") {
    const TransitionMatrix a = TransitionMatrix::full_shift(2);
    std::map<Word, double> table{{{0}, 1.0}, {{1}, 0.0}};
    CHECK_THROWS_AS(RoofFunction(a, LocallyConstantPotential(a, 1, std::move(table))), Error);
    double c = 0;
    CHECK(RoofFunction::constant(a, 2.5).is_constant(&c));
    CHECK(c == doctest::Approx(2.5));
}

TEST_CASE("evolve") {
    const SuspensionFlow flow = unit_full2();
    const PeriodicOrbit orbit(flow.base, {0, 1});

    SUBCASE("within one roof") {
        auto p = susp::periodic_point(flow, orbit, 0, 0.4);
        p = susp::evolve(flow, p, 0.3);
        CHECK(p.cursor == 0);
        CHECK(p.height == doctest::Approx(0.7));
    }
    SUBCASE("exact wrap lands on the next symbol at height zero") {
        auto p = susp::periodic_point(flow, orbit, 0, 0.4);
        p = susp::evolve(flow, p, 0.6);
        CHECK(p.cursor == 1);
        CHECK(p.height == 0.0);
    }
    SUBCASE("full period returns the same point") {
        const SuspensionFlow step = step_roof_full2();
        auto p = susp::periodic_point(step, PeriodicOrbit(step.base, {0, 1}), 0, 0.0);
        const auto q = susp::evolve(step, p, 3.0); // period 1 + 2
        CHECK(q == p);
    }
    SUBCASE("backward evolution inverts forward") {
        auto p = susp::periodic_point(flow, orbit, 0, 0.25);
        const auto q = susp::evolve(flow, susp::evolve(flow, p, 1.3), -1.3);
        CHECK(q.cursor == p.cursor);
        CHECK(q.height == doctest::Approx(p.height).epsilon(1e-12));
    }
    SUBCASE("window points fail loudly when exhausted") {
        auto p = susp::window_point(flow, {0, 1, 0}, 1, 0.5);
        CHECK_THROWS_AS(susp::evolve(flow, p, 3.0), WindowExhaustedError);
        CHECK_THROWS_AS(susp::evolve(flow, p, -3.0), WindowExhaustedError);
    }
}

TEST_CASE("evolve is a flow on periodic points") {
    const SuspensionFlow step = step_roof_full2(std::sqrt(2.0));
    const PeriodicOrbit orbit(step.base, {0, 1, 1});
    Rng rng(99);
    auto p = susp::periodic_point(step, orbit, 0, 0.2);
    for (int trial = 0; trial < 100; ++trial) {
        const double s = rng.uniform(-5.0, 5.0);
        const double u = rng.uniform(-5.0, 5.0);
        const auto a = susp::evolve(step, susp::evolve(step, p, s), u);
        const auto b = susp::evolve(step, p, s + u);
        CHECK(a.cursor == b.cursor);
        CHECK(a.height == doctest::Approx(b.height).epsilon(1e-12));
    }
}

TEST_CASE("orbit periods") {
    const SuspensionFlow flow = unit_full2();
    CHECK(susp::orbit_period(flow, PeriodicOrbit(flow.base, {0, 1})) == doctest::Approx(2.0));

    const SuspensionFlow step = step_roof_full2();
    CHECK(susp::orbit_period(step, PeriodicOrbit(step.base, {0, 1})) == doctest::Approx(3.0));

    const SuspensionFlow irr = step_roof_full2(std::sqrt(2.0));
    CHECK(susp::orbit_period(irr, PeriodicOrbit(irr.base, {0, 1})) ==
          doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("flow entropy") {
    SUBCASE("unit roof gives log lambda") {
        CHECK(susp::flow_entropy(unit_full2()) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    }
    SUBCASE("constant roof c rescales entropy") {
        for (const double c : {0.5, 1.0, 2.0}) {
            const TransitionMatrix a = TransitionMatrix::full_shift(2);
            const SuspensionFlow flow(a, RoofFunction::constant(a, c));
            CHECK(susp::flow_entropy(flow) == doctest::Approx(std::log(2.0) / c).epsilon(1e-10));
        }
    }
    SUBCASE("rose edge shift with unit roof") {
        const TransitionMatrix rose = rose2_edge_matrix();
        const SuspensionFlow flow(rose, RoofFunction::constant(rose, 1.0));
        CHECK(susp::flow_entropy(flow) == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    }
}

TEST_CASE("zeta against the closed form") {
    const SuspensionFlow flow = unit_full2();
    // zeta(s) = 1 / (1 - 2 e^{-s}); the truncation misses exactly the
    // n > 30 part of sum 2^n e^{-sn} / n, which the envelope bound covers.
    for (const double s : {0.9, 1.0, 1.5}) {
        const auto z = susp::zeta(flow, s, 30.0);
        const double closed = 1.0 / (1.0 - 2.0 * std::exp(-s));
        CHECK(z.converged);
        const double certified = 1e-9 + std::abs(closed) * (std::exp(z.tail_bound) - 1.0);
        CHECK(std::abs(z.value - closed) <= certified);
    }
}

TEST_CASE("zeta truncation matches an independent term sum") {
    const SuspensionFlow flow = unit_full2();
    const std::complex<double> s(1.1, 0.3);
    // independent oracle: the truncated log sum is sum_{n<=30} 2^n e^{-sn}/n
    std::complex<double> log_sum = 0.0;
    for (int n = 1; n <= 30; ++n)
        log_sum += std::pow(2.0, n) * std::exp(-s * static_cast<double>(n)) / static_cast<double>(n);
    const auto z = susp::zeta(flow, s, 30.0);
    CHECK(std::abs(z.value - std::exp(log_sum)) <= 1e-10 * std::abs(z.value));
}

TEST_CASE("zeta divergence flag and pole") {
    const SuspensionFlow flow = unit_full2();
    const double h = std::log(2.0);
    CHECK_FALSE(susp::zeta(flow, h, 30.0).converged);
    CHECK_FALSE(susp::zeta(flow, h + 1e-3, 30.0).converged);
    CHECK_FALSE(susp::zeta(flow, 0.5, 30.0).converged);
    CHECK(susp::zeta(flow, h + 0.21, 30.0).converged);

    CHECK(susp::zeta_pole(flow, 1e-6) == doctest::Approx(h).epsilon(1e-6));

    SUBCASE("value tends to 1 for large s") {
        const auto z = susp::zeta(flow, 40.0, 30.0);
        CHECK(std::abs(z.value - 1.0) <= 1e-12);
    }
}

TEST_CASE("euler product and orbit-sum routes agree") {
    SUBCASE("constant roof, exact counts vs complex traces") {
        const SuspensionFlow flow = unit_full2();
        const double h = std::log(2.0);
        for (const double s : {h + 0.1, h + 0.3, 1.5}) {
            const auto a = susp::zeta(flow, s, 30.0).value;
            const auto b = susp::zeta_euler(flow, s, 30.0);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        }
    }
    SUBCASE("variable roof, enumeration routes") {
        const SuspensionFlow flow = step_roof_full2(std::sqrt(2.0));
        const double h = susp::flow_entropy(flow);
        for (const double s : {h + 0.1, h + 0.5}) {
            const auto a = susp::zeta(flow, s, 9.0).value;
            const auto b = susp::zeta_euler(flow, s, 9.0);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        }
    }
}

TEST_CASE("primitive orbit enumeration by period") {
    const SuspensionFlow flow = unit_full2();
    const auto orbits = susp::primitive_orbits_up_to(flow, 3.0);
    // primitive orbits with word length <= 3 on the full 2-shift:
    // {0}, {1}, {01}, {001}, {011}
    REQUIRE(orbits.size() == 5);
    CHECK(orbits[0].first.word == Word{0});
    CHECK(orbits[0].second == doctest::Approx(1.0));
    CHECK(orbits[4].second == doctest::Approx(3.0));
}

TEST_CASE("weak mixing test") {
    SUBCASE("integer periods") {
        const std::vector<double> periods{2, 3, 5};
        const auto c = susp::weak_mixing_test(periods, 1e-9);
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("common factor two") {
        const std::vector<double> periods{2, 4, 6};
        const auto c = susp::weak_mixing_test(periods, 1e-9);
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("irrational ratio certifies weak mixing") {
        const std::vector<double> periods{1.0, std::sqrt(2.0)};
        CHECK_FALSE(susp::weak_mixing_test(periods, 1e-9).has_value());
    }
    SUBCASE("rational non-integer common divisor") {
        const std::vector<double> periods{1.0, 1.5};
        const auto c = susp::weak_mixing_test(periods, 1e-9);
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("constant-roof orbit periods all lie on the lattice") {
        const TransitionMatrix a = TransitionMatrix::full_shift(2);
        const double c0 = 0.75;
        const SuspensionFlow flow(a, RoofFunction::constant(a, c0));
        std::vector<double> periods;
        for (const auto& [orbit, period] : susp::primitive_orbits_up_to(flow, 6.0)) {
            periods.push_back(period);
            const double m = std::round(period / c0);
            CHECK(std::abs(period - m * c0) <= 1e-12);
        }
        const auto c = susp::weak_mixing_test(periods, 1e-9);
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(c0).epsilon(1e-12));
    }
}

TEST_CASE("flow measure") {
    const SuspensionFlow flow = unit_full2();
    const auto mu = susp::flow_measure(flow, LocallyConstantPotential::zero(flow.base));
    CHECK(mu.roof_integral == doctest::Approx(1.0));
    CHECK(mu.cell_mass({0}, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

    double total = 0;
    for (const Word& w : flow.base.words(1)) total += mu.cell_mass(w, 0.0, 1.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    const TransitionMatrix golden = TransitionMatrix::golden_mean();
    const SuspensionFlow gflow(golden, RoofFunction::constant(golden, 1.0));
    const auto gm = susp::flow_measure(gflow, LocallyConstantPotential::zero(golden));
    const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double p0 = kGolden * kGolden / (1.0 + kGolden * kGolden);
    CHECK(gm.cell_mass({0}, 0.0, 0.5) == doctest::Approx(p0 / 2).epsilon(1e-12));

    CHECK_THROWS_AS(mu.cell_mass({0}, 0.0, 1.5), Error);
}
