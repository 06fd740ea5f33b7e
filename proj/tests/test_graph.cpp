#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>

#include "symflow/coding.hpp"
#include "symflow/graph_sections.hpp"
#include "symflow/metric_graph.hpp"

using namespace symflow;
using graph::MetricGraph;
using sft::Word;

namespace {

MetricGraph rose2_unit() { return MetricGraph::rose({Rational(1), Rational(1)}); }
MetricGraph theta_unit() { return MetricGraph::theta({Rational(1), Rational(1), Rational(1)}); }

} // namespace

TEST_CASE("graph validation and text io") {
    CHECK_THROWS_AS(MetricGraph(2, {{0, 0, Rational(1)}}), Error); // vertex 1 disconnected
    CHECK_THROWS_AS(MetricGraph(1, {{0, 0, Rational(0)}}), Error); // zero length

    const MetricGraph g = rose2_unit();
    std::istringstream in(g.to_text());
    const MetricGraph parsed = MetricGraph::parse(in);
    CHECK(parsed.vertex_count() == 1);
    CHECK(parsed.edge_count() == 2);
    CHECK(parsed.length(0) == Rational(1));

    std::istringstream bad("vertices 1\nedge 0 0\n");
    CHECK_THROWS_AS(MetricGraph::parse(bad), ParseError);
}

TEST_CASE("edge shift") {
    SUBCASE("rose with two petals") {
        const auto a = graph::edge_shift(rose2_unit());
        CHECK(a.size() == 4);
        for (int i = 0; i < 4; ++i) CHECK(a.successors(i).size() == 3);
        CHECK(sft::perron(a).value == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("theta graph") {
        const auto a = graph::edge_shift(theta_unit());
        CHECK(a.size() == 6);
        for (int i = 0; i < 6; ++i) CHECK(a.successors(i).size() == 2);
        CHECK(sft::perron(a).value == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("single loop is rejected") {
        const MetricGraph loop(1, {{0, 0, Rational(1)}});
        CHECK_THROWS_AS(graph::edge_shift(loop), DegreeTooLowError);
    }
    SUBCASE("every directed edge has deg(head)-1 successors") {
        const MetricGraph mixed(2, {{0, 0, Rational(1)}, {0, 1, Rational(2)}, {0, 1, Rational(1)},
                                    {1, 1, Rational(3)}});
        const auto a = graph::edge_shift(mixed);
        for (int de = 0; de < mixed.directed_count(); ++de)
            CHECK(static_cast<int>(a.successors(de).size()) == mixed.degree(mixed.head(de)) - 1);
    }
}

TEST_CASE("code_flow roofs") {
    SUBCASE("unit rose gives constant roof 1") {
        const auto flow = graph::code_flow(rose2_unit());
        double c = 0;
        CHECK(flow.roof.is_constant(&c));
        CHECK(c == doctest::Approx(1.0));
    }
    SUBCASE("theta with lengths 1,2,3 has each value twice") {
        const auto flow =
            graph::code_flow(MetricGraph::theta({Rational(1), Rational(2), Rational(3)}));
        std::map<double, int> counts;
        for (const auto& [w, v] : flow.roof.potential().table()) counts[v]++;
        CHECK(counts[1.0] == 2);
        CHECK(counts[2.0] == 2);
        CHECK(counts[3.0] == 2);
    }
    SUBCASE("rose with lengths 1 and 3/2") {
        const auto flow = graph::code_flow(MetricGraph::rose({Rational(1), Rational(3, 2)}));
        std::map<double, int> counts;
        for (const auto& [w, v] : flow.roof.potential().table()) counts[v]++;
        CHECK(counts[1.0] == 2);
        CHECK(counts[1.5] == 2);
    }
}

TEST_CASE("closed geodesics") {
    SUBCASE("rose: four directed petals of length 1") {
        const auto geos = graph::closed_geodesics(rose2_unit(), Rational(1));
        CHECK(geos.size() == 4);
        for (const auto& geo : geos) CHECK(geo.length == Rational(1));
    }
    SUBCASE("theta: nothing shorter than 2") {
        CHECK(graph::closed_geodesics(theta_unit(), Rational(3, 2)).empty());
        const auto geos = graph::closed_geodesics(theta_unit(), Rational(2));
        CHECK(geos.size() == 6); // ordered pairs of distinct edges
        for (const auto& geo : geos) CHECK(geo.length == Rational(2));
    }
    SUBCASE("lengths agree with orbit periods of the coded flow") {
        const MetricGraph g = MetricGraph::rose({Rational(1), Rational(3, 2)});
        const auto flow = graph::code_flow(g);
        const auto geos = graph::closed_geodesics(g, Rational(4));
        const auto orbits = susp::primitive_orbits_up_to(flow, 4.0);
        REQUIRE(geos.size() == orbits.size());
        for (std::size_t i = 0; i < geos.size(); ++i)
            CHECK(geos[i].length.to_double() == doctest::Approx(orbits[i].second).epsilon(1e-12));
    }
}

TEST_CASE("systole") {
    CHECK(graph::systole(rose2_unit()) == Rational(1));
    CHECK(graph::systole(theta_unit()) == Rational(2));
    CHECK(graph::systole(MetricGraph::theta({Rational(1), Rational(2), Rational(3)})) == Rational(3));
}

TEST_CASE("arithmetic check") {
    SUBCASE("unit lengths") {
        const auto c = graph::arithmetic_check(rose2_unit());
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("lengths 1 and 3/2") {
        const auto c = graph::arithmetic_check(MetricGraph::rose({Rational(1), Rational(3, 2)}));
        REQUIRE(c.has_value());
        CHECK(*c == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("irrational ratio") {
        const auto c = graph::arithmetic_check(
            MetricGraph::rose({Rational(1), Rational::parse("1.41421356237309515")}));
        CHECK_FALSE(c.has_value());
    }
}

TEST_CASE("bowen-margulis") {
    SUBCASE("rose: uniform Parry times Lebesgue, entropy log 3") {
        const auto bm = graph::bowen_margulis(rose2_unit());
        CHECK(bm.entropy == doctest::Approx(std::log(3.0)).epsilon(1e-10));
        for (const double p : bm.measure.base.stationary)
            CHECK(p == doctest::Approx(0.25).epsilon(1e-11));
        CHECK(bm.measure.cell_mass({0}, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-11));
    }
    SUBCASE("theta: entropy log 2") {
        const auto bm = graph::bowen_margulis(theta_unit());
        CHECK(bm.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    }
    SUBCASE("unequal lengths are rejected") {
        CHECK_THROWS_AS(graph::bowen_margulis(MetricGraph::rose({Rational(1), Rational(2)})),
                        UnequalLengthsError);
    }
}

TEST_CASE("graph phase points") {
    const MetricGraph g = rose2_unit();
    SUBCASE("flow wraps exactly") {
        auto p = graph::periodic_path_point(g, {0, 2}, 0, Rational(1, 2));
        const auto q = graph::flow(g, p, Rational(1, 2));
        CHECK(graph::edge_at(q, 0) == 2);
        CHECK(q.position == Rational(0));
        const auto back = graph::flow(g, q, Rational(-1, 2));
        CHECK(back.position == p.position);
        CHECK(graph::edge_at(back, 0) == 0);
    }
    SUBCASE("full period returns the point") {
        auto p = graph::periodic_path_point(g, {0, 2}, 0, Rational(1, 4));
        const auto q = graph::flow(g, p, Rational(2));
        CHECK(q == p);
    }
    SUBCASE("windows fail loudly") {
        auto p = graph::window_path_point(g, {0, 2, 1}, 1, Rational(1, 2));
        CHECK_THROWS_AS(graph::flow(g, p, Rational(4)), WindowExhaustedError);
    }
    SUBCASE("backtracking paths are rejected") {
        CHECK_THROWS_AS(graph::periodic_path_point(g, {0, 1}, 0, Rational(0)),
                        InadmissibleWordError);
    }
}

TEST_CASE("flow space distance") {
    const MetricGraph g = rose2_unit();
    SUBCASE("distance to the time-shifted point is the shift") {
        auto p = graph::periodic_path_point(g, {0, 2}, 0, Rational(1, 8));
        const auto q = graph::flow(g, p, Rational(1, 4));
        CHECK(graph::flow_space_distance(g, p, q) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("same position, diverging futures") {
        auto p = graph::periodic_path_point(g, {0, 2}, 0, Rational(1, 2));
        auto q = graph::periodic_path_point(g, {0, 3}, 0, Rational(1, 2));
        // agreement: backward splits at arc 1/2 + 0 (previous edges differ),
        // forward splits at arc 1/2 + ... wait: both paths share edge 0 only
        const double expected = 0.5 * (std::exp(-2 * 0.5) + std::exp(-2 * 0.5));
        CHECK(graph::flow_space_distance(g, p, q) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("build_sections geometry") {
    SUBCASE("rose at alpha 1/9: nine positions per directed edge, coarse depth (1,1)") {
        const auto family = graph::build_sections(rose2_unit(), Rational(1, 9));
        CHECK(family.depth_past == 1);
        CHECK(family.depth_future == 1);
        CHECK(family.margin == 1);
        // 9 positions x 3^2 past x 3^2 future pin words per directed edge
        CHECK(family.sections.size() == 4u * 9u * 81u);
        std::map<Rational, int> positions;
        for (const auto& [pos, idx] : family.by_edge[0]) positions[pos]++;
        CHECK(positions.size() == 9u * 81u);
    }
    SUBCASE("theta at alpha 0.2: five positions per directed edge") {
        const auto family = graph::build_sections(theta_unit(), Rational(1, 5));
        std::map<Rational, int> base_groups;
        CHECK(family.sections.size() % (6u * 5u) == 0);
    }
    SUBCASE("alpha at systole/8 is rejected") {
        CHECK_THROWS_AS(graph::build_sections(rose2_unit(), Rational(1, 2)), AlphaTooLargeError);
        CHECK_THROWS_AS(graph::build_sections(rose2_unit(), Rational(1, 8)), AlphaTooLargeError);
    }
    SUBCASE("poincare return times are bounded by alpha and additive") {
        const auto family = graph::build_sections(rose2_unit(), Rational(1, 9));
        const MetricGraph& g = family.graph;
        auto p = graph::periodic_path_point(g, {0, 0, 2}, 0, Rational(1, 100));
        Rational total(0);
        graph::GraphPoint cursor = p;
        for (int step = 0; step < 10; ++step) {
            const auto hit = graph::poincare(family, cursor);
            CHECK(hit.return_time.is_positive());
            CHECK(!(family.alpha * Rational(1000001, 1000000) < hit.return_time));
            total += hit.return_time;
            cursor = graph::flow(g, cursor, hit.return_time);
        }
        // time additivity: the accumulated time moves p to cursor exactly
        const auto direct = graph::flow(g, p, total);
        CHECK(direct == cursor);
    }
}

TEST_CASE("section predicates pass for built families") {
    const auto family = graph::build_sections(rose2_unit(), Rational(1, 9));
    const auto proper = coding::check_proper_family(family);
    CHECK(proper.diameter.pass);
    CHECK(proper.coverage.pass);
    CHECK(proper.separation.pass);
    const auto pre = coding::check_pre_markov(family);
    CHECK(pre.pass);
    CHECK(pre.pairs_checked > 0);
    const auto markov = coding::check_markov_property(family);
    CHECK(markov.pass);
}

TEST_CASE("constructed counterexamples fail the intended predicate") {
    const MetricGraph g = rose2_unit();
    SUBCASE("single section cannot cover") {
        graph::GraphSectionFamily family{g, Rational(1, 9), 1, 1, 1, {}, {}};
        graph::GraphSection b{0, Rational(1, 2), {0}, {0}};
        graph::GraphSection d = b;
        family.sections.push_back({b, d});
        family.rebuild_index();
        const auto report = coding::check_proper_family(family);
        CHECK_FALSE(report.coverage.pass);
    }
    SUBCASE("forward and backward meetings within 4 alpha violate separation") {
        // alpha deliberately above systole/8: two sections on one petal meet
        // in both time directions around the loop
        graph::GraphSectionFamily family{g, Rational(1, 3), 0, 0, 0, {}, {}};
        graph::GraphSection s1{0, Rational(1, 4), {}, {}};
        graph::GraphSection s2{0, Rational(3, 4), {}, {}};
        family.sections.push_back({s1, s1});
        family.sections.push_back({s2, s2});
        family.rebuild_index();
        const auto report = coding::check_proper_family(family);
        CHECK_FALSE(report.separation.pass);
    }
    SUBCASE("sections without the coarsening margin fail the pre-Markov condition") {
        // B = D with depth (1,1) pins: the partner's pins reach beyond the
        // source window at a branch right after the vertex
        const auto good = graph::build_sections(g, Rational(1, 9));
        graph::GraphSectionFamily family{g, Rational(1, 9), 1, 1, 0, {}, {}};
        std::map<std::tuple<int, Rational, std::vector<int>, std::vector<int>>, bool> seen;
        for (const auto& pair : good.sections) {
            graph::GraphSection b = pair.d; // coarse pins for both tiers
            b.position = pair.b.position;
            const auto key = std::make_tuple(b.edge, b.position, b.past, b.future);
            if (seen.count(key)) continue;
            seen[key] = true;
            family.sections.push_back({b, b});
        }
        family.rebuild_index();
        const auto report = coding::check_pre_markov(family);
        CHECK_FALSE(report.pass);
        CHECK(report.violations.size() > 0);
    }
    SUBCASE("deep targets with a shallow source break the Markov property") {
        // source sections on edge 0 lose their past pins; targets keep past
        // depth 2, so the forward hit depends on the past
        const auto good = graph::build_sections(g, Rational(1, 9));
        graph::GraphSectionFamily family = good;
        for (auto& pair : family.sections)
            if (pair.b.edge == 0) {
                pair.b.past.clear();
                pair.d.past.clear();
            }
        // deduplicate sections that became identical after dropping pins
        std::map<std::tuple<int, Rational, std::vector<int>, std::vector<int>>, bool> seen;
        graph::GraphSectionFamily pruned{g, family.alpha, 1, 1, 1, {}, {}};
        for (const auto& pair : family.sections) {
            const auto key =
                std::make_tuple(pair.b.edge, pair.b.position, pair.b.past, pair.b.future);
            if (seen.count(key)) continue;
            seen[key] = true;
            pruned.sections.push_back(pair);
        }
        pruned.rebuild_index();
        const auto report = coding::check_markov_property(pruned);
        CHECK_FALSE(report.pass);
    }
}

TEST_CASE("sigma coding on the rose") {
    const auto family = graph::build_sections(rose2_unit(), Rational(1, 10));
    const auto coding = coding::build_sigma(family);

    SUBCASE("sigma is strongly connected and the roof is within (0, alpha]") {
        CHECK(sft::is_irreducible(coding.sigma));
        for (const auto& t : coding.transitions) {
            CHECK(t.return_time.is_positive());
            CHECK(!(family.alpha * Rational(1000001, 1000000) < t.return_time));
        }
    }
    SUBCASE("entropy of the coded suspension matches the edge shift") {
        const double direct = susp::flow_entropy(graph::code_flow(rose2_unit()));
        const double coded = susp::flow_entropy(coding.coded_suspension());
        CHECK(direct == doctest::Approx(std::log(3.0)).epsilon(1e-10));
        CHECK(std::abs(coded - direct) <= 1e-9);
    }
    SUBCASE("coded orbit periods match closed geodesic lengths exactly") {
        const auto periods = coding::coded_orbit_periods_up_to(coding, Rational(4));
        const auto geos = graph::closed_geodesics(rose2_unit(), Rational(4));
        REQUIRE(periods.size() == geos.size());
        for (std::size_t i = 0; i < periods.size(); ++i) CHECK(periods[i] == geos[i].length);
    }
    SUBCASE("semiconjugacy is exact on rational data") {
        const auto report = coding::check_semiconjugacy(coding, 40, 20.0, 11);
        CHECK(report.pass);
        CHECK(report.max_conjugation_error == 0.0);
        CHECK(report.max_shadowing_error == 0.0);
        CHECK(report.max_preimage_multiplicity <= 2);
    }
    SUBCASE("return times are locally constant") {
        const auto report = coding::regularity_report(coding, 200, 5);
        CHECK(report.pass);
        CHECK(report.return_time_deviation == 0.0);
    }
}

TEST_CASE("sigma coding on the theta graph") {
    const auto family = graph::build_sections(theta_unit(), Rational(1, 5));
    const auto coding = coding::build_sigma(family);
    const double coded = susp::flow_entropy(coding.coded_suspension());
    CHECK(coded == doctest::Approx(std::log(2.0)).epsilon(1e-9));

    const auto periods = coding::coded_orbit_periods_up_to(coding, Rational(4));
    const auto geos = graph::closed_geodesics(theta_unit(), Rational(4));
    REQUIRE(periods.size() == geos.size());
    for (std::size_t i = 0; i < periods.size(); ++i) CHECK(periods[i] == geos[i].length);
}
