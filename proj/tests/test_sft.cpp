#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "symflow/sft.hpp"
#include "oracles.hpp"

using namespace symflow;
using sft::TransitionMatrix;
using sft::Word;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

oracles::Mat to_oracle(const TransitionMatrix& a) {
    oracles::Mat m(a.size(), std::vector<std::uint64_t>(a.size(), 0));
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) m[i][j] = a.allows(i, j) ? 1 : 0;
    return m;
}

// directed-edge shift of the rose with two petals: 4 states, each row sums 3
TransitionMatrix rose2_edge_matrix() {
    return TransitionMatrix({{1, 0, 1, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}, {1, 1, 0, 1}});
}

} // namespace

TEST_CASE("validation") {
    CHECK(TransitionMatrix::full_shift(2).size() == 2);
    CHECK(TransitionMatrix::golden_mean().size() == 2);
    CHECK_THROWS_AS(TransitionMatrix({{0, 0}, {1, 1}}), EmptyRowOrColumnError);
    CHECK_THROWS_AS(TransitionMatrix({{1, 0}, {1, 0}}), EmptyRowOrColumnError);
    CHECK_THROWS_AS(TransitionMatrix({{1, 1}}), NonSquareError);
    CHECK_THROWS_AS(TransitionMatrix({{1, 2}, {1, 1}}), Error);
}

TEST_CASE("matrix text round trip") {
    const TransitionMatrix a = TransitionMatrix::golden_mean();
    std::istringstream in(a.to_text());
    CHECK(TransitionMatrix::parse(in) == a);

    std::istringstream bad("2\n1 1\n1");
    CHECK_THROWS_AS(TransitionMatrix::parse(bad), ParseError);
}

TEST_CASE("irreducibility") {
    CHECK(sft::is_irreducible(TransitionMatrix::golden_mean()));
    CHECK(sft::is_irreducible(TransitionMatrix::full_shift(2)));
    CHECK_FALSE(sft::is_irreducible(TransitionMatrix({{1, 0}, {0, 1}})));
}

TEST_CASE("period") {
    CHECK(sft::period(TransitionMatrix::golden_mean()) == 1);
    CHECK(sft::period(TransitionMatrix({{0, 1}, {1, 0}})) == 2);
    CHECK(sft::period(TransitionMatrix::full_shift(2)) == 1);
    CHECK_THROWS_AS(sft::period(TransitionMatrix({{1, 0}, {0, 1}})), NotIrreducibleError);
}

TEST_CASE("word counts") {
    const TransitionMatrix full2 = TransitionMatrix::full_shift(2);
    const TransitionMatrix golden = TransitionMatrix::golden_mean();
    CHECK(sft::count_words(full2, 3) == 8);
    CHECK(sft::count_words(golden, 1) == 2);

    // independent oracle: enumerate {0,1}^3 and drop words containing "11"
    int brute = 0;
    for (int bits = 0; bits < 8; ++bits) {
        const bool has11 = ((bits & 3) == 3) || (((bits >> 1) & 3) == 3);
        if (!has11) ++brute;
    }
    CHECK(brute == 5);
    CHECK(sft::count_words(golden, 3) == static_cast<std::uint64_t>(brute));
}

TEST_CASE("count_words equals explicit enumeration up to length 12") {
    for (const auto& a : {TransitionMatrix::full_shift(2), TransitionMatrix::golden_mean(), rose2_edge_matrix()}) {
        for (int n = 1; n <= 12; ++n) {
            if (a.size() > 2 && n > 9) break; // keep the rose case quick
            CHECK(sft::count_words(a, n) == a.words(n).size());
        }
    }
}

TEST_CASE("periodic orbits") {
    const TransitionMatrix golden = TransitionMatrix::golden_mean();
    const TransitionMatrix full2 = TransitionMatrix::full_shift(2);

    auto census = sft::enumerate_periodic(golden, 2);
    CHECK(census.point_count == 3); // trace A^2
    REQUIRE(census.primitive.size() == 1);
    CHECK(census.primitive[0].word == Word{0, 1});

    census = sft::enumerate_periodic(full2, 1);
    CHECK(census.point_count == 2);
    REQUIRE(census.primitive.size() == 2);
    CHECK(census.primitive[0].word == Word{0});
    CHECK(census.primitive[1].word == Word{1});

    census = sft::enumerate_periodic(golden, 1);
    CHECK(census.point_count == 1);
    REQUIRE(census.primitive.size() == 1);
    CHECK(census.primitive[0].word == Word{0});
}

TEST_CASE("trace identity up to n = 10") {
    for (const auto& a : {TransitionMatrix::full_shift(2), TransitionMatrix::golden_mean(), rose2_edge_matrix()}) {
        const oracles::Mat base = to_oracle(a);
        for (int n = 1; n <= 10; ++n) {
            const auto census = sft::enumerate_periodic(a, n);
            CHECK(census.point_count == oracles::trace(oracles::mat_pow(base, n)));
        }
    }
}

TEST_CASE("period divides every realized cycle length") {
    for (const auto& a : {TransitionMatrix::golden_mean(), TransitionMatrix({{0, 1}, {1, 0}}), rose2_edge_matrix()}) {
        const int p = sft::period(a);
        const oracles::Mat base = to_oracle(a);
        for (int n = 1; n <= 12; ++n) {
            if (oracles::trace(oracles::mat_pow(base, n)) > 0) CHECK(n % p == 0);
        }
    }
}

TEST_CASE("canonical rotation and primitivity") {
    CHECK(sft::canonical_rotation({1, 0, 1}) == Word{0, 1, 1});
    CHECK(sft::is_primitive(Word{0, 1}));
    CHECK_FALSE(sft::is_primitive(Word{0, 1, 0, 1}));
    const TransitionMatrix full2 = TransitionMatrix::full_shift(2);
    CHECK_THROWS_AS(sft::PeriodicOrbit(full2, Word{0, 1, 0, 1}), Error);
    CHECK_THROWS_AS(sft::PeriodicOrbit(TransitionMatrix::golden_mean(), Word{1, 1}), InadmissibleWordError);
}

TEST_CASE("perron eigendata") {
    const auto full2 = sft::perron(TransitionMatrix::full_shift(2));
    CHECK(full2.value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(full2.right[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(full2.right[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(full2.residual <= 1e-12);

    const auto golden = sft::perron(TransitionMatrix::golden_mean());
    CHECK(golden.value == doctest::Approx(kGolden).epsilon(1e-13));
    CHECK(golden.residual <= 1e-12);

    const auto rose = sft::perron(rose2_edge_matrix());
    CHECK(rose.value == doctest::Approx(3.0).epsilon(1e-13));

    CHECK_THROWS_AS(sft::perron(TransitionMatrix({{1, 0}, {0, 1}})), NotIrreducibleError);
}

TEST_CASE("perron normalization and residuals") {
    for (const auto& a : {TransitionMatrix::full_shift(2), TransitionMatrix::golden_mean(), rose2_edge_matrix(),
                          TransitionMatrix({{0, 1}, {1, 0}})}) {
        const auto e = sft::perron(a);
        double rsum = 0, lr = 0;
        for (int i = 0; i < a.size(); ++i) {
            CHECK(e.right[i] > 0);
            CHECK(e.left[i] > 0);
            rsum += e.right[i];
            lr += e.left[i] * e.right[i];
        }
        CHECK(rsum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lr == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.residual <= 1e-12);
    }
}

TEST_CASE("sequence distance") {
    const Word a{0, 1, 0, 1, 0};
    SUBCASE("equal on full window") {
        const auto d = sft::sequence_distance(a, a);
        CHECK(d.value == 0.0);
        CHECK_FALSE(d.resolved);
        CHECK(d.unresolved_bound == doctest::Approx(std::ldexp(1.0, -3)));
    }
    SUBCASE("differ at center") {
        const Word b{0, 1, 1, 1, 0};
        const auto d = sft::sequence_distance(a, b);
        CHECK(d.resolved);
        CHECK(d.value == 1.0);
    }
    SUBCASE("agree within radius 2, differ at 3") {
        const Word x{0, 0, 0, 0, 0, 0, 0};
        const Word y{1, 0, 0, 0, 0, 0, 0};
        const auto d = sft::sequence_distance(x, y);
        CHECK(d.value == doctest::Approx(1.0 / 8.0));
    }
    SUBCASE("rejects even windows") {
        const Word x{0, 1};
        CHECK_THROWS_AS(sft::sequence_distance(x, x), Error);
    }
}
