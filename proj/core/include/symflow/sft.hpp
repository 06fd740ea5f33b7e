#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symflow/transition_matrix.hpp"

namespace symflow::sft {

// Primitive cyclic word in canonical (lexicographically minimal) rotation.
struct PeriodicOrbit {
    Word word;

    PeriodicOrbit(const TransitionMatrix& matrix, Word w);

    int length() const { return static_cast<int>(word.size()); }
    friend bool operator==(const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.word == b.word; }
    friend bool operator<(const PeriodicOrbit& a, const PeriodicOrbit& b) {
        return a.word.size() != b.word.size() ? a.word.size() < b.word.size() : a.word < b.word;
    }
};

Word canonical_rotation(const Word& w);
bool is_primitive(const Word& w);

bool is_irreducible(const TransitionMatrix& matrix);

// gcd of the lengths of all cycles; 1 means aperiodic. Requires irreducibility.
int period(const TransitionMatrix& matrix);

// Number of admissible words of length n (sum of entries of A^{n-1}),
// computed in exact integer arithmetic.
std::uint64_t count_words(const TransitionMatrix& matrix, int n);

// trace(A^n) in exact integer arithmetic; n <= 32.
std::uint64_t periodic_point_count(const TransitionMatrix& matrix, int n);

struct PeriodicCensus {
    std::uint64_t point_count = 0;            // all points of period n = trace(A^n)
    std::vector<PeriodicOrbit> primitive;     // least period exactly n, sorted
};

PeriodicCensus enumerate_periodic(const TransitionMatrix& matrix, int n);

// Count of primitive orbits of least period exactly n via Moebius inversion
// of trace(A^d) over divisors d | n. Independent of the explicit enumeration.
std::uint64_t primitive_orbit_count(const TransitionMatrix& matrix, int n);

// Sparse nonnegative matrix for transfer-operator style computations.
struct SparseMatrix {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;

    static SparseMatrix from_transition(const TransitionMatrix& matrix);
    std::vector<double> apply(std::span<const double> v) const;
    std::vector<double> apply_transpose(std::span<const double> v) const;
};

struct PerronData {
    double value = 0;                 // dominant eigenvalue
    std::vector<double> left;         // l M = value * l, sum l_i r_i = 1
    std::vector<double> right;        // M r = value * r, sum r_i = 1
    double residual = 0;              // max of the two infinity-norm residuals
    std::uint64_t iterations = 0;
};

struct PerronOptions {
    double tol = 1e-12;               // required residual bound
    std::uint64_t max_iterations = 1000000;
    bool require_irreducible = true;
};

PerronData perron(const SparseMatrix& m, const PerronOptions& opts = {});
PerronData perron(const TransitionMatrix& matrix, const PerronOptions& opts = {});

struct SequenceDistance {
    double value = 0;           // 2^{-l}, or 0 when the windows agree everywhere
    bool resolved = true;       // false when equal on the full window
    double unresolved_bound = 0; // upper bound 2^{-(radius+1)} on the true distance
};

// Windows are symbol blocks of equal odd length, centered at index 0.
SequenceDistance sequence_distance(std::span<const Symbol> x, std::span<const Symbol> y);

} // namespace symflow::sft
