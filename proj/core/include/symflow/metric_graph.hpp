#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symflow/rational.hpp"
#include "symflow/sft.hpp"
#include "symflow/suspension.hpp"

namespace symflow::graph {

struct EdgeSpec {
    int u = 0;
    int v = 0;
    Rational length;
};

// Compact metric graph with positive edge lengths. Multi-edges and loops are
// allowed. Directed edge ids are 2e (u -> v) and 2e+1 (v -> u); reversal is
// id ^ 1. Edge lengths are exact rationals: the text input format can only
// express rationals, and keeping them exact makes flow arithmetic exact.
class MetricGraph {
  public:
    MetricGraph(int vertex_count, std::vector<EdgeSpec> edges);

    static MetricGraph rose(const std::vector<Rational>& petal_lengths);
    static MetricGraph theta(const std::vector<Rational>& lengths); // 2 vertices, 3 parallel edges

    // Text format: line "vertices N", then lines "edge u v length".
    static MetricGraph parse(std::istream& in);
    static MetricGraph load(const std::string& path);
    std::string to_text() const;

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int directed_count() const { return 2 * edge_count(); }
    const EdgeSpec& edge(int e) const { return edges_[e]; }
    int degree(int v) const { return degrees_[v]; }

    int tail(int de) const { return (de & 1) ? edges_[de >> 1].v : edges_[de >> 1].u; }
    int head(int de) const { return (de & 1) ? edges_[de >> 1].u : edges_[de >> 1].v; }
    static int reverse(int de) { return de ^ 1; }
    const Rational& length(int de) const { return edges_[de >> 1].length; }
    Rational min_length() const;

    // directed edges f with head(de) = tail(f), f != reverse(de)
    const std::vector<int>& successors(int de) const { return succ_[de]; }

    void require_min_degree_three() const; // throws DegreeTooLowError

  private:
    int vertex_count_ = 0;
    std::vector<EdgeSpec> edges_;
    std::vector<int> degrees_;
    std::vector<std::vector<int>> succ_;
};

// Non-backtracking directed-edge shift; states are directed edges.
sft::TransitionMatrix edge_shift(const MetricGraph& g);

// The geodesic flow as a suspension: base = edge shift, roof(e) = length(e).
susp::SuspensionFlow code_flow(const MetricGraph& g);

struct ClosedGeodesic {
    sft::PeriodicOrbit orbit; // cyclic word of directed edges
    Rational length;
};

// All primitive non-backtracking closed edge paths of length <= l_max,
// sorted by (length, word).
std::vector<ClosedGeodesic> closed_geodesics(const MetricGraph& g, const Rational& l_max);

// Length of the shortest closed geodesic.
Rational systole(const MetricGraph& g);

// Largest c with every edge length in c * Z within 1e-9; the result is
// cross-checked against closed geodesic lengths up to 10c.
std::optional<double> arithmetic_check(const MetricGraph& g);

struct BowenMargulis {
    susp::FlowMeasure measure; // Parry measure x normalized Lebesgue
    double entropy = 0;        // log lambda / c
};

// Measure of maximal entropy in the equal-lengths (product) case.
BowenMargulis bowen_margulis(const MetricGraph& g);

} // namespace symflow::graph
