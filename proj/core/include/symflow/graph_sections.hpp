#pragma once

#include <utility>
#include <vector>

#include "symflow/metric_graph.hpp"

namespace symflow::graph {

// Phase point of the graph geodesic flow: a non-backtracking edge path
// (periodic, or a finite window that fails loudly when exhausted) plus an
// exact position along the current directed edge.
struct GraphPoint {
    bool periodic = false;
    std::vector<int> edges;
    int cursor = 0;
    Rational position; // in [0, length(current edge))

    friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
        return a.periodic == b.periodic && a.edges == b.edges && a.cursor == b.cursor &&
               a.position == b.position;
    }
};

GraphPoint periodic_path_point(const MetricGraph& g, std::vector<int> cycle, int cursor,
                               Rational position);
GraphPoint window_path_point(const MetricGraph& g, std::vector<int> window, int cursor,
                             Rational position);

// Directed edge at signed offset k from the cursor; throws WindowExhausted
// for finite windows.
int edge_at(const GraphPoint& p, int offset);

GraphPoint flow(const MetricGraph& g, GraphPoint p, Rational time);

// Exact distance in the geodesic-space metric (integral of the pointwise
// distance against e^{-2|s|}) for two points on the same directed edge,
// computed through the aligned lift to the universal cover.
double flow_space_distance(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y);

// Cross-section of the flow: a fixed position on a directed edge refined by
// past/future edge cylinders (nearest-first).
struct GraphSection {
    int edge = 0;
    Rational position;
    std::vector<int> past;
    std::vector<int> future;
};

bool section_contains(const GraphSection& s, const GraphPoint& p);

// Exact diameter of the set of paths through the section, in the
// geodesic-space metric of the aligned lift.
double section_diameter(const MetricGraph& g, const GraphSection& s);

struct GraphSectionPair {
    GraphSection b; // fine pins: d plus `margin` extra edges each way
    GraphSection d; // coarse pins sized for diameter < alpha
};

struct GraphSectionFamily {
    MetricGraph graph;
    Rational alpha;
    int depth_past = 0;    // D past depth
    int depth_future = 0;  // D future depth
    int margin = 0;        // extra B depth per side
    std::vector<GraphSectionPair> sections;
    // per directed edge: (position, section index), sorted by position
    std::vector<std::vector<std::pair<Rational, int>>> by_edge;

    void rebuild_index();
};

// Sections on every directed edge at spacing <= alpha, cylinder-refined so
// the family passes the proper-family and pre-Markov predicates. Duplicate
// coarse sections are separated by distinct tiny flow shifts.
GraphSectionFamily build_sections(const MetricGraph& g, const Rational& alpha);

struct PoincareHit {
    int section = -1;
    Rational return_time;
};

// First section of the family hit strictly forward in time.
PoincareHit poincare(const GraphSectionFamily& family, const GraphPoint& p);

} // namespace symflow::graph
