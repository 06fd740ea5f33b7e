#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "symflow/graph_sections.hpp"
#include "symflow/suspension.hpp"

namespace symflow::coding {

// Both backends expose the same capability surface: a point type, the flow,
// a distance, section membership, and a Poincare map over a section family.
// The graph backend is exact; the hyperbolic backend is sampled.
template <typename B>
concept FlowBackend = requires(const B& backend, const typename B::Point& p, double t) {
    { backend.flow_point(p, t) } -> std::convertible_to<typename B::Point>;
    { backend.distance(p, p) } -> std::convertible_to<double>;
};

struct ConditionReport {
    bool pass = false;
    double worst = 0;   // worst observed quantity for the condition
    double bound = 0;   // the bound it was compared against
    std::string detail;
};

struct ProperFamilyReport {
    ConditionReport diameter;   // diam(D_i) < alpha, B_i inside D_i
    ConditionReport coverage;   // every point reaches some Int B_i within alpha
    ConditionReport separation; // forward and backward 4*alpha visits exclude each other
    bool pass() const { return diameter.pass && coverage.pass && separation.pass; }
};

struct PairWitness {
    int from = -1;
    int to = -1;
    std::string detail;
};

struct PreMarkovReport {
    bool pass = false;
    int pairs_checked = 0;
    std::vector<PairWitness> violations;
};

struct MarkovReport {
    bool pass = false;
    int sections_checked = 0;
    std::vector<PairWitness> violations;
};

struct Transition {
    int from = 0;
    int to = 0;
    Rational return_time;
};

// Symbolic coding of the graph flow over a section family: the subshift on
// section indices, the return-time roof, and the projection back to phase
// space.
struct GraphCoding {
    graph::GraphSectionFamily family;
    sft::TransitionMatrix sigma;
    std::vector<Transition> transitions;
    std::map<std::pair<int, int>, Rational> roof;

    // suspension with the return-time roof (depth 2 over section indices)
    susp::SuspensionFlow coded_suspension() const;

    // phase point of the k-th symbol of a periodic index cycle
    graph::GraphPoint project_cycle(const std::vector<int>& cycle, int k) const;
};

// ---- graph backend (exact) ----

ProperFamilyReport check_proper_family(const graph::GraphSectionFamily& family);
PreMarkovReport check_pre_markov(const graph::GraphSectionFamily& family);
MarkovReport check_markov_property(const graph::GraphSectionFamily& family);
GraphCoding build_sigma(const graph::GraphSectionFamily& family);

struct SemiConjugacyReport {
    double max_conjugation_error = 0; // distance(pi(f_t x), phi_t(pi x))
    double max_shadowing_error = 0;   // surjectivity: coded orbit shadowing a phase point
    int max_preimage_multiplicity = 0;
    int samples = 0;
    bool pass = false;
};

SemiConjugacyReport check_semiconjugacy(const GraphCoding& coding, int samples, double horizon,
                                        std::uint64_t seed);

struct RegularityReport {
    double return_time_deviation = 0; // worst in-cylinder return-time spread (0 = locally constant)
    double return_exponent = 1;       // fitted regularity exponent of the return time
    double projection_exponent = 1;   // fitted regularity exponent of the projections
    double projection_constant = 0;
    bool pass = false;
    std::string detail;
};

RegularityReport regularity_report(const GraphCoding& coding, int samples, std::uint64_t seed);

// Itinerary of one full period of a periodic phase point, starting from its
// first section hit: section indices and the exact return times.
std::vector<Transition> itinerary(const GraphCoding& coding, const graph::GraphPoint& start);

// Periods of the primitive coded orbits with period <= l_max, verified
// orbit-by-orbit against the closed geodesics they project to.
std::vector<Rational> coded_orbit_periods_up_to(const GraphCoding& coding, const Rational& l_max);

} // namespace symflow::coding
