#include "symflow/metric_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace symflow::graph {

MetricGraph::MetricGraph(int vertex_count, std::vector<EdgeSpec> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
    if (vertex_count_ < 1) throw Error("metric graph: need at least one vertex");
    if (edges_.empty()) throw Error("metric graph: need at least one edge");
    degrees_.assign(vertex_count_, 0);
    for (const EdgeSpec& e : edges_) {
        if (e.u < 0 || e.u >= vertex_count_ || e.v < 0 || e.v >= vertex_count_)
            throw Error("metric graph: edge endpoint out of range");
        if (!e.length.is_positive()) throw Error("metric graph: edge lengths must be positive");
        degrees_[e.u] += 1;
        degrees_[e.v] += 1;
    }
    // connectivity over undirected edges
    std::vector<bool> seen(vertex_count_, false);
    std::queue<int> q;
    q.push(edges_[0].u);
    seen[edges_[0].u] = true;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const EdgeSpec& e : edges_) {
            for (const int w : {e.u == u ? e.v : -1, e.v == u ? e.u : -1})
                if (w >= 0 && !seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
        }
    }
    for (int v = 0; v < vertex_count_; ++v)
        if (!seen[v]) throw Error("metric graph: not connected");

    succ_.resize(directed_count());
    for (int de = 0; de < directed_count(); ++de)
        for (int df = 0; df < directed_count(); ++df)
            if (head(de) == tail(df) && df != reverse(de)) succ_[de].push_back(df);
}

MetricGraph MetricGraph::rose(const std::vector<Rational>& petal_lengths) {
    std::vector<EdgeSpec> edges;
    for (const Rational& l : petal_lengths) edges.push_back({0, 0, l});
    return MetricGraph(1, std::move(edges));
}

MetricGraph MetricGraph::theta(const std::vector<Rational>& lengths) {
    if (lengths.size() != 3) throw Error("theta graph: exactly three parallel edges");
    std::vector<EdgeSpec> edges;
    for (const Rational& l : lengths) edges.push_back({0, 1, l});
    return MetricGraph(2, std::move(edges));
}

MetricGraph MetricGraph::parse(std::istream& in) {
    std::string keyword;
    int n = 0;
    if (!(in >> keyword >> n) || keyword != "vertices")
        throw ParseError("graph file: expected 'vertices N'");
    std::vector<EdgeSpec> edges;
    while (in >> keyword) {
        if (keyword != "edge") throw ParseError("graph file: expected 'edge u v length'");
        int u = 0, v = 0;
        std::string len;
        if (!(in >> u >> v >> len)) throw ParseError("graph file: malformed edge line");
        edges.push_back({u, v, Rational::parse(len)});
    }
    return MetricGraph(n, std::move(edges));
}

MetricGraph MetricGraph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return parse(in);
}

std::string MetricGraph::to_text() const {
    std::ostringstream out;
    out << "vertices " << vertex_count_ << "\n";
    for (const EdgeSpec& e : edges_) out << "edge " << e.u << " " << e.v << " " << e.length.str() << "\n";
    return out.str();
}

Rational MetricGraph::min_length() const {
    Rational m = edges_[0].length;
    for (const EdgeSpec& e : edges_)
        if (e.length < m) m = e.length;
    return m;
}

void MetricGraph::require_min_degree_three() const {
    for (int v = 0; v < vertex_count_; ++v)
        if (degrees_[v] < 3)
            throw DegreeTooLowError("vertex " + std::to_string(v) + " has degree " +
                                    std::to_string(degrees_[v]) + " < 3");
}

sft::TransitionMatrix edge_shift(const MetricGraph& g) {
    g.require_min_degree_three();
    const int n = g.directed_count();
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (int de = 0; de < n; ++de)
        for (const int df : g.successors(de)) rows[de][df] = 1;
    const sft::TransitionMatrix matrix(rows);
    if (!sft::is_irreducible(matrix)) throw NotIrreducibleError("edge shift is not irreducible");
    return matrix;
}

susp::SuspensionFlow code_flow(const MetricGraph& g) {
    const sft::TransitionMatrix base = edge_shift(g);
    std::map<sft::Word, double> table;
    for (int de = 0; de < g.directed_count(); ++de) table[{de}] = g.length(de).to_double();
    susp::RoofFunction roof(base, thermo::LocallyConstantPotential(base, 1, std::move(table)));
    return susp::SuspensionFlow(base, std::move(roof));
}

std::vector<ClosedGeodesic> closed_geodesics(const MetricGraph& g, const Rational& l_max) {
    g.require_min_degree_three();
    if (!l_max.is_positive()) throw Error("closed_geodesics: l_max must be positive");
    const sft::TransitionMatrix base = edge_shift(g);
    std::vector<ClosedGeodesic> out;
    sft::Word current;
    Rational current_length;
    std::uint64_t nodes = 0;
    auto dfs = [&](auto&& self) -> void {
        if (++nodes > 100000000) throw Error("closed_geodesics: enumeration budget exhausted");
        if (!current.empty() && g.head(current.back()) == g.tail(current.front()) &&
            current.back() != MetricGraph::reverse(current.front()) && sft::is_primitive(current) &&
            current == sft::canonical_rotation(current)) {
            out.push_back({sft::PeriodicOrbit(base, current), current_length});
        }
        const int last = current.empty() ? -1 : current.back();
        for (int de = 0; de < g.directed_count(); ++de) {
            if (last >= 0) {
                if (g.head(last) != g.tail(de) || de == MetricGraph::reverse(last)) continue;
            }
            const Rational next_length = current_length + g.length(de);
            if (l_max < next_length) continue;
            current.push_back(de);
            current_length = next_length;
            self(self);
            current.pop_back();
            current_length -= g.length(de);
        }
    };
    dfs(dfs);
    std::sort(out.begin(), out.end(), [](const ClosedGeodesic& a, const ClosedGeodesic& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.orbit.word < b.orbit.word;
    });
    return out;
}

Rational systole(const MetricGraph& g) {
    Rational bound = g.min_length() * Rational(2);
    Rational total(0);
    for (int e = 0; e < g.edge_count(); ++e) total += g.edge(e).length;
    const Rational cap = total * Rational(2);
    while (true) {
        const auto found = closed_geodesics(g, bound);
        if (!found.empty()) return found.front().length;
        if (cap < bound) throw Error("systole: no closed geodesic found");
        bound *= Rational(2);
    }
}

std::optional<double> arithmetic_check(const MetricGraph& g) {
    std::vector<double> lengths;
    for (int e = 0; e < g.edge_count(); ++e) lengths.push_back(g.edge(e).length.to_double());
    if (lengths.size() == 1) lengths.push_back(lengths[0]); // gcd of a single length is itself
    const auto c = susp::weak_mixing_test(lengths, 1e-9);
    if (!c) return std::nullopt;
    // every closed geodesic length up to 10c must lie on the same lattice
    const Rational l_max = Rational::parse("10") * Rational(static_cast<std::int64_t>(std::llround(*c * 1e9)), 1000000000);
    for (const auto& geo : closed_geodesics(g, l_max)) {
        const double len = geo.length.to_double();
        const double m = std::round(len / *c);
        if (std::abs(len - m * *c) > 1e-9)
            throw Error("arithmetic_check: closed geodesic off the length lattice");
    }
    return c;
}

BowenMargulis bowen_margulis(const MetricGraph& g) {
    for (int e = 1; e < g.edge_count(); ++e)
        if (!(g.edge(e).length == g.edge(0).length))
            throw UnequalLengthsError(
                "bowen_margulis: edge lengths differ; use flow_measure on the coded flow instead");
    const susp::SuspensionFlow flow = code_flow(g);
    susp::FlowMeasure measure =
        susp::flow_measure(flow, thermo::LocallyConstantPotential::zero(flow.base));
    const double entropy = susp::flow_entropy(flow);
    return BowenMargulis{std::move(measure), entropy};
}

} // namespace symflow::graph
