#include "symflow/graph_sections.hpp"

#include <algorithm>
#include <cmath>

namespace symflow::graph {

namespace {

void validate_path(const MetricGraph& g, const std::vector<int>& edges, bool cyclic) {
    if (edges.empty()) throw Error("graph point: empty edge path");
    for (const int de : edges)
        if (de < 0 || de >= g.directed_count()) throw Error("graph point: bad directed edge id");
    const std::size_t n = edges.size();
    const std::size_t last = cyclic ? n : n - 1;
    for (std::size_t i = 0; i < last; ++i) {
        const int a = edges[i];
        const int b = edges[(i + 1) % n];
        if (g.head(a) != g.tail(b) || b == MetricGraph::reverse(a))
            throw InadmissibleWordError("graph point: path is not a non-backtracking edge path");
    }
}

} // namespace

GraphPoint periodic_path_point(const MetricGraph& g, std::vector<int> cycle, int cursor,
                               Rational position) {
    validate_path(g, cycle, true);
    GraphPoint p;
    p.periodic = true;
    p.edges = std::move(cycle);
    p.cursor = ((cursor % static_cast<int>(p.edges.size())) + static_cast<int>(p.edges.size())) %
               static_cast<int>(p.edges.size());
    p.position = Rational(0);
    if (position.is_negative()) throw Error("graph point: negative position");
    return flow(g, std::move(p), position);
}

GraphPoint window_path_point(const MetricGraph& g, std::vector<int> window, int cursor,
                             Rational position) {
    validate_path(g, window, false);
    if (cursor < 0 || cursor >= static_cast<int>(window.size()))
        throw Error("graph point: cursor outside window");
    GraphPoint p;
    p.periodic = false;
    p.edges = std::move(window);
    p.cursor = cursor;
    p.position = Rational(0);
    if (position.is_negative()) throw Error("graph point: negative position");
    return flow(g, std::move(p), position);
}

int edge_at(const GraphPoint& p, int offset) {
    const int n = static_cast<int>(p.edges.size());
    int idx = p.cursor + offset;
    if (p.periodic) return p.edges[((idx % n) + n) % n];
    if (idx < 0 || idx >= n) throw WindowExhaustedError("graph point: window exhausted");
    return p.edges[idx];
}

GraphPoint flow(const MetricGraph& g, GraphPoint p, Rational time) {
    Rational total = p.position + time;
    int steps = 0;
    if (!total.is_negative()) {
        while (true) {
            const Rational len = g.length(edge_at(p, steps));
            if (total < len) break;
            total -= len;
            ++steps;
        }
    } else {
        while (total.is_negative()) {
            --steps;
            total += g.length(edge_at(p, steps));
        }
    }
    const int n = static_cast<int>(p.edges.size());
    p.cursor = p.periodic ? (((p.cursor + steps) % n) + n) % n : p.cursor + steps;
    p.position = total;
    return p;
}

namespace {

// forward/backward agreement arcs, measured from the tail of the shared
// current edge; capped once the contribution is below double precision
void agreement_arcs(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y, double* back,
                    double* fwd) {
    const double cap = 40.0;
    double b = 0;
    for (int k = 1;; ++k) {
        int ex, ey;
        try {
            ex = edge_at(x, -k);
            ey = edge_at(y, -k);
        } catch (const WindowExhaustedError&) {
            break; // treat the unknown part as agreeing; contributions are capped anyway
        }
        if (ex != ey) break;
        b += g.length(ex).to_double();
        if (b > cap) break;
    }
    double f = g.length(edge_at(x, 0)).to_double();
    for (int k = 1;; ++k) {
        int ex, ey;
        try {
            ex = edge_at(x, k);
            ey = edge_at(y, k);
        } catch (const WindowExhaustedError&) {
            break;
        }
        if (ex != ey) break;
        f += g.length(ex).to_double();
        if (f > cap) break;
    }
    *back = b;
    *fwd = f;
}

} // namespace

double flow_space_distance(const MetricGraph& g, const GraphPoint& x, const GraphPoint& y) {
    if (x == y) return 0.0;
    if (edge_at(x, 0) != edge_at(y, 0))
        throw Error("flow_space_distance: points must share their current directed edge");
    double back = 0, fwd = 0;
    agreement_arcs(g, x, y, &back, &fwd);
    const double ux = x.position.to_double();
    const double uy = y.position.to_double();
    const double delta = std::abs(ux - uy);
    const double t2 = fwd - std::min(ux, uy);    // both points past the forward split
    const double t1 = back + std::max(ux, uy);   // both points past the backward split
    return delta + 0.5 * (std::exp(-2.0 * t2) + std::exp(-2.0 * t1));
}

bool section_contains(const GraphSection& s, const GraphPoint& p) {
    if (edge_at(p, 0) != s.edge || !(p.position == s.position)) return false;
    try {
        for (std::size_t k = 0; k < s.past.size(); ++k)
            if (edge_at(p, -static_cast<int>(k) - 1) != s.past[k]) return false;
        for (std::size_t k = 0; k < s.future.size(); ++k)
            if (edge_at(p, static_cast<int>(k) + 1) != s.future[k]) return false;
    } catch (const WindowExhaustedError&) {
        return false;
    }
    return true;
}

double section_diameter(const MetricGraph& g, const GraphSection& s) {
    // worst pair diverges immediately past the pinned window on both sides
    double back = s.position.to_double();
    for (const int de : s.past) back += g.length(de).to_double();
    double fwd = (g.length(s.edge) - s.position).to_double();
    for (const int de : s.future) fwd += g.length(de).to_double();
    return 0.5 * (std::exp(-2.0 * back) + std::exp(-2.0 * fwd));
}

void GraphSectionFamily::rebuild_index() {
    by_edge.assign(graph.directed_count(), {});
    for (std::size_t i = 0; i < sections.size(); ++i)
        by_edge[sections[i].b.edge].emplace_back(sections[i].b.position, static_cast<int>(i));
    for (auto& entries : by_edge) std::sort(entries.begin(), entries.end());
}

namespace {

std::vector<std::vector<int>> future_words(const MetricGraph& g, int edge, int depth) {
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    auto dfs = [&](auto&& self, int from) -> void {
        if (static_cast<int>(current.size()) == depth) {
            out.push_back(current);
            return;
        }
        for (const int de : g.successors(from)) {
            current.push_back(de);
            self(self, de);
            current.pop_back();
        }
    };
    dfs(dfs, edge);
    return out;
}

std::vector<std::vector<int>> past_words(const MetricGraph& g, int edge, int depth) {
    std::vector<std::vector<int>> out;
    std::vector<int> current; // nearest-first
    auto dfs = [&](auto&& self, int toward) -> void {
        if (static_cast<int>(current.size()) == depth) {
            out.push_back(current);
            return;
        }
        for (int de = 0; de < g.directed_count(); ++de) {
            bool ok = false;
            for (const int f : g.successors(de)) ok = ok || f == toward;
            if (!ok) continue;
            current.push_back(de);
            self(self, de);
            current.pop_back();
        }
    };
    dfs(dfs, edge);
    return out;
}

} // namespace

GraphSectionFamily build_sections(const MetricGraph& g, const Rational& alpha) {
    g.require_min_degree_three();
    if (!alpha.is_positive()) throw Error("build_sections: alpha must be positive");
    const Rational sys = systole(g);
    if (!(alpha * Rational(8) < sys))
        throw AlphaTooLargeError("build_sections: alpha must be below systole/8 = " +
                                 (sys / Rational(8)).str());

    const Rational min_len = g.min_length();
    // pin margin guaranteeing the itinerary is determined for arcs up to 3 alpha
    const int margin = static_cast<int>(Rational::floor_div(alpha * Rational(3), min_len)) + 1;

    // per-edge section counts and spacings
    std::vector<std::int64_t> counts(g.edge_count());
    Rational min_spacing;
    bool first = true;
    for (int e = 0; e < g.edge_count(); ++e) {
        const Rational len = g.edge(e).length;
        std::int64_t m = Rational::floor_div(len, alpha);
        if (!(Rational(m) * alpha == len)) ++m;
        counts[e] = std::max<std::int64_t>(m, 1);
        const Rational spacing = len / Rational(counts[e]);
        if (first || spacing < min_spacing) {
            min_spacing = spacing;
            first = false;
        }
    }

    // coarse pin depth from the exact worst-case diameter bound
    const double alpha_d = alpha.to_double();
    const double lmin_d = min_len.to_double();
    int depth = 0;
    for (;; ++depth) {
        if (depth > 12) throw Error("build_sections: cannot reach diameter < alpha with depth <= 12");
        double worst = 0;
        for (int e = 0; e < g.edge_count(); ++e) {
            const double len = g.edge(e).length.to_double();
            const double u_min = len / (2.0 * static_cast<double>(counts[e]));
            const double lo = u_min + depth * lmin_d;
            const double hi = (len - u_min) + depth * lmin_d;
            worst = std::max(worst, 0.5 * (std::exp(-2 * lo) + std::exp(-2 * hi)));
        }
        if (worst < alpha_d) break;
    }

    GraphSectionFamily family{g, alpha, depth, depth, margin, {}, {}};
    const int deep = depth + margin;

    for (int de = 0; de < g.directed_count(); ++de) {
        const Rational len = g.length(de);
        const std::int64_t m = counts[de >> 1];
        const Rational spacing = len / Rational(m);
        const auto pasts = past_words(g, de, deep);
        const auto futures = future_words(g, de, deep);
        const std::int64_t combos = static_cast<std::int64_t>(pasts.size() * futures.size());
        // distinct tiny shifts separate sections whose coarse pins coincide
        const Rational delta = min_spacing / (Rational(4) * Rational(combos) * Rational(1 << 20));
        for (std::int64_t j = 1; j <= m; ++j) {
            const Rational base_pos = spacing * Rational(2 * j - 1) / Rational(2);
            std::int64_t k = 0;
            for (const auto& past : pasts) {
                for (const auto& future : futures) {
                    const Rational pos = base_pos + delta * Rational(k);
                    GraphSection b{de, pos, past, future};
                    GraphSection d{de, pos,
                                   std::vector<int>(past.begin(), past.begin() + depth),
                                   std::vector<int>(future.begin(), future.begin() + depth)};
                    family.sections.push_back({std::move(b), std::move(d)});
                    ++k;
                }
            }
        }
    }
    family.rebuild_index();
    return family;
}

PoincareHit poincare(const GraphSectionFamily& family, const GraphPoint& p) {
    const MetricGraph& g = family.graph;
    Rational elapsed(0);
    Rational pos = p.position;
    int shift = 0;
    const int max_crossings = static_cast<int>(Rational::floor_div(family.alpha * Rational(8),
                                                                   g.min_length())) + 2;
    for (int crossing = 0; crossing <= max_crossings; ++crossing) {
        const int edge = edge_at(p, shift);
        for (const auto& [position, index] : family.by_edge[edge]) {
            if (!(pos < position)) continue;
            const GraphSection& b = family.sections[index].b;
            bool match = true;
            try {
                for (std::size_t k = 0; k < b.past.size() && match; ++k)
                    if (edge_at(p, shift - static_cast<int>(k) - 1) != b.past[k]) match = false;
                for (std::size_t k = 0; k < b.future.size() && match; ++k)
                    if (edge_at(p, shift + static_cast<int>(k) + 1) != b.future[k]) match = false;
            } catch (const WindowExhaustedError&) {
                throw WindowExhaustedError("poincare: window too short to identify the next section");
            }
            if (match) return PoincareHit{index, elapsed + (position - pos)};
        }
        elapsed += g.length(edge) - pos;
        pos = Rational(0);
        ++shift;
    }
    throw NoReturnError("poincare: no section hit within the search horizon");
}

} // namespace symflow::graph
