#include <coexscale/graphs.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace coex {

Rational positive_sector_zeta() { return Rational(6, 5); }

int LabelledGraph::add_vertex(std::string name, bool is_origin, bool is_leaf) {
    vertices.push_back({std::move(name), is_origin, false, is_leaf});
    return static_cast<int>(vertices.size()) - 1;
}

std::size_t LabelledGraph::add_edge(int tail, int head, FormalExp a, int r, bool eps_regularised,
                                    EdgeKind kind) {
    const int n = static_cast<int>(vertices.size());
    if (tail < 0 || tail >= n || head < 0 || head >= n)
        throw std::invalid_argument("add_edge: endpoint out of range");
    edges.push_back({tail, head, std::move(a), r, eps_regularised, kind});
    return edges.size() - 1;
}

std::size_t LabelledGraph::add_test_leg(int v) {
    const int o = origin_index();
    if (v < 0 || v >= static_cast<int>(vertices.size()))
        throw std::invalid_argument("add_test_leg: vertex out of range");
    if (v == o) throw std::invalid_argument("add_test_leg: the origin cannot carry a test leg");
    vertices[v].in_star_set = true;
    edges.push_back({v, o, FormalExp(0), 0, false, EdgeKind::test_function});
    return edges.size() - 1;
}

int LabelledGraph::origin_index() const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].is_origin) return static_cast<int>(i);
    throw std::invalid_argument("graph has no origin vertex");
}

std::vector<int> LabelledGraph::star_vertices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].is_origin || vertices[i].in_star_set) out.push_back(static_cast<int>(i));
    return out;
}

void LabelledGraph::validate() const {
    if (vertices.empty()) throw std::invalid_argument("validate: graph has no vertices");
    if (vertices.size() > static_cast<std::size_t>(kMaxGraphVertices))
        throw std::invalid_argument("validate: vertex count exceeds the supported maximum");

    int origins = 0;
    std::set<std::string> names;
    for (const GraphVertex& v : vertices) {
        if (v.name.empty()) throw std::invalid_argument("validate: vertex with empty name");
        if (!names.insert(v.name).second)
            throw std::invalid_argument("validate: duplicate vertex name '" + v.name + "'");
        if (v.is_origin) ++origins;
        if (v.is_leaf && (v.is_origin || v.in_star_set))
            throw std::invalid_argument("validate: leaf '" + v.name + "' cannot be origin or starred");
    }
    if (origins != 1) throw std::invalid_argument("validate: graph must have exactly one origin");
    const int origin = origin_index();

    const int n = static_cast<int>(vertices.size());
    int test_legs = 0;
    std::vector<char> has_leg(vertices.size(), 0);
    std::vector<char> negative_end(vertices.size(), 0);
    for (const GraphEdge& e : edges) {
        if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
            throw std::invalid_argument("validate: edge endpoint out of range");
        if (e.tail == e.head) throw std::invalid_argument("validate: self loop");
        if (e.kind == EdgeKind::test_function) {
            if (e.head != origin)
                throw std::invalid_argument("validate: test leg must point at the origin");
            if (!e.a.is_zero() || e.r != 0 || e.eps_regularised)
                throw std::invalid_argument("validate: test leg must carry no labels");
            has_leg[e.tail] = 1;
            ++test_legs;
        } else if (e.r < 0) {
            // Negative decorations must sit on vertex-disjoint edges: the
            // recentring argument handles one subtracted kernel per vertex.
            for (int v : {e.tail, e.head}) {
                if (negative_end[v])
                    throw std::invalid_argument("validate: two negatively decorated edges share '" +
                                                vertices[v].name + "'");
                negative_end[v] = 1;
            }
        }
    }
    if (test_legs > 2) throw std::invalid_argument("validate: more than two test legs");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].in_star_set != static_cast<bool>(has_leg[i]))
            throw std::invalid_argument("validate: star flag on '" + vertices[i].name +
                                        "' does not match its test legs");
    }
}

namespace {

FormalExp exp_min(const FormalExp& a, const FormalExp& b) { return b < a ? b : a; }

bool has_violation(const Verdict& v, int condition) {
    for (const Violation& viol : v.violations)
        if (viol.condition == condition) return true;
    return false;
}

std::vector<int> mask_vertices(std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i);
    return out;
}

}  // namespace

Verdict check_assumption(const LabelledGraph& g, const AssumptionOptions& options) {
    g.validate();
    Verdict out;
    const FormalExp five(kParabolicDimension);
    const int n = static_cast<int>(g.vertices.size());

    // Condition 1: each kernel is locally integrable on its own, with a
    // negative decoration improving the degree.
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const GraphEdge& e = g.edges[i];
        if (e.kind != EdgeKind::kernel) continue;
        FormalExp lhs = e.a + FormalExp(std::min(e.r, 0));
        if (!(lhs < five)) {
            out.violations.push_back({1,
                                      {std::min(e.tail, e.head), std::max(e.tail, e.head)},
                                      static_cast<int>(i),
                                      lhs,
                                      five});
        }
    }

    std::uint32_t star_mask = 0;
    for (int v : g.star_vertices()) star_mask |= (1u << v);
    const int origin = g.origin_index();

    FormalExp total_a;  // every kernel degree; the verbatim third condition uses it
    for (const GraphEdge& e : g.edges)
        if (e.kind == EdgeKind::kernel) total_a = total_a + e.a;

    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const int card = std::popcount(mask);
        const bool need2 = card >= 3;
        const bool need3 = (mask & (1u << origin)) != 0 && card >= 2;
        const bool need4 = (mask & star_mask) == 0;
        if (!need2 && !need3 && !need4) continue;

        FormalExp inside_a;     // both endpoints in the subset
        FormalExp up_bonus;     // a + r - 1 over decorated edges leaving the subset
        FormalExp down_r;       // r over decorated edges entering the subset
        FormalExp down_rm1;     // r - 1 over the same entering edges
        FormalExp adjacent_a;   // at least one endpoint in, entering decorated excluded
        for (const GraphEdge& e : g.edges) {
            if (e.kind != EdgeKind::kernel) continue;
            const bool tin = (mask >> e.tail) & 1u;
            const bool hin = (mask >> e.head) & 1u;
            if (tin && hin) inside_a = inside_a + e.a;
            const bool up = e.r > 0 && tin && !hin;
            const bool down = e.r > 0 && hin && !tin;
            if (up) up_bonus = up_bonus + e.a + FormalExp(e.r - 1);
            if (down) {
                down_r = down_r + FormalExp(e.r);
                down_rm1 = down_rm1 + FormalExp(e.r - 1);
            }
            if ((tin || hin) && !down) adjacent_a = adjacent_a + e.a;
        }

        if (need2) {
            FormalExp rhs(static_cast<std::int64_t>(kParabolicDimension) * (card - 1));
            if (!(inside_a < rhs)) out.violations.push_back({2, mask_vertices(mask), -1, inside_a, rhs});
        }
        if (need3) {
            FormalExp first = options.verbatim_condition3 ? total_a : inside_a;
            FormalExp lhs = first + up_bonus - down_r;
            FormalExp rhs(static_cast<std::int64_t>(kParabolicDimension) * (card - 1));
            if (!(lhs < rhs)) out.violations.push_back({3, mask_vertices(mask), -1, lhs, rhs});
        }
        if (need4) {
            FormalExp lhs = options.verbatim_condition4 ? adjacent_a - down_rm1
                                                        : adjacent_a + up_bonus - down_rm1;
            FormalExp rhs(static_cast<std::int64_t>(kParabolicDimension) *
                          (options.verbatim_condition4 ? n : card));
            if (!(lhs > rhs)) out.violations.push_back({4, mask_vertices(mask), -1, lhs, rhs});
        }
    }

    out.passed = out.violations.empty();
    return out;
}

FormalExp power_counting_exponent(const LabelledGraph& g) {
    g.validate();
    const std::size_t free_vertices = g.vertices.size() - g.star_vertices().size();
    FormalExp alpha(static_cast<std::int64_t>(kParabolicDimension) *
                    static_cast<std::int64_t>(free_vertices));
    for (const GraphEdge& e : g.edges)
        if (e.kind == EdgeKind::kernel) alpha = alpha - e.a;
    return alpha;
}

ExponentPair lambda_exponent(const LabelledGraph& g) {
    Verdict v = check_assumption(g);
    if (!v.passed)
        throw std::invalid_argument(
            "lambda_exponent: graph fails the integrability conditions; no exponent is certified");
    return {g.prefactor_eps_power, power_counting_exponent(g)};
}

LabelledGraph reduce_epsilon(const LabelledGraph& g,
                             const std::map<std::size_t, FormalExp>& assignment,
                             bool allow_negative_leftover) {
    LabelledGraph out = g;
    const FormalExp zero;
    FormalExp total;
    std::vector<std::size_t> touched;
    for (const auto& [idx, amount] : assignment) {
        if (idx >= out.edges.size())
            throw std::invalid_argument("reduce_epsilon: edge index out of range");
        if (amount < zero) throw std::invalid_argument("reduce_epsilon: negative assignment");
        if (amount.is_zero()) continue;
        GraphEdge& e = out.edges[idx];
        if (e.kind != EdgeKind::kernel || !e.eps_regularised)
            throw std::invalid_argument("reduce_epsilon: edge " + std::to_string(idx) +
                                        " is not epsilon-regularised");
        FormalExp reduced = e.a - amount;
        if (reduced < zero)
            throw std::invalid_argument("reduce_epsilon: assignment exceeds the degree of edge " +
                                        std::to_string(idx));
        e.a = reduced;
        total = total + amount;
        touched.push_back(idx);
    }
    if (!allow_negative_leftover && out.prefactor_eps_power < total)
        throw std::invalid_argument("reduce_epsilon: assignment exceeds the epsilon budget");
    out.prefactor_eps_power = out.prefactor_eps_power - total;

    // An assigned edge ground down to nothing is the constant kernel; drop it.
    std::set<std::size_t> dead;
    for (std::size_t idx : touched) {
        const GraphEdge& e = out.edges[idx];
        if (e.a.is_zero() && e.r == 0) dead.insert(idx);
    }
    if (!dead.empty()) {
        std::vector<GraphEdge> kept;
        kept.reserve(out.edges.size() - dead.size());
        for (std::size_t i = 0; i < out.edges.size(); ++i)
            if (!dead.count(i)) kept.push_back(out.edges[i]);
        out.edges = std::move(kept);
    }
    return out;
}

LabelledGraph merge_parallel_edges(const LabelledGraph& g, std::size_t first, std::size_t second) {
    if (first >= g.edges.size() || second >= g.edges.size() || first == second)
        throw std::invalid_argument("merge_parallel_edges: bad edge indices");
    const GraphEdge& a = g.edges[first];
    const GraphEdge& b = g.edges[second];
    if (a.kind != EdgeKind::kernel || b.kind != EdgeKind::kernel)
        throw std::invalid_argument("merge_parallel_edges: both edges must be kernels");
    const bool parallel = (a.tail == b.tail && a.head == b.head) ||
                          (a.tail == b.head && a.head == b.tail);
    if (!parallel) throw std::invalid_argument("merge_parallel_edges: edges are not parallel");
    if (a.r < 0 || b.r < 0)
        throw std::invalid_argument("merge_parallel_edges: negative decorations do not merge");

    LabelledGraph out = g;
    GraphEdge merged = a;
    merged.a = a.a + b.a;
    // The merged edge is a plain product bound on the two kernels, which
    // forgets any positive decoration.
    merged.r = 0;
    merged.eps_regularised = a.eps_regularised || b.eps_regularised;
    out.edges[first] = merged;
    out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(second));
    return out;
}

LabelledGraph pad_edge(const LabelledGraph& g, std::size_t edge, const FormalExp& amount) {
    if (edge >= g.edges.size()) throw std::invalid_argument("pad_edge: edge index out of range");
    if (amount < FormalExp(0)) throw std::invalid_argument("pad_edge: negative padding");
    if (g.edges[edge].kind != EdgeKind::kernel)
        throw std::invalid_argument("pad_edge: only kernel edges can be padded");
    LabelledGraph out = g;
    out.edges[edge].a = out.edges[edge].a + amount;
    return out;
}

LabelledGraph contract_vertex(const LabelledGraph& g, int vertex) {
    if (vertex < 0 || vertex >= static_cast<int>(g.vertices.size()))
        throw std::invalid_argument("contract_vertex: vertex out of range");
    const GraphVertex& v = g.vertices[vertex];
    if (v.is_origin || v.in_star_set || v.is_leaf)
        throw std::invalid_argument("contract_vertex: '" + v.name +
                                    "' is not a plain integration vertex");
    int incident = -1;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const GraphEdge& e = g.edges[i];
        if (e.tail == vertex || e.head == vertex) {
            if (incident >= 0)
                throw std::invalid_argument("contract_vertex: '" + v.name + "' has degree above one");
            incident = static_cast<int>(i);
        }
    }
    if (incident < 0) throw std::invalid_argument("contract_vertex: '" + v.name + "' is isolated");
    const GraphEdge& e = g.edges[incident];
    if (e.kind != EdgeKind::kernel || e.r != 0 || !(e.a < FormalExp(kParabolicDimension)))
        throw std::invalid_argument(
            "contract_vertex: the incident edge does not integrate to a constant");

    LabelledGraph out;
    out.prefactor_eps_power = g.prefactor_eps_power;
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i)
        if (i != vertex) out.vertices.push_back(g.vertices[i]);
    auto remap = [vertex](int idx) { return idx > vertex ? idx - 1 : idx; };
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (static_cast<int>(i) == incident) continue;
        GraphEdge copy = g.edges[i];
        copy.tail = remap(copy.tail);
        copy.head = remap(copy.head);
        out.edges.push_back(copy);
    }
    return out;
}

LabelledGraph apply_reduction(LabelledGraph g, const std::vector<ReductionStep>& steps) {
    for (const ReductionStep& s : steps) {
        switch (s.op) {
            case ReductionStep::Op::assign:
                g = reduce_epsilon(g, s.assignment, s.allow_negative_leftover);
                break;
            case ReductionStep::Op::merge:
                g = merge_parallel_edges(g, s.edge_a, s.edge_b);
                break;
            case ReductionStep::Op::pad:
                g = pad_edge(g, s.edge_a, s.amount);
                break;
            case ReductionStep::Op::contract:
                g = contract_vertex(g, s.vertex);
                break;
        }
    }
    return g;
}

std::optional<std::map<std::size_t, FormalExp>> search_epsilon_assignment(const LabelledGraph& g) {
    LabelledGraph cur = g;
    std::map<std::size_t, FormalExp> total;
    const FormalExp zero;
    for (int pass = 0; pass < 64; ++pass) {
        Verdict verdict = check_assumption(cur);
        if (verdict.passed) return total;

        bool applied = false;
        bool saw_upper_bound_violation = false;
        for (const Violation& viol : verdict.violations) {
            if (viol.condition == 4) continue;  // spending budget only lowers that side
            saw_upper_bound_violation = true;
            FormalExp need = viol.lhs - viol.rhs + FormalExp::kappa();
            if (need < FormalExp::kappa()) need = FormalExp::kappa();
            for (std::size_t i = 0; i < cur.edges.size(); ++i) {
                const GraphEdge& e = cur.edges[i];
                if (e.kind != EdgeKind::kernel || !e.eps_regularised) continue;
                const bool in_scope =
                    viol.condition == 1
                        ? static_cast<int>(i) == viol.edge
                        : std::binary_search(viol.witness.begin(), viol.witness.end(), e.tail) &&
                              std::binary_search(viol.witness.begin(), viol.witness.end(), e.head);
                if (!in_scope) continue;
                FormalExp amount = exp_min(exp_min(need, e.a), cur.prefactor_eps_power);
                if (amount < zero || amount.is_zero()) continue;
                cur.edges[i].a = cur.edges[i].a - amount;
                cur.prefactor_eps_power = cur.prefactor_eps_power - amount;
                auto it = total.find(i);
                if (it == total.end()) total[i] = amount;
                else it->second = it->second + amount;
                applied = true;
                break;
            }
            if (applied) break;
        }
        if (!applied) return std::nullopt;
        (void)saw_upper_bound_violation;
    }
    return std::nullopt;
}

namespace {

// Flattened view of a supported symbol: an optional outer noise weight, a
// power of the free field, polynomial factors, and at most one integrated
// block, itself an optional noise weight over a power of the free field.
struct ChaosShape {
    int a2 = 0;        // twice the outer noise weight
    int b2 = 0;        // twice the inner noise weight
    int outer = 0;     // free-field legs at the evaluation point
    int inner = 0;     // free-field legs inside the integrated block
    bool has_inner = false;
    int xdeg = 0;      // parabolic degree of the polynomial factors
};

void absorb_plain_factors(const Symbol& s, ChaosShape& shape, const char* where) {
    std::vector<Symbol> fs;
    if (s.kind() == Symbol::Kind::Prod) fs = s.factors();
    else fs = {s};
    for (const Symbol& f : fs) {
        if (f == Symbol::psi()) {
            ++(shape.has_inner ? shape.inner : shape.outer);
        } else if (f.kind() == Symbol::Kind::X) {
            if (shape.has_inner)
                throw std::invalid_argument(std::string("chaos_components: polynomial factor ") +
                                            where + " is not supported");
            shape.xdeg += f.xindex().pdeg();
        } else if (f.kind() == Symbol::Kind::One) {
            continue;
        } else {
            throw std::invalid_argument(std::string("chaos_components: unsupported factor ") +
                                        f.to_string() + " " + where);
        }
    }
}

ChaosShape match_chaos_shape(const Symbol& tau) {
    ChaosShape shape;
    Symbol body = tau;
    if (body.kind() == Symbol::Kind::E) {
        shape.a2 = body.beta2();
        body = body.arg();
    }
    std::vector<Symbol> fs;
    if (body.kind() == Symbol::Kind::Prod) fs = body.factors();
    else fs = {body};

    bool seen_block = false;
    for (const Symbol& f : fs) {
        if (f == Symbol::psi()) {
            ++shape.outer;
        } else if (f.kind() == Symbol::Kind::X) {
            shape.xdeg += f.xindex().pdeg();
        } else if (f.kind() == Symbol::Kind::One) {
            continue;
        } else if (f.kind() == Symbol::Kind::E) {
            // A noise-weighted plain power riding inside the product.
            if (shape.a2 != 0)
                throw std::invalid_argument("chaos_components: two outer noise weights in " +
                                            tau.to_string());
            shape.a2 = f.beta2();
            absorb_plain_factors(f.arg(), shape, "inside the noise weight");
        } else if (f.kind() == Symbol::Kind::I) {
            if (seen_block)
                throw std::invalid_argument("chaos_components: more than one integrated block in " +
                                            tau.to_string());
            seen_block = true;
            shape.has_inner = true;
            Symbol inner = f.arg();
            if (inner.kind() == Symbol::Kind::E) {
                shape.b2 = inner.beta2();
                inner = inner.arg();
            }
            absorb_plain_factors(inner, shape, "inside the integrated block");
        } else {
            throw std::invalid_argument("chaos_components: unsupported symbol " + tau.to_string());
        }
    }
    if (shape.outer == 0 && !shape.has_inner)
        throw std::invalid_argument("chaos_components: " + tau.to_string() +
                                    " has no stochastic content");
    if (shape.has_inner && shape.inner == 0)
        throw std::invalid_argument("chaos_components: empty integrated block in " + tau.to_string());
    return shape;
}

bool symbol_contains_noise_weight(const Symbol& s) {
    switch (s.kind()) {
        case Symbol::Kind::E:
            return true;
        case Symbol::Kind::I:
            return symbol_contains_noise_weight(s.arg());
        case Symbol::Kind::Prod: {
            for (const Symbol& f : s.factors())
                if (symbol_contains_noise_weight(f)) return true;
            return false;
        }
        default:
            return false;
    }
}

Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= Rational(n - i, i + 1);
    return r;
}

// Ways to pick p unordered self-pairs out of m legs.
Rational self_pairings(int m, int p) {
    if (2 * p > m) return Rational(0);
    return factorial(m) / (factorial(m - 2 * p) * factorial(p) * Rational(1LL << p));
}

FormalExp half(int twice) { return FormalExp(Rational(twice, 2)); }

// Kernel diagram of the component with l cross contractions and the given
// number of self-pairs at each end. Edge order: propagating kernel, then the
// contraction bundle, then outer leaves, inner leaves, self-pair doublets,
// and finally the test leg. The mirrored second moment relies on this order.
LabelledGraph component_diagram(const ChaosShape& shape, int l, int outer_pairs, int inner_pairs) {
    LabelledGraph g;
    g.add_vertex("root", true);
    const int base = g.add_vertex("base");
    int node = -1;
    if (shape.has_inner) {
        node = g.add_vertex("node");
        g.add_edge(node, base, FormalExp(3), 1, false);
        if (l > 0) g.add_edge(base, node, FormalExp(l), 0, true);
    }
    for (int i = 0; i < shape.outer - 2 * outer_pairs - l; ++i) {
        int u = g.add_vertex("o" + std::to_string(i + 1), false, true);
        g.add_edge(u, base, FormalExp(3), 0, true);
    }
    for (int i = 0; i < shape.inner - 2 * inner_pairs - l; ++i) {
        int w = g.add_vertex("i" + std::to_string(i + 1), false, true);
        g.add_edge(w, node, FormalExp(3), 0, true);
    }
    for (int i = 0; i < outer_pairs; ++i) {
        int u = g.add_vertex("op" + std::to_string(i + 1));
        g.add_edge(u, base, FormalExp(3), 0, true);
        g.add_edge(u, base, FormalExp(3), 0, true);
    }
    for (int i = 0; i < inner_pairs; ++i) {
        int w = g.add_vertex("ip" + std::to_string(i + 1));
        g.add_edge(w, node, FormalExp(3), 0, true);
        g.add_edge(w, node, FormalExp(3), 0, true);
    }
    g.add_test_leg(base);
    g.prefactor_eps_power = half(shape.a2 + shape.b2);
    return g;
}

// Remainder once the diverging constant of a fully contracted pair is
// subtracted: the propagating kernel is recentred at the origin.
LabelledGraph subtracted_constant_diagram(const ChaosShape& shape) {
    LabelledGraph g;
    const int root = g.add_vertex("root", true);
    const int base = g.add_vertex("base");
    const int node = g.add_vertex("node");
    g.add_edge(base, node, FormalExp(shape.inner), 0, true);
    g.add_edge(node, root, FormalExp(3), 0, false);
    g.add_test_leg(base);
    g.prefactor_eps_power = half(shape.a2 + shape.b2);
    return g;
}

// First chaos with its diverging coefficient subtracted; one spare leg on
// the evaluation point side.
LabelledGraph subtracted_first_chaos_diagram(const ChaosShape& shape) {
    LabelledGraph g;
    const int root = g.add_vertex("root", true);
    const int base = g.add_vertex("base");
    const int node = g.add_vertex("node");
    g.add_edge(base, node, FormalExp(shape.inner), 0, true);
    g.add_edge(node, root, FormalExp(3), 0, false);
    const int u = g.add_vertex("o1", false, true);
    g.add_edge(u, base, FormalExp(3), 0, true);
    g.add_test_leg(base);
    g.prefactor_eps_power = half(shape.a2 + shape.b2);
    return g;
}

// The two pieces of the first chaos when the spare leg sits inside the
// integrated block: a mirror remainder with the recentred kernel, and a big
// recentred kernel absorbing the contraction bundle.
LabelledGraph mirror_remainder_diagram(const ChaosShape& shape) {
    LabelledGraph g;
    const int root = g.add_vertex("root", true);
    const int base = g.add_vertex("base");
    const int node = g.add_vertex("node");
    g.add_edge(base, node, FormalExp(shape.outer), 0, true);
    g.add_edge(node, root, FormalExp(3), 0, false);
    const int w = g.add_vertex("i1", false, true);
    g.add_edge(w, node, FormalExp(3), 0, true);
    g.add_test_leg(base);
    g.prefactor_eps_power = half(shape.a2 + shape.b2);
    return g;
}

LabelledGraph big_kernel_diagram(const ChaosShape& shape) {
    LabelledGraph g;
    g.add_vertex("root", true);
    const int base = g.add_vertex("base");
    const int node = g.add_vertex("node");
    g.add_edge(node, base, FormalExp(shape.outer + 3), -1, true);
    const int w = g.add_vertex("i1", false, true);
    g.add_edge(w, node, FormalExp(3), 0, true);
    g.add_test_leg(base);
    g.prefactor_eps_power = half(shape.a2 + shape.b2);
    return g;
}

}  // namespace

std::vector<ChaosComponent> chaos_components(const Symbol& tau, ChaosModel model) {
    const ChaosShape shape = match_chaos_shape(tau);
    const int k = shape.outer;
    const int n = shape.inner;
    std::vector<ChaosComponent> out;

    if (model == ChaosModel::canonical) {
        for (int q = 0; 2 * q <= k; ++q) {
            for (int p = 0; 2 * p <= (shape.has_inner ? n : 0); ++p) {
                const int lmax = std::min(k - 2 * q, shape.has_inner ? n - 2 * p : 0);
                for (int l = 0; l <= lmax; ++l) {
                    ChaosComponent c;
                    c.order = (k - 2 * q) + (n - 2 * p) - 2 * l;
                    c.prefactor = self_pairings(k, q) * self_pairings(n, p) * factorial(l) *
                                  binomial(k - 2 * q, l) * binomial(n - 2 * p, l);
                    c.graph = component_diagram(shape, l, q, p);
                    out.push_back(std::move(c));
                }
            }
        }
        return out;
    }

    const int lmax = shape.has_inner ? std::min(k, n) : 0;
    const int delta = (shape.a2 + shape.b2) - (k + n - kParabolicDimension);
    for (int l = 0; l <= lmax; ++l) {
        const Rational prefactor = factorial(l) * binomial(k, l) * binomial(n, l);
        const int order = k + n - 2 * l;
        const bool top = shape.has_inner && l == lmax;
        if (top && k == n && l == n) {
            // Fully contracted pair: the expectation is subtracted, keep the
            // remainder diagram.
            out.push_back({order, prefactor, subtracted_constant_diagram(shape), true});
        } else if (top && k == n + 1 && delta == 0) {
            out.push_back({order, prefactor, subtracted_first_chaos_diagram(shape), true});
        } else if (top && n == k + 1 && delta == 0) {
            // The subtraction splits the first chaos into two estimable
            // pieces of the same order and count.
            out.push_back({order, prefactor, mirror_remainder_diagram(shape), true});
            out.push_back({order, prefactor, big_kernel_diagram(shape), true});
        } else {
            out.push_back({order, prefactor, component_diagram(shape, l, 0, 0), false});
        }
    }
    return out;
}

LabelledGraph second_moment_graph(const ChaosComponent& c) {
    const LabelledGraph& g = c.graph;
    g.validate();

    LabelledGraph out;
    out.prefactor_eps_power = Rational(2) * g.prefactor_eps_power;
    out.add_vertex("root", true);

    const int n = static_cast<int>(g.vertices.size());
    const int origin = g.origin_index();
    std::vector<int> copy_l(n, -1), copy_r(n, -1);
    for (int side = 0; side < 2; ++side) {
        std::vector<int>& copy = side == 0 ? copy_l : copy_r;
        const char* suffix = side == 0 ? "_l" : "_r";
        for (int v = 0; v < n; ++v) {
            if (v == origin || g.vertices[v].is_leaf) continue;
            copy[v] = out.add_vertex(g.vertices[v].name + suffix);
        }
        copy[origin] = 0;
    }

    // Leaf legs pair across the mirror. Each pair of degree-3 legs convolves
    // to one edge of degree 3 + 3 - 5 = 1; parallel glue edges merge into a
    // single bundle counting the pairs.
    auto leaf_anchor = [&](int leaf) {
        int anchor = -1;
        FormalExp degree;
        for (const GraphEdge& e : g.edges) {
            if (e.kind != EdgeKind::kernel) continue;
            if (e.tail == leaf || e.head == leaf) {
                if (anchor >= 0)
                    throw std::invalid_argument("second_moment_graph: leaf '" +
                                                g.vertices[leaf].name + "' has several edges");
                anchor = e.tail == leaf ? e.head : e.tail;
                degree = e.a;
            }
        }
        if (anchor < 0 || g.vertices[anchor].is_leaf || degree != FormalExp(3))
            throw std::invalid_argument("second_moment_graph: leaf '" + g.vertices[leaf].name +
                                        "' is not a degree-3 leg");
        return anchor;
    };

    for (int side = 0; side < 2; ++side) {
        const std::vector<int>& copy = side == 0 ? copy_l : copy_r;
        for (const GraphEdge& e : g.edges) {
            if (e.kind != EdgeKind::kernel) continue;
            if (g.vertices[e.tail].is_leaf || g.vertices[e.head].is_leaf) continue;
            out.add_edge(copy[e.tail], copy[e.head], e.a, e.r, e.eps_regularised);
        }
    }

    std::vector<std::pair<int, int>> glue_targets;  // (left index, right index)
    std::vector<int> glue_counts;
    for (int v = 0; v < n; ++v) {
        if (!g.vertices[v].is_leaf) continue;
        const int anchor = leaf_anchor(v);
        const std::pair<int, int> key{copy_l[anchor], copy_r[anchor]};
        auto it = std::find(glue_targets.begin(), glue_targets.end(), key);
        if (it == glue_targets.end()) {
            glue_targets.push_back(key);
            glue_counts.push_back(1);
        } else {
            ++glue_counts[static_cast<std::size_t>(it - glue_targets.begin())];
        }
    }
    for (std::size_t i = 0; i < glue_targets.size(); ++i)
        out.add_edge(glue_targets[i].first, glue_targets[i].second, FormalExp(glue_counts[i]), 0,
                     true);

    for (const GraphEdge& e : g.edges) {
        if (e.kind != EdgeKind::test_function) continue;
        out.add_test_leg(copy_l[e.tail]);
        out.add_test_leg(copy_r[e.tail]);
    }
    out.validate();
    return out;
}

namespace {

ReductionStep step_assign(std::map<std::size_t, FormalExp> m, bool negative_ok = false) {
    ReductionStep s;
    s.op = ReductionStep::Op::assign;
    s.assignment = std::move(m);
    s.allow_negative_leftover = negative_ok;
    return s;
}

ReductionStep step_merge(std::size_t kept, std::size_t absorbed) {
    ReductionStep s;
    s.op = ReductionStep::Op::merge;
    s.edge_a = kept;
    s.edge_b = absorbed;
    return s;
}

ReductionStep step_pad(std::size_t edge, FormalExp amount) {
    ReductionStep s;
    s.op = ReductionStep::Op::pad;
    s.edge_a = edge;
    s.amount = std::move(amount);
    return s;
}

std::vector<CatalogEntry> build_catalog() {
    const Symbol psi = Symbol::psi();
    const Symbol p3 = psi.pow(3);
    const Symbol p4 = psi.pow(4);
    const FormalExp d = FormalExp::delta();
    const FormalExp one(1);

    // Variance components of the half-weighted cubic pair, by contraction
    // count. The second-moment graphs of the first three components are
    // reduced; the fully contracted one appears separately as the
    // subtracted-constant entry.
    const Symbol cubic_pair = Symbol::e(1, p3 * Symbol::i(p3));
    auto var_comps = chaos_components(cubic_pair);

    std::vector<CatalogEntry> out;

    out.push_back({"chaos_var_l0",
                   second_moment_graph(var_comps[0]),
                   {step_assign({{2, one - d}})},
                   {d, FormalExp(-1) - d}});

    out.push_back({"chaos_var_l1",
                   second_moment_graph(var_comps[1]),
                   {step_assign({{4, one - d}}), step_merge(0, 1), step_merge(1, 2),
                    step_pad(0, d)},
                   {d, FormalExp(-1) - Rational(2) * d}});

    out.push_back({"chaos_var_l2",
                   second_moment_graph(var_comps[2]),
                   {step_assign({{1, d}, {3, d}}), step_merge(0, 1), step_merge(1, 2)},
                   {one - Rational(2) * d, FormalExp(-2) + Rational(2) * d}});

    // Same shape with the contractions exhausting the evaluation side, so no
    // mirror bundle survives there and one merged kernel absorbs the slack.
    const Symbol lopsided = psi.pow(2) * Symbol::i(Symbol::e(1, p4));
    out.push_back({"chaos_var_l2_asym",
                   second_moment_graph(chaos_components(lopsided)[2]),
                   {step_assign({{1, d}, {3, d}}), step_merge(0, 1), step_merge(1, 2),
                    step_assign({{0, one - Rational(3) * d}})},
                   {d, FormalExp(-1) - d}});

    // Single-copy remainder after the diverging constant is subtracted.
    LabelledGraph remainder;
    {
        const int root = remainder.add_vertex("root", true);
        const int base = remainder.add_vertex("base");
        const int node = remainder.add_vertex("node");
        remainder.add_edge(base, node, FormalExp(3), 0, true);
        remainder.add_edge(node, root, FormalExp(3), 0, false);
        remainder.add_test_leg(base);
        remainder.prefactor_eps_power = FormalExp(1);
    }
    out.push_back({"zero_chaos_remainder",
                   remainder,
                   {step_assign({{0, one - d}})},
                   {d, -d}});

    out.push_back({"first_chaos_subtracted",
                   second_moment_graph(chaos_components(Symbol::e(2, p4 * Symbol::i(p3)))[3]),
                   {step_assign({{0, one - d}, {2, one - d}})},
                   {Rational(2) * d, FormalExp(-1) - Rational(2) * d}});

    out.push_back({"first_chaos_outer_leaf",
                   second_moment_graph(chaos_components(Symbol::e(3, p4 * Symbol::i(p3)))[3]),
                   {step_assign({{4, one - Rational(3) * d}, {1, one + d}, {3, one + d}})},
                   {d, -d}});

    const Symbol crossed = Symbol::e(1, p3 * Symbol::i(Symbol::e(1, p4)));
    auto crossed_comps = chaos_components(crossed);
    out.push_back({"first_chaos_big_kernel",
                   second_moment_graph(crossed_comps[4]),
                   {step_assign({{0, one - d}, {1, one - d}})},
                   {Rational(2) * d, FormalExp(-1) - Rational(2) * d}});

    out.push_back({"first_chaos_mirror_subtracted",
                   second_moment_graph(crossed_comps[3]),
                   {step_assign({{0, one - d}, {2, one - d}})},
                   {Rational(2) * d, FormalExp(-1) - Rational(2) * d}});

    out.push_back({"first_chaos_inner_leaf",
                   second_moment_graph(chaos_components(Symbol::e(1, p3 * Symbol::i(Symbol::e(2, p4))))[3]),
                   {step_assign({{4, one - Rational(3) * d}, {1, one + d}, {3, one + d}})},
                   {d, -d}});

    // Two-point function of the integrated cubic: positive homogeneity, so
    // the assignment deliberately overdraws the budget and the certified
    // bound carries a negative epsilon power.
    LabelledGraph positive;
    {
        positive.add_vertex("root", true);
        const int nl = positive.add_vertex("node_l");
        const int nr = positive.add_vertex("node_r");
        const int bl = positive.add_vertex("base_l");
        const int br = positive.add_vertex("base_r");
        positive.add_edge(nl, nr, FormalExp(3), 0, true);
        positive.add_edge(nl, bl, FormalExp(3), 2, false);
        positive.add_edge(nr, br, FormalExp(3), 2, false);
        positive.add_test_leg(bl);
        positive.add_test_leg(br);
        positive.prefactor_eps_power = FormalExp(0);
    }
    const FormalExp sixk = FormalExp::kappa(Rational(6));
    out.push_back({"positive_symbol_two_point",
                   positive,
                   {step_assign({{0, FormalExp(Rational(7, 5)) + sixk}}, true)},
                   {FormalExp(Rational(-7, 5)) - sixk, FormalExp(Rational(12, 5)) + sixk}});

    for (const CatalogEntry& entry : out) entry.graph.validate();
    return out;
}

}  // namespace

const std::vector<CatalogEntry>& assumption_catalog() {
    static const std::vector<CatalogEntry> catalog = build_catalog();
    return catalog;
}

std::vector<CatalogCheck> verify_catalog() {
    std::vector<CatalogCheck> out;
    for (const CatalogEntry& entry : assumption_catalog()) {
        const LabelledGraph reduced = apply_reduction(entry.graph, entry.script);
        CatalogCheck check;
        check.name = entry.name;
        check.verdict = check_assumption(reduced);
        check.exponents = {reduced.prefactor_eps_power, power_counting_exponent(reduced)};
        check.matches_expected = check.verdict.passed && check.exponents == entry.expected;
        for (int condition : {3, 4}) {
            AssumptionOptions opt;
            if (condition == 3) opt.verbatim_condition3 = true;
            else opt.verbatim_condition4 = true;
            const Verdict alt = check_assumption(reduced, opt);
            if (has_violation(check.verdict, condition) != has_violation(alt, condition))
                check.verbatim_disagreements.push_back(condition);
        }
        out.push_back(std::move(check));
    }
    return out;
}

namespace {

struct ReductionPlan {
    std::map<std::size_t, FormalExp> assignment;
    std::string shape;
};

// Stored reduction policy. Renormalised components put half the budget
// (minus a strictness margin) on each of the two mirrored main edges. A
// plain power splits its budget onto the single two-point bundle. Generic
// components fill the mirrored bundles greedily against fixed caps chosen so
// that every surviving multigraph clears all four conditions: the caps keep
// each bend strictly under 2 (a bend runs parallel to a degree-3 kernel) and
// the two cross bundles under 15/4 and 19/4.
ReductionPlan plan_reduction(const LabelledGraph& sm, const ChaosShape& shape,
                             const ChaosComponent& comp) {
    ReductionPlan plan;
    const int budget2 = shape.a2 + shape.b2;  // twice the per-copy epsilon weight
    if (budget2 <= 0)
        throw std::logic_error("plan_reduction: no epsilon budget to spend");

    if (!shape.has_inner) {
        std::size_t bundle = sm.edges.size();
        for (std::size_t i = 0; i < sm.edges.size(); ++i)
            if (sm.edges[i].kind == EdgeKind::kernel) {
                bundle = i;
                break;
            }
        if (bundle == sm.edges.size())
            throw std::logic_error("plan_reduction: two-point graph without a bundle");
        plan.assignment[bundle] = FormalExp(Rational(budget2), Rational(0), Rational(-1));
        plan.shape = "two-point";
        return plan;
    }

    if (comp.renormalised) {
        std::vector<std::size_t> mains;
        for (std::size_t i = 0; i < sm.edges.size(); ++i)
            if (sm.edges[i].kind == EdgeKind::kernel && sm.edges[i].r < 0) mains.push_back(i);
        const bool recentred = !mains.empty();
        if (!recentred) {
            for (std::size_t i = 0; i < sm.edges.size(); ++i) {
                const GraphEdge& e = sm.edges[i];
                if (e.kind == EdgeKind::kernel && e.eps_regularised && !(e.a < FormalExp(2)))
                    mains.push_back(i);
            }
        }
        if (mains.size() != 2)
            throw std::logic_error("plan_reduction: renormalised component without mirrored mains");
        const FormalExp amount(Rational(budget2, 2), Rational(0), Rational(-1));
        for (std::size_t i : mains) plan.assignment[i] = amount;
        if (recentred) plan.shape = "recentred big kernel";
        else if (shape.outer == shape.inner) plan.shape = "subtracted constant";
        else if (shape.outer == shape.inner + 1) plan.shape = "subtracted first chaos";
        else plan.shape = "mirror remainder";
        return plan;
    }

    std::vector<char> star(sm.vertices.size(), 0);
    for (int v : sm.star_vertices()) star[v] = 1;
    std::vector<std::pair<std::size_t, FormalExp>> roles;  // (edge, cap) in fill order
    std::optional<std::size_t> upper, lower;
    std::vector<std::size_t> bends;
    for (std::size_t i = 0; i < sm.edges.size(); ++i) {
        const GraphEdge& e = sm.edges[i];
        if (e.kind != EdgeKind::kernel || !e.eps_regularised) continue;
        const bool ts = star[e.tail], hs = star[e.head];
        if (!ts && !hs) upper = i;
        else if (ts && hs) lower = i;
        else bends.push_back(i);
    }
    if (upper) roles.push_back({*upper, FormalExp(Rational(15, 4))});
    if (lower) roles.push_back({*lower, FormalExp(Rational(19, 4))});
    for (std::size_t b : bends) roles.push_back({b, FormalExp(Rational(7, 4))});

    // Total weight the reduced bundles must keep so that exactly
    // budget - kappa gets spent.
    const int keep = shape.outer + shape.inner - budget2;
    FormalExp remaining(Rational(keep), Rational(0), Rational(1));
    if (!(FormalExp(0) < remaining))
        throw std::logic_error("plan_reduction: component is outside the stored policy");
    for (const auto& [edge, cap] : roles) {
        const FormalExp f = exp_min(exp_min(remaining, sm.edges[edge].a), cap);
        const FormalExp assigned = sm.edges[edge].a - f;
        if (!assigned.is_zero()) plan.assignment[edge] = assigned;
        remaining = remaining - f;
    }
    if (!remaining.is_zero())
        throw std::logic_error("plan_reduction: stored caps cannot place the required weight");
    const int l = (shape.outer + shape.inner - comp.order) / 2;
    plan.shape = "generic l=" + std::to_string(l);
    return plan;
}

}  // namespace

std::vector<InventoryCheck> verify_negative_inventory(const Basis& basis) {
    std::vector<InventoryCheck> out;
    const Homogeneity zero{};
    for (const BasisEntry& entry : basis.entries) {
        // Only the wrapped right-hand-side terms feed model columns; entries
        // tagged purely as wrap arguments belong to the coefficient sector.
        if (!entry.in_V) continue;
        if (!symbol_contains_noise_weight(entry.sym)) continue;
        const Homogeneity hom = entry.sym.hom();
        if (!(hom < zero)) continue;

        const ChaosShape shape = match_chaos_shape(entry.sym);
        const FormalExp target(Rational(2) * hom.q, Rational(0), Rational(2 * hom.nk));
        for (const ChaosComponent& comp : chaos_components(entry.sym, ChaosModel::wick)) {
            const LabelledGraph sm = second_moment_graph(comp);
            const ReductionPlan plan = plan_reduction(sm, shape, comp);
            const LabelledGraph reduced = reduce_epsilon(sm, plan.assignment);
            const Verdict verdict = check_assumption(reduced);
            // Polynomial factors are carried outside the graph; each copy of
            // the test function absorbs them as one lambda per degree.
            const FormalExp lambda =
                power_counting_exponent(reduced) + FormalExp(2 * shape.xdeg);
            InventoryCheck check;
            check.tau = entry.sym;
            check.hom = hom;
            check.component_order = comp.order;
            check.shape = plan.shape;
            check.reduced = reduced;
            check.exponents = {reduced.prefactor_eps_power, lambda};
            check.target = target;
            check.passes = verdict.passed && !(reduced.prefactor_eps_power < FormalExp(0)) &&
                           target < lambda;
            out.push_back(std::move(check));
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_tokens(const std::string& chunk) {
    std::vector<std::string> tokens;
    std::istringstream in(chunk);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

int parse_decoration(const std::string& text) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_graph: bad decoration '" + text + "'");
    }
    if (pos != text.size())
        throw std::invalid_argument("parse_graph: bad decoration '" + text + "'");
    return value;
}

}  // namespace

LabelledGraph parse_graph(const std::string& text) {
    LabelledGraph g;
    std::map<std::string, int> index;

    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end())
            throw std::invalid_argument("parse_graph: unknown vertex '" + name + "'");
        return it->second;
    };

    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t stop = text.find(';', start);
        const std::string chunk =
            stop == std::string::npos ? text.substr(start) : text.substr(start, stop - start);
        start = stop == std::string::npos ? text.size() + 1 : stop + 1;

        const std::vector<std::string> tok = split_tokens(chunk);
        if (tok.empty()) continue;

        if (tok[0] == "vertex") {
            if (tok.size() < 2) throw std::invalid_argument("parse_graph: vertex needs a name");
            if (index.count(tok[1]))
                throw std::invalid_argument("parse_graph: duplicate vertex '" + tok[1] + "'");
            bool origin = false, star = false, leaf = false;
            for (std::size_t i = 2; i < tok.size(); ++i) {
                if (tok[i] == "origin") origin = true;
                else if (tok[i] == "star") star = true;
                else if (tok[i] == "leaf") leaf = true;
                else throw std::invalid_argument("parse_graph: unknown vertex flag '" + tok[i] + "'");
            }
            const int v = g.add_vertex(tok[1], origin, leaf);
            g.vertices[v].in_star_set = star;
            index[tok[1]] = v;
        } else if (tok[0] == "edge") {
            if (tok.size() < 5 || tok[2] != "->")
                throw std::invalid_argument("parse_graph: edge syntax is 'edge a -> b a=E [r=N] [eps]'");
            const int tail = lookup(tok[1]);
            const int head = lookup(tok[3]);
            FormalExp a;
            bool have_a = false;
            int r = 0;
            bool eps = false;
            for (std::size_t i = 4; i < tok.size(); ++i) {
                if (tok[i].rfind("a=", 0) == 0) {
                    a = FormalExp::parse(tok[i].substr(2));
                    have_a = true;
                } else if (tok[i].rfind("r=", 0) == 0) {
                    r = parse_decoration(tok[i].substr(2));
                } else if (tok[i] == "eps") {
                    eps = true;
                } else {
                    throw std::invalid_argument("parse_graph: unknown edge token '" + tok[i] + "'");
                }
            }
            if (!have_a) throw std::invalid_argument("parse_graph: edge is missing its degree");
            g.add_edge(tail, head, a, r, eps);
        } else if (tok[0] == "test") {
            if (tok.size() != 2) throw std::invalid_argument("parse_graph: test needs one vertex");
            g.add_test_leg(lookup(tok[1]));
        } else if (tok[0] == "prefactor") {
            if (tok.size() != 2)
                throw std::invalid_argument("parse_graph: prefactor needs one exponent");
            g.prefactor_eps_power = FormalExp::parse(tok[1]);
        } else {
            throw std::invalid_argument("parse_graph: unknown statement '" + tok[0] + "'");
        }
    }
    g.validate();
    return g;
}

std::string print_graph(const LabelledGraph& g) {
    std::ostringstream os;
    for (const GraphVertex& v : g.vertices) {
        os << "vertex " << v.name;
        if (v.is_origin) os << " origin";
        if (v.in_star_set) os << " star";
        if (v.is_leaf) os << " leaf";
        os << ";\n";
    }
    for (const GraphEdge& e : g.edges) {
        if (e.kind != EdgeKind::kernel) continue;
        os << "edge " << g.vertices[e.tail].name << " -> " << g.vertices[e.head].name
           << " a=" << e.a.to_string();
        if (e.r != 0) os << " r=" << e.r;
        if (e.eps_regularised) os << " eps";
        os << ";\n";
    }
    for (const GraphEdge& e : g.edges) {
        if (e.kind != EdgeKind::test_function) continue;
        os << "test " << g.vertices[e.tail].name << ";\n";
    }
    if (!g.prefactor_eps_power.is_zero())
        os << "prefactor " << g.prefactor_eps_power.to_string() << ";\n";
    return os.str();
}

std::string verdict_to_json(const LabelledGraph& g, const Verdict& v) {
    nlohmann::json j;
    j["passed"] = v.passed;
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& viol : v.violations) {
        nlohmann::json item;
        item["condition"] = viol.condition;
        nlohmann::json witness = nlohmann::json::array();
        for (int idx : viol.witness) witness.push_back(g.vertices[idx].name);
        item["witness"] = witness;
        item["lhs"] = viol.lhs.to_string();
        item["rhs"] = viol.rhs.to_string();
        if (viol.edge >= 0) item["edge"] = viol.edge;
        violations.push_back(std::move(item));
    }
    j["violations"] = std::move(violations);
    return j.dump(2);
}

std::string exponent_pair_to_json(const ExponentPair& p) {
    nlohmann::json j;
    j["epsilon"] = p.eps.to_string();
    j["lambda"] = p.lambda.to_string();
    return j.dump(2);
}

}  // namespace coex
