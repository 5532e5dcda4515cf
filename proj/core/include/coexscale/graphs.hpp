#pragma once

// Power-counting certificates for moment bounds on model columns. Graphs
// carry kernel edges labelled by a singularity degree, an integer
// renormalisation decoration, and an epsilon-regularisation flag. The checker
// sweeps vertex subsets for the four integrability conditions, and the
// reduction ops trade prefactor powers of epsilon for improvements in the
// scale exponent. Everything is symbolic; no integral is ever evaluated.

#include <coexscale/formal.hpp>
#include <coexscale/rational.hpp>
#include <coexscale/symbols.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coex {

// Parabolic dimension of 1+3 dimensional space-time (time counts twice).
// This is the "5" in all four conditions and in the exponent formula.
inline constexpr int kParabolicDimension = 5;

// Hard cap on vertex count. The subset sweep is exponential and every graph
// built by this library stays far below the cap; it only guards user input.
inline constexpr int kMaxGraphVertices = 20;

// Homogeneity threshold for the positive-sector estimates. The catalogue's
// positive two-point entry certifies a scale exponent strictly above twice
// this value.
Rational positive_sector_zeta();

enum class EdgeKind { kernel, test_function };

struct GraphVertex {
    std::string name;
    bool is_origin = false;
    // Endpoint of a test-function leg. The origin is in the star set too but
    // keeps this flag false; star_vertices() accounts for it.
    bool in_star_set = false;
    // Noise variable rather than integration variable; second_moment_graph
    // glues these pairwise across the mirror.
    bool is_leaf = false;

    bool operator==(const GraphVertex&) const = default;
};

struct GraphEdge {
    int tail = 0;
    int head = 0;
    FormalExp a;                  // singularity degree of the kernel
    int r = 0;                    // renormalisation decoration (sign matters)
    bool eps_regularised = false; // kernel stays bounded at scale epsilon
    EdgeKind kind = EdgeKind::kernel;

    bool operator==(const GraphEdge&) const = default;
};

struct LabelledGraph {
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    // Power of epsilon multiplying the whole integral, available for
    // reassignment onto regularised edges.
    FormalExp prefactor_eps_power;

    int add_vertex(std::string name, bool is_origin = false, bool is_leaf = false);
    std::size_t add_edge(int tail, int head, FormalExp a, int r = 0, bool eps_regularised = false,
                         EdgeKind kind = EdgeKind::kernel);
    // Attaches a test-function leg from v to the origin and marks v.
    std::size_t add_test_leg(int v);

    int origin_index() const;
    // Origin plus the test-leg endpoints, deduplicated, ascending.
    std::vector<int> star_vertices() const;

    // Structural sanity: exactly one origin, unique names, in-range endpoints,
    // no self loops, at most two test legs pointing at the origin with zero
    // weight, star flags matching the test legs, no two r<0 edges sharing a
    // vertex, and the vertex cap. Throws std::invalid_argument.
    void validate() const;

    bool operator==(const LabelledGraph&) const = default;
};

// The two conditions whose printed form disagrees with the convention the
// surrounding estimates rely on. Defaults use the corrected reading; the
// verbatim switches reproduce the printed text exactly.
struct AssumptionOptions {
    // Condition 3's first sum taken over every edge of the graph instead of
    // only the edges inside the subset.
    bool verbatim_condition3 = false;
    // Condition 4 with an empty summand over the outgoing edges and the
    // bound 5|V| over all vertices instead of 5|S|.
    bool verbatim_condition4 = false;
};

struct Violation {
    int condition = 0;        // 1..4
    std::vector<int> witness; // vertex subset; for condition 1 the endpoints
    int edge = -1;            // offending edge, condition 1 only
    FormalExp lhs;
    FormalExp rhs;
};

struct Verdict {
    bool passed = false;
    std::vector<Violation> violations;
};

// Evaluates all four integrability conditions by brute-force subset
// enumeration: condition 1 per edge, condition 2 over subsets of cardinality
// at least 3, condition 3 over subsets containing the origin of cardinality
// at least 2, condition 4 over non-empty subsets avoiding the star set.
// Strict inequalities between formal exponents resolve lexicographically,
// i.e. in the limit of small positive delta and kappa.
Verdict check_assumption(const LabelledGraph& g, const AssumptionOptions& options = {});

// alpha = 5 * |V minus star set| - sum of edge degrees, with no
// admissibility gate. Prefer lambda_exponent for certified output.
FormalExp power_counting_exponent(const LabelledGraph& g);

struct ExponentPair {
    FormalExp eps;    // surviving prefactor power
    FormalExp lambda; // certified scale exponent

    bool operator==(const ExponentPair&) const = default;
};

// Returns (eps exponent, lambda exponent) for a graph that passes
// check_assumption under default options; throws std::invalid_argument for
// failing graphs rather than reporting an uncertified exponent.
ExponentPair lambda_exponent(const LabelledGraph& g);

// Moves prefactor powers of epsilon onto regularised edges: each assigned
// edge's degree drops by its assignment and the prefactor drops by the
// total. Valid since (|z|+eps)^(-a) <= eps^(-s) (|z|+eps)^(-a+s). Rejects
// negative amounts, assignments to non-regularised edges, results below
// zero, and totals beyond the prefactor unless allow_negative_leftover is
// set (used by the positive-sector entry where the budget goes negative by
// design). Kernel edges reduced exactly to zero weight with r = 0 are
// dropped.
LabelledGraph reduce_epsilon(const LabelledGraph& g,
                             const std::map<std::size_t, FormalExp>& assignment,
                             bool allow_negative_leftover = false);

// Replaces two parallel kernel edges (same endpoints up to orientation, both
// r >= 0) by one edge of summed degree. The decoration does not survive: the
// merged kernel is a plain product bound, so the result has r = 0 and is
// regularised if either input was.
LabelledGraph merge_parallel_edges(const LabelledGraph& g, std::size_t first, std::size_t second);

// Increases one kernel edge's degree; sound because the kernels are
// supported in the unit ball. Used to restore strictness margins.
LabelledGraph pad_edge(const LabelledGraph& g, std::size_t edge, const FormalExp& amount);

// Removes a non-origin, non-star vertex of degree one whose single kernel
// edge has r = 0 and degree strictly below 5: such a vertex integrates to a
// constant. Remaining vertices and edges are reindexed.
LabelledGraph contract_vertex(const LabelledGraph& g, int vertex);

// Best-effort greedy search for an assignment that makes the graph pass:
// repeatedly fixes the first upper-bound violation by spending prefactor on
// a regularised edge inside the witness. Returns the combined assignment for
// the original graph, an empty map if it already passes, or nullopt when no
// fix is found (lower-bound violations are not repairable this way).
std::optional<std::map<std::size_t, FormalExp>> search_epsilon_assignment(const LabelledGraph& g);

// Which stochastic model the chaos decomposition describes: the Wick model
// has no self-contractions; the canonical model includes them.
enum class ChaosModel { wick, canonical };

struct ChaosComponent {
    int order = 0;        // homogeneous chaos order of this piece
    Rational prefactor;   // exact combinatorial count of the contractions
    LabelledGraph graph;  // kernel diagram with one test leg
    // The leading component of a diverging pair carries the subtracted
    // kernel diagram instead of the raw one.
    bool renormalised = false;
};

// Decomposes a symbol of shape E^a(Psi^k I(E^b Psi^n)), possibly with
// polynomial factors and with the E layers optional, or a plain Psi^j power,
// into homogeneous chaos components: one per contraction count l = 0..min,
// with prefactor l! C(k,l) C(n,l) (plus self-pairing counts for the
// canonical model) and the kernel diagram carrying the epsilon prefactor
// (a2+b2)/2. Unsupported shapes throw std::invalid_argument.
std::vector<ChaosComponent> chaos_components(const Symbol& tau, ChaosModel model = ChaosModel::wick);

// Mirrors the kernel diagram, glues leaf variables pairwise across the
// mirror (each glued pair of degree-3 legs becomes one edge of degree 1,
// parallel glue edges merge into bundles), doubles the epsilon prefactor,
// and attaches one test leg per copy.
LabelledGraph second_moment_graph(const ChaosComponent& c);

// One stored reduction step; indices refer to the graph as it stands when
// the step runs (earlier merges shift later indices).
struct ReductionStep {
    enum class Op { assign, merge, pad, contract };
    Op op = Op::assign;
    std::map<std::size_t, FormalExp> assignment; // assign
    std::size_t edge_a = 0;                      // merge: kept edge; pad: target
    std::size_t edge_b = 0;                      // merge: absorbed edge
    FormalExp amount;                            // pad
    int vertex = -1;                             // contract
    bool allow_negative_leftover = false;        // assign
};

LabelledGraph apply_reduction(LabelledGraph g, const std::vector<ReductionStep>& steps);

// A documented graph together with its prescribed reduction and the exact
// exponent pair the reduction certifies.
struct CatalogEntry {
    std::string name;
    LabelledGraph graph;
    std::vector<ReductionStep> script;
    ExponentPair expected;
};

// The eleven reduction displays: the four variance components of the
// half-weighted cubic pair, the subtracted zero and first chaos remainders,
// their two unsubtracted cousins with a spare leaf, the big-kernel and
// mirror forms of the second subtraction, and the positive two-point graph.
const std::vector<CatalogEntry>& assumption_catalog();

struct CatalogCheck {
    std::string name;
    Verdict verdict;                         // corrected conditions, reduced graph
    ExponentPair exponents;
    bool matches_expected = false;
    // Conditions (3 and/or 4) whose verbatim printed form disagrees with the
    // corrected reading on this entry's reduced graph.
    std::vector<int> verbatim_disagreements;
};

std::vector<CatalogCheck> verify_catalog();

// One certified reduction for one chaos component of one inventory symbol.
struct InventoryCheck {
    Symbol tau;
    Homogeneity hom;
    int component_order = 0;
    std::string shape;      // short description of the reduction family
    LabelledGraph reduced;
    ExponentPair exponents; // lambda includes the polynomial degree shift
    FormalExp target;       // twice the homogeneity, the bound to beat
    bool passes = false;
};

// For every negative-homogeneity model symbol in the basis that carries an
// epsilon weight (an E layer), builds all Wick chaos components, reduces each
// second-moment graph by the stored policy, and certifies that the lambda
// exponent strictly exceeds twice the homogeneity. Argument-only entries
// (tagged just for the extension set) are coefficient-sector objects with no
// model column and are skipped.
std::vector<InventoryCheck> verify_negative_inventory(const Basis& basis);

// Text form: "vertex v1 [origin|star|leaf]; edge v1 -> v2 a=3 r=1 [eps];
// test v2; prefactor 1;". print_graph emits kernel edges first, then test
// legs; parse_graph accepts any statement order and round-trips exactly.
LabelledGraph parse_graph(const std::string& text);
std::string print_graph(const LabelledGraph& g);

// JSON emitters used by the command-line front end.
std::string verdict_to_json(const LabelledGraph& g, const Verdict& v);
std::string exponent_pair_to_json(const ExponentPair& p);

}  // namespace coex
