#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "coexscale/rational.hpp"

namespace coex {

// Space-time multi-index (k0; k1, k2, k3) with the time direction counting
// twice in the parabolic degree.
struct MultiIndex {
    std::array<int, 4> k{0, 0, 0, 0};

    int pdeg() const { return 2 * k[0] + k[1] + k[2] + k[3]; }
    bool is_zero() const { return k == std::array<int, 4>{0, 0, 0, 0}; }

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
        MultiIndex r;
        for (int i = 0; i < 4; ++i) r.k[i] = a.k[i] + b.k[i];
        return r;
    }
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.k == b.k; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.k < b.k; }

    std::string to_string() const;
};

// Degree of the form q + n*kappa. kappa is a fixed positive parameter chosen
// smaller than any gap between the rational parts that occur, so every
// comparison is lexicographic in (q, n); the numeric value of kappa never
// enters a comparison.
struct Homogeneity {
    Rational q{0};
    int nk = 0;

    friend Homogeneity operator+(const Homogeneity& a, const Homogeneity& b) {
        return {a.q + b.q, a.nk + b.nk};
    }
    friend bool operator==(const Homogeneity& a, const Homogeneity& b) {
        return a.q == b.q && a.nk == b.nk;
    }
    friend bool operator!=(const Homogeneity& a, const Homogeneity& b) { return !(a == b); }
    friend bool operator<(const Homogeneity& a, const Homogeneity& b) {
        if (a.q != b.q) return a.q < b.q;
        return a.nk < b.nk;
    }
    friend bool operator>(const Homogeneity& a, const Homogeneity& b) { return b < a; }
    friend bool operator<=(const Homogeneity& a, const Homogeneity& b) { return !(b < a); }
    friend bool operator>=(const Homogeneity& a, const Homogeneity& b) { return !(a < b); }

    double value(double kappa) const { return q.to_double() + nk * kappa; }
    std::string to_string() const;  // kappa rendered as "k", e.g. "-5/2-k"
};

// Immutable tree node for a basis symbol. Symbols are always held in
// canonical form: products are flattened and sorted, unit factors dropped,
// and polynomial factors merged, so structural equality is semantic equality.
class Symbol {
public:
    enum class Kind { One, X, Xi, I, E, Prod };

    Symbol();  // the unit symbol

    static Symbol one();
    static Symbol xi();
    static Symbol x(const MultiIndex& k);  // x({0,...}) collapses to one()
    static Symbol i(const Symbol& arg);
    // beta2 = 2*beta, beta a positive half-integer. e(0, a) returns a itself.
    static Symbol e(int beta2, const Symbol& arg);
    static Symbol prod(std::vector<Symbol> factors);
    static Symbol psi();  // i(xi())

    Symbol pow(int n) const;
    friend Symbol operator*(const Symbol& a, const Symbol& b) { return prod({a, b}); }

    Kind kind() const;
    const MultiIndex& xindex() const;     // Kind::X only
    int beta2() const;                    // Kind::E only
    const Symbol& arg() const;            // Kind::I and Kind::E
    const std::vector<Symbol>& factors() const;  // Kind::Prod only

    // Number of factors when viewed as a product: 0 for the unit, n for a
    // product node, 1 otherwise.
    int nfactors() const;
    // Multiplicity of a given factor in this symbol viewed as a product.
    int factor_count(const Symbol& f) const;

    const Homogeneity& hom() const;
    std::size_t hash() const;

    friend bool operator==(const Symbol& a, const Symbol& b);
    friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
    // Total structural order; used for canonical sorting and map keys.
    static bool less(const Symbol& a, const Symbol& b);

    std::string to_string() const;

private:
    struct Node;
    explicit Symbol(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

struct SymbolLess {
    bool operator()(const Symbol& a, const Symbol& b) const { return Symbol::less(a, b); }
};
struct SymbolHash {
    std::size_t operator()(const Symbol& s) const { return s.hash(); }
};

// Inverse of Symbol::to_string. Grammar: "1", "Xi", "X^(k0,k1,k2,k3)",
// "I(expr)", "E^{b}(expr)" with b a positive half-integer such as 3/2, and
// juxtaposition for products. Throws std::invalid_argument on malformed input.
Symbol parse_symbol(const std::string& text);

struct BasisEntry {
    Symbol sym;
    bool in_U = false;
    bool in_V = false;
    bool in_Wex = false;
};

struct Basis {
    int m = 0;
    Rational gamma;
    Rational kappa;
    // Sorted by (homogeneity, structural order).
    std::vector<BasisEntry> entries;

    std::size_t count_U() const;
    std::size_t count_V() const;
    std::size_t count_Wex() const;
    std::vector<Symbol> symbols_U() const;
    std::vector<Symbol> symbols_V() const;
    const BasisEntry* find(const Symbol& s) const;
};

// Closure of the two generation rules over the seed symbols, with membership
// caps tied to gamma. kappa must satisfy 0 < kappa < 1/(8m); m >= 4.
Basis generate_basis(int m, const Rational& gamma, const Rational& kappa);

// Descriptors for the structure group generators acting at each degree.
// N(D) counts the multi-indices of parabolic degree exactly D.
std::int64_t multiindex_count(int degree);

struct DegreeRange {
    // Admissible integer degrees D with their multi-index counts.
    std::vector<std::pair<int, std::int64_t>> degrees;
    bool empty() const { return degrees.empty(); }
};

struct JGenerator {
    Symbol tau;
    DegreeRange range;
};

struct TplusGenerators {
    std::vector<Symbol> polynomial;   // the unit and the four coordinate symbols
    std::vector<JGenerator> kernel;   // one entry per non-polynomial basis symbol
    std::vector<JGenerator> noise;    // one entry per generated E-symbol
};

TplusGenerators tplus_generators(const Basis& basis);

}  // namespace coex
