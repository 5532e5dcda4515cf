#pragma once

#include <map>
#include <string>
#include <vector>

#include <coexscale/formal.hpp>
#include <coexscale/polynomial.hpp>
#include <coexscale/rational.hpp>
#include <coexscale/symbols.hpp>

namespace coex {

// Finite linear combination of canonical symbols whose coefficients are
// polynomials in the formal renormalisation constants. Zero coefficients are
// never stored, so equality of the term maps is equality of combinations.
class LinearCombination {
public:
    LinearCombination() = default;
    explicit LinearCombination(const Symbol& s) {
        add(s, FormalScalar::constant(Rational(1)));
    }

    void add(const Symbol& s, const FormalScalar& c);

    const std::map<Symbol, FormalScalar, SymbolLess>& terms() const { return terms_; }
    FormalScalar coeff(const Symbol& s) const;
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    LinearCombination& operator+=(const LinearCombination& o);
    friend LinearCombination operator+(LinearCombination a, const LinearCombination& b) {
        a += b;
        return a;
    }
    LinearCombination operator*(const FormalScalar& c) const;
    // Bilinear extension of the symbol product.
    friend LinearCombination operator*(const LinearCombination& a, const LinearCombination& b);

    friend bool operator==(const LinearCombination& a, const LinearCombination& b) {
        return a.terms_ == b.terms_;
    }

    std::string to_string() const;

private:
    std::map<Symbol, FormalScalar, SymbolLess> terms_;
};

// Monic Hermite polynomial with variance parameter C:
//   H_0 = 1, H_1 = x, H_k = x*H_{k-1} - (k-1)*C*H_{k-2}.
// Exact over any commutative coefficient ring.
template <class T>
Poly<T> hermite(int k, const T& C) {
    if (k < 0 || k > 12) throw std::invalid_argument("hermite: order must be in [0, 12]");
    Poly<T> prev{T(1)};
    if (k == 0) return prev;
    Poly<T> cur = Poly<T>::monomial(1);
    for (int j = 2; j <= k; ++j) {
        Poly<T> next = Poly<T>::monomial(1) * cur - T(j - 1) * (C * prev);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

// Wick ordering: exp(-c1*L) where L pairs two explicit noise factors at a
// time (L Psi^k = C(k,2) Psi^{k-2}), commutes with the integration and
// epsilon-power decorations, and acts by Leibniz across product factors.
// Pure powers become Hermite polynomials: wick_map(Psi^k) = H_k(Psi; c1).
LinearCombination wick_map(const Symbol& tau, const FormalScalar& c1);
LinearCombination wick_map(const LinearCombination& lc, const FormalScalar& c1);

// Mass renormalisation: the identity minus the five families of second-order
// contraction patterns, each mapped to its fully contracted constant multiple
// of 1 or Psi. Symbols matching no pattern are fixed. Cn/Cnp are the formal
// constants indexed by n (entries below n=2 resp. n=3 are ignored).
LinearCombination m0_map(const Symbol& tau, const std::vector<FormalScalar>& Cn,
                         const std::vector<FormalScalar>& Cnp);

// Convenience builders for the formal constant lists C_2..C_m and C_3'..C_m'.
std::vector<FormalScalar> formal_cn_list(int m);
std::vector<FormalScalar> formal_cnp_list(int m);

// E[p(x + y)] for y centred Gaussian with variance v, via the moment formula
// E[y^{2r}] = (2r-1)!! v^r. Exact over the coefficient ring; the sign of v is
// validated only when T is ordered.
template <class T>
Poly<T> gaussian_smooth(const Poly<T>& p, const T& v) {
    if constexpr (requires(const T& a, const T& b) { a < b; }) {
        if (v < T(0)) throw std::invalid_argument("gaussian_smooth: negative variance");
    }
    const int d = p.degree();
    if (d < 0) return p;
    // binomial table up to degree d
    std::vector<std::vector<long long>> ch(d + 1, std::vector<long long>(d + 1, 0));
    for (int n = 0; n <= d; ++n) {
        ch[n][0] = 1;
        for (int k = 1; k <= n; ++k)
            ch[n][k] = ch[n - 1][k - 1] + (k <= n - 1 ? ch[n - 1][k] : 0);
    }
    Poly<T> out;
    for (int n = 0; n <= d; ++n) {
        const T cn = p.coeff(n);
        if (cn == T(0)) continue;
        T vpow(1);
        long long dfact = 1;  // (2r-1)!!
        for (int r = 0; 2 * r <= n; ++r) {
            if (r > 0) {
                vpow = vpow * v;
                dfact *= 2 * r - 1;
            }
            const T w = cn * T(ch[n][2 * r] * dfact) * vpow;
            out.set_coeff(static_cast<std::size_t>(n - 2 * r), out.coeff(n - 2 * r) + w);
        }
    }
    return out;
}

// Taylor data in the tuning parameter theta at 0: value, first and second
// derivative of one potential coefficient.
struct ThetaSeries {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    friend ThetaSeries operator+(const ThetaSeries& a, const ThetaSeries& b) {
        return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
    }
    friend ThetaSeries operator*(double s, const ThetaSeries& a) {
        return {s * a.value, s * a.d1, s * a.d2};
    }
    // Evaluate the quadratic jet at a concrete theta.
    double at(double theta) const { return value + d1 * theta + 0.5 * d2 * theta * theta; }
};

struct ShiftedCoeff {
    ThetaSeries series;
    // Set in truncated mode when the degree-6 cutoff leaves an O(h^{7-j})
    // tail unaccounted for.
    bool has_remainder = false;
};

// Shift of the potential coefficients: a_j^{(h)}(theta) = sum_{k=j}^m
// C(k,j) a_k(theta) h^{k-j}, carried on the quadratic theta-jets. With
// truncated=false the input is a degree-m polynomial family and the shift is
// exact; with truncated=true (degree capped at 6) each output is flagged
// with its remainder order.
std::vector<ShiftedCoeff> shift_expand(const std::vector<ThetaSeries>& a, double h, int m,
                                       bool truncated = false);

// Hermite rewrite: coefficients b_j with
//   V'(delta^{1/2} u + h) = sum_j b_j delta^{j/2} H_j(u; c1),
// i.e. b_j = (1/j!) d^j/dx^j [gaussian_smooth(V', delta*c1)](h). Exact over
// the coefficient ring.
template <class T>
std::vector<T> hermite_rewrite(const Poly<T>& vprime, const T& delta, const T& h, const T& c1) {
    if constexpr (requires(const T& a, const T& b) { a < b; }) {
        if (!(T(0) < delta)) throw std::invalid_argument("hermite_rewrite: delta must be positive");
    }
    const Poly<T> w = gaussian_smooth(vprime, delta * c1).shifted(h);
    std::vector<T> b(static_cast<std::size_t>(std::max(w.degree(), -1) + 1), T(0));
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = w.coeff(j);
    return b;
}

}  // namespace coex
