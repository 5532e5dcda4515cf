#include <coexscale/wick.hpp>

#include <sstream>

namespace coex {

void LinearCombination::add(const Symbol& s, const FormalScalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(s);
    if (it == terms_.end()) {
        terms_.emplace(s, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

FormalScalar LinearCombination::coeff(const Symbol& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? FormalScalar() : it->second;
}

LinearCombination& LinearCombination::operator+=(const LinearCombination& o) {
    for (const auto& [s, c] : o.terms_) add(s, c);
    return *this;
}

LinearCombination LinearCombination::operator*(const FormalScalar& c) const {
    LinearCombination out;
    if (c.is_zero()) return out;
    for (const auto& [s, k] : terms_) out.add(s, k * c);
    return out;
}

LinearCombination operator*(const LinearCombination& a, const LinearCombination& b) {
    LinearCombination out;
    for (const auto& [sa, ca] : a.terms())
        for (const auto& [sb, cb] : b.terms()) out.add(sa * sb, ca * cb);
    return out;
}

std::string LinearCombination::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [s, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")*" << s.to_string();
    }
    return os.str();
}

namespace {

// Wick ordering of a pure power: Psi^p -> H_p(Psi; c1) as a combination.
LinearCombination wick_power(int p, const FormalScalar& c1) {
    const Poly<FormalScalar> h = hermite(p, c1);
    LinearCombination out;
    for (int k = 0; k <= h.degree(); ++k) out.add(Symbol::psi().pow(k), h.coeff(k));
    return out;
}

// Lift a symbol-level wrapper (integration or epsilon decoration) over a
// combination.
template <class F>
LinearCombination map_terms(const LinearCombination& lc, F&& wrap) {
    LinearCombination out;
    for (const auto& [s, c] : lc.terms()) out.add(wrap(s), c);
    return out;
}

}  // namespace

LinearCombination wick_map(const Symbol& tau, const FormalScalar& c1) {
    switch (tau.kind()) {
        case Symbol::Kind::One:
        case Symbol::Kind::Xi:
        case Symbol::Kind::X:
            return LinearCombination(tau);
        case Symbol::Kind::I:
            if (tau == Symbol::psi()) return LinearCombination(tau);
            return map_terms(wick_map(tau.arg(), c1),
                             [](const Symbol& s) { return Symbol::i(s); });
        case Symbol::Kind::E: {
            const int b2 = tau.beta2();
            return map_terms(wick_map(tau.arg(), c1),
                             [b2](const Symbol& s) { return Symbol::e(b2, s); });
        }
        case Symbol::Kind::Prod: {
            int psi_power = 0;
            LinearCombination out(Symbol::one());
            for (const auto& f : tau.factors()) {
                if (f == Symbol::psi()) {
                    ++psi_power;
                    continue;
                }
                out = out * wick_map(f, c1);
            }
            if (psi_power > 0) out = out * wick_power(psi_power, c1);
            return out;
        }
    }
    throw std::logic_error("wick_map: unreachable");
}

LinearCombination wick_map(const LinearCombination& lc, const FormalScalar& c1) {
    LinearCombination out;
    for (const auto& [s, c] : lc.terms()) out += wick_map(s, c1) * c;
    return out;
}

namespace {

long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// One contraction pattern of the mass renormalisation: the decorated symbol
// shape together with its fully contracted image (a multiple of 1 or Psi).
struct MassPattern {
    Symbol shape;
    Symbol target;
    long long count;
    FormalScalar constant;
};

// The five families: outer/inner decorations (n-2, n-2), (n-1, n-3) and
// (n-2, n-3), with the outer power possibly raised by one to leave a single
// uncontracted noise factor.
void append_patterns(std::vector<MassPattern>& out, const std::vector<FormalScalar>& Cn,
                     const std::vector<FormalScalar>& Cnp) {
    const auto psi_n = [](int n) { return Symbol::psi().pow(n); };
    const auto shape = [&](int outer_b2, int outer_pow, int inner_b2, int inner_pow) {
        return Symbol::e(outer_b2,
                         psi_n(outer_pow) * Symbol::i(Symbol::e(inner_b2, psi_n(inner_pow))));
    };
    const int n_max_cn = static_cast<int>(Cn.size()) - 1;
    const int n_max_cnp = static_cast<int>(Cnp.size()) - 1;
    for (int n = 2; n <= n_max_cn; ++n) {
        out.push_back({shape(n - 2, n, n - 2, n), Symbol::one(), factorial(n), Cn[n]});
        out.push_back({shape(n - 2, n, n - 2, n + 1), Symbol::psi(), factorial(n + 1), Cn[n]});
        if (n >= 3) {
            out.push_back({shape(n - 1, n, n - 3, n), Symbol::one(), factorial(n), Cn[n]});
            out.push_back({shape(n - 1, n + 1, n - 3, n), Symbol::psi(), factorial(n + 1), Cn[n]});
        }
    }
    for (int n = 3; n <= n_max_cnp; ++n)
        out.push_back({shape(n - 2, n, n - 3, n), Symbol::one(), factorial(n), Cnp[n]});
}

}  // namespace

LinearCombination m0_map(const Symbol& tau, const std::vector<FormalScalar>& Cn,
                         const std::vector<FormalScalar>& Cnp) {
    std::vector<MassPattern> patterns;
    append_patterns(patterns, Cn, Cnp);
    LinearCombination out(tau);
    for (const auto& p : patterns) {
        if (!(tau == p.shape)) continue;
        out.add(p.target, -(p.constant * FormalScalar::constant(Rational(p.count))));
    }
    return out;
}

std::vector<FormalScalar> formal_cn_list(int m) {
    std::vector<FormalScalar> v(static_cast<std::size_t>(m) + 1);
    for (int n = 2; n <= m; ++n) v[n] = FormalScalar::variable(var::Cn(n));
    return v;
}

std::vector<FormalScalar> formal_cnp_list(int m) {
    std::vector<FormalScalar> v(static_cast<std::size_t>(m) + 1);
    for (int n = 3; n <= m; ++n) v[n] = FormalScalar::variable(var::Cnp(n));
    return v;
}

std::vector<ShiftedCoeff> shift_expand(const std::vector<ThetaSeries>& a, double h, int m,
                                       bool truncated) {
    if (m < 0 || a.size() != static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("shift_expand: coefficient list must have length m+1");
    // binomial table
    std::vector<std::vector<double>> ch(m + 1, std::vector<double>(m + 1, 0.0));
    for (int n = 0; n <= m; ++n) {
        ch[n][0] = 1.0;
        for (int k = 1; k <= n; ++k)
            ch[n][k] = ch[n - 1][k - 1] + (k <= n - 1 ? ch[n - 1][k] : 0.0);
    }
    std::vector<ShiftedCoeff> out(a.size());
    for (int j = 0; j <= m; ++j) {
        ThetaSeries s{};
        double hp = 1.0;
        for (int k = j; k <= m; ++k) {
            s = s + (ch[k][j] * hp) * a[k];
            hp *= h;
        }
        out[j].series = s;
        out[j].has_remainder = truncated && h != 0.0;
    }
    return out;
}

}  // namespace coex
