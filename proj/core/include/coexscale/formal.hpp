#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coexscale/rational.hpp"

namespace coex {

// Variable ids used by formal coefficients throughout the library. Keeping
// them in one table makes printed polynomials stable across modules.
namespace var {
inline constexpr int C1 = 1;   // variance of the mollified free field at 0
inline constexpr int C0 = 2;   // limiting value of that variance times eps
inline constexpr int c2 = 3;   // coefficient of |log eps| in the pair constant
inline constexpr int Cn(int n) { return 100 + n; }   // higher pair constants
inline constexpr int Cnp(int n) { return 200 + n; }  // their half-power variants
}  // namespace var

std::string var_name(int id);

// Sparse multivariate polynomial with rational coefficients, used wherever a
// renormalisation constant has to stay symbolic (Wick maps, mass constants).
class FormalScalar {
public:
    // Sorted (id, exponent) pairs, exponents > 0.
    using Monomial = std::vector<std::pair<int, int>>;

    FormalScalar() = default;
    FormalScalar(int v) { *this = constant(Rational(v)); }
    FormalScalar(const Rational& r) { *this = constant(r); }

    static FormalScalar constant(const Rational& r) {
        FormalScalar f;
        if (!r.is_zero()) f.terms_[{}] = r;
        return f;
    }
    static FormalScalar variable(int id, const Rational& coeff = Rational(1)) {
        FormalScalar f;
        if (!coeff.is_zero()) f.terms_[{{id, 1}}] = coeff;
        return f;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Rational constant_part() const {
        auto it = terms_.find({});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    friend FormalScalar operator+(const FormalScalar& a, const FormalScalar& b) {
        FormalScalar r = a;
        for (const auto& [m, c] : b.terms_) r.add_term_(m, c);
        return r;
    }
    friend FormalScalar operator-(const FormalScalar& a, const FormalScalar& b) {
        FormalScalar r = a;
        for (const auto& [m, c] : b.terms_) r.add_term_(m, -c);
        return r;
    }
    friend FormalScalar operator*(const FormalScalar& a, const FormalScalar& b) {
        FormalScalar r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term_(mul_mono_(ma, mb), ca * cb);
        return r;
    }
    FormalScalar operator-() const {
        FormalScalar r;
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    FormalScalar& operator+=(const FormalScalar& o) { return *this = *this + o; }
    FormalScalar& operator-=(const FormalScalar& o) { return *this = *this - o; }
    FormalScalar& operator*=(const FormalScalar& o) { return *this = *this * o; }

    friend bool operator==(const FormalScalar& a, const FormalScalar& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const FormalScalar& a, const FormalScalar& b) { return !(a == b); }
    friend bool operator<(const FormalScalar& a, const FormalScalar& b) {
        auto key = [](const FormalScalar& f) {
            std::vector<std::pair<Monomial, std::pair<std::int64_t, std::int64_t>>> k;
            for (const auto& [m, c] : f.terms_) k.push_back({m, {c.num(), c.den()}});
            return k;
        };
        return key(a) < key(b);
    }

    FormalScalar pow(int e) const {
        if (e < 0) throw std::domain_error("FormalScalar: negative power");
        FormalScalar r = constant(Rational(1));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    // Numeric evaluation; every variable appearing in a term must be bound.
    double eval(const std::map<int, double>& binding) const;

    std::string to_string() const;

private:
    static Monomial mul_mono_(const Monomial& a, const Monomial& b) {
        Monomial r;
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
            else if (i == a.size() || b[j].first < a[i].first) r.push_back(b[j++]);
            else { r.push_back({a[i].first, a[i].second + b[j].second}); ++i; ++j; }
        }
        return r;
    }
    void add_term_(const Monomial& m, const Rational& c) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    std::map<Monomial, Rational> terms_;
};

// Exponent of the form q + cd*delta + ck*kappa where delta is the bookkeeping
// slack of a reduction and kappa the homogeneity offset. Both are treated as
// positive infinitesimals with delta dominating kappa, so comparisons are
// lexicographic in (q, cd, ck).
struct FormalExp {
    Rational q{0};
    Rational cd{0};
    Rational ck{0};

    FormalExp() = default;
    FormalExp(std::int64_t c) : q(c) {}
    FormalExp(Rational qq, Rational d = Rational(0), Rational k = Rational(0))
        : q(qq), cd(d), ck(k) {}

    static FormalExp delta(Rational c = Rational(1)) { return FormalExp(Rational(0), c); }
    static FormalExp kappa(Rational c = Rational(1)) {
        return FormalExp(Rational(0), Rational(0), c);
    }
    static FormalExp parse(const std::string& s);

    bool is_zero() const { return q.is_zero() && cd.is_zero() && ck.is_zero(); }

    friend FormalExp operator+(const FormalExp& a, const FormalExp& b) {
        return FormalExp(a.q + b.q, a.cd + b.cd, a.ck + b.ck);
    }
    friend FormalExp operator-(const FormalExp& a, const FormalExp& b) {
        return FormalExp(a.q - b.q, a.cd - b.cd, a.ck - b.ck);
    }
    FormalExp operator-() const { return FormalExp(-q, -cd, -ck); }
    friend FormalExp operator*(const Rational& s, const FormalExp& e) {
        return FormalExp(s * e.q, s * e.cd, s * e.ck);
    }

    friend bool operator==(const FormalExp& a, const FormalExp& b) {
        return a.q == b.q && a.cd == b.cd && a.ck == b.ck;
    }
    friend bool operator!=(const FormalExp& a, const FormalExp& b) { return !(a == b); }
    friend bool operator<(const FormalExp& a, const FormalExp& b) {
        if (a.q != b.q) return a.q < b.q;
        if (a.cd != b.cd) return a.cd < b.cd;
        return a.ck < b.ck;
    }
    friend bool operator>(const FormalExp& a, const FormalExp& b) { return b < a; }
    friend bool operator<=(const FormalExp& a, const FormalExp& b) { return !(b < a); }
    friend bool operator>=(const FormalExp& a, const FormalExp& b) { return !(a < b); }

    std::string to_string() const;
};

inline std::string var_name(int id) {
    if (id == var::C1) return "C1";
    if (id == var::C0) return "C0";
    if (id == var::c2) return "c2";
    if (id >= 200) return "C" + std::to_string(id - 200) + "'";
    if (id >= 100) return "C" + std::to_string(id - 100);
    return "x" + std::to_string(id);
}

inline double FormalScalar::eval(const std::map<int, double>& binding) const {
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c.to_double();
        for (const auto& [id, e] : m) {
            auto it = binding.find(id);
            if (it == binding.end())
                throw std::invalid_argument("FormalScalar::eval: unbound variable " + var_name(id));
            for (int i = 0; i < e; ++i) t *= it->second;
        }
        total += t;
    }
    return total;
}

inline std::string FormalScalar::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        Rational a = c;
        if (!out.empty()) {
            out += (a < Rational(0)) ? " - " : " + ";
            if (a < Rational(0)) a = -a;
        }
        std::string body;
        for (const auto& [id, e] : m) {
            if (!body.empty()) body += "*";
            body += var_name(id);
            if (e != 1) body += "^" + std::to_string(e);
        }
        if (body.empty()) out += a.to_string();
        else if (a == Rational(1)) out += body;
        else if (a == Rational(-1)) out += "-" + body;
        else out += a.to_string() + "*" + body;
    }
    return out;
}

inline std::string FormalExp::to_string() const {
    std::string out;
    auto term = [&out](const Rational& c, const char* suffix) {
        if (c.is_zero()) return;
        Rational a = c;
        if (out.empty()) {
            if (a < Rational(0)) { out += "-"; a = -a; }
        } else {
            out += (a < Rational(0)) ? "-" : "+";
            if (a < Rational(0)) a = -a;
        }
        if (*suffix == '\0' || a != Rational(1)) out += a.to_string();
        out += suffix;
    };
    term(q, "");
    term(cd, "d");
    term(ck, "k");
    return out.empty() ? "0" : out;
}

inline FormalExp FormalExp::parse(const std::string& s) {
    FormalExp e;
    std::size_t i = 0;
    if (s.empty()) throw std::invalid_argument("FormalExp: empty string");
    while (i < s.size()) {
        int sign = 1;
        while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            if (s[i] == '-') sign = -sign;
            ++i;
        }
        if (i == s.size()) throw std::invalid_argument("FormalExp: dangling sign in '" + s + "'");
        std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
        Rational mag(1);
        if (i > start) mag = Rational::from_string(s.substr(start, i - start));
        else if (i < s.size() && s[i] != 'd' && s[i] != 'k')
            throw std::invalid_argument("FormalExp: unexpected char in '" + s + "'");
        Rational signed_mag = (sign < 0) ? -mag : mag;
        if (i < s.size() && s[i] == 'd') { e.cd += signed_mag; ++i; }
        else if (i < s.size() && s[i] == 'k') { e.ck += signed_mag; ++i; }
        else if (i > start) e.q += signed_mag;
        else throw std::invalid_argument("FormalExp: cannot parse '" + s + "'");
    }
    return e;
}

}  // namespace coex
