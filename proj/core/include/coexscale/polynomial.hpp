#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace coex {

// Dense univariate polynomial over an arbitrary commutative coefficient ring.
// T needs 0/1 construction from int, +, -, * and ==. Trailing zeros are
// trimmed so degree() is exact.
template <class T>
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<T> c) : c_(c) { trim_(); }
    explicit Poly(std::vector<T> c) : c_(std::move(c)) { trim_(); }

    static Poly monomial(std::size_t k, T coeff = T(1)) {
        std::vector<T> c(k + 1, T(0));
        c[k] = std::move(coeff);
        return Poly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    // degree() of the zero polynomial is -1 by convention.
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
    void set_coeff(std::size_t k, T v) {
        if (k >= c_.size()) c_.resize(k + 1, T(0));
        c_[k] = std::move(v);
        trim_();
    }
    const std::vector<T>& coeffs() const { return c_; }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend Poly operator*(const T& s, const Poly& p) {
        std::vector<T> c(p.c_);
        for (auto& x : c) x = s * x;
        return Poly(std::move(c));
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    template <class X>
    X eval(const X& x) const {
        X acc = X(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + X(c_[i]);
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<T> c(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = T(static_cast<int>(i)) * c_[i];
        return Poly(std::move(c));
    }

    // p(x + h) expanded exactly via iterated synthetic shift.
    Poly shifted(const T& h) const {
        std::vector<T> c(c_);
        for (std::size_t i = c.size(); i-- > 0;)
            for (std::size_t j = i; j + 1 < c.size(); ++j) c[j] = c[j] + h * c[j + 1];
        return Poly(std::move(c));
    }

private:
    void trim_() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }
    std::vector<T> c_;
};

using PolyD = Poly<double>;

}  // namespace coex
