#include <doctest.h>

#include <random>

#include <coexscale/wick.hpp>

using namespace coex;

namespace {

FormalScalar fc(long long n, long long d = 1) { return FormalScalar::constant(Rational(n, d)); }
FormalScalar fC1() { return FormalScalar::variable(var::C1); }

Symbol random_wick_symbol(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
    switch (pick(rng)) {
        case 0:
            return Symbol::one();
        case 1: {
            std::uniform_int_distribution<int> p(1, 4);
            return Symbol::psi().pow(p(rng));
        }
        case 2: {
            std::uniform_int_distribution<int> k(0, 2);
            return Symbol::x({k(rng), k(rng), 0, 0});
        }
        case 3:
            return Symbol::i(random_wick_symbol(rng, depth - 1));
        case 4: {
            std::uniform_int_distribution<int> b(1, 3);
            const int b2 = b(rng);
            Symbol arg = random_wick_symbol(rng, depth - 1);
            if (arg.nfactors() > b2 + 3) arg = Symbol::psi().pow(b2 + 3);
            return Symbol::e(b2, arg);
        }
        default: {
            std::uniform_int_distribution<int> p(1, 3);
            Symbol s = Symbol::psi().pow(p(rng));
            return s * Symbol::i(random_wick_symbol(rng, depth - 1));
        }
    }
}

}  // namespace

TEST_CASE("hermite closed forms and derivative identity") {
    using PR = Poly<Rational>;
    const Rational C(5, 3);
    CHECK(hermite(0, C) == PR{Rational(1)});
    CHECK(hermite(1, C) == PR::monomial(1));
    CHECK(hermite(2, C) == PR{-C, Rational(0), Rational(1)});
    CHECK(hermite(3, C) == PR{Rational(0), Rational(-3) * C, Rational(0), Rational(1)});
    CHECK(hermite(4, C) ==
          PR{Rational(3) * C * C, Rational(0), Rational(-6) * C, Rational(0), Rational(1)});
    CHECK(hermite(5, C) == PR{Rational(0), Rational(15) * C * C, Rational(0), Rational(-10) * C,
                              Rational(0), Rational(1)});
    CHECK(hermite(6, C) ==
          PR{Rational(-15) * C * C * C, Rational(0), Rational(45) * C * C, Rational(0),
             Rational(-15) * C, Rational(0), Rational(1)});
    for (int k = 1; k <= 12; ++k)
        CHECK(hermite(k, C).derivative() == Rational(k) * hermite(k - 1, C));
    CHECK_THROWS_AS(hermite(13, C), std::invalid_argument);
    CHECK_THROWS_AS(hermite(-1, C), std::invalid_argument);
}

TEST_CASE("wick ordering of pure powers matches hermite") {
    for (int k = 0; k <= 6; ++k) {
        const LinearCombination got = wick_map(Symbol::psi().pow(k), fC1());
        const Poly<FormalScalar> h = hermite(k, fC1());
        LinearCombination expect;
        for (int j = 0; j <= h.degree(); ++j) expect.add(Symbol::psi().pow(j), h.coeff(j));
        CHECK(got == expect);
    }
}

TEST_CASE("wick ordering of a mixed product") {
    const Symbol psi = Symbol::psi();
    const Symbol tau = psi.pow(2) * Symbol::i(psi.pow(3));
    const LinearCombination got = wick_map(tau, fC1());

    LinearCombination expect(tau);
    expect.add(Symbol::i(psi.pow(3)), -fC1());
    expect.add(psi.pow(2) * Symbol::i(psi), fc(-3) * fC1());
    expect.add(Symbol::i(psi), fc(3) * fC1() * fC1());
    CHECK(got == expect);

    // Same thing as a product of independently ordered blocks
    // H_2(Psi)*I(H_3(Psi)).
    const LinearCombination h2 = wick_map(psi.pow(2), fC1());
    const LinearCombination h3 = wick_map(psi.pow(3), fC1());
    LinearCombination ih3;
    for (const auto& [s, c] : h3.terms()) ih3.add(Symbol::i(s), c);
    CHECK(got == h2 * ih3);
}

TEST_CASE("wick ordering commutes with decorations and fixes the rest") {
    CHECK(wick_map(Symbol::xi(), fC1()) == LinearCombination(Symbol::xi()));
    CHECK(wick_map(Symbol::x({1, 0, 2, 0}), fC1()) ==
          LinearCombination(Symbol::x({1, 0, 2, 0})));
    CHECK(wick_map(Symbol::one(), fC1()) == LinearCombination(Symbol::one()));

    const LinearCombination got = wick_map(Symbol::e(1, Symbol::psi().pow(4)), fC1());
    CHECK(got.coeff(Symbol::e(1, Symbol::psi().pow(2))) == fc(-6) * fC1());
    CHECK(got.coeff(Symbol::e(1, Symbol::one())) == fc(3) * fC1() * fC1());
    CHECK(got.coeff(Symbol::e(1, Symbol::psi().pow(4))) == fc(1));
}

TEST_CASE("wick ordering inverts with the opposite variance") {
    std::mt19937_64 rng(0x57ec5u);
    for (int trial = 0; trial < 60; ++trial) {
        const Symbol tau = random_wick_symbol(rng, 3);
        const LinearCombination twice = wick_map(wick_map(tau, fC1()), -fC1());
        CHECK(twice == LinearCombination(tau));
    }
}

TEST_CASE("mass renormalisation contraction patterns") {
    const auto Cn = formal_cn_list(6);
    const auto Cnp = formal_cnp_list(6);
    const Symbol psi = Symbol::psi();
    const auto C = [](int n) { return FormalScalar::variable(var::Cn(n)); };
    const auto Cp = [](int n) { return FormalScalar::variable(var::Cnp(n)); };

    SUBCASE("matched second-order shapes") {
        // outer/inner decorations (n-2, n-2) at n=3
        const Symbol t1 = Symbol::e(1, psi.pow(3) * Symbol::i(Symbol::e(1, psi.pow(3))));
        LinearCombination e1(t1);
        e1.add(Symbol::one(), fc(-6) * C(3));
        CHECK(m0_map(t1, Cn, Cnp) == e1);

        // (n-2, n-3) at n=3 hits the primed constant
        const Symbol t2 = Symbol::e(1, psi.pow(3) * Symbol::i(psi.pow(3)));
        LinearCombination e2(t2);
        e2.add(Symbol::one(), fc(-6) * Cp(3));
        CHECK(m0_map(t2, Cn, Cnp) == e2);

        // undecorated n=2 with one extra noise factor inside
        const Symbol t3 = psi.pow(2) * Symbol::i(psi.pow(3));
        LinearCombination e3(t3);
        e3.add(psi, fc(-6) * C(2));
        CHECK(m0_map(t3, Cn, Cnp) == e3);

        // (n-1, n-3) at n=3, both parities
        const Symbol t4 = Symbol::e(2, psi.pow(3) * Symbol::i(psi.pow(3)));
        LinearCombination e4(t4);
        e4.add(Symbol::one(), fc(-6) * C(3));
        CHECK(m0_map(t4, Cn, Cnp) == e4);

        const Symbol t5 = Symbol::e(2, psi.pow(4) * Symbol::i(psi.pow(3)));
        LinearCombination e5(t5);
        e5.add(psi, fc(-24) * C(3));
        CHECK(m0_map(t5, Cn, Cnp) == e5);

        // undecorated n=2 base pattern
        const Symbol t6 = psi.pow(2) * Symbol::i(psi.pow(2));
        LinearCombination e6(t6);
        e6.add(Symbol::one(), fc(-2) * C(2));
        CHECK(m0_map(t6, Cn, Cnp) == e6);
    }

    SUBCASE("everything else is fixed") {
        for (const Symbol& s :
             {Symbol::xi(), psi.pow(3), Symbol::e(1, psi.pow(4)), Symbol::x({0, 1, 0, 0}),
              psi * Symbol::i(psi.pow(3)), Symbol::i(psi.pow(2))})
            CHECK(m0_map(s, Cn, Cnp) == LinearCombination(s));
    }
}

TEST_CASE("gaussian smoothing moment formulas") {
    using PR = Poly<Rational>;
    const Rational v(7, 2);
    CHECK(gaussian_smooth(PR::monomial(3), v) ==
          PR{Rational(0), Rational(3) * v, Rational(0), Rational(1)});
    CHECK(gaussian_smooth(PR::monomial(4), v) ==
          PR{Rational(3) * v * v, Rational(0), Rational(6) * v, Rational(0), Rational(1)});
    CHECK_THROWS_AS(gaussian_smooth(PR::monomial(2), Rational(-1)), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_smooth(Poly<double>::monomial(2), -0.5), std::invalid_argument);
}

TEST_CASE("gaussian smoothing semigroup and parity") {
    std::mt19937_64 rng(0x5e141u);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> var(0, 4);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Rational> c(9);
        for (auto& x : c) x = Rational(coeff(rng));
        const Poly<Rational> p(c);
        const Rational v1(var(rng)), v2(var(rng));
        CHECK(gaussian_smooth(gaussian_smooth(p, v1), v2) == gaussian_smooth(p, v1 + v2));
    }
    // odd input stays odd
    const Poly<Rational> podd{Rational(0), Rational(2), Rational(0), Rational(-1), Rational(0),
                              Rational(4)};
    const Poly<Rational> sm = gaussian_smooth(podd, Rational(3));
    for (int j = 0; j <= sm.degree(); j += 2) CHECK(sm.coeff(j) == Rational(0));
}

TEST_CASE("coefficient shift in the tuning parameter") {
    // degree-3 family, pitchfork-like: a2 = 0 so the shifted quadratic
    // coefficient is exactly 3*a3*h
    const std::vector<ThetaSeries> a{{0.0, 0.0, 2.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0},
                                     {1.5, 0.0, 0.0}};
    const double h = 0.25;
    const auto sh = shift_expand(a, h, 3);
    CHECK(sh[2].series.value == doctest::Approx(3.0 * 1.5 * h).epsilon(1e-15));
    CHECK(sh[3].series.value == doctest::Approx(1.5).epsilon(1e-15));
    // constant term jet: value a3 h^3, theta-slope a1' h, curvature a0''
    CHECK(sh[0].series.value == doctest::Approx(1.5 * h * h * h).epsilon(1e-15));
    CHECK(sh[0].series.d1 == doctest::Approx(-1.0 * h).epsilon(1e-15));
    CHECK(sh[0].series.d2 == doctest::Approx(2.0).epsilon(1e-15));
    for (const auto& s : sh) CHECK_FALSE(s.has_remainder);

    SUBCASE("zero shift is the identity") {
        const auto id = shift_expand(a, 0.0, 3, true);
        for (int j = 0; j <= 3; ++j) {
            CHECK(id[j].series.value == a[j].value);
            CHECK(id[j].series.d1 == a[j].d1);
            CHECK_FALSE(id[j].has_remainder);
        }
    }

    SUBCASE("truncated mode flags the tail") {
        std::vector<ThetaSeries> a6(7);
        a6[6].value = 1.0;
        for (const auto& s : shift_expand(a6, 0.1, 6, true)) CHECK(s.has_remainder);
    }

    SUBCASE("two shifts compose additively") {
        const double h1 = 0.5, h2 = -0.75;
        const auto once = shift_expand(a, h1 + h2, 3);
        auto first = shift_expand(a, h1, 3);
        std::vector<ThetaSeries> mid(first.size());
        for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = first[j].series;
        const auto twice = shift_expand(mid, h2, 3);
        for (std::size_t j = 0; j < once.size(); ++j) {
            CHECK(twice[j].series.value == doctest::Approx(once[j].series.value).epsilon(1e-13));
            CHECK(twice[j].series.d1 == doctest::Approx(once[j].series.d1).epsilon(1e-13));
            CHECK(twice[j].series.d2 == doctest::Approx(once[j].series.d2).epsilon(1e-13));
        }
    }

    CHECK_THROWS_AS(shift_expand(a, 0.1, 5), std::invalid_argument);
}

TEST_CASE("hermite rewrite basics") {
    using PD = Poly<double>;
    SUBCASE("linear potential") {
        const auto b = hermite_rewrite(PD::monomial(1), 0.3, 0.7, 2.0);
        REQUIRE(b.size() == 2);
        CHECK(b[0] == doctest::Approx(0.7));
        CHECK(b[1] == doctest::Approx(1.0));
    }
    SUBCASE("cubic at zero shift") {
        const double delta = 0.25, c1 = 3.0;
        const auto b = hermite_rewrite(PD::monomial(3), delta, 0.0, c1);
        REQUIRE(b.size() == 4);
        CHECK(b[0] == doctest::Approx(0.0));
        CHECK(b[1] == doctest::Approx(3.0 * c1 * delta));
        CHECK(b[2] == doctest::Approx(0.0));
        CHECK(b[3] == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(hermite_rewrite(PD::monomial(2), -1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hermite_rewrite(PD::monomial(2), 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("hermite rewrite identity is exact over the rationals") {
    std::mt19937_64 rng(0x4e3a7u);
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<int> small(1, 3);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Rational> c(7);
        for (auto& x : c) x = Rational(coeff(rng));
        const Poly<Rational> vp(c);
        const Rational s(small(rng), small(rng));      // delta = s^2 keeps s^j rational
        const Rational h(coeff(rng), small(rng));
        const Rational c1(small(rng), small(rng));
        const auto b = hermite_rewrite(vp, s * s, h, c1);

        Poly<Rational> lhs;  // V'(s*u + h) as a polynomial in u
        const Poly<Rational> shifted = vp.shifted(h);
        Rational spow(1);
        for (int j = 0; j <= shifted.degree(); ++j) {
            lhs.set_coeff(j, shifted.coeff(j) * spow);
            spow = spow * s;
        }
        Poly<Rational> rhs;
        Rational sj(1);
        for (std::size_t j = 0; j < b.size(); ++j) {
            rhs = rhs + (b[j] * sj) * hermite(static_cast<int>(j), c1);
            sj = sj * s;
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("hermite rewrite identity for floating point inputs") {
    std::mt19937_64 rng(0xb0b1eu);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> c(7);
        for (auto& x : c) x = u(rng);
        const Poly<double> vp(c);
        const double delta = 0.05 + 0.5 * std::abs(u(rng));
        const double h = u(rng);
        const double c1 = 0.1 + std::abs(u(rng));
        const auto b = hermite_rewrite(vp, delta, h, c1);
        const double sq = std::sqrt(delta);
        for (int pt = 0; pt < 20; ++pt) {
            const double x = 3.0 * u(rng);
            const double lhs = vp.eval(sq * x + h);
            double rhs = 0.0, dj = 1.0;
            for (std::size_t j = 0; j < b.size(); ++j) {
                rhs += b[j] * dj * hermite(static_cast<int>(j), c1).eval(x);
                dj *= sq;
            }
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear combinations cancel and multiply bilinearly") {
    LinearCombination a(Symbol::psi());
    a.add(Symbol::one(), fc(1));
    LinearCombination b(Symbol::psi());
    b.add(Symbol::one(), fc(-1));
    const LinearCombination prod = a * b;
    LinearCombination expect(Symbol::psi().pow(2));
    expect.add(Symbol::one(), fc(-1));
    CHECK(prod == expect);

    LinearCombination z(Symbol::xi());
    z.add(Symbol::xi(), fc(-1));
    CHECK(z.is_zero());
}
