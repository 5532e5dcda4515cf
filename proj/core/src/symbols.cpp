#include "coexscale/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace coex {

namespace {

constexpr std::size_t kHashSeed = 0x9e3779b97f4a7c15ULL;

std::size_t hash_mix(std::size_t h, std::size_t v) {
    return h ^ (v + kHashSeed + (h << 6) + (h >> 2));
}

int kind_rank(Symbol::Kind k) {
    switch (k) {
        case Symbol::Kind::One: return 0;
        case Symbol::Kind::X: return 1;
        case Symbol::Kind::Xi: return 2;
        case Symbol::Kind::I: return 3;
        case Symbol::Kind::E: return 4;
        case Symbol::Kind::Prod: return 5;
    }
    return 6;
}

}  // namespace

struct Symbol::Node {
    Kind kind = Kind::One;
    MultiIndex k;
    int beta2 = 0;
    std::vector<Symbol> kids;
    Homogeneity hom;
    std::size_t hash = 0;
};

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (int i = 0; i < 4; ++i) {
        if (i) s += ",";
        s += std::to_string(k[i]);
    }
    return s + ")";
}

std::string Homogeneity::to_string() const {
    std::string out;
    if (!q.is_zero() || nk == 0) out = q.to_string();
    if (nk != 0) {
        if (nk > 0 && !out.empty()) out += "+";
        if (nk == -1) out += "-";
        else if (nk != 1) out += std::to_string(nk);
        out += "k";
    }
    return out;
}

Symbol::Symbol() : n_(one().n_) {}

Symbol Symbol::one() {
    static const std::shared_ptr<const Node> node = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::One;
        n->hash = hash_mix(0, 0);
        return n;
    }();
    return Symbol(node);
}

Symbol Symbol::xi() {
    static const std::shared_ptr<const Node> node = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Xi;
        n->hom = Homogeneity{Rational(-5, 2), -1};
        n->hash = hash_mix(0, 2);
        return n;
    }();
    return Symbol(node);
}

Symbol Symbol::x(const MultiIndex& k) {
    if (k.is_zero()) return one();
    for (int c : k.k)
        if (c < 0) throw std::invalid_argument("Symbol::x: negative multi-index entry");
    auto n = std::make_shared<Node>();
    n->kind = Kind::X;
    n->k = k;
    n->hom = Homogeneity{Rational(k.pdeg()), 0};
    std::size_t h = hash_mix(0, 1);
    for (int c : k.k) h = hash_mix(h, static_cast<std::size_t>(c));
    n->hash = h;
    return Symbol(std::move(n));
}

Symbol Symbol::i(const Symbol& arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::I;
    n->kids = {arg};
    n->hom = arg.hom() + Homogeneity{Rational(2), 0};
    n->hash = hash_mix(hash_mix(0, 3), arg.hash());
    return Symbol(std::move(n));
}

Symbol Symbol::e(int beta2, const Symbol& arg) {
    if (beta2 == 0) return arg;
    if (beta2 < 0) throw std::invalid_argument("Symbol::e: beta must be positive");
    // The noise operator acts on products of k+3 generator factors when
    // beta = k/2; canonical merging can only shrink the factor count.
    if (arg.nfactors() > beta2 + 3)
        throw std::invalid_argument("Symbol::e: argument has too many factors for beta = " +
                                    Rational(beta2, 2).to_string());
    auto n = std::make_shared<Node>();
    n->kind = Kind::E;
    n->beta2 = beta2;
    n->kids = {arg};
    n->hom = arg.hom() + Homogeneity{Rational(beta2, 2), 0};
    n->hash = hash_mix(hash_mix(hash_mix(0, 4), static_cast<std::size_t>(beta2)), arg.hash());
    return Symbol(std::move(n));
}

Symbol Symbol::psi() {
    static const Symbol p = i(xi());
    return p;
}

Symbol Symbol::prod(std::vector<Symbol> factors) {
    std::vector<Symbol> flat;
    MultiIndex xsum;
    auto absorb = [&](const Symbol& f) {
        if (f.kind() == Kind::One) return;
        if (f.kind() == Kind::X) { xsum = xsum + f.xindex(); return; }
        flat.push_back(f);
    };
    for (const Symbol& f : factors) {
        if (f.kind() == Kind::Prod)
            for (const Symbol& g : f.factors()) absorb(g);
        else
            absorb(f);
    }
    if (!xsum.is_zero()) flat.push_back(x(xsum));
    if (flat.empty()) return one();
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end(), Symbol::less);

    auto n = std::make_shared<Node>();
    n->kind = Kind::Prod;
    Homogeneity h;
    std::size_t hh = hash_mix(0, 5);
    for (const Symbol& f : flat) {
        h = h + f.hom();
        hh = hash_mix(hh, f.hash());
    }
    n->kids = std::move(flat);
    n->hom = h;
    n->hash = hh;
    return Symbol(std::move(n));
}

Symbol Symbol::pow(int p) const {
    if (p < 0) throw std::invalid_argument("Symbol::pow: negative power");
    std::vector<Symbol> fs(static_cast<std::size_t>(p), *this);
    return prod(std::move(fs));
}

Symbol::Kind Symbol::kind() const { return n_->kind; }

const MultiIndex& Symbol::xindex() const {
    if (n_->kind != Kind::X) throw std::logic_error("Symbol::xindex: not a polynomial symbol");
    return n_->k;
}

int Symbol::beta2() const {
    if (n_->kind != Kind::E) throw std::logic_error("Symbol::beta2: not a noise symbol");
    return n_->beta2;
}

const Symbol& Symbol::arg() const {
    if (n_->kind != Kind::I && n_->kind != Kind::E)
        throw std::logic_error("Symbol::arg: symbol has no argument");
    return n_->kids[0];
}

const std::vector<Symbol>& Symbol::factors() const {
    if (n_->kind != Kind::Prod) throw std::logic_error("Symbol::factors: not a product");
    return n_->kids;
}

int Symbol::nfactors() const {
    switch (n_->kind) {
        case Kind::One: return 0;
        case Kind::Prod: return static_cast<int>(n_->kids.size());
        default: return 1;
    }
}

int Symbol::factor_count(const Symbol& f) const {
    if (n_->kind == Kind::Prod) {
        int c = 0;
        for (const Symbol& g : n_->kids)
            if (g == f) ++c;
        return c;
    }
    return (*this == f) ? 1 : 0;
}

const Homogeneity& Symbol::hom() const { return n_->hom; }
std::size_t Symbol::hash() const { return n_->hash; }

bool operator==(const Symbol& a, const Symbol& b) {
    if (a.n_ == b.n_) return true;
    const auto& x = *a.n_;
    const auto& y = *b.n_;
    if (x.hash != y.hash || x.kind != y.kind || x.beta2 != y.beta2 || x.k != y.k ||
        x.kids.size() != y.kids.size())
        return false;
    for (std::size_t i = 0; i < x.kids.size(); ++i)
        if (!(x.kids[i] == y.kids[i])) return false;
    return true;
}

bool Symbol::less(const Symbol& a, const Symbol& b) {
    if (a.n_ == b.n_) return false;
    int ra = kind_rank(a.kind());
    int rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb;
    switch (a.kind()) {
        case Kind::One:
        case Kind::Xi:
            return false;
        case Kind::X:
            return a.xindex() < b.xindex();
        case Kind::I:
            return less(a.arg(), b.arg());
        case Kind::E:
            if (a.beta2() != b.beta2()) return a.beta2() < b.beta2();
            return less(a.arg(), b.arg());
        case Kind::Prod: {
            const auto& ka = a.factors();
            const auto& kb = b.factors();
            return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end(), less);
        }
    }
    return false;
}

std::string Symbol::to_string() const {
    switch (n_->kind) {
        case Kind::One: return "1";
        case Kind::Xi: return "Xi";
        case Kind::X: return "X^" + n_->k.to_string();
        case Kind::I: return "I(" + n_->kids[0].to_string() + ")";
        case Kind::E:
            return "E^{" + Rational(n_->beta2, 2).to_string() + "}(" + n_->kids[0].to_string() +
                   ")";
        case Kind::Prod: {
            std::string s;
            for (const Symbol& f : n_->kids) s += f.to_string();
            return s;
        }
    }
    return {};
}

namespace {

class SymbolParser {
public:
    explicit SymbolParser(const std::string& s) : s_(s) {}

    Symbol parse() {
        Symbol r = parse_product_();
        skip_ws_();
        if (pos_ != s_.size()) fail_("trailing input");
        return r;
    }

private:
    Symbol parse_product_() {
        std::vector<Symbol> fs;
        skip_ws_();
        while (pos_ < s_.size() && s_[pos_] != ')') {
            fs.push_back(parse_factor_());
            skip_ws_();
        }
        if (fs.empty()) fail_("empty expression");
        return Symbol::prod(std::move(fs));
    }

    Symbol parse_factor_() {
        if (consume_("Xi")) return Symbol::xi();
        if (consume_("X^(")) {
            MultiIndex k;
            for (int i = 0; i < 4; ++i) {
                k.k[i] = parse_int_();
                if (i < 3) expect_(',');
            }
            expect_(')');
            return Symbol::x(k);
        }
        if (consume_("I(")) {
            Symbol a = parse_product_();
            expect_(')');
            return Symbol::i(a);
        }
        if (consume_("E^{")) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] != '}') ++pos_;
            if (pos_ == s_.size()) fail_("unterminated exponent");
            Rational beta = Rational::from_string(s_.substr(start, pos_ - start));
            ++pos_;
            Rational b2 = beta * Rational(2);
            if (!b2.is_integer() || !(Rational(0) < beta))
                fail_("exponent must be a positive half-integer");
            expect_('(');
            Symbol a = parse_product_();
            expect_(')');
            return Symbol::e(static_cast<int>(b2.num()), a);
        }
        if (consume_("1")) return Symbol::one();
        fail_("unexpected input");
        return Symbol::one();
    }

    int parse_int_() {
        skip_ws_();
        std::size_t start = pos_;
        if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) fail_("expected integer");
        return std::stoi(s_.substr(start, pos_ - start));
    }

    bool consume_(const char* lit) {
        std::size_t n = std::char_traits<char>::length(lit);
        if (s_.compare(pos_, n, lit) == 0) {
            pos_ += n;
            return true;
        }
        return false;
    }
    void expect_(char c) {
        skip_ws_();
        if (pos_ >= s_.size() || s_[pos_] != c) fail_(std::string("expected '") + c + "'");
        ++pos_;
    }
    void skip_ws_() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail_(const std::string& why) {
        throw std::invalid_argument("parse_symbol: " + why + " at offset " +
                                    std::to_string(pos_) + " in '" + s_ + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Symbol parse_symbol(const std::string& text) { return SymbolParser(text).parse(); }

std::size_t Basis::count_U() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.in_U;
    return c;
}
std::size_t Basis::count_V() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.in_V;
    return c;
}
std::size_t Basis::count_Wex() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.in_Wex;
    return c;
}
std::vector<Symbol> Basis::symbols_U() const {
    std::vector<Symbol> r;
    for (const auto& e : entries)
        if (e.in_U) r.push_back(e.sym);
    return r;
}
std::vector<Symbol> Basis::symbols_V() const {
    std::vector<Symbol> r;
    for (const auto& e : entries)
        if (e.in_V) r.push_back(e.sym);
    return r;
}
const BasisEntry* Basis::find(const Symbol& s) const {
    for (const auto& e : entries)
        if (e.sym == s) return &e;
    return nullptr;
}

namespace {

Homogeneity scale_hom(int n, const Homogeneity& h) {
    return Homogeneity{Rational(n) * h.q, n * h.nk};
}

// Enumerates index-ascending multisets of size n over `pool` (sorted by
// ascending homogeneity) whose homogeneity sum stays below `bound`, calling
// `emit` with the chosen factors. The ascending order makes the prefix prune
// exact: once partial + remaining * hom(pool[i]) >= bound, no later choice at
// this depth can succeed.
template <class F>
void enumerate_bounded_products(const std::vector<Symbol>& pool, int n, const Homogeneity& bound,
                                const F& emit) {
    std::vector<Symbol> chosen;
    chosen.reserve(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, std::size_t start, int remaining, Homogeneity partial) -> void {
        if (remaining == 0) {
            if (partial < bound) emit(chosen);
            return;
        }
        for (std::size_t i = start; i < pool.size(); ++i) {
            if (!(partial + scale_hom(remaining, pool[i].hom()) < bound)) break;
            chosen.push_back(pool[i]);
            self(self, i, remaining - 1, partial + pool[i].hom());
            chosen.pop_back();
        }
    };
    rec(rec, 0, n, Homogeneity{Rational(0), 0});
}

void enumerate_multiindices(int max_pdeg, const std::function<void(const MultiIndex&)>& f) {
    MultiIndex k;
    for (k.k[0] = 0; 2 * k.k[0] <= max_pdeg; ++k.k[0])
        for (k.k[1] = 0; 2 * k.k[0] + k.k[1] <= max_pdeg; ++k.k[1])
            for (k.k[2] = 0; 2 * k.k[0] + k.k[1] + k.k[2] <= max_pdeg; ++k.k[2])
                for (k.k[3] = 0; 2 * k.k[0] + k.k[1] + k.k[2] + k.k[3] <= max_pdeg; ++k.k[3])
                    f(k);
}

}  // namespace

Basis generate_basis(int m, const Rational& gamma, const Rational& kappa) {
    if (m < 4) throw std::invalid_argument("generate_basis: m must be at least 4");
    if (!(Rational(0) < kappa && kappa < Rational(1, 8 * static_cast<std::int64_t>(m))))
        throw std::invalid_argument("generate_basis: kappa must lie in (0, 1/(8m))");

    const Homogeneity v_cap{gamma, 0};  // members of V satisfy hom < gamma strictly
    // Elements of U with rational part above gamma+1 cannot appear in any
    // product that lands below gamma (the two cheapest companion factors cost
    // at least -1 plus kappa terms), so they are not generated at all.
    const Rational u_cap_q = gamma + Rational(1);

    std::set<Symbol, SymbolLess> U, V, Wex;

    if (u_cap_q >= Rational(0)) {
        int dmax = 0;
        while (Rational(dmax + 1) <= u_cap_q) ++dmax;
        enumerate_multiindices(dmax, [&](const MultiIndex& k) { U.insert(Symbol::x(k)); });
    }
    if (Symbol::xi().hom() < v_cap) V.insert(Symbol::xi());

    constexpr int kMaxPasses = 64;
    bool converged = false;
    for (int pass = 0; pass < kMaxPasses && !converged; ++pass) {
        const std::size_t before = U.size() + V.size();

        std::vector<Symbol> pool(U.begin(), U.end());
        std::sort(pool.begin(), pool.end(), [](const Symbol& a, const Symbol& b) {
            if (a.hom() != b.hom()) return a.hom() < b.hom();
            return Symbol::less(a, b);
        });

        enumerate_bounded_products(pool, 3, v_cap, [&](const std::vector<Symbol>& fs) {
            V.insert(Symbol::prod(fs));
        });
        for (int k = 1; k <= m - 3; ++k) {
            const Homogeneity arg_cap{gamma - Rational(k, 2), 0};
            enumerate_bounded_products(pool, k + 3, arg_cap, [&](const std::vector<Symbol>& fs) {
                Symbol arg = Symbol::prod(fs);
                V.insert(Symbol::e(k, arg));
                Wex.insert(arg);
            });
        }
        for (const Symbol& tau : V) {
            Symbol itau = Symbol::i(tau);
            if (itau.hom().q <= u_cap_q) U.insert(itau);
        }

        converged = (U.size() + V.size() == before);
    }
    if (!converged) throw std::runtime_error("generate_basis: closure did not stabilise");

    std::map<Symbol, BasisEntry, SymbolLess> out;
    auto tag = [&](const Symbol& s, bool u, bool v, bool w) {
        if (!(s.hom() < v_cap)) return;
        auto& e = out.try_emplace(s, BasisEntry{s}).first->second;
        e.in_U |= u;
        e.in_V |= v;
        e.in_Wex |= w;
    };
    for (const Symbol& s : U) tag(s, true, false, false);
    for (const Symbol& s : V) tag(s, false, true, false);
    for (const Symbol& s : Wex) tag(s, false, false, true);

    Basis b;
    b.m = m;
    b.gamma = gamma;
    b.kappa = kappa;
    for (auto& [s, e] : out) b.entries.push_back(e);
    std::sort(b.entries.begin(), b.entries.end(), [](const BasisEntry& a, const BasisEntry& r) {
        if (a.sym.hom() != r.sym.hom()) return a.sym.hom() < r.sym.hom();
        return Symbol::less(a.sym, r.sym);
    });
    return b;
}

std::int64_t multiindex_count(int degree) {
    if (degree < 0) return 0;
    std::int64_t total = 0;
    for (int k0 = 0; 2 * k0 <= degree; ++k0) {
        std::int64_t r = degree - 2 * k0;
        total += (r + 2) * (r + 1) / 2;
    }
    return total;
}

namespace {

// Largest integer D with (D, 0) < h in the lexicographic order, or -1 if none.
int max_degree_strictly_below(const Homogeneity& h) {
    if (!(Homogeneity{Rational(0), 0} < h)) return -1;
    int d = 0;
    while (Homogeneity{Rational(d + 1), 0} < h) ++d;
    return d;
}

// Smallest integer D >= 0 with (D, 0) >= h.
int min_degree_at_least(const Homogeneity& h) {
    int d = 0;
    while (Homogeneity{Rational(d), 0} < h) ++d;
    return d;
}

DegreeRange degree_range(int lo, int hi) {
    DegreeRange r;
    for (int d = std::max(lo, 0); d <= hi; ++d) r.degrees.push_back({d, multiindex_count(d)});
    return r;
}

}  // namespace

TplusGenerators tplus_generators(const Basis& basis) {
    TplusGenerators g;
    g.polynomial.push_back(Symbol::one());
    for (int i = 0; i < 4; ++i) {
        MultiIndex k;
        k.k[i] = 1;
        g.polynomial.push_back(Symbol::x(k));
    }
    for (const auto& e : basis.entries) {
        if (!(e.in_U || e.in_V)) continue;
        if (e.sym.kind() == Symbol::Kind::One || e.sym.kind() == Symbol::Kind::X) continue;
        JGenerator j;
        j.tau = e.sym;
        j.range = degree_range(0, max_degree_strictly_below(e.sym.hom() + Homogeneity{Rational(2), 0}));
        g.kernel.push_back(std::move(j));
        if (e.sym.kind() == Symbol::Kind::E) {
            JGenerator n;
            n.tau = e.sym;
            const Homogeneity arg_hom = e.sym.arg().hom();
            n.range = degree_range(min_degree_at_least(arg_hom),
                                   max_degree_strictly_below(e.sym.hom()));
            g.noise.push_back(std::move(n));
        }
    }
    return g;
}

}  // namespace coex
