#include <coexscale/classify.hpp>

#include <coexscale/constants.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace coex {

namespace {

// Relative tolerance for comparing an expansion coefficient against the
// critical value of its level. The charts are discontinuous across the
// critical rays, so comparisons within a decade of this are surfaced.
constexpr double kRhoCompareTol = 1e-9;

Rational rat(int n, int d = 1) { return Rational(n, d); }

TerminalBranch ou_stable(Rational alpha_const, Rational alpha_slope = Rational(0),
                         int pair_id = 0) {
    return {LimitFamily::OU_stable, true, alpha_const, alpha_slope, pair_id, false};
}

TerminalBranch ou_unstable(Rational alpha_const, Rational alpha_slope = Rational(0)) {
    return {LimitFamily::OU_unstable, true, alpha_const, alpha_slope, 0, false};
}

TerminalBranch phi3_node(Rational alpha_const, bool parametrised) {
    return {LimitFamily::Phi3, true, alpha_const, Rational(0), 0, parametrised};
}

}  // namespace

double PotentialSpec::a(int j) const {
    return j >= 0 && j < static_cast<int>(coeffs.size()) ? coeffs[j].value : 0.0;
}
double PotentialSpec::ap(int j) const {
    return j >= 0 && j < static_cast<int>(coeffs.size()) ? coeffs[j].d1 : 0.0;
}
double PotentialSpec::app(int j) const {
    return j >= 0 && j < static_cast<int>(coeffs.size()) ? coeffs[j].d2 : 0.0;
}

void ThetaExpansion::validate() const {
    if (terms.size() > 4)
        throw std::invalid_argument("theta expansion: at most four terms are supported");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!std::isfinite(terms[i].rho))
            throw std::invalid_argument("theta expansion: coefficient must be finite");
        if (terms[i].rho == 0.0)
            throw std::invalid_argument("theta expansion: zero coefficient; omit the term");
        if (!(Rational(0) < terms[i].beta))
            throw std::invalid_argument("theta expansion: exponents must be positive");
        if (i > 0 && !(terms[i - 1].beta < terms[i].beta))
            throw std::invalid_argument("theta expansion: exponents must be strictly increasing");
    }
}

BifurcationKind detect_bifurcation(const PotentialSpec& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("detect_bifurcation: tol must be positive");
    if (static_cast<int>(p.coeffs.size()) < 4)
        throw std::invalid_argument("detect_bifurcation: coefficient data through degree 3 required");
    if (p.regime == Regime::weakly_nonlinear && p.a(0) != 0.0)
        throw std::invalid_argument("detect_bifurcation: smoothed data must have a_0 = 0");

    BifurcationKind kind;
    // Every comparison that shapes the verdict is recorded; a witness within a
    // decade of the threshold on either side flags the verdict as ambiguous.
    auto inspect = [&](const char* name, double v) {
        kind.witnesses.push_back({name, v});
        const double m = std::abs(v);
        if (m >= tol / 10.0 && m < 10.0 * tol) kind.near_tolerance = true;
        return m >= tol;
    };

    if (p.regime == Regime::weak_noise && inspect("a0", p.a(0))) {
        kind.type = BifurcationType::other;
        return kind;
    }
    if (inspect("a1", p.a(1))) {
        kind.type = BifurcationType::stable_point;
        return kind;
    }
    const bool a0p_nonzero = inspect("a0'", p.ap(0));
    const bool a2_nonzero = inspect("a2", p.a(2));
    if (a0p_nonzero && a2_nonzero) {
        kind.type = BifurcationType::saddle_node;
        return kind;
    }
    if (!a0p_nonzero && !a2_nonzero) {
        const bool a1p_nonzero = inspect("a1'", p.ap(1));
        const bool a3_nonzero = inspect("a3", p.a(3));
        if (a1p_nonzero && p.ap(1) < 0.0 && a3_nonzero && p.a(3) > 0.0) {
            kind.type = BifurcationType::pitchfork;
            return kind;
        }
    }
    kind.type = BifurcationType::other;
    return kind;
}

std::vector<CubicRoot> cubic_roots(double rho, double a3, double a1p, double A, double tol) {
    if (!(a3 > 0.0) || !(a1p < 0.0) || !(A > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("cubic_roots: requires a3 > 0, a1p < 0, A > 0, rho > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("cubic_roots: tol must be positive");

    // Depressed form r^3 + pc r + qc with pc < 0 and qc < 0.
    const double pc = rho * a1p / a3;
    const double qc = -A / a3;
    const double scale = std::max(std::sqrt(-pc), std::cbrt(-qc));
    const double disc = -4.0 * pc * pc * pc - 27.0 * qc * qc;
    const double threshold = tol * std::pow(scale, 6);

    const auto f = [&](double r) { return a3 * r * r * r + rho * a1p * r - A; };
    const auto fp = [&](double r) { return 3.0 * a3 * r * r + rho * a1p; };
    const auto polish = [&](double r) {
        for (int i = 0; i < 3; ++i) {
            const double s = fp(r);
            if (s == 0.0) break;
            r -= f(r) / s;
        }
        return r;
    };
    const auto simple = [&](double r) {
        const double s = fp(r);
        return CubicRoot{r, 1, s > 0.0 ? RootStability::stable : RootStability::unstable, s};
    };

    std::vector<CubicRoot> out;
    if (disc > threshold) {
        const double m = 2.0 * std::sqrt(-pc / 3.0);
        const double phi = std::acos(std::clamp(3.0 * qc / (pc * m), -1.0, 1.0));
        for (int s = 0; s < 3; ++s)
            out.push_back(simple(polish(m * std::cos((phi - 2.0 * std::numbers::pi * s) / 3.0))));
    } else if (disc < -threshold) {
        const double d = qc * qc / 4.0 + pc * pc * pc / 27.0;
        const double sq = std::sqrt(d);
        out.push_back(simple(polish(std::cbrt(-qc / 2.0 + sq) + std::cbrt(-qc / 2.0 - sq))));
    } else {
        // Double root plus a simple one; the double root is not Newton-polished
        // since the slope vanishes there.
        const double dbl = -3.0 * qc / (2.0 * pc);
        out.push_back({dbl, 2, RootStability::degenerate, fp(dbl)});
        out.push_back(simple(polish(3.0 * qc / pc)));
    }
    std::sort(out.begin(), out.end(),
              [](const CubicRoot& x, const CubicRoot& y) { return x.value < y.value; });
    return out;
}

double rho_star(double a3, double a1p, double A) {
    if (!(a3 > 0.0) || !(a1p < 0.0) || !(A > 0.0))
        throw std::invalid_argument("rho_star: requires a3 > 0, a1p < 0, A > 0");
    return 3.0 / std::abs(a1p) * std::cbrt(a3 * A * A / 4.0);
}

ClassifierConstants ClassifierConstants::synthetic(int nmax) {
    ClassifierConstants k;
    k.Cn.assign(static_cast<std::size_t>(std::max(nmax, 0)) + 1, 1.0);
    return k;
}

const std::vector<ChartLevel>& weakly_nonlinear_chart() {
    static const std::vector<ChartLevel> chart = [] {
        std::vector<ChartLevel> c(2);
        // Level 1: single-term trichotomy around the 2/3 ray. The shallow side
        // observes the opposite-shift pair and the saddle at (1 + beta)/2; the
        // steep side and both off-critical coefficient sides sit at 5/6, with
        // three distinct limits above the critical coefficient.
        c[0].beta_threshold = rat(2, 3);
        c[0].compares_rho = true;
        c[0].below = {ou_stable(rat(1, 2), rat(1, 2), 1), ou_unstable(rat(1, 2), rat(1, 2)),
                      ou_stable(rat(1, 2), rat(1, 2), 1)};
        c[0].above = {ou_stable(rat(5, 6))};
        c[0].rho_above = {ou_stable(rat(5, 6)), ou_unstable(rat(5, 6)), ou_stable(rat(5, 6))};
        c[0].rho_below = {ou_stable(rat(5, 6))};
        // An empty expansion gives the chart nothing to compare.
        c[0].exhausted = {};
        // Level 2: refinement along the critical ray against the 8/9 ray. The
        // saddle pair climbs to 2/3 + beta/4; at and beyond the threshold the
        // saddle pair collapses into a quadratic limit.
        c[1].beta_threshold = rat(8, 9);
        c[1].compares_rho = false;
        c[1].below = {ou_stable(rat(2, 3), rat(1, 4)), ou_unstable(rat(2, 3), rat(1, 4)),
                      ou_stable(rat(5, 6))};
        c[1].above = {phi3_node(rat(8, 9), false), ou_stable(rat(5, 6))};
        c[1].at_equal = {phi3_node(rat(8, 9), true), ou_stable(rat(5, 6))};
        c[1].exhausted = {phi3_node(rat(8, 9), false), ou_stable(rat(5, 6))};
        return c;
    }();
    return chart;
}

const std::vector<ChartLevel>& weak_noise_chart() {
    static const std::vector<ChartLevel> chart = [] {
        std::vector<ChartLevel> c(4);
        // Level 1 against the eps ray: shallow side pairs at beta/2, steep and
        // off-critical sides at 1/2.
        c[0].beta_threshold = rat(1);
        c[0].compares_rho = true;
        c[0].below = {ou_stable(rat(0), rat(1, 2), 1), ou_unstable(rat(0), rat(1, 2)),
                      ou_stable(rat(0), rat(1, 2), 1)};
        c[0].above = {ou_stable(rat(1, 2))};
        c[0].rho_above = {ou_stable(rat(1, 2), rat(0), 1), ou_unstable(rat(1, 2)),
                          ou_stable(rat(1, 2), rat(0), 1)};
        c[0].rho_below = {ou_stable(rat(1, 2))};
        c[0].exhausted = {ou_stable(rat(1, 2))};
        // Level 2 against the 4/3 ray. Above the critical coefficient the
        // three limits become distinct; every single-limit exit from here on
        // sits at 2/3.
        c[1].beta_threshold = rat(4, 3);
        c[1].compares_rho = true;
        c[1].below = {ou_stable(rat(0), rat(1, 2), 1), ou_unstable(rat(0), rat(1, 2)),
                      ou_stable(rat(0), rat(1, 2), 1)};
        c[1].above = {ou_stable(rat(2, 3))};
        c[1].rho_above = {ou_stable(rat(2, 3)), ou_unstable(rat(2, 3)), ou_stable(rat(2, 3))};
        c[1].rho_below = {ou_stable(rat(2, 3))};
        c[1].exhausted = {ou_stable(rat(2, 3))};
        // Level 3 against the 5/3 ray: the saddle pair splits off at
        // 1/3 + beta/4 while the far shift stays at 2/3.
        c[2].beta_threshold = rat(5, 3);
        c[2].compares_rho = true;
        c[2].below = {ou_stable(rat(1, 3), rat(1, 4)), ou_unstable(rat(1, 3), rat(1, 4)),
                      ou_stable(rat(2, 3))};
        c[2].above = {ou_stable(rat(2, 3))};
        c[2].rho_above = {ou_stable(rat(3, 4)), ou_unstable(rat(3, 4)), ou_stable(rat(2, 3))};
        c[2].rho_below = {ou_stable(rat(2, 3))};
        c[2].exhausted = {ou_stable(rat(2, 3))};
        // Level 4 against the 16/9 ray: at the threshold the saddle pair
        // coalesces into the quadratic family indexed by the coefficient;
        // beyond it the quadratic limit is the plain Wick one. A fourth-order
        // expansion truncated here matches the critical value exactly.
        c[3].beta_threshold = rat(16, 9);
        c[3].compares_rho = false;
        c[3].below = {ou_stable(rat(1, 3), rat(1, 4)), ou_unstable(rat(1, 3), rat(1, 4)),
                      ou_stable(rat(2, 3))};
        c[3].above = {phi3_node(rat(7, 9), false), ou_stable(rat(2, 3))};
        c[3].at_equal = {phi3_node(rat(7, 9), true), ou_stable(rat(2, 3))};
        c[3].exhausted = {phi3_node(rat(7, 9), false), ou_stable(rat(2, 3))};
        return c;
    }();
    return chart;
}

namespace {

enum class WalkKind { below, above, rho_above, rho_below, at_equal, exhausted, negative_rho, off_chart };

struct WalkOutcome {
    std::size_t level = 0;
    WalkKind kind = WalkKind::off_chart;
    const std::vector<TerminalBranch>* pattern = nullptr;
    ThetaTerm term;
};

WalkOutcome walk_chart(const std::vector<ChartLevel>& chart, const ThetaExpansion& theta,
                       const std::vector<double>& rho_criticals,
                       std::vector<std::string>& warnings) {
    for (std::size_t lvl = 0; lvl < chart.size(); ++lvl) {
        const ChartLevel& node = chart[lvl];
        if (lvl >= theta.terms.size()) {
            if (node.exhausted.empty()) return {lvl, WalkKind::off_chart, nullptr, {}};
            return {lvl, WalkKind::exhausted, &node.exhausted, {}};
        }
        const ThetaTerm& term = theta.terms[lvl];
        if (term.rho < 0.0) return {lvl, WalkKind::negative_rho, nullptr, term};
        if (term.beta < node.beta_threshold) return {lvl, WalkKind::below, &node.below, term};
        if (node.beta_threshold < term.beta) return {lvl, WalkKind::above, &node.above, term};
        if (!node.compares_rho) return {lvl, WalkKind::at_equal, &node.at_equal, term};
        const double crit = rho_criticals.at(lvl);
        const double rel = (term.rho - crit) / crit;
        if (std::abs(rel) > kRhoCompareTol && std::abs(rel) <= 10.0 * kRhoCompareTol)
            warnings.push_back("level " + std::to_string(lvl + 1) +
                               " coefficient within a decade of the comparison tolerance "
                               "against its critical value; the chart is discontinuous there");
        if (std::abs(rel) <= kRhoCompareTol) continue;
        if (rel > 0.0) return {lvl, WalkKind::rho_above, &node.rho_above, term};
        return {lvl, WalkKind::rho_below, &node.rho_below, term};
    }
    throw std::logic_error("walk_chart: no terminal reached");
}

Branch qualitative_stable_ou() {
    Branch b;
    b.family = LimitFamily::OU_stable;
    b.coefficient = BranchCoefficient::unspecified();
    return b;
}

// Expands a terminal pattern into output branches: scale from the affine law
// in the deciding exponent, quadratic limits carrying the stated
// proportionality, everything else unspecified. Returns whether the pattern
// contains an opposite-shift pair so the caller can attach the note.
bool emit_pattern(const std::vector<TerminalBranch>& pattern, const WalkOutcome& out,
                  const BranchCoefficient& phi3_coefficient, const std::string& level_parameter,
                  std::vector<Branch>& branches) {
    bool has_pair = false;
    for (const TerminalBranch& tb : pattern) {
        Branch b;
        b.family = tb.family;
        if (tb.has_alpha) {
            Rational alpha = tb.alpha_const;
            if (!(tb.alpha_slope == Rational(0))) alpha = alpha + tb.alpha_slope * out.term.beta;
            b.alpha = alpha;
        }
        if (tb.family == LimitFamily::Phi3) {
            b.coefficient = phi3_coefficient;
            if (tb.parametrised) {
                b.parameter_name = level_parameter;
                b.parameter_value = out.term.rho;
            }
        } else {
            b.coefficient = BranchCoefficient::unspecified();
        }
        if (tb.pair_id > 0) has_pair = true;
        branches.push_back(std::move(b));
    }
    return has_pair;
}

const char* kPairNote =
    "the two stable branches arise from opposite shifts and share the same limiting coefficients";

// ---------------------------------------------------------------------------
// Weakly nonlinear regime

Classification classify_stable_point(Classification c, const PotentialSpec& p,
                                     const ThetaExpansion& theta) {
    for (const ThetaTerm& t : theta.terms) {
        if (!(Rational(1) < t.beta)) {
            c.status = ClassificationStatus::uncharted;
            c.warnings.push_back(
                "stable-point limit charted only for tunings decaying faster than eps");
            return c;
        }
    }
    const double a1 = p.a(1);
    Branch b;
    b.h = ShiftFormula{0.0, Rational(0)};
    b.alpha = Rational(1, 2);
    b.family = a1 > 0.0 ? LimitFamily::OU_stable : LimitFamily::OU_unstable;
    b.coefficient = BranchCoefficient::exact(a1);
    c.branches.push_back(std::move(b));
    return c;
}

Classification classify_saddle_node(Classification c, const PotentialSpec& p,
                                    const ThetaExpansion& theta) {
    const Rational threshold(3, 2);
    const bool on_ray = !theta.terms.empty() && theta.terms.front().beta == threshold;
    for (std::size_t i = on_ray ? 1 : 0; i < theta.terms.size(); ++i) {
        if (!(threshold < theta.terms[i].beta)) {
            c.status = ClassificationStatus::uncharted;
            c.warnings.push_back(
                "saddle-node limit charted only for tunings at or below the eps^{3/2} ray");
            return c;
        }
    }
    Branch b;
    b.h = ShiftFormula{0.0, Rational(0)};
    b.alpha = Rational(2, 3);
    b.family = LimitFamily::Phi3;
    b.coefficient = BranchCoefficient::exact(p.a(2));
    if (on_ray) {
        // Tuning exactly on the ray keeps a constant in the limit: the
        // quadratic family indexed by the coefficient.
        b.parameter_name = "rho";
        b.parameter_value = theta.terms.front().rho;
    }
    c.branches.push_back(std::move(b));
    return c;
}

Classification classify_pitchfork_weakly(Classification c, const PotentialSpec& p,
                                         const ThetaExpansion& theta,
                                         const ClassifierConstants& k, double tol) {
    std::vector<double> avals(p.coeffs.size());
    for (std::size_t j = 0; j < avals.size(); ++j) avals[j] = p.coeffs[j].value;
    const double A = compute_A(avals, k.Cn, p.degree);
    c.invariant = A;
    if (std::abs(A) >= tol / 10.0 && std::abs(A) < 10.0 * tol) {
        c.status = ClassificationStatus::near_tolerance;
        c.warnings.push_back("asymmetry invariant within a decade of the zero tolerance");
        return c;
    }

    const double a3 = p.a(3);
    const double a1p = p.ap(1);

    if (std::abs(A) < tol) {
        // Symmetric branch: the quartic family at scale one. The tuning is
        // fixed by the result; only the eps-linear coefficient stays free.
        const double mu = 18.0 * a3 * a3 * k.c2 / a1p;
        c.tuned_theta.push_back({mu, "", Rational(1), true});
        TunedThetaTerm lambda_term{{}, "lambda", Rational(1), false};
        bool extra_ignored = false;
        for (const ThetaTerm& t : theta.terms) {
            if (t.beta == Rational(1))
                lambda_term.coef = t.rho;
            else
                extra_ignored = true;
        }
        c.tuned_theta.push_back(lambda_term);
        if (extra_ignored)
            c.warnings.push_back(
                "tuning terms besides the eps coefficient are ignored; the quartic limit "
                "fixes the rest of the expansion");
        Branch b;
        b.h = ShiftFormula{0.0, Rational(0)};
        b.alpha = Rational(1);
        b.family = LimitFamily::Phi4;
        b.coefficient = BranchCoefficient::exact(a3);
        b.parameter_name = "lambda";
        if (lambda_term.coef) b.parameter_value = *lambda_term.coef;
        c.branches.push_back(std::move(b));
        return c;
    }

    // Asymmetric side. A negative invariant is handled through the sign flip
    // u -> -u, which negates shifts and quadratic couplings and preserves the
    // linear drifts; results are mapped back to the input field.
    const double sgn = A > 0.0 ? 1.0 : -1.0;
    const double Aeff = std::abs(A);
    if (sgn < 0.0)
        c.warnings.push_back(
            "negative asymmetry invariant: classified after the sign flip of the field; "
            "shifts and quadratic couplings are reported negated, drifts are unchanged");
    const double rho_c = rho_star(a3, a1p, Aeff);
    c.rho_critical = rho_c;

    const auto& chart = weakly_nonlinear_chart();
    if (theta.terms.size() > chart.size()) {
        c.status = ClassificationStatus::uncharted;
        c.warnings.push_back("tuning expansion deeper than the charted tree");
        return c;
    }
    const WalkOutcome out = walk_chart(chart, theta, {rho_c}, c.warnings);

    const auto ou_from_root = [&](const CubicRoot& root) {
        Branch b;
        b.h = ShiftFormula{sgn * root.value, Rational(1, 3)};
        b.alpha = Rational(5, 6);
        b.family = root.slope > 0.0 ? LimitFamily::OU_stable : LimitFamily::OU_unstable;
        b.coefficient = BranchCoefficient::exact(root.slope);
        return b;
    };

    switch (out.kind) {
        case WalkKind::off_chart:
            c.status = ClassificationStatus::uncharted;
            c.warnings.push_back("pitchfork classification needs an explicit tuning expansion");
            return c;
        case WalkKind::negative_rho:
            if (out.level == 0 && out.term.beta < Rational(2, 3)) {
                c.branches.push_back(qualitative_stable_ou());
                c.warnings.push_back(
                    "negative leading coefficient: a single stable limit whose scale varies "
                    "continuously between 1/2 and 5/6; no closed forms are charted");
                return c;
            }
            c.status = ClassificationStatus::uncharted;
            c.warnings.push_back("negative tuning coefficient outside the charted shallow range");
            return c;
        case WalkKind::below:
            if (out.level == 0) {
                // Shallow tuning: the printed drifts, the opposite-shift pair
                // twice and the saddle in the middle.
                const double stable_drift = 2.0 * std::abs(a1p) * out.term.rho;
                const double unstable_drift = -std::abs(a1p) * out.term.rho;
                const Rational alpha = Rational(1, 2) + Rational(1, 2) * out.term.beta;
                for (int i = 0; i < 3; ++i) {
                    Branch b;
                    b.alpha = alpha;
                    b.family = i == 1 ? LimitFamily::OU_unstable : LimitFamily::OU_stable;
                    b.coefficient = BranchCoefficient::exact(i == 1 ? unstable_drift : stable_drift);
                    c.branches.push_back(std::move(b));
                }
                c.warnings.push_back(kPairNote);
                return c;
            }
            break;
        case WalkKind::above:
            if (out.level == 0) {
                Branch b;
                b.alpha = Rational(5, 6);
                b.family = LimitFamily::OU_stable;
                b.coefficient = BranchCoefficient::exact(3.0 * std::cbrt(a3 * Aeff * Aeff));
                c.branches.push_back(std::move(b));
                return c;
            }
            break;
        case WalkKind::rho_below:
            if (out.level == 0) {
                const auto roots = cubic_roots(out.term.rho, a3, a1p, Aeff, tol);
                for (const CubicRoot& r : roots) c.branches.push_back(ou_from_root(r));
                return c;
            }
            break;
        case WalkKind::rho_above:
            if (out.level == 0) {
                // Three distinct limits; reported in increasing order of the
                // reported shift, which reverses the root order under the
                // sign flip.
                auto roots = cubic_roots(out.term.rho, a3, a1p, Aeff, tol);
                for (const CubicRoot& r : roots) c.branches.push_back(ou_from_root(r));
                std::sort(c.branches.begin(), c.branches.end(),
                          [](const Branch& x, const Branch& y) { return x.h->coef < y.h->coef; });
                return c;
            }
            break;
        case WalkKind::exhausted:
            if (out.level == 1) {
                // Tuning exactly on the critical ray: the double root feeds
                // the quadratic limit, the far root stays linear.
                const auto roots = cubic_roots(rho_c, a3, a1p, Aeff, tol);
                if (roots.size() != 2 || roots.front().multiplicity != 2)
                    throw std::logic_error("critical-ray cubic did not produce a double root");
                Branch quad;
                quad.h = ShiftFormula{sgn * roots.front().value, Rational(1, 3)};
                quad.alpha = Rational(8, 9);
                quad.family = LimitFamily::Phi3;
                quad.coefficient =
                    BranchCoefficient::exact(sgn * 3.0 * std::cbrt(a3 * a3 * Aeff / 2.0));
                c.branches.push_back(std::move(quad));
                c.branches.push_back(ou_from_root(roots.back()));
                return c;
            }
            break;
        case WalkKind::at_equal:
            break;
    }

    // Second-order refinement terminals: structure and scales from the chart,
    // coefficients left unspecified.
    if (emit_pattern(*out.pattern, out, BranchCoefficient::unspecified(), "rho2", c.branches))
        c.warnings.push_back(kPairNote);
    return c;
}

}  // namespace

Classification classify_weakly_nonlinear(const PotentialSpec& p, const ThetaExpansion& theta,
                                         const ClassifierConstants& k, double tol) {
    if (p.regime != Regime::weakly_nonlinear)
        throw std::invalid_argument("classify_weakly_nonlinear: wrong regime");
    theta.validate();
    Classification c;
    c.regime = p.regime;
    c.bifurcation = detect_bifurcation(p, tol);
    if (c.bifurcation.near_tolerance) {
        c.status = ClassificationStatus::near_tolerance;
        c.warnings.push_back(
            "bifurcation witness within a decade of the zero tolerance; refusing to classify");
        return c;
    }
    switch (c.bifurcation.type) {
        case BifurcationType::stable_point:
            return classify_stable_point(std::move(c), p, theta);
        case BifurcationType::saddle_node:
            return classify_saddle_node(std::move(c), p, theta);
        case BifurcationType::pitchfork:
            return classify_pitchfork_weakly(std::move(c), p, theta, k, tol);
        case BifurcationType::other:
            break;
    }
    c.status = ClassificationStatus::uncharted;
    c.warnings.push_back("degeneracy pattern outside the charted classes");
    return c;
}

Classification classify_weak_noise(const PotentialSpec& p, const ThetaExpansion& theta,
                                   const ClassifierConstants& k, double tol) {
    if (p.regime != Regime::weak_noise)
        throw std::invalid_argument("classify_weak_noise: wrong regime");
    if (p.degree != 6 || static_cast<int>(p.coeffs.size()) < 7)
        throw std::invalid_argument("classify_weak_noise: coefficient data through degree 6 required");
    theta.validate();

    Classification c;
    c.regime = p.regime;
    c.bifurcation = detect_bifurcation(p, tol);
    if (c.bifurcation.near_tolerance) {
        c.status = ClassificationStatus::near_tolerance;
        c.warnings.push_back(
            "bifurcation witness within a decade of the zero tolerance; refusing to classify");
        return c;
    }
    if (c.bifurcation.type != BifurcationType::pitchfork) {
        c.status = ClassificationStatus::uncharted;
        c.warnings.push_back("weak-noise classification applies at a pitchfork only");
        return c;
    }

    const double B = compute_B(p.coeffs);
    c.invariant = B;
    if (std::abs(B) >= tol / 10.0 && std::abs(B) < 10.0 * tol) {
        c.status = ClassificationStatus::near_tolerance;
        c.warnings.push_back("asymmetry invariant within a decade of the zero tolerance");
        return c;
    }

    const double a3 = p.a(3);
    const double a1p = p.ap(1);

    if (std::abs(B) < tol) {
        // Balanced potential: the quartic family at scale one, with the shift
        // chosen so the quadratic Wick coefficient vanishes in the limit.
        const double a4 = p.a(4);
        const double a2p = p.ap(2);
        c.tuned_theta.push_back({-3.0 * a3 * k.C0 / a1p, "", Rational(1), false});
        c.tuned_theta.push_back({18.0 * a3 * a3 * k.c2 / a1p, "", Rational(2), true});
        TunedThetaTerm lambda_term{{}, "lambda", Rational(2), false};
        for (const ThetaTerm& t : theta.terms)
            if (t.beta == Rational(2)) lambda_term.coef = t.rho;
        c.tuned_theta.push_back(lambda_term);
        c.tuned_h = ShiftFormula{a2p * k.C0 / a1p - 2.0 * a4 * k.C0 / a3, Rational(1)};
        Branch b;
        b.h = c.tuned_h;
        b.alpha = Rational(1);
        b.family = LimitFamily::Phi4;
        b.coefficient = BranchCoefficient::exact(a3);
        b.parameter_name = "lambda";
        if (lambda_term.coef) b.parameter_value = *lambda_term.coef;
        c.branches.push_back(std::move(b));
        c.warnings.push_back("the quartic limit carries an additional constant in the equation");
        return c;
    }

    // Unbalanced side: the critical expansion is computed from the magnitude
    // of the invariant (the sign flip of the field handles the rest), and the
    // quadratic coupling keeps the sign through its stated proportionality.
    const double Beff = std::abs(B);
    if (B < 0.0)
        c.warnings.push_back(
            "negative asymmetry invariant: classified after the sign flip of the field; "
            "the quadratic coupling scale carries the sign");
    const double a1p_abs = std::abs(a1p);
    const double rho1s = 3.0 * a3 * k.C0 / a1p_abs;
    const double rho2s =
        9.0 * std::cbrt(a3 * Beff * Beff * std::pow(k.C0, 4)) / (std::cbrt(12.0) * a1p_abs);
    const double rho3s = 2.0 * Beff * k.C0 * std::sqrt(3.0 * rho2s / (a1p_abs * a3));
    c.theta_critical = {rho1s, rho2s, rho3s};

    const WalkOutcome out =
        walk_chart(weak_noise_chart(), theta, {rho1s, rho2s, rho3s, 0.0}, c.warnings);
    if (out.kind == WalkKind::negative_rho) {
        c.branches.push_back(qualitative_stable_ou());
        c.warnings.push_back(
            "negative coefficient pushes the tuning below the critical expansion: a single "
            "stable limit whose scale varies continuously between 1/2 and 2/3");
        return c;
    }
    const BranchCoefficient phi3 = BranchCoefficient::proportional("B^(1/3)", std::cbrt(B));
    const std::string parameter = "rho" + std::to_string(out.level + 1);
    if (emit_pattern(*out.pattern, out, phi3, parameter, c.branches))
        c.warnings.push_back(kPairNote);
    return c;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

const char* family_name(LimitFamily f) {
    switch (f) {
        case LimitFamily::OU_stable: return "OU_stable";
        case LimitFamily::OU_unstable: return "OU_unstable";
        case LimitFamily::Phi3: return "Phi3";
        case LimitFamily::Phi4: return "Phi4";
    }
    return "?";
}

const char* type_name(BifurcationType t) {
    switch (t) {
        case BifurcationType::stable_point: return "stable_point";
        case BifurcationType::saddle_node: return "saddle_node";
        case BifurcationType::pitchfork: return "pitchfork";
        case BifurcationType::other: return "other";
    }
    return "?";
}

const char* status_name(ClassificationStatus s) {
    switch (s) {
        case ClassificationStatus::classified: return "classified";
        case ClassificationStatus::uncharted: return "uncharted";
        case ClassificationStatus::near_tolerance: return "near_tolerance";
    }
    return "?";
}

nlohmann::json coefficient_to_json(const BranchCoefficient& c) {
    if (c.value) return *c.value;
    if (c.proportional_to.empty()) return "unspecified-by-paper";
    nlohmann::json j;
    j["value"] = nullptr;
    j["proportional_to"] = c.proportional_to;
    if (c.scale) j["scale"] = *c.scale;
    return j;
}

nlohmann::json shift_to_json(const ShiftFormula& h) {
    return {{"coef", h.coef}, {"power", h.power.to_string()}};
}

}  // namespace

std::string classification_to_json(const Classification& c) {
    nlohmann::json j;
    j["status"] = status_name(c.status);
    j["regime"] = c.regime == Regime::weakly_nonlinear ? "weakly_nonlinear" : "weak_noise";
    nlohmann::json bif;
    bif["type"] = type_name(c.bifurcation.type);
    bif["near_tolerance"] = c.bifurcation.near_tolerance;
    nlohmann::json wit = nlohmann::json::object();
    for (const Witness& w : c.bifurcation.witnesses) wit[w.name] = w.value;
    bif["witnesses"] = wit;
    j["bifurcation"] = bif;
    j[c.regime == Regime::weakly_nonlinear ? "A" : "B"] = c.invariant;
    if (c.rho_critical) j["rho_star"] = *c.rho_critical;
    if (c.theta_critical)
        j["theta_star"] = {{"rho1_star", (*c.theta_critical)[0]},
                           {"rho2_star", (*c.theta_critical)[1]},
                           {"rho3_star", (*c.theta_critical)[2]}};
    if (!c.tuned_theta.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const TunedThetaTerm& t : c.tuned_theta) {
            nlohmann::json term;
            term["coef"] = t.coef ? nlohmann::json(*t.coef) : nlohmann::json(nullptr);
            if (!t.parameter.empty()) term["parameter"] = t.parameter;
            term["power"] = t.power.to_string();
            term["log"] = t.log;
            arr.push_back(term);
        }
        j["theta_tuned"] = arr;
    }
    if (c.tuned_h) j["h_tuned"] = shift_to_json(*c.tuned_h);
    nlohmann::json branches = nlohmann::json::array();
    for (const Branch& b : c.branches) {
        nlohmann::json br;
        br["h"] = b.h ? shift_to_json(*b.h) : nlohmann::json(nullptr);
        br["alpha"] = b.alpha ? nlohmann::json(b.alpha->to_string()) : nlohmann::json(nullptr);
        br["family"] = family_name(b.family);
        br["coefficient"] = coefficient_to_json(b.coefficient);
        if (b.family == LimitFamily::OU_stable)
            br["stability"] = "stable";
        else if (b.family == LimitFamily::OU_unstable)
            br["stability"] = "unstable";
        else
            br["stability"] = nullptr;
        if (b.parameter_name) {
            nlohmann::json par;
            par["name"] = *b.parameter_name;
            par["value"] = b.parameter_value ? nlohmann::json(*b.parameter_value)
                                             : nlohmann::json(nullptr);
            br["parameter"] = par;
        } else {
            br["parameter"] = nullptr;
        }
        branches.push_back(br);
    }
    j["branches"] = branches;
    j["warnings"] = c.warnings;
    return j.dump(2);
}

int classification_exit_code(const Classification& c) {
    return c.status == ClassificationStatus::classified ? 0 : 2;
}

}  // namespace coex
