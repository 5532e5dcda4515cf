#pragma once

// Large-scale classification of near-critical potentials. Given the Taylor
// jets of a potential in the tuning parameter and an expansion of that
// parameter in powers of epsilon, decide the bifurcation type at the origin
// and emit the complete list of limiting branches: recentring shift, the
// observation scale, the limit family (quadratic/quartic dynamics or an
// Ornstein-Uhlenbeck pair), and the drift or coupling coefficient whenever a
// closed form exists. Coefficients without a closed form are reported as
// unspecified rather than estimated. The decision charts are explicit data
// tables so every node is auditable.

#include <coexscale/rational.hpp>
#include <coexscale/wick.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace coex {

enum class Regime { weakly_nonlinear, weak_noise };

// Potential data: quadratic jets (value, first and second derivative in the
// tuning parameter) of the coefficients a_j of V'. In the weakly nonlinear
// regime these are the Gaussian-smoothed coefficients and a_0 must vanish;
// the weak-noise regime needs raw data through degree 6.
struct PotentialSpec {
    Regime regime = Regime::weakly_nonlinear;
    int degree = 4;
    std::vector<ThetaSeries> coeffs;  // indexed by j, size degree + 1

    double a(int j) const;    // coefficient value at theta = 0
    double ap(int j) const;   // first theta-derivative
    double app(int j) const;  // second theta-derivative
};

// theta = sum_i rho_i eps^{beta_i} with exact rational exponents, strictly
// increasing, at most four terms. Zero coefficients are rejected: a vanishing
// term is expressed by omitting it.
struct ThetaTerm {
    double rho = 0.0;
    Rational beta{0};
};
struct ThetaExpansion {
    std::vector<ThetaTerm> terms;

    void validate() const;  // throws std::invalid_argument on malformed input
};

enum class BifurcationType { stable_point, saddle_node, pitchfork, other };

struct Witness {
    std::string name;
    double value = 0.0;
};

// Detection verdict with every inspected value recorded. near_tolerance is
// set when some witness lies within a decade of the zero threshold on either
// side; classification is then refused instead of silently resolved.
struct BifurcationKind {
    BifurcationType type = BifurcationType::other;
    bool near_tolerance = false;
    std::vector<Witness> witnesses;
};

// Decides the bifurcation type of the potential at the origin, treating
// |value| < tol as zero. Throws std::invalid_argument on specs violating the
// structural invariants (weakly nonlinear a_0 != 0, missing low-order data).
BifurcationKind detect_bifurcation(const PotentialSpec& p, double tol = 1e-12);

enum class RootStability { stable, unstable, degenerate };

struct CubicRoot {
    double value = 0.0;
    int multiplicity = 1;
    RootStability stability = RootStability::stable;
    double slope = 0.0;  // f'(root); the limiting drift attached to the root
};

// Real roots of f(r) = a3 r^3 + rho a1p r - A, ascending, for a3 > 0,
// a1p < 0, A > 0, rho > 0. Multiplicity is decided by the discriminant of
// the cubic with |disc| below tol at the characteristic root scale collapsing
// to a double root; stability is the sign of f' there.
std::vector<CubicRoot> cubic_roots(double rho, double a3, double a1p, double A,
                                   double tol = 1e-12);

// Critical parameter value at which the root count changes: one real root
// below, a double root at, and three distinct roots above.
double rho_star(double a3, double a1p, double A);

enum class LimitFamily { OU_stable, OU_unstable, Phi3, Phi4 };

// A drift or coupling coefficient. Either a closed-form value, or marked
// unspecified; in the latter case a stated proportionality may be attached
// together with a sign-carrying scale so homogeneity checks stay possible
// without fabricating the constant itself.
struct BranchCoefficient {
    std::optional<double> value;
    std::string proportional_to;  // e.g. "B^(1/3)"; empty when none is stated
    std::optional<double> scale;

    static BranchCoefficient exact(double v) { return {v, {}, {}}; }
    static BranchCoefficient unspecified() { return {{}, {}, {}}; }
    static BranchCoefficient proportional(std::string law, double s) {
        return {{}, std::move(law), s};
    }
};

// Shift formula h = coef * eps^power.
struct ShiftFormula {
    double coef = 0.0;
    Rational power{0};
};

struct Branch {
    std::optional<ShiftFormula> h;  // absent when no closed form is printed
    std::optional<Rational> alpha;  // absent when only charted qualitatively
    LimitFamily family = LimitFamily::OU_stable;
    BranchCoefficient coefficient;
    // Family parameter for branches that come as one-parameter families
    // (quartic family indexed by lambda, quadratic families indexed by the
    // free expansion coefficient).
    std::optional<std::string> parameter_name;
    std::optional<double> parameter_value;
};

// One term of a tuned distance-to-criticality: coef * eps^power, optionally
// carrying a |log eps| factor. Terms left free are named via parameter with
// the user-supplied value when the input expansion provides one.
struct TunedThetaTerm {
    std::optional<double> coef;
    std::string parameter;
    Rational power{1};
    bool log = false;
};

enum class ClassificationStatus { classified, uncharted, near_tolerance };

struct Classification {
    ClassificationStatus status = ClassificationStatus::classified;
    Regime regime = Regime::weakly_nonlinear;
    BifurcationKind bifurcation;
    // Asymmetry invariant deciding the quartic-vs-quadratic dichotomy: A in
    // the weakly nonlinear regime, B in the weak-noise regime.
    double invariant = 0.0;
    std::optional<double> rho_critical;              // weakly nonlinear
    std::optional<std::array<double, 3>> theta_critical;  // weak noise
    std::vector<TunedThetaTerm> tuned_theta;  // set when the result fixes theta
    std::optional<ShiftFormula> tuned_h;      // set when the result fixes h
    std::vector<Branch> branches;
    std::vector<std::string> warnings;
};

// Constants consumed by the classifier: the stationary variance of the
// linearised equation, the log-divergence slope, and the limiting kernel
// constants entering the asymmetry invariant.
struct ClassifierConstants {
    double C0 = 1.0;
    double c2 = 1.0;
    std::vector<double> Cn;  // indexed by n; entries 3..degree-1 are used

    static ClassifierConstants synthetic(int nmax = 8);  // all ones
};

// Classification for the regime where the smoothed potential drives the
// limit. Handles the stable-point and saddle-node cases as well; expansions
// outside the charted shapes come back with status uncharted, never guessed.
Classification classify_weakly_nonlinear(const PotentialSpec& p, const ThetaExpansion& theta,
                                         const ClassifierConstants& k, double tol = 1e-12);

// Classification for the regime where the raw potential drives the limit.
// Requires a pitchfork; walks the four-level decision chart against the
// critical expansion of theta.
Classification classify_weak_noise(const PotentialSpec& p, const ThetaExpansion& theta,
                                   const ClassifierConstants& k, double tol = 1e-12);

// Chart encoding. Each level inspects one expansion term: compare its
// exponent against the level threshold, on equality compare its coefficient
// against the level-critical value, and either stop with a terminal branch
// pattern or descend. Terminal scale exponents are affine in the deciding
// exponent: alpha = alpha_const + alpha_slope * beta.
struct TerminalBranch {
    LimitFamily family = LimitFamily::OU_stable;
    bool has_alpha = true;
    Rational alpha_const{0};
    Rational alpha_slope{0};
    // Branches sharing a positive pair id arise from opposite shifts and have
    // the same limiting coefficients.
    int pair_id = 0;
    // Quadratic-family terminal parametrised by the deciding coefficient.
    bool parametrised = false;
};

struct ChartLevel {
    Rational beta_threshold{1};
    bool compares_rho = true;
    std::vector<TerminalBranch> below;      // beta under the threshold
    std::vector<TerminalBranch> above;      // beta over the threshold
    std::vector<TerminalBranch> rho_above;  // critical beta, coefficient over
    std::vector<TerminalBranch> rho_below;  // critical beta, coefficient under
    std::vector<TerminalBranch> at_equal;   // last level only: critical beta
    std::vector<TerminalBranch> exhausted;  // expansion ends before this level
};

// The two decision charts as data. Weakly nonlinear: level 1 is the main
// asymmetric trichotomy, level 2 the second-order refinement around the
// critical ray. Weak noise: four levels against the critical expansion.
const std::vector<ChartLevel>& weakly_nonlinear_chart();
const std::vector<ChartLevel>& weak_noise_chart();

std::string classification_to_json(const Classification& c);

// Exit status the command-line front end maps a classification to: 0 for a
// definite answer, 2 for uncharted or near-tolerance inputs.
int classification_exit_code(const Classification& c);

}  // namespace coex
