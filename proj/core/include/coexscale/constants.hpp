#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <coexscale/polynomial.hpp>
#include <coexscale/wick.hpp>

namespace coex {

struct SpacetimePoint {
    double t = 0.0;
    std::array<double, 3> x{0.0, 0.0, 0.0};

    double radius() const;
    // Parabolic magnitude sqrt(|t| + |x|^2); comparable to |t|^{1/2} + |x|.
    double pnorm() const;
};

// The truncated heat kernel, the mollifier pair, their autocorrelations, and
// the derived Green-type functions. Construction is fixed; heavy tables (the
// kernel autocorrelation defect on the parabolic ball) are built lazily and
// shared. All spatial arguments are radial.
class Kernel {
public:
    static const Kernel& standard();

    // 3D heat kernel (4 pi t)^{-3/2} exp(-r^2/(4t)) for t > 0, else 0.
    double heat(double t, double r) const;
    // Smooth radial cutoff: 1 on parabolic magnitude <= 3/4, 0 at >= 1.
    double cutoff(double t, double r) const;
    // K = cutoff * heat; supported in the parabolic unit ball.
    double truncated(double t, double r) const;

    // Mollifier rho(t,x) = phi(t) psi(|x|): time bump on |t| < 1/4 with unit
    // integral, space bump of radius 1/2 with unit 3D integral.
    double mollifier_time(double t) const;
    double mollifier_space(double r) const;
    // Autocorrelations phi*phi~ (support |t| < 1/2) and the 3D radial
    // autocorrelation of psi (support r < 1).
    double time_autocorr(double t) const;
    double space_autocorr(double r) const;

    // G_P = P * P~ in closed form: erf(r / (2 sqrt|t|)) / (8 pi r).
    double green(double t, double r) const;
    // Gamma_1 = G_P * (rho * rho~): the mollified Green autocorrelation.
    double gamma1(double t, double r) const;
    // D = G_P - K * K~: smooth near the origin, cached on a (t, r) grid over
    // the parabolic ball and interpolated.
    double dcorr(double t, double r) const;
    // (D * sigma_eps)(z) where sigma_eps is the parabolically scaled
    // mollifier autocorrelation.
    double dcorr_smoothed(double t, double r, double eps) const;

    std::uint64_t hash() const;

private:
    Kernel();
    struct Tables;
    Tables* tables_ = nullptr;
};

double eval_K(const SpacetimePoint& z);
double eval_K_eps(const SpacetimePoint& z, double eps);
// G_eps = K_eps * K_eps~ evaluated exactly as eps^{-1} Gamma_1(S_{1/eps} z)
// minus the smoothed defect; eval_G_eps({0}, eps) equals c1(eps).
double eval_G_eps(const SpacetimePoint& z, double eps);

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

// Renormalisation constants on a fixed epsilon: C_1 = G_eps(0),
// C_n = eps^{n-2} integral K G_eps^n, C_n' = eps^{-1/2} C_n.
ValueWithError c1(double eps);
ValueWithError cn(int n, double eps);
ValueWithError cnp(int n, double eps);

// Limiting values: C_0 = Gamma_1(0), the |log eps| slope of C_2 (a pure 1D
// quadrature), and the n >= 3 limits via the Green autocorrelation.
double c0_limit();
double c2_slope();
ValueWithError cn_limit(int n);

// Independent Monte-Carlo evaluations used as oracles: C_0 as
// E[G_P(w - w')] over mollifier-distributed points, and C_n by importance
// sampling from the truncated kernel.
ValueWithError c0_monte_carlo(std::uint64_t seed, std::size_t samples);
ValueWithError cn_monte_carlo(int n, double eps, std::uint64_t seed, std::size_t samples);

struct ConstantsTable {
    std::vector<double> epsilon;
    // per-epsilon families, keyed by n (Cn from n = 1, Cnp from n = 3)
    std::map<int, std::vector<double>> Cn;
    std::map<int, std::vector<double>> Cnp;
    // limits keyed by n: 0 -> C_0, 2 -> the log slope, n >= 3 -> C_n
    std::map<int, double> limits;
    std::map<int, double> errors;
    std::uint64_t kernel_spec_hash = 0;

    std::string to_json() const;
};

std::vector<double> default_eps_grid();  // 2^-k, k = 2..7
ConstantsTable compute_constants_table(const std::vector<double>& eps_grid, int nmax);

// Counterterm assembly: C pairs lambda_{n+1}^2 and lambda_n lambda_{n+2}
// against C_n, C' pairs lambda_n lambda_{n+1} against C_n'. Both are
// quadratic forms in lambda.
std::pair<double, double> mass_constants(const std::vector<double>& lambda,
                                         const std::vector<double>& Cn,
                                         const std::vector<double>& Cnp, int m);

// Asymmetry invariant A = sum_{j=3}^{m-1} (j+1)! ahat_j ahat_{j+1} C_j. The
// optional flag reports the finiteness precondition (vanishing low-order
// coefficients) instead of silently proceeding.
double compute_A(const std::vector<double>& ahat, const std::vector<double>& Cn, int m,
                 bool* finiteness_warning = nullptr);

// Weak-noise asymmetry invariant B = a4 + 3 a0'' a3^2 / (2 a1'^2)
//   - a2' a3 / a1'. Needs the quadratic theta-jets of a_0..a_4.
double compute_B(const std::vector<ThetaSeries>& a);

// Constants bundle consumed by the coefficient assemblies: the limits plus an
// evaluator for C_n at a concrete epsilon. The synthetic bundle (unit limits,
// C_2 carrying an explicit log divergence) makes assembly tests exact.
struct EpsConstants {
    double C0 = 0.0;
    double c2 = 0.0;
    std::function<double(int, double)> Cn_eps;

    double Cn(int n, double eps) const { return Cn_eps(n, eps); }
    double Cnp(int n, double eps) const;

    static EpsConstants synthetic();
    static EpsConstants from_table();  // live quadrature-backed bundle
};

// Drift coefficients for the renormalised equation, weakly nonlinear regime:
// shifted potential coefficients scaled by delta powers, with the quadratic
// counterterm corrections folded into lambda_1 and lambda_0.
std::vector<double> lambda_weakly_nonlinear(double delta, double alpha, double theta, double h,
                                            const std::vector<ThetaSeries>& ahat,
                                            const EpsConstants& k);

// Weak-noise regime: degree-6 data with the C_0-dressed combinations.
std::vector<double> lambda_weak_noise(double delta, double alpha, double theta, double h,
                                      const std::vector<ThetaSeries>& a, const EpsConstants& k);

// Exact-variance assembly from the Hermite rewrite of V'; makes the
// renormalised drift reproduce -delta^{1/alpha-5/2} V'(delta^{1/2} u + h)
// identically.
std::vector<double> lambda_exact_rewrite(double delta, double alpha, double h,
                                         const Poly<double>& vprime, double c1,
                                         const std::vector<double>& Cn,
                                         const std::vector<double>& Cnp, int m);

}  // namespace coex
