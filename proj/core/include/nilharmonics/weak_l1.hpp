#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nilharmonics/kernels.hpp"
#include "nilharmonics/norm.hpp"

namespace nilh {

// A point (eta, a) of the upper half space N x (0, inf).
struct UpperHalfPoint {
    GroupElement eta;
    double a = 1.0;
};

struct Atom {
    GroupElement xi;
    double w = 1.0;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;
    double total_mass() const;
    // atoms moved to eta0 * xi
    AtomicMeasure left_translate(const GroupSpec& spec, const GroupElement& eta0) const;
};

// a^Gamma / (a + |eta|)^{Q+Gamma}
double phi_gamma(const HomogeneousNorm& norm, double Gamma, const UpperHalfPoint& p);
double phi_gamma(const HomogeneousNorm& norm, double Gamma, const double* eta, double a);

// int_0^1 (t^{(Gamma-1)/(Q+Gamma)} - t)^Q dt
double weak_closed_form(double Q, double Gamma);
// int_0^1 (a^{Gamma/(Q+Gamma)} - a)^Q da / a, the constant value of alpha |{Phi_Gamma > alpha}| for d lambda da/a
double weak_closed_form_log(double Q, double Gamma);

using HalfSpaceFn = std::function<double(const double* eta, double a)>;

// Coordinate box in eta times an interval in a.
struct Window {
    std::vector<double> eta_lo, eta_hi;
    double a_lo = 0.0;
    double a_hi = 1.0;
    Window doubled(const GroupSpec& spec) const;
};

// |eta_k| <= (margin s)^{d_k}, a in (0, margin s]
Window scaled_window(const GroupSpec& spec, double s, double margin = 1.1);

enum class HalfMeasure { da, da_over_a };
enum class EstimatorKind { grid, monte_carlo };

struct Estimator {
    EstimatorKind kind = EstimatorKind::grid;
    int cells = 2000;                        // grid cells per axis when `nodes` is empty
    std::vector<std::vector<double>> nodes;  // explicit grid nodes: eta axes, then the a axis
    std::size_t samples = 200000;            // monte-carlo samples
    std::uint64_t seed = 1;
    double log_floor = 1e-9;                 // da/a: a is sampled on [log_floor a_hi, a_hi] in log a
};

struct LevelMeasure {
    double value = 0.0;
    double error = 0.0;  // half-width: partial cells for the grid, 3 sigma for monte-carlo
};

// |{(eta,a) in window : F > alpha}| with respect to the calibrated Haar measure times da (or da/a).
LevelMeasure superlevel_measure(const HomogeneousNorm& norm, const HalfSpaceFn& F, double alpha, const Window& w,
                                HalfMeasure m = HalfMeasure::da, const Estimator& est = {});

struct WeakConstantReport {
    std::vector<double> alphas;
    std::vector<double> products;          // alpha |{F > alpha}|
    std::vector<double> errors;            // alpha times the estimator half-width
    std::vector<double> products_doubled;  // same on the doubled window
    double constant = 0.0;                 // max of products
    bool stable = false;                   // doubled window agrees within error bars (plus 1%)
};

using WindowFn = std::function<Window(double alpha)>;

WeakConstantReport weak_l1_constant(const HomogeneousNorm& norm, const HalfSpaceFn& F,
                                    const std::vector<double>& alphas, const WindowFn& window,
                                    HalfMeasure m = HalfMeasure::da, const Estimator& est = {});

// sum_i w_i a^{Gamma-1} / (a + |eta^{-1} xi_i|)^{Q+Gamma}
double U_nu(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, const double* eta, double a);
double U_nu(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, const UpperHalfPoint& p);

struct PoissonBoundsReport {
    WeakConstantReport weak;                 // (1/a)(1+a+|eta|)^{-Q-Gamma} mu * P_a
    std::vector<double> a0s;                 // a0, 2 a0, 4 a0, ...
    std::vector<double> sup_values;          // sup of (1+a+|eta|)^{-Q-Gamma} a^{-Gamma} mu * P_a on a > a0
    bool sup_nonincreasing = false;
    std::vector<WeakConstantReport> pieces;  // I: |xi| <= |eta|/2, II: between, III: |xi| >= 2|eta|
    bool pass = false;
};

struct PoissonBoundsOptions {
    std::vector<double> alphas{0.01, 0.1, 1.0, 10.0, 100.0};
    int a0_doublings = 3;
    int sup_eta_nodes = 401;
    int sup_a_nodes_per_octave = 16;
    Estimator estimator{};
};

// Refuses (std::invalid_argument) when the certificate did not pass.
PoissonBoundsReport mu_poisson_bounds(const AtomicMeasure& mu, const KernelSpec& k, const CertificateReport& cert,
                                      const Window& window, double a0, const PoissonBoundsOptions& opt = {});

enum class PieceStatus { authorized, forbidden, plain };
std::string status_name(PieceStatus s);

// B(center, 2^{i0-i-3}) x [2^{i0-i-1}, 2^{i0-i}]
struct DyadicPiece {
    int i = 0;
    std::vector<long long> index;  // lattice coordinates
    GroupElement center;
    double radius = 0.0;
    double a_lo = 0.0, a_hi = 0.0;
    PieceStatus status = PieceStatus::plain;
    double q_volume = 0.0;         // calibrated ball volume radius^Q
    double measure() const;        // q_volume (a_hi - a_lo)
};

struct CoveringOptions {
    GroupElement origin;            // center of K_0; empty: identity
    double gamma = 0.0;             // quasi-triangle constant; 0: measured
    std::size_t max_candidates = 3000000;
};

struct CoveringCertificate {
    double alpha = 0.0;
    double Gamma = 1.0;
    int i0 = 0;
    int depth = 0;
    GroupElement origin;
    double lattice_step = 1.0;       // lattice spacing in units of 2^{i0-i-3} (per weight)
    double gamma = 1.0;
    std::vector<DyadicPiece> S;      // authorized pieces in sweep order
    std::size_t pieces_examined = 0;
    std::size_t forbidden_count = 0;
    std::size_t plain_count = 0;
    std::vector<int> skipped_scales; // scales whose candidate regions were entirely forbidden
    double kappa_measured = 0.0;     // max number of same-scale balls containing a sampled point
    double measure_S() const;
};

CoveringCertificate build_covering(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, double alpha,
                                   int i0, int depth, const CoveringOptions& opt = {});

struct CoveringReport {
    double superlevel = 0.0;         // |{U > alpha} cap K_0|
    double superlevel_error = 0.0;
    double tail = 0.0;               // part of it below the deepest scale
    double measure_S = 0.0;
    double C_i = 0.0;                // superlevel / |S|
    double min_U = 0.0;              // min of sampled U over S
    double C_ii = 0.0;               // alpha / min_U
    double C_iii = 0.0;              // max sampled U_S
    double fij_ratio = 0.0;          // max over pieces of |F_ij| / |A_ij|
    double fij_bound = 0.0;          // geometric-series constant
    double chain_constant = 0.0;     // C^3 ||nu|| / alpha with C the max of the three
    bool disjoint = false;
    bool prop_i = false, prop_ii = false, prop_iii = false, fij = false, chain = false;
    bool vacuous = false;
    bool pass = false;
};

struct VerifyOptions {
    std::size_t mc_samples = 200000;
    int grid_cells = 1000;
    std::size_t fij_samples = 4000;
    int far_points = 8;
    int random_points = 32;
    std::uint64_t seed = 11;
};

CoveringReport verify_covering(const HomogeneousNorm& norm, const CoveringCertificate& cert, const AtomicMeasure& nu,
                               const VerifyOptions& opt = {});

// U_i(eta) = int_{S_i} a^{Gamma-1} / (a + |eta^{-1} xi|)^{Q+Gamma} d lambda(xi) da for i = 0..depth
std::vector<double> U_i_profile(const HomogeneousNorm& norm, const CoveringCertificate& cert, const GroupElement& eta);

struct ProfileReport {
    double C2 = 0.0;             // max of U_i at direct points and of U_i 2^{(p+i)Gamma} at decay points
    double C2_direct = 0.0;
    double C2_decay = 0.0;
    double sum_max = 0.0;        // max over samples of sum_i U_i
    std::size_t decay_points = 0;
    bool pass = false;
};
ProfileReport U_i_check(const HomogeneousNorm& norm, const CoveringCertificate& cert, int max_p = 3,
                        std::uint64_t seed = 5);

}  // namespace nilh
