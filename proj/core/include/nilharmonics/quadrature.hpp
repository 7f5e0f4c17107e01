#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilharmonics/fields.hpp"
#include "nilharmonics/norm.hpp"
#include "nilharmonics/rules.hpp"

namespace nilh {

enum class RuleKind { simpson, midpoint, gauss };

// Weighted point cloud; x is row-major with n coordinates per point.
struct PointSet {
    int n = 0;
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return w.size(); }
    const double* point(std::size_t i) const { return x.data() + i * static_cast<std::size_t>(n); }
    double total_weight() const;
};

class Grid {
public:
    Grid(std::vector<double> center, std::vector<double> half, std::vector<int> count, RuleKind rule);

    // Box adapted to a homogeneous ball of radius R centered at the identity.
    static Grid ball_box(const HomogeneousNorm& norm, double R, int count, RuleKind rule);
    // Box around the support of an Euclidean ball of the given radius and center.
    static Grid around(const std::vector<double>& center, double radius, int count, RuleKind rule);

    int dim() const { return static_cast<int>(center_.size()); }
    const std::vector<double>& center() const { return center_; }
    const std::vector<double>& half() const { return half_; }
    const std::vector<int>& count() const { return count_; }
    RuleKind rule() const { return rule_; }
    double volume() const;
    bool contains_box(const std::vector<double>& lo, const std::vector<double>& hi) const;
    Grid refined() const;
    PointSet points() const;

private:
    std::vector<double> center_, half_;
    std::vector<int> count_;
    RuleKind rule_;
};

struct SampledFunction {
    ScalarFn f;
    std::vector<double> support_lo, support_hi;  // empty: not compactly supported
    std::string smoothness = "smooth";
};

// Lebesgue integral in exponential coordinates; throws on NaN.
double integrate(const PointSet& pts, const ScalarFn& f);
// Same, after checking a declared support lies inside the grid.
double integrate(const Grid& grid, const SampledFunction& f);
// Calibrated Haar integral: Lebesgue integral divided by the Lebesgue volume of B(0,1).
double haar_integrate(const HomogeneousNorm& norm, const Grid& grid, const SampledFunction& f);
double haar_ball_volume(const HomogeneousNorm& norm, double r, int count);

struct ConvolutionValue {
    double first = 0.0;   // int f(xi) g(xi^{-1} eta)
    double second = 0.0;  // int f(eta xi^{-1}) g(xi)
};

// f_pts should cover supp f; g_pts should cover supp g.
ConvolutionValue convolve(const GroupSpec& spec, const ScalarFn& f, const ScalarFn& g, const double* eta,
                          const PointSet& f_pts, const PointSet& g_pts);
double convolve_first(const GroupSpec& spec, const ScalarFn& f, const ScalarFn& g, const double* eta,
                      const PointSet& f_pts);

// h_a = a^{-Q} h(delta_{1/a} .) / mass(h); mass from the supplied grid.
class ApproximateIdentity {
public:
    ApproximateIdentity(const GroupSpec& spec, ScalarFn h, const Grid& support_grid);
    double operator()(double a, const double* eta) const;
    double mass() const { return mass_; }
    SampledFunction at(double a) const;

private:
    GroupSpec spec_;
    ScalarFn h_;
    double mass_ = 1.0;
    double support_radius_ = 1.0;
    std::vector<double> half_;
};

// Weighted points on the unit sphere with total weight Q |B(0,1)|_Leb, so that
// int f = int_0^inf sum_i w_i f(delta_r s_i) r^{Q-1} dr.
struct SphereRule {
    PointSet pts;
    static SphereRule build(const HomogeneousNorm& norm, int per_axis);
};

double polar_integrate(const HomogeneousNorm& norm, const SphereRule& sphere, const ScalarFn& f, double r_max,
                       int radial_nodes);

enum class IrsRegime { power, logarithmic, bounded, divergent };

struct IrsValue {
    double value = 0.0;
    double majorant = 0.0;
    double ratio = 0.0;
    double radius = 0.0;  // final truncation radius
    IrsRegime regime = IrsRegime::power;
};

IrsRegime irs_regime(double r, double s, double Q);
double irs_majorant(double r, double s, double Q, double eta_norm);

struct IrsOptions {
    int radial_panels = 48;
    int radial_order = 8;
    double tol = 1e-5;
    int sphere_per_axis = 24;
};

// I_{r,s}(eta) = int (1+|xi|)^r (1+|xi^{-1} eta|)^s dxi (Lebesgue in coordinates).
IrsValue I_rs(const HomogeneousNorm& norm, const SphereRule& sphere, double r, double s, const GroupElement& eta,
              const IrsOptions& opt = {});

std::string regime_name(IrsRegime r);

}  // namespace nilh
