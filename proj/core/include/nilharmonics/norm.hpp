#pragma once

#include <cstdint>
#include <utility>

#include "nilharmonics/group.hpp"
#include "nilharmonics/jet.hpp"

namespace nilh {

enum class NormVariant { even_power, koranyi };

// |eta| = N(eta)^{1/(2M)} with N a polynomial.
class HomogeneousNorm {
public:
    HomogeneousNorm() = default;
    explicit HomogeneousNorm(GroupSpec spec, NormVariant variant = NormVariant::even_power);

    const GroupSpec& spec() const { return spec_; }
    NormVariant variant() const { return variant_; }
    int M() const { return M_; }
    int root() const { return 2 * M_; }
    const Polynomial& N() const { return N_; }
    const CompiledPoly& N_compiled() const { return Nc_; }

    double operator()(const double* theta) const;
    double operator()(const GroupElement& eta) const { return (*this)(eta.data()); }

    // |eta^{-1} xi| without allocating
    double distance(const double* eta, const double* xi) const;

    // Lebesgue measure of the unit ball in exponential coordinates.
    double unit_ball_lebesgue() const { return ball_leb_; }

    // Turns F(r) into G(u) = F(u^{1/2M}) so that f(eta) = G(N(eta)).
    UniFn radial(UniFn F) const;

private:
    GroupSpec spec_;
    NormVariant variant_ = NormVariant::even_power;
    int M_ = 1;
    Polynomial N_;
    CompiledPoly Nc_;
    double ball_leb_ = 0.0;
};

struct GammaReport {
    double gamma = 0.0;
    std::size_t pairs = 0;
};

// sup |eta xi| / (|eta| + |xi|) over random pairs at random scales.
GammaReport measure_gamma(const HomogeneousNorm& norm, std::size_t pairs, std::uint64_t seed);

// ((1+|eta xi|)^r, (1+|eta|)^{|r|} (1+|xi|)^r)
std::pair<double, double> peetre_factor(const HomogeneousNorm& norm, const GroupElement& eta,
                                        const GroupElement& xi, double r);

// Phi: 1 on [0,1], x on [2, inf), quintic bridge in between.
double bridge_phi(double x);
Jet bridge_phi(const Jet& x);

class WeightFunction {
public:
    WeightFunction(HomogeneousNorm norm, double mu) : norm_(std::move(norm)), mu_(mu) {}
    double mu() const { return mu_; }
    const HomogeneousNorm& norm() const { return norm_; }

    double operator()(const double* theta) const;
    double operator()(const GroupElement& eta) const { return (*this)(eta.data()); }
    static double of_radius(double r, double mu);

    // G with omega_mu(eta) = G(N(eta))
    UniFn profile() const;

private:
    HomogeneousNorm norm_;
    double mu_;
};

}  // namespace nilh
