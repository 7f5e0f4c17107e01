#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilharmonics/poly.hpp"
#include "nilharmonics/rational.hpp"

namespace nilh {

using GroupElement = std::vector<double>;

// One coefficient c_k^{alpha,beta} of the group law (k is 0-based here).
struct StructureTerm {
    int k = 0;
    Mono alpha{};
    Mono beta{};
    double c = 0.0;
};

class GroupSpec {
public:
    GroupSpec() = default;
    GroupSpec(std::string name, std::vector<Rational> weights, std::vector<StructureTerm> structure);

    static GroupSpec abelian(int n);
    static GroupSpec heisenberg();
    // Step-2 group: n1 weight-1 and n2 weight-2 coordinates, law eta + xi + [eta, xi]/2
    // with bracket coefficients drawn from [-1, 1].
    static GroupSpec random_step2(std::uint64_t seed, int n1 = 3, int n2 = 2);

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const std::vector<double>& d() const { return d_; }
    double weight(int k) const { return d_[static_cast<std::size_t>(k)]; }
    Rational Q_exact() const { return Q_; }
    double Q() const { return Q_.value(); }
    const std::vector<StructureTerm>& structure() const { return structure_; }
    bool is_abelian() const { return structure_.empty(); }
    double mono_weight(const Mono& m) const;

    GroupElement multiply(const GroupElement& eta, const GroupElement& xi) const;
    GroupElement inverse(const GroupElement& eta) const;
    GroupElement dilate(double a, const GroupElement& eta) const;

    // Raw pointer variants for inner loops; out may not alias inputs.
    void multiply_into(const double* eta, const double* xi, double* out) const;
    void dilate_into(double a, const double* eta, double* out) const;

    // Coordinates of eta*xi (left) or xi*eta (right) as polynomials in xi, eta fixed.
    std::vector<Polynomial> left_translation_images(const GroupElement& eta) const;
    std::vector<Polynomial> right_translation_images(const GroupElement& eta) const;

    // P(eta*xi), P(xi*eta), P(delta_a xi), P(xi^{-1}) as polynomials in xi.
    Polynomial compose_left(const Polynomial& p, const GroupElement& eta) const;
    Polynomial compose_right(const Polynomial& p, const GroupElement& eta) const;
    Polynomial compose_dilate(const Polynomial& p, double a) const;
    Polynomial compose_inverse(const Polynomial& p) const;

private:
    void validate() const;
    void check_dim(const GroupElement& e) const;

    std::string name_;
    int n_ = 0;
    std::vector<Rational> weights_;
    std::vector<double> d_;
    Rational Q_;
    std::vector<StructureTerm> structure_;
};

}  // namespace nilh
