#include "nilharmonics/weak_l1.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "nilharmonics/parallel.hpp"
#include "nilharmonics/quadrature.hpp"
#include "nilharmonics/rules.hpp"

namespace nilh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Deterministic points of the unit ball: the identity first, then Halton points kept when |u| <= 1.
std::vector<GroupElement> ball_offsets(const HomogeneousNorm& norm, std::size_t count) {
    const int n = norm.spec().dim();
    std::vector<GroupElement> out;
    out.push_back(GroupElement(static_cast<std::size_t>(n), 0.0));
    GroupElement u(static_cast<std::size_t>(n));
    for (std::uint64_t i = 1; out.size() < count && i < 1000000; ++i) {
        for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k)] = 2.0 * radical_inverse(i, kPrimes[k % 12]) - 1.0;
        if (norm(u) <= 1.0) out.push_back(u);
    }
    return out;
}

std::vector<double> uniform_nodes(double lo, double hi, int cells) {
    std::vector<double> x(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / cells;
    return x;
}

std::vector<double> log_nodes(double lo, double hi, int cells) {
    std::vector<double> x(static_cast<std::size_t>(cells) + 1);
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i <= cells; ++i) x[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / cells);
    x.front() = lo;
    x.back() = hi;
    return x;
}

// Uniform nodes on [lo, hi] merged with geometric clusters around each focus point.
std::vector<double> graded_nodes(double lo, double hi, const std::vector<double>& focus, int uniform, int per_side,
                                 double min_offset) {
    std::vector<double> x = uniform_nodes(lo, hi, uniform);
    const double span = hi - lo;
    for (double f : focus) {
        if (f < lo || f > hi) continue;
        x.push_back(f);
        for (int s = 0; s < per_side; ++s) {
            const double d = min_offset * std::pow(span / min_offset, static_cast<double>(s) / (per_side - 1));
            if (f - d > lo) x.push_back(f - d);
            if (f + d < hi) x.push_back(f + d);
        }
    }
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end(), [](double p, double q) { return std::abs(p - q) < 1e-15; }), x.end());
    return x;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

LevelMeasure grid_measure(const HomogeneousNorm& norm, const HalfSpaceFn& F, double alpha, const Window& w,
                          HalfMeasure m, const Estimator& est) {
    const int n = norm.spec().dim();
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (est.nodes.size() == static_cast<std::size_t>(n) + 1) {
            axes[ku] = est.nodes[ku];
        } else if (k < n) {
            axes[ku] = uniform_nodes(w.eta_lo[ku], w.eta_hi[ku], est.cells);
        } else if (m == HalfMeasure::da_over_a) {
            axes[ku] = log_nodes(std::max(w.a_lo, est.log_floor * w.a_hi), w.a_hi, est.cells);
        } else {
            axes[ku] = uniform_nodes(w.a_lo, w.a_hi, est.cells);
        }
    }
    if (m == HalfMeasure::da_over_a && axes.back().front() <= 0.0)
        throw std::invalid_argument("superlevel_measure: da/a grid needs a > 0");
    std::vector<std::size_t> len(static_cast<std::size_t>(n) + 1), stride(static_cast<std::size_t>(n) + 1);
    std::size_t total = 1;
    for (int k = n; k >= 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        len[ku] = axes[ku].size();
        stride[ku] = total;
        total *= len[ku];
    }
    std::vector<unsigned char> above(total, 0);
    parallel_for(len[0], [&](std::size_t i0) {
        GroupElement eta(static_cast<std::size_t>(n));
        const std::size_t block = stride[0];
        for (std::size_t r = 0; r < block; ++r) {
            std::size_t rem = r;
            eta[0] = axes[0][i0];
            double a = 0.0;
            for (int k = 1; k <= n; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const std::size_t idx = rem / stride[ku];
                rem %= stride[ku];
                if (k < n) eta[ku] = axes[ku][idx];
                else a = axes[ku][idx];
            }
            if (n == 0) a = axes[0][i0];
            double v = 0.0;
            if (a > 0.0) v = F(eta.data(), a);
            above[i0 * block + r] = v > alpha ? 1 : 0;
        }
    });
    const double inv_leb = 1.0 / norm.unit_ball_lebesgue();
    std::vector<double> full(len[0], 0.0), partial(len[0], 0.0);
    const std::size_t corners = std::size_t{1} << (n + 1);
    parallel_for(len[0] - 1, [&](std::size_t i0) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n) + 1, 0);
        std::size_t cells = 1;
        for (int k = 1; k <= n; ++k) cells *= len[static_cast<std::size_t>(k)] - 1;
        double fs = 0.0, ps = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            std::size_t rem = c;
            idx[0] = i0;
            for (int k = n; k >= 1; --k) {
                const auto ku = static_cast<std::size_t>(k);
                idx[ku] = rem % (len[ku] - 1);
                rem /= len[ku] - 1;
            }
            std::size_t base = 0;
            for (int k = 0; k <= n; ++k) base += idx[static_cast<std::size_t>(k)] * stride[static_cast<std::size_t>(k)];
            int hits = 0;
            for (std::size_t v = 0; v < corners; ++v) {
                std::size_t off = base;
                for (int k = 0; k <= n; ++k)
                    if (v >> k & 1) off += stride[static_cast<std::size_t>(k)];
                hits += above[off];
            }
            if (hits == 0) continue;
            double vol = inv_leb;
            for (int k = 0; k < n; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                vol *= axes[ku][idx[ku] + 1] - axes[ku][idx[ku]];
            }
            const auto& ax = axes[static_cast<std::size_t>(n)];
            const std::size_t ia = idx[static_cast<std::size_t>(n)];
            vol *= m == HalfMeasure::da ? ax[ia + 1] - ax[ia] : std::log(ax[ia + 1] / ax[ia]);
            if (static_cast<std::size_t>(hits) == corners) fs += vol;
            else ps += vol;
        }
        full[i0] = fs;
        partial[i0] = ps;
    });
    const double f = pairwise_sum(full.data(), full.size());
    const double p = pairwise_sum(partial.data(), partial.size());
    return {f + 0.5 * p, 0.5 * p};
}

LevelMeasure mc_measure(const HomogeneousNorm& norm, const HalfSpaceFn& F, double alpha, const Window& w,
                        HalfMeasure m, const Estimator& est) {
    const int n = norm.spec().dim();
    const double a0 = m == HalfMeasure::da ? w.a_lo : std::max(w.a_lo, est.log_floor * w.a_hi);
    double vol = 1.0 / norm.unit_ball_lebesgue();
    for (int k = 0; k < n; ++k) vol *= w.eta_hi[static_cast<std::size_t>(k)] - w.eta_lo[static_cast<std::size_t>(k)];
    vol *= m == HalfMeasure::da ? w.a_hi - a0 : std::log(w.a_hi / a0);
    const std::size_t chunk = 4096;
    const std::size_t chunks = (est.samples + chunk - 1) / chunk;
    const double hits = parallel_sum(chunks, [&](std::size_t c) {
        std::mt19937_64 rng(mix_seed(est.seed, c));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        GroupElement eta(static_cast<std::size_t>(n));
        const std::size_t count = std::min(chunk, est.samples - c * chunk);
        double h = 0.0;
        for (std::size_t s = 0; s < count; ++s) {
            for (int k = 0; k < n; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                eta[ku] = w.eta_lo[ku] + (w.eta_hi[ku] - w.eta_lo[ku]) * U(rng);
            }
            const double u = U(rng);
            const double a = m == HalfMeasure::da ? a0 + (w.a_hi - a0) * u : a0 * std::exp(u * std::log(w.a_hi / a0));
            if (a > 0.0 && F(eta.data(), a) > alpha) h += 1.0;
        }
        return h;
    });
    const double N = static_cast<double>(est.samples);
    const double p = hits / N;
    return {vol * p, 3.0 * vol * std::sqrt(std::max(p * (1.0 - p), 1.0 / N) / N)};
}

using EstimatorFn = std::function<Estimator(const Window&)>;

WeakConstantReport weak_sweep(const HomogeneousNorm& norm, const HalfSpaceFn& F, const std::vector<double>& alphas,
                              const WindowFn& window, HalfMeasure m, const EstimatorFn& est) {
    WeakConstantReport r;
    r.alphas = alphas;
    r.stable = true;
    for (double al : alphas) {
        const Window w = window(al);
        const Window w2 = w.doubled(norm.spec());
        const LevelMeasure a = superlevel_measure(norm, F, al, w, m, est(w));
        const LevelMeasure b = superlevel_measure(norm, F, al, w2, m, est(w2));
        r.products.push_back(al * a.value);
        r.errors.push_back(al * a.error);
        r.products_doubled.push_back(al * b.value);
        r.constant = std::max(r.constant, al * a.value);
        const double tol = al * (a.error + b.error) + 0.01 * al * std::max(a.value, b.value);
        if (!(std::abs(al * (a.value - b.value)) <= tol)) r.stable = false;
    }
    if (!std::isfinite(r.constant)) r.stable = false;
    return r;
}

}  // namespace

double AtomicMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.w;
    return s;
}

AtomicMeasure AtomicMeasure::left_translate(const GroupSpec& spec, const GroupElement& eta0) const {
    AtomicMeasure out;
    for (const auto& a : atoms) out.atoms.push_back({spec.multiply(eta0, a.xi), a.w});
    return out;
}

double phi_gamma(const HomogeneousNorm& norm, double Gamma, const double* eta, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("phi_gamma: a must be positive");
    const double Q = norm.spec().Q();
    return std::pow(a, Gamma) / std::pow(a + norm(eta), Q + Gamma);
}

double phi_gamma(const HomogeneousNorm& norm, double Gamma, const UpperHalfPoint& p) {
    return phi_gamma(norm, Gamma, p.eta.data(), p.a);
}

double weak_closed_form(double Q, double Gamma) {
    // t = u^{Q+Gamma} removes the endpoint singularity of t^{(Gamma-1)/(Q+Gamma)}
    const double p = Q + Gamma;
    const Rule1D r = composite_gauss(64, 16, 0.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double u = r.x[i];
        const double t = std::pow(u, p);
        const double v = std::pow(u, Gamma - 1.0) - t;
        if (v > 0.0) s += r.w[i] * std::pow(v, Q) * p * std::pow(u, p - 1.0);
    }
    return s;
}

double weak_closed_form_log(double Q, double Gamma) {
    // a = u^{(Q+Gamma)/Gamma} turns a^{Gamma/(Q+Gamma)} into u
    const double p = (Q + Gamma) / Gamma;
    const Rule1D r = composite_gauss(64, 16, 0.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double u = r.x[i];
        const double v = u - std::pow(u, p);
        if (v > 0.0) s += r.w[i] * std::pow(v, Q) * p / u;
    }
    return s;
}

Window Window::doubled(const GroupSpec& spec) const {
    Window w = *this;
    for (int k = 0; k < spec.dim(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double f = std::pow(2.0, spec.weight(k));
        const double c = 0.5 * (eta_lo[ku] + eta_hi[ku]);
        const double h = 0.5 * (eta_hi[ku] - eta_lo[ku]) * f;
        w.eta_lo[ku] = c - h;
        w.eta_hi[ku] = c + h;
    }
    w.a_hi = 2.0 * a_hi;
    return w;
}

Window scaled_window(const GroupSpec& spec, double s, double margin) {
    Window w;
    for (int k = 0; k < spec.dim(); ++k) {
        const double h = std::pow(margin * s, spec.weight(k));
        w.eta_lo.push_back(-h);
        w.eta_hi.push_back(h);
    }
    w.a_lo = 0.0;
    w.a_hi = margin * s;
    return w;
}

LevelMeasure superlevel_measure(const HomogeneousNorm& norm, const HalfSpaceFn& F, double alpha, const Window& w,
                                HalfMeasure m, const Estimator& est) {
    const int n = norm.spec().dim();
    if (static_cast<int>(w.eta_lo.size()) != n || static_cast<int>(w.eta_hi.size()) != n)
        throw std::invalid_argument("superlevel_measure: window dimension mismatch");
    if (!(w.a_hi > w.a_lo) || w.a_lo < 0.0) throw std::invalid_argument("superlevel_measure: bad a-interval");
    return est.kind == EstimatorKind::grid ? grid_measure(norm, F, alpha, w, m, est)
                                           : mc_measure(norm, F, alpha, w, m, est);
}

WeakConstantReport weak_l1_constant(const HomogeneousNorm& norm, const HalfSpaceFn& F,
                                    const std::vector<double>& alphas, const WindowFn& window, HalfMeasure m,
                                    const Estimator& est) {
    return weak_sweep(norm, F, alphas, window, m, [&](const Window&) { return est; });
}

double U_nu(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, const double* eta, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("U_nu: a must be positive");
    const double Q = norm.spec().Q();
    const double pre = std::pow(a, Gamma - 1.0);
    double s = 0.0;
    for (const auto& at : nu.atoms) s += at.w * pre / std::pow(a + norm.distance(eta, at.xi.data()), Q + Gamma);
    return s;
}

double U_nu(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, const UpperHalfPoint& p) {
    return U_nu(norm, nu, Gamma, p.eta.data(), p.a);
}

PoissonBoundsReport mu_poisson_bounds(const AtomicMeasure& mu, const KernelSpec& k, const CertificateReport& cert,
                                      const Window& window, double a0, const PoissonBoundsOptions& opt) {
    if (!cert.pass) throw std::invalid_argument("mu_poisson_bounds: kernel is not certified in (R_Gamma)");
    if (k.Gamma() < 1.0) throw std::invalid_argument("mu_poisson_bounds: Gamma >= 1 required");
    if (!(a0 > 0.0)) throw std::invalid_argument("mu_poisson_bounds: a0 must be positive");
    const HomogeneousNorm& norm = k.norm();
    const GroupSpec& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q(), G = k.Gamma();

    auto conv = [&](const double* eta, double a, int piece) {
        thread_local GroupElement z;
        z.resize(static_cast<std::size_t>(n));
        double s = 0.0;
        const double r = norm(eta);
        for (const auto& at : mu.atoms) {
            if (piece >= 0) {
                const double x = norm(at.xi);
                const int which = x <= 0.5 * r ? 0 : (x < 2.0 * r ? 1 : 2);
                if (which != piece) continue;
            }
            const GroupElement inv = spec.inverse(at.xi);
            spec.multiply_into(inv.data(), eta, z.data());
            s += at.w * k.dilated(a, z.data());
        }
        return s;
    };
    auto weak_fn = [&](int piece) -> HalfSpaceFn {
        return [&, piece](const double* eta, double a) {
            return conv(eta, a, piece) / (a * std::pow(1.0 + a + norm(eta), Q + G));
        };
    };
    // Grid nodes graded toward the atoms and toward a = 0 on lines; otherwise the estimator as given.
    EstimatorFn est = [&](const Window& w) {
        Estimator e = opt.estimator;
        if (n == 1 && e.kind == EstimatorKind::grid && e.nodes.empty()) {
            std::vector<double> focus;
            for (const auto& at : mu.atoms) focus.push_back(at.xi[0]);
            const double span = w.eta_hi[0] - w.eta_lo[0];
            e.nodes.push_back(graded_nodes(w.eta_lo[0], w.eta_hi[0], focus, 400, 300, 1e-5 * span));
            e.nodes.push_back(graded_nodes(w.a_lo, w.a_hi, {w.a_lo}, 200, 500, 1e-6 * (w.a_hi - w.a_lo)));
        }
        return e;
    };
    PoissonBoundsReport rep;
    const WindowFn fixed = [&](double) { return window; };
    rep.weak = weak_sweep(norm, weak_fn(-1), opt.alphas, fixed, HalfMeasure::da, est);
    for (int p = 0; p < 3; ++p) rep.pieces.push_back(weak_sweep(norm, weak_fn(p), opt.alphas, fixed, HalfMeasure::da, est));

    // sup over a > a0 * 2^d on a nested log grid
    std::vector<std::vector<double>> eta_axes;
    for (int d = 0; d < n; ++d) {
        const auto du = static_cast<std::size_t>(d);
        const int nodes = n == 1 ? opt.sup_eta_nodes : std::max(5, static_cast<int>(std::pow(opt.sup_eta_nodes, 1.0 / n)));
        std::vector<double> focus;
        for (const auto& at : mu.atoms) focus.push_back(at.xi[du]);
        eta_axes.push_back(graded_nodes(window.eta_lo[du], window.eta_hi[du], focus, nodes - 1, 20,
                                        1e-3 * (window.eta_hi[du] - window.eta_lo[du])));
    }
    std::size_t eta_count = 1;
    for (const auto& ax : eta_axes) eta_count *= ax.size();
    const double a_top = 4.0 * std::max(window.a_hi, a0 * std::pow(2.0, opt.a0_doublings));
    const int octaves = static_cast<int>(std::ceil(std::log2(a_top / a0)));
    std::vector<double> as;
    for (int j = 0; j <= octaves * opt.sup_a_nodes_per_octave; ++j)
        as.push_back(a0 * std::pow(2.0, static_cast<double>(j) / opt.sup_a_nodes_per_octave));
    std::vector<double> per_a(as.size(), 0.0);
    parallel_for(as.size(), [&](std::size_t ia) {
        GroupElement eta(static_cast<std::size_t>(n));
        double best = 0.0;
        for (std::size_t e = 0; e < eta_count; ++e) {
            std::size_t rem = e;
            for (int d = n - 1; d >= 0; --d) {
                const auto& ax = eta_axes[static_cast<std::size_t>(d)];
                eta[static_cast<std::size_t>(d)] = ax[rem % ax.size()];
                rem /= ax.size();
            }
            const double a = as[ia];
            const double v = conv(eta.data(), a, -1) / (std::pow(a, G) * std::pow(1.0 + a + norm(eta), Q + G));
            best = std::max(best, v);
        }
        per_a[ia] = best;
    });
    rep.sup_nonincreasing = true;
    for (int d = 0; d <= opt.a0_doublings; ++d) {
        const double lo = a0 * std::pow(2.0, d);
        double s = 0.0;
        for (std::size_t ia = 0; ia < as.size(); ++ia)
            if (as[ia] >= lo * (1.0 - 1e-12)) s = std::max(s, per_a[ia]);
        rep.a0s.push_back(lo);
        rep.sup_values.push_back(s);
        if (d > 0 && s > rep.sup_values[static_cast<std::size_t>(d) - 1]) rep.sup_nonincreasing = false;
        if (!std::isfinite(s)) rep.sup_nonincreasing = false;
    }
    rep.pass = rep.weak.stable && std::isfinite(rep.weak.constant) && rep.sup_nonincreasing;
    return rep;
}

std::string status_name(PieceStatus s) {
    switch (s) {
        case PieceStatus::authorized: return "authorized";
        case PieceStatus::forbidden: return "forbidden";
        case PieceStatus::plain: return "plain";
    }
    return "plain";
}

double DyadicPiece::measure() const {
    return q_volume * (a_hi - a_lo);
}

double CoveringCertificate::measure_S() const {
    double s = 0.0;
    for (const auto& p : S) s += p.measure();
    return s;
}

namespace {

// Coordinates ordered by weight, so that coordinate k of a product only involves earlier ones.
std::vector<int> weight_order(const GroupSpec& spec) {
    std::vector<int> ord(static_cast<std::size_t>(spec.dim()));
    for (int k = 0; k < spec.dim(); ++k) ord[static_cast<std::size_t>(k)] = k;
    std::stable_sort(ord.begin(), ord.end(), [&](int x, int y) { return spec.weight(x) < spec.weight(y); });
    return ord;
}

// Lattice of centers origin * delta_rho(h m), m integer.
struct Lattice {
    const HomogeneousNorm* norm = nullptr;
    GroupElement origin_inv;
    GroupElement origin;
    double h = 1.0;
    std::vector<int> ord;

    GroupElement center(const std::vector<long long>& m, double rho) const {
        const GroupSpec& spec = norm->spec();
        GroupElement v(m.size());
        for (std::size_t k = 0; k < m.size(); ++k) v[k] = h * static_cast<double>(m[k]);
        return spec.multiply(origin, spec.dilate(rho, v));
    }

    // All m with |c(m)^{-1} target| <= t rho.
    void enumerate(const GroupElement& target, double rho, double t, std::size_t limit,
                   const std::function<void(const std::vector<long long>&)>& visit) const {
        const GroupSpec& spec = norm->spec();
        const int n = spec.dim();
        const GroupElement y = spec.dilate(1.0 / rho, spec.multiply(origin_inv, target));
        GroupElement v(static_cast<std::size_t>(n), 0.0), negv(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
        std::vector<long long> m(static_cast<std::size_t>(n), 0);
        std::size_t visited = 0;
        std::function<void(int)> rec = [&](int level) {
            for (int k = 0; k < n; ++k) negv[static_cast<std::size_t>(k)] = -v[static_cast<std::size_t>(k)];
            spec.multiply_into(negv.data(), y.data(), z.data());
            if (level == n) {
                if ((*norm)(z) <= t) {
                    if (++visited > limit) throw std::invalid_argument("build_covering: candidate budget exceeded");
                    visit(m);
                }
                return;
            }
            const int k = ord[static_cast<std::size_t>(level)];
            const auto ku = static_cast<std::size_t>(k);
            const double c = z[ku];  // v_k is zero here
            const double r = std::pow(t, spec.weight(k));
            const long long lo = static_cast<long long>(std::ceil((c - r) / h));
            const long long hi = static_cast<long long>(std::floor((c + r) / h));
            for (long long q = lo; q <= hi; ++q) {
                m[ku] = q;
                v[ku] = h * static_cast<double>(q);
                rec(level + 1);
            }
            m[ku] = 0;
            v[ku] = 0.0;
        };
        rec(0);
    }
};

double lattice_step(const HomogeneousNorm& norm) {
    const int n = norm.spec().dim();
    for (double h = 1.0; h > 1e-6; h *= 0.5) {
        bool ok = true;
        GroupElement c(static_cast<std::size_t>(n));
        for (std::size_t s = 0; s < (std::size_t{1} << n) && ok; ++s) {
            for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = (s >> k & 1) ? 0.5 * h : -0.5 * h;
            if (norm(c) > 1.0) ok = false;
        }
        if (ok) return h;
    }
    throw std::runtime_error("lattice_step: no admissible spacing");
}

double quasi_gamma(const HomogeneousNorm& norm, double given) {
    if (given > 0.0) return given;
    if (norm.spec().is_abelian()) return 1.0;
    return 1.02 * measure_gamma(norm, 20000, 3).gamma;
}

double forbid_radius(int i0, int i, int l, double Q, double Gamma) {
    return std::pow(2.0, i0 - i + static_cast<double>(l - i) / (Q + Gamma) + 1.0);
}

double a_gap(double lo1, double hi1, double lo2, double hi2) { return std::max({0.0, lo1 - hi2, lo2 - hi1}); }

// D_infinity between two pieces: a-gap and center distance minus both radii.
double d_infinity(const HomogeneousNorm& norm, const DyadicPiece& p, const GroupElement& c, double rho, double a_lo,
                  double a_hi) {
    const double d = std::max(0.0, norm.distance(p.center.data(), c.data()) - p.radius - rho);
    return std::max(d, a_gap(p.a_lo, p.a_hi, a_lo, a_hi));
}

bool later(const DyadicPiece& p, int l, const std::vector<long long>& m) {
    if (l != p.i) return l > p.i;
    return m > p.index;
}

bool in_forbidden(const HomogeneousNorm& norm, const DyadicPiece& p, int i0, double Gamma, int l,
                  const std::vector<long long>& m, const GroupElement& c, double rho, double a_lo, double a_hi) {
    if (!later(p, l, m)) return false;
    return d_infinity(norm, p, c, rho, a_lo, a_hi) < forbid_radius(i0, p.i, l, norm.spec().Q(), Gamma);
}

// Point (c delta_rho(u), a) of a piece.
GroupElement piece_point(const GroupSpec& spec, const GroupElement& c, double rho, const GroupElement& u) {
    return spec.multiply(c, spec.dilate(rho, u));
}

// Unit ball quadrature in polar form, Lebesgue weights.
PointSet unit_ball_rule(const HomogeneousNorm& norm) {
    const SphereRule sph = SphereRule::build(norm, 6);
    const double Q = norm.spec().Q();
    const Rule1D rr = gauss_legendre(6, 0.0, 1.0);
    const GroupSpec& spec = norm.spec();
    PointSet ps;
    ps.n = spec.dim();
    for (std::size_t ir = 0; ir < rr.x.size(); ++ir) {
        for (std::size_t s = 0; s < sph.pts.size(); ++s) {
            const GroupElement p(sph.pts.point(s), sph.pts.point(s) + ps.n);
            const GroupElement q = spec.dilate(rr.x[ir], p);
            ps.x.insert(ps.x.end(), q.begin(), q.end());
            ps.w.push_back(rr.w[ir] * std::pow(rr.x[ir], Q - 1.0) * sph.pts.w[s]);
        }
    }
    return ps;
}

// int_piece a^{Gamma-1} / (a + |eta^{-1} xi|)^{Q+Gamma} d lambda(xi) da, calibrated lambda
double piece_integral(const HomogeneousNorm& norm, const PointSet& ball, const DyadicPiece& p, double Gamma,
                      const GroupElement& eta) {
    const GroupSpec& spec = norm.spec();
    const double Q = spec.Q();
    const Rule1D ra = gauss_legendre(6, p.a_lo, p.a_hi);
    const int n = spec.dim();
    GroupElement u(static_cast<std::size_t>(n)), xi(static_cast<std::size_t>(n));
    double s = 0.0;
    for (std::size_t b = 0; b < ball.size(); ++b) {
        spec.dilate_into(p.radius, ball.point(b), u.data());
        spec.multiply_into(p.center.data(), u.data(), xi.data());
        const double d = norm.distance(eta.data(), xi.data());
        double inner = 0.0;
        for (std::size_t ia = 0; ia < ra.x.size(); ++ia)
            inner += ra.w[ia] * std::pow(ra.x[ia], Gamma - 1.0) / std::pow(ra.x[ia] + d, Q + Gamma);
        s += ball.w[b] * inner;
    }
    return s * std::pow(p.radius, Q) / norm.unit_ball_lebesgue();
}

}  // namespace

CoveringCertificate build_covering(const HomogeneousNorm& norm, const AtomicMeasure& nu, double Gamma, double alpha,
                                   int i0, int depth, const CoveringOptions& opt) {
    const GroupSpec& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q();
    if (depth < 0 || i0 < 0) throw std::invalid_argument("build_covering: depth and i0 must be non-negative");
    if (i0 - depth - 3 < -900) throw std::invalid_argument("build_covering: piece widths underflow");
    if (!(alpha > 0.0)) throw std::invalid_argument("build_covering: alpha must be positive");
    if (Gamma < 1.0) throw std::invalid_argument("build_covering: Gamma >= 1 required");
    CoveringCertificate cert;
    cert.alpha = alpha;
    cert.Gamma = Gamma;
    cert.i0 = i0;
    cert.depth = depth;
    cert.origin = opt.origin.empty() ? GroupElement(static_cast<std::size_t>(n), 0.0) : opt.origin;
    cert.gamma = quasi_gamma(norm, opt.gamma);
    Lattice lat;
    lat.norm = &norm;
    lat.origin = cert.origin;
    lat.origin_inv = spec.inverse(cert.origin);
    lat.h = lattice_step(norm);
    lat.ord = weight_order(spec);
    cert.lattice_step = lat.h;
    const double R = std::pow(2.0, i0);
    const double mass = nu.total_mass();
    const std::vector<GroupElement> offsets = ball_offsets(norm, 8);

    for (int i = 0; i <= depth; ++i) {
        const double rho = std::pow(2.0, i0 - i - 3);
        const double a_lo = std::pow(2.0, i0 - i - 1), a_hi = std::pow(2.0, i0 - i);
        const double amax = std::max(std::pow(a_lo, Gamma - 1.0), std::pow(a_hi, Gamma - 1.0));
        const double reach = mass > 0.0 ? std::pow(mass * amax / alpha, 1.0 / (Q + Gamma)) - a_lo : -1.0;
        if (reach <= 0.0) continue;
        const double Rc = cert.gamma * (reach + rho);
        std::set<std::vector<long long>> cand;
        bool any_region = false;
        for (const auto& at : nu.atoms) {
            // region entirely inside one earlier forbidden set: nothing there can be authorized
            bool covered = false;
            for (const auto& p : cert.S) {
                const double d = cert.gamma * (norm.distance(p.center.data(), at.xi.data()) + Rc) - p.radius - rho;
                const double D = std::max(std::max(0.0, d), a_gap(p.a_lo, p.a_hi, a_lo, a_hi));
                if (p.i < i && D < forbid_radius(i0, p.i, i, Q, Gamma)) {
                    covered = true;
                    break;
                }
            }
            if (covered) continue;
            any_region = true;
            lat.enumerate(at.xi, rho, Rc / rho, opt.max_candidates, [&](const std::vector<long long>& m) {
                const GroupElement c = lat.center(m, rho);
                if (norm.distance(cert.origin.data(), c.data()) < cert.gamma * (R + rho)) cand.insert(m);
            });
            if (cand.size() > opt.max_candidates) throw std::invalid_argument("build_covering: candidate budget exceeded");
        }
        if (!any_region) {
            cert.skipped_scales.push_back(i);
            continue;
        }
        for (const auto& m : cand) {
            ++cert.pieces_examined;
            DyadicPiece piece;
            piece.i = i;
            piece.index = m;
            piece.center = lat.center(m, rho);
            piece.radius = rho;
            piece.a_lo = a_lo;
            piece.a_hi = a_hi;
            piece.q_volume = std::pow(rho, Q);
            bool forb = false;
            for (const auto& p : cert.S)
                if (in_forbidden(norm, p, i0, Gamma, i, m, piece.center, rho, a_lo, a_hi)) {
                    forb = true;
                    break;
                }
            if (forb) {
                piece.status = PieceStatus::forbidden;
                ++cert.forbidden_count;
                continue;
            }
            bool meets = false;
            for (int q = 0; q < 4 && !meets; ++q) {
                const double a = a_lo + (q + 0.5) / 4.0 * (a_hi - a_lo);
                for (const auto& u : offsets) {
                    const GroupElement x = piece_point(spec, piece.center, rho, u);
                    if (U_nu(norm, nu, Gamma, x.data(), a) > alpha) {
                        meets = true;
                        break;
                    }
                }
            }
            if (meets) {
                piece.status = PieceStatus::authorized;
                cert.S.push_back(piece);
            } else {
                ++cert.plain_count;
            }
        }
    }

    // overlap count of same-scale balls at sampled points of K_0
    std::mt19937_64 rng(mix_seed(17, 0));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double kappa = 0.0;
    for (int i = 0; i <= std::min(depth, 2); ++i) {
        const double rho = std::pow(2.0, i0 - i - 3);
        for (int s = 0; s < 500; ++s) {
            GroupElement y(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = U(rng) * std::pow(R, spec.weight(k));
            const GroupElement eta = spec.multiply(cert.origin, y);
            double count = 0.0;
            lat.enumerate(eta, rho, 1.0, 1000000, [&](const std::vector<long long>&) { count += 1.0; });
            kappa = std::max(kappa, count);
        }
    }
    cert.kappa_measured = kappa;
    return cert;
}

std::vector<double> U_i_profile(const HomogeneousNorm& norm, const CoveringCertificate& cert, const GroupElement& eta) {
    static thread_local std::map<std::string, PointSet> cache;
    const std::string key = norm.N().str();
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, unit_ball_rule(norm)).first;
    std::vector<double> out(static_cast<std::size_t>(cert.depth) + 1, 0.0);
    for (const auto& p : cert.S) out[static_cast<std::size_t>(p.i)] += piece_integral(norm, it->second, p, cert.Gamma, eta);
    return out;
}

CoveringReport verify_covering(const HomogeneousNorm& norm, const CoveringCertificate& cert, const AtomicMeasure& nu,
                               const VerifyOptions& opt) {
    const GroupSpec& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q();
    const double G = cert.Gamma;
    const double alpha = cert.alpha;
    const double R = std::pow(2.0, cert.i0);
    CoveringReport rep;
    Lattice lat;
    lat.norm = &norm;
    lat.origin = cert.origin;
    lat.origin_inv = spec.inverse(cert.origin);
    lat.h = cert.lattice_step;
    lat.ord = weight_order(spec);

    // (i) superlevel set of U inside K_0, in coordinates relative to the origin
    auto level_in_K0 = [&](double a_top) {
        HalfSpaceFn F = [&](const double* y, double a) {
            thread_local GroupElement eta;
            eta.resize(static_cast<std::size_t>(n));
            if (norm(y) > R) return 0.0;
            spec.multiply_into(cert.origin.data(), y, eta.data());
            return U_nu(norm, nu, G, eta.data(), a);
        };
        Window w = scaled_window(spec, R, 1.0);
        w.a_hi = a_top;
        Estimator e;
        e.kind = n == 1 ? EstimatorKind::grid : EstimatorKind::monte_carlo;
        e.cells = opt.grid_cells;
        e.samples = opt.mc_samples;
        e.seed = opt.seed;
        return superlevel_measure(norm, F, alpha, w, HalfMeasure::da, e);
    };
    const LevelMeasure lev = level_in_K0(R);
    rep.superlevel = lev.value;
    rep.superlevel_error = lev.error;
    rep.tail = level_in_K0(std::pow(2.0, cert.i0 - cert.depth - 1)).value;
    rep.measure_S = cert.measure_S();
    rep.vacuous = cert.S.empty() && lev.value <= lev.error;
    if (rep.vacuous) {
        rep.disjoint = rep.prop_i = rep.prop_ii = rep.prop_iii = rep.fij = rep.chain = rep.pass = true;
        return rep;
    }
    rep.C_i = rep.measure_S > 0.0 ? rep.superlevel / rep.measure_S : kInf;
    rep.prop_i = std::isfinite(rep.C_i);

    // (ii) sampled U over authorized pieces
    const std::vector<GroupElement> offs = ball_offsets(norm, 16);
    std::vector<double> mins(cert.S.size(), kInf);
    parallel_for(cert.S.size(), [&](std::size_t j) {
        const auto& p = cert.S[j];
        double mn = kInf;
        for (int q = 0; q < 4; ++q) {
            const double a = p.a_lo + q / 3.0 * (p.a_hi - p.a_lo);
            for (const auto& u : offs) {
                const GroupElement x = piece_point(spec, p.center, p.radius, u);
                mn = std::min(mn, U_nu(norm, nu, G, x.data(), a));
            }
        }
        mins[j] = mn;
    });
    rep.min_U = cert.S.empty() ? 0.0 : *std::min_element(mins.begin(), mins.end());
    rep.C_ii = rep.min_U > 0.0 ? alpha / rep.min_U : kInf;
    rep.prop_ii = std::isfinite(rep.C_ii);

    // disjointness of authorized pieces by sampling
    rep.disjoint = true;
    for (std::size_t j = 0; j < cert.S.size(); ++j) {
        const auto& p = cert.S[j];
        for (const auto& u : offs) {
            const GroupElement x = piece_point(spec, p.center, p.radius, u);
            const double a = 0.5 * (p.a_lo + p.a_hi);
            for (std::size_t k = 0; k < cert.S.size(); ++k) {
                if (k == j) continue;
                const auto& o = cert.S[k];
                if (a > o.a_lo && a < o.a_hi && norm.distance(o.center.data(), x.data()) < o.radius) rep.disjoint = false;
            }
        }
    }

    // (iii) U_S at adversarial points
    std::vector<GroupElement> probes;
    probes.push_back(cert.origin);
    for (const auto& p : cert.S) probes.push_back(p.center);
    for (const auto& at : nu.atoms) probes.push_back(at.xi);
    {
        const std::vector<GroupElement> dirs = ball_offsets(norm, static_cast<std::size_t>(opt.far_points) + 1);
        for (std::size_t d = 1; d < dirs.size(); ++d) {
            const double r = norm(dirs[d]);
            if (r <= 0.0) continue;
            probes.push_back(spec.multiply(cert.origin, spec.dilate(4.0 * R / r, dirs[d])));
        }
        std::mt19937_64 rng(mix_seed(opt.seed, 99));
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int s = 0; s < opt.random_points; ++s) {
            GroupElement y(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = U(rng) * std::pow(R, spec.weight(k));
            probes.push_back(spec.multiply(cert.origin, y));
        }
    }
    std::vector<double> us(probes.size(), 0.0);
    parallel_for(probes.size(), [&](std::size_t j) {
        const auto prof = U_i_profile(norm, cert, probes[j]);
        double s = 0.0;
        for (double v : prof) s += v;
        us[j] = s;
    });
    rep.C_iii = *std::max_element(us.begin(), us.end());
    rep.prop_iii = std::isfinite(rep.C_iii);

    // (fijaij): |union F_ij| against |A_ij|, measured per level by sampling
    auto rb = [&](int i, int l) {
        const double rho_i = std::pow(2.0, cert.i0 - i - 3), rho_l = std::pow(2.0, cert.i0 - l - 3);
        return cert.gamma * (forbid_radius(cert.i0, i, l, Q, G) + rho_i + 2.0 * rho_l);
    };
    {
        const int i = 0;
        const double A = std::pow(std::pow(2.0, cert.i0 - 3), Q) * std::pow(2.0, cert.i0 - 1);
        double s = 0.0;
        for (int l = i; l < i + 4000; ++l) {
            const double term = std::pow(rb(i, l), Q) * std::pow(2.0, cert.i0 - l - 1);
            s += term;
            if (term < 1e-14 * s) break;
        }
        rep.fij_bound = s / A;
    }
    std::vector<double> ratios(cert.S.size(), 0.0);
    parallel_for(cert.S.size(), [&](std::size_t j) {
        const auto& p = cert.S[j];
        double total = 0.0;
        for (int l = p.i; l <= cert.depth; ++l) {
            const double rho_l = std::pow(2.0, cert.i0 - l - 3);
            const double lo = std::pow(2.0, cert.i0 - l - 1), hi = std::pow(2.0, cert.i0 - l);
            const double Rb = rb(p.i, l);
            double vol = (hi - lo) / norm.unit_ball_lebesgue();
            for (int k = 0; k < n; ++k) vol *= 2.0 * std::pow(Rb, spec.weight(k));
            std::mt19937_64 rng(mix_seed(opt.seed, 1000 + j * 64 + static_cast<std::size_t>(l)));
            std::uniform_real_distribution<double> U(-1.0, 1.0);
            std::size_t hits = 0;
            const double Rf = forbid_radius(cert.i0, p.i, l, Q, G);
            for (std::size_t s = 0; s < opt.fij_samples; ++s) {
                GroupElement u(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k)] = U(rng) * std::pow(Rb, spec.weight(k));
                if (norm(u) > Rb) continue;
                const GroupElement eta = spec.multiply(p.center, u);
                bool in = false;
                lat.enumerate(eta, rho_l, 1.0, 1000000, [&](const std::vector<long long>& m) {
                    if (in || !later(p, l, m)) return;
                    const GroupElement c = lat.center(m, rho_l);
                    if (d_infinity(norm, p, c, rho_l, lo, hi) < Rf) in = true;
                });
                if (in) ++hits;
            }
            total += vol * static_cast<double>(hits) / static_cast<double>(opt.fij_samples);
        }
        ratios[j] = total / p.measure();
    });
    rep.fij_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    rep.fij = rep.fij_ratio <= rep.fij_bound;

    const double C = std::max({rep.C_i, rep.C_ii, rep.C_iii});
    rep.chain_constant = C * C * C * nu.total_mass();
    rep.chain = alpha * rep.superlevel <= rep.chain_constant;
    rep.pass = rep.prop_i && rep.prop_ii && rep.prop_iii && rep.fij && rep.chain && rep.disjoint;
    return rep;
}

ProfileReport U_i_check(const HomogeneousNorm& norm, const CoveringCertificate& cert, int max_p, std::uint64_t seed) {
    const GroupSpec& spec = norm.spec();
    const int n = spec.dim();
    const double R = std::pow(2.0, cert.i0);
    ProfileReport rep;
    if (cert.S.empty()) {
        rep.pass = true;
        return rep;
    }
    std::vector<GroupElement> direct;
    direct.push_back(cert.origin);
    for (const auto& p : cert.S) direct.push_back(p.center);
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int s = 0; s < 16; ++s) {
        GroupElement y(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = U(rng) * std::pow(R, spec.weight(k));
        direct.push_back(spec.multiply(cert.origin, y));
    }
    for (const auto& eta : direct) {
        const auto prof = U_i_profile(norm, cert, eta);
        double s = 0.0;
        for (double v : prof) {
            rep.C2_direct = std::max(rep.C2_direct, v);
            s += v;
        }
        rep.sum_max = std::max(rep.sum_max, s);
    }
    // decay clause: points whose distance to T_i exceeds 2^{i0+p}
    const std::vector<GroupElement> dirs = ball_offsets(norm, 5);
    for (int i = 0; i <= cert.depth; ++i) {
        std::vector<const DyadicPiece*> Ti;
        for (const auto& p : cert.S)
            if (p.i == i) Ti.push_back(&p);
        if (Ti.empty()) continue;
        for (int p = -i; p <= max_p; ++p) {
            const double target = std::pow(2.0, cert.i0 + p);
            for (std::size_t d = 1; d < dirs.size(); ++d) {
                const double r0 = norm(dirs[d]);
                if (r0 <= 0.0) continue;
                for (double r = target; r < 1e6 * target; r *= 1.1) {
                    const GroupElement eta = spec.multiply(Ti.front()->center, spec.dilate(r / r0, dirs[d]));
                    double dist = kInf;
                    for (const auto* q : Ti)
                        dist = std::min(dist, norm.distance(q->center.data(), eta.data()) / cert.gamma - q->radius);
                    if (dist <= target) continue;
                    const auto prof = U_i_profile(norm, cert, eta);
                    rep.C2_decay = std::max(rep.C2_decay, prof[static_cast<std::size_t>(i)] *
                                                              std::pow(2.0, (p + i) * cert.Gamma));
                    ++rep.decay_points;
                    break;
                }
            }
        }
    }
    rep.C2 = std::max(rep.C2_direct, rep.C2_decay);
    rep.pass = std::isfinite(rep.C2) && std::isfinite(rep.sum_max);
    return rep;
}

}  // namespace nilh
