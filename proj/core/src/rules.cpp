#include "nilharmonics/rules.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace nilh {

namespace {

// nodes/weights on [-1, 1] via Newton on Legendre polynomials
std::pair<std::vector<double>, std::vector<double>> legendre_nodes(int n) {
    static std::mutex mu;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
        }
        double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    cache.emplace(n, std::make_pair(x, w));
    return {x, w};
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    auto [x, w] = legendre_nodes(n);
    Rule1D r;
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.x.push_back(c + h * x[static_cast<std::size_t>(i)]);
        r.w.push_back(h * w[static_cast<std::size_t>(i)]);
    }
    return r;
}

Rule1D composite_gauss(int panels, int order, double a, double b) {
    Rule1D r;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        Rule1D g = gauss_legendre(order, a + p * h, a + (p + 1) * h);
        r.x.insert(r.x.end(), g.x.begin(), g.x.end());
        r.w.insert(r.w.end(), g.w.begin(), g.w.end());
    }
    return r;
}

Rule1D simpson(int n, double a, double b) {
    if (n < 2 || n % 2) throw std::invalid_argument("simpson: interval count must be even and >= 2");
    Rule1D r;
    double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
        r.x.push_back(a + i * h);
        double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        r.w.push_back(c * h / 3.0);
    }
    return r;
}

Rule1D midpoint(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("midpoint: n < 1");
    Rule1D r;
    double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        r.x.push_back(a + (i + 0.5) * h);
        r.w.push_back(h);
    }
    return r;
}

}  // namespace nilh
