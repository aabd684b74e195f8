#include "fraccite/error.hpp"
#include "fraccite/special.hpp"
#include "fraccite/stats.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

// Distribution of the range of k standard normals divided by an independent
// scale estimate s with ν s² ~ χ²(ν):
//
//   P(Q ≤ q) = ∫ f(s) W(q s) ds,  W(w) = k ∫ φ(z) [Φ(z) − Φ(z − w)]^(k−1) dz
//
// Both integrals use composite 16-point Gauss-Legendre. The outer integral is
// taken over u = ln s, where the density is smooth and unimodal near u = 0, and
// is evaluated as the upper tail so that small alphas keep their precision.

namespace fraccite::stats {

namespace {

constexpr int kNodes = 16;

struct GaussLegendre {
    std::array<double, kNodes> x{};
    std::array<double, kNodes> w{};

    GaussLegendre() {
        for (int i = 0; i < (kNodes + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < kNodes; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                dp = kNodes * (z * p1 - p2) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-16) break;
            }
            x[i] = -z;
            x[kNodes - 1 - i] = z;
            w[i] = w[kNodes - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

const GaussLegendre& gl() {
    static const GaussLegendre rule;
    return rule;
}

// Fixed z-grid for the inner integral with φ(z) and Φ(z) precomputed.
struct InnerGrid {
    static constexpr double kLo = -9.0;
    static constexpr double kHi = 9.0;
    static constexpr int kPanels = 16;

    std::array<double, kPanels * kNodes> z{};
    std::array<double, kPanels * kNodes> weight_pdf{};
    std::array<double, kPanels * kNodes> cdf{};

    InnerGrid() {
        const auto& rule = gl();
        const double h = (kHi - kLo) / kPanels;
        for (int p = 0; p < kPanels; ++p) {
            const double mid = kLo + (p + 0.5) * h;
            for (int i = 0; i < kNodes; ++i) {
                const int idx = p * kNodes + i;
                z[idx] = mid + 0.5 * h * rule.x[i];
                const double pdf = std::exp(-0.5 * z[idx] * z[idx]) / std::sqrt(2.0 * std::numbers::pi);
                weight_pdf[idx] = 0.5 * h * rule.w[i] * pdf;
                cdf[idx] = normal_cdf(z[idx]);
            }
        }
    }
};

const InnerGrid& inner_grid() {
    static const InnerGrid grid;
    return grid;
}

// P(range of k standard normals ≤ w).
double range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    const auto& g = inner_grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.z.size(); ++i) {
        const double diff = g.cdf[i] - normal_cdf(g.z[i] - w);
        if (diff <= 0.0) continue;
        sum += g.weight_pdf[i] * std::pow(diff, k - 1);
    }
    return std::clamp(k * sum, 0.0, 1.0);
}

// log density of u = ln s, where ν s² ~ χ²(ν):
//   ln 2 + (ν/2) ln(ν/2) − ln Γ(ν/2) + ν u − (ν/2) e^(2u)
double log_scale_density(double u, double df) {
    const double h = 0.5 * df;
    return std::log(2.0) + h * std::log(h) - log_gamma(h) + df * u - h * std::exp(2.0 * u);
}

// P(Q > q) for finite df. Below the cut-off L the inner range probability is
// negligible, so that part of the integral is P(s < e^L) in closed form; the
// rest is integrated numerically with the exact density.
double upper_tail(double q, int k, double df) {
    constexpr double kNegligible = 1e-17;
    constexpr double kCut = -45.0;
    const double step = std::min(1.0, 2.0 / std::sqrt(2.0 * df));
    const double mode = log_scale_density(0.0, df);

    double lo = 0.0;
    while (range_cdf(q * std::exp(lo), k) > kNegligible && log_scale_density(lo, df) - mode > kCut) lo -= step;
    double hi = step;
    while (log_scale_density(hi, df) - mode > kCut) hi += step;

    // P(s < e^lo) = P(χ²(ν) < ν e^(2 lo)).
    double tail = gamma_p(0.5 * df, 0.5 * df * std::exp(2.0 * lo));

    const auto& rule = gl();
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (int i = 0; i < kNodes; ++i) {
            const double u = mid + 0.5 * h * rule.x[i];
            const double dens = 0.5 * h * rule.w[i] * std::exp(log_scale_density(u, df));
            if (dens > 0.0) tail += dens * (1.0 - range_cdf(q * std::exp(u), k));
        }
    }
    return std::clamp(tail, 0.0, 1.0);
}

double upper_tail_any(double q, int k, double df) {
    if (std::isinf(df)) return 1.0 - range_cdf(q, k);
    return upper_tail(q, k, df);
}

void check_args(int k, double df) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "studentized range needs k >= 2");
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "studentized range needs df > 0");
}

}  // namespace

double studentized_range_cdf(double q, int k, double df) {
    check_args(k, df);
    if (!(q > 0.0)) return 0.0;
    if (std::isinf(q)) return 1.0;
    return 1.0 - upper_tail_any(q, k, df);
}

namespace {

double solve_quantile(double alpha, int k, double df);

}  // namespace

// Memoized: Dunnett's C asks for the same (alpha, k, df) once per group.
double studentized_range_quantile(double alpha, int k, double df) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    check_args(k, df);
    static std::mutex mutex;
    static std::map<std::tuple<double, int, double>, double> cache;
    const auto key = std::make_tuple(alpha, k, df);
    {
        const std::lock_guard lock(mutex);
        if (const auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double q = solve_quantile(alpha, k, df);
    const std::lock_guard lock(mutex);
    cache.emplace(key, q);
    return q;
}

namespace {

double solve_quantile(double alpha, int k, double df) {
    // Root of alpha − P(Q > q), increasing in q.
    auto f = [&](double q) { return alpha - upper_tail_any(q, k, df); };

    double a = 0.0, fa = alpha - 1.0;
    double b = 4.0, fb = f(b);
    while (fb < 0.0) {
        a = b;
        fa = fb;
        b *= 2.0;
        if (b > 1e7) throw Error(ErrorCode::ConvergenceFailure, "could not bracket the quantile");
        fb = f(b);
    }

    // Brent's method on [a, b].
    constexpr int kMaxIter = 200;
    constexpr double kRelTol = 1e-11;
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::fabs(b) + 0.5 * kRelTol * std::fabs(b);
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return b;
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, qq;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                qq = 1.0 - s;
            } else {
                const double r = fb / fc;
                const double t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                qq = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                qq = -qq;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * qq - std::fabs(tol * qq), std::fabs(e * qq))) {
                e = d;
                d = p / qq;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    throw Error(ErrorCode::ConvergenceFailure,
                "studentized range quantile: bracket width " + std::to_string(std::fabs(c - b)) +
                    " after " + std::to_string(kMaxIter) + " iterations");
}

}  // namespace

}  // namespace fraccite::stats
