#pragma once
// Coefficients of the density expansion: moments of descending order
// statistics Y_1 > ... > Y_r of r iid standard normals, scaled by 1/r!:
//     alpha_j  = E[Y_j] / r!
//     beta_jk  = E[Y_j Y_k] / r!          (j < k)
//     lambda_j = E[Y_j^2 - 1] / r!
// Exact values are wired in for r <= 3; otherwise Gauss-Legendre panel
// quadrature with certification by panel doubling.  sum_j alpha_j = 0 and
// sum over all beta/lambda terms of the quadratic form vanish; the closed
// forms make those cancellations exact in floating point.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "primerace/rng.hpp"

namespace primerace {

struct SimplexCoefficients {
    int r = 0;
    std::vector<double> alpha;              // size r
    std::vector<double> lambda;             // size r
    std::vector<std::vector<double>> beta;  // r x r, symmetric, zero diagonal
    double max_error = 0.0;                 // certified quadrature error
    bool closed_form = false;
};

namespace detail {

inline double ipow(double x, int e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= (double)i;
    return r;
}

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }
inline double norm_sf(double x) { return 0.5 * std::erfc(x * 0.70710678118654752440); }

// nodes/weights on (-1,1); Newton on P_n from Chebyshev initial guesses
inline const std::vector<std::pair<double, double>>& gauss_legendre_16() {
    static const std::vector<std::pair<double, double>> table = [] {
        const int n = 16;
        std::vector<std::pair<double, double>> t(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            t[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return t;
    }();
    return table;
}

// integrate f over [a,b] with m uniform panels
template <class F>
double panel_integral(F&& f, double a, double b, int m) {
    const auto& gl = gauss_legendre_16();
    double h = (b - a) / m;
    double total = 0.0;
    for (int p = 0; p < m; ++p) {
        double lo = a + p * h;
        double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (auto [x, w] : gl) acc += w * f(mid + 0.5 * h * x);
        total += acc * 0.5 * h;
    }
    return total;
}

// doubling driver: returns value, writes certified error estimate
template <class F>
double integrate_certified(F&& f, double a, double b, double tol, double& err) {
    int m = 8;
    double prev = panel_integral(f, a, b, m);
    for (int step = 0; step < 8; ++step) {
        m *= 2;
        double cur = panel_integral(f, a, b, m);
        err = std::abs(cur - prev);
        prev = cur;
        if (err <= 0.5 * tol) return cur;
    }
    return prev;
}

constexpr double kSimplexCut = 10.0;  // |integrand| < 1e-20 beyond

// E[Y_j] and E[Y_j^2-1] over the marginal of the j-th largest, divided by r!
inline double order_stat_moment_1d(int r, int j, bool second, double tol, double& err) {
    double norm = factorial(j - 1) * factorial(r - j);
    auto f = [&](double x) {
        double g = second ? x * x - 1.0 : x;
        return g * ipow(norm_sf(x), j - 1) * ipow(norm_cdf(x), r - j) * norm_pdf(x);
    };
    double v = integrate_certified(f, -kSimplexCut, kSimplexCut, tol * norm, err);
    err /= norm;
    return v / norm;
}

// E[Y_j Y_k]/r! over the joint density of the (j,k)-th largest, j < k
inline double order_stat_moment_2d(int r, int j, int k, double tol, double& err) {
    double norm = factorial(j - 1) * factorial(k - j - 1) * factorial(r - k);
    const auto& gl = gauss_legendre_16();
    auto eval = [&](int m) {
        // outer over y (the smaller), inner over x in (y, cut)
        double hy = 2.0 * kSimplexCut / m;
        double total = 0.0;
        for (int py = 0; py < m; ++py) {
            double ylo = -kSimplexCut + py * hy;
            double ymid = ylo + 0.5 * hy;
            for (auto [ty, wy] : gl) {
                double y = ymid + 0.5 * hy * ty;
                double outer = y * ipow(norm_cdf(y), r - k) * norm_pdf(y) * wy * 0.5 * hy;
                if (outer == 0.0) continue;
                double cy = norm_cdf(y);
                double hx = (kSimplexCut - y) / m;
                double inner = 0.0;
                for (int px = 0; px < m; ++px) {
                    double xlo = y + px * hx;
                    double xmid = xlo + 0.5 * hx;
                    for (auto [tx, wx] : gl) {
                        double x = xmid + 0.5 * hx * tx;
                        inner += wx * x * ipow(norm_sf(x), j - 1) *
                                 ipow(norm_cdf(x) - cy, k - j - 1) * norm_pdf(x);
                    }
                }
                total += outer * inner * 0.5 * hx;
            }
        }
        return total;
    };
    int m = 8;
    double prev = eval(m);
    double v = prev;
    err = 1e300;
    for (int step = 0; step < 4; ++step) {
        m *= 2;
        double cur = eval(m);
        err = std::abs(cur - prev) / norm;
        prev = cur;
        v = cur;
        if (err <= 0.5 * tol) break;
    }
    return v / norm;
}

}  // namespace detail

inline SimplexCoefficients simplex_coefficients_quadrature(int r, double tol = 1e-10) {
    if (r < 2 || r > 6) throw std::domain_error("simplex coefficients: r out of [2,6]");
    SimplexCoefficients c;
    c.r = r;
    c.alpha.assign(r, 0.0);
    c.lambda.assign(r, 0.0);
    c.beta.assign(r, std::vector<double>(r, 0.0));
    double err = 0.0;
    for (int j = 1; j <= r; ++j) {
        c.alpha[j - 1] = detail::order_stat_moment_1d(r, j, false, tol, err);
        c.max_error = std::max(c.max_error, err);
        c.lambda[j - 1] = detail::order_stat_moment_1d(r, j, true, tol, err);
        c.max_error = std::max(c.max_error, err);
    }
    for (int j = 1; j <= r; ++j)
        for (int k = j + 1; k <= r; ++k) {
            double v = detail::order_stat_moment_2d(r, j, k, tol, err);
            c.beta[j - 1][k - 1] = v;
            c.beta[k - 1][j - 1] = v;
            c.max_error = std::max(c.max_error, err);
        }
    return c;
}

inline SimplexCoefficients simplex_coefficients(int r, double tol = 1e-10) {
    if (r < 2 || r > 6) throw std::domain_error("simplex coefficients: r out of [2,6]");
    if (r == 2) {
        SimplexCoefficients c;
        c.r = 2;
        double a = 1.0 / (2.0 * std::sqrt(3.14159265358979323846));
        c.alpha = {a, -a};
        c.lambda = {0.0, 0.0};
        c.beta.assign(2, std::vector<double>(2, 0.0));
        c.closed_form = true;
        return c;
    }
    if (r == 3) {
        SimplexCoefficients c;
        c.r = 3;
        double a = 1.0 / (4.0 * std::sqrt(3.14159265358979323846));
        double b = 1.0 / (4.0 * 3.14159265358979323846 * std::sqrt(3.0));
        c.alpha = {a, 0.0, -a};
        c.beta.assign(3, std::vector<double>(3, 0.0));
        c.beta[0][1] = c.beta[1][0] = b;
        c.beta[1][2] = c.beta[2][1] = b;
        c.beta[0][2] = c.beta[2][0] = -2.0 * b;  // exact: keeps row sums at zero
        // E[Y_j^2 - 1]/3! has no elementary form; certified quadrature
        c.lambda.assign(3, 0.0);
        double err = 0.0;
        for (int j = 1; j <= 3; ++j) {
            c.lambda[j - 1] = detail::order_stat_moment_1d(3, j, true, tol, err);
            c.max_error = std::max(c.max_error, err);
        }
        c.closed_form = true;
        return c;
    }
    return simplex_coefficients_quadrature(r, tol);
}

// process-wide cache; quadrature for r >= 4 is not free
inline const SimplexCoefficients& simplex_coefficients_cached(int r) {
    static std::mutex mu;
    static std::map<int, SimplexCoefficients> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, simplex_coefficients(r)).first;
    return it->second;
}

// Monte Carlo estimates of the same moments (for validation)
struct SimplexMcResult {
    int r = 0;
    u64 n = 0;
    u64 seed = 0;
    std::vector<double> alpha, alpha_se;
    std::vector<double> lambda, lambda_se;
    std::vector<std::vector<double>> beta, beta_se;
};

inline SimplexMcResult simplex_mc(int r, u64 n, u64 seed) {
    if (r < 2 || r > 6) throw std::domain_error("simplex mc: r out of [2,6]");
    CounterRng rng(seed);
    std::vector<Welford> w1(r), w2(r);
    std::vector<std::vector<Welford>> wb(r, std::vector<Welford>(r));
    std::vector<double> y(r);
    for (u64 i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) y[j] = rng.next_normal();
        std::sort(y.begin(), y.end(), std::greater<double>());
        for (int j = 0; j < r; ++j) {
            w1[j].add(y[j]);
            w2[j].add(y[j] * y[j] - 1.0);
            for (int k = j + 1; k < r; ++k) wb[j][k].add(y[j] * y[k]);
        }
    }
    double rf = detail::factorial(r);
    SimplexMcResult out;
    out.r = r;
    out.n = n;
    out.seed = seed;
    out.alpha.resize(r);
    out.alpha_se.resize(r);
    out.lambda.resize(r);
    out.lambda_se.resize(r);
    out.beta.assign(r, std::vector<double>(r, 0.0));
    out.beta_se.assign(r, std::vector<double>(r, 0.0));
    for (int j = 0; j < r; ++j) {
        out.alpha[j] = w1[j].mean() / rf;
        out.alpha_se[j] = w1[j].std_error() / rf;
        out.lambda[j] = w2[j].mean() / rf;
        out.lambda_se[j] = w2[j].std_error() / rf;
        for (int k = j + 1; k < r; ++k) {
            out.beta[j][k] = out.beta[k][j] = wb[j][k].mean() / rf;
            out.beta_se[j][k] = out.beta_se[k][j] = wb[j][k].std_error() / rf;
        }
    }
    return out;
}

inline void write_simplex_json(std::ostream& out, const SimplexCoefficients& c) {
    out.precision(17);
    out << "{\n  \"r\": " << c.r << ",\n  \"closed_form\": "
        << (c.closed_form ? "true" : "false") << ",\n  \"max_error\": " << c.max_error
        << ",\n  \"alpha\": [";
    for (int j = 0; j < c.r; ++j) out << (j ? ", " : "") << c.alpha[j];
    out << "],\n  \"lambda\": [";
    for (int j = 0; j < c.r; ++j) out << (j ? ", " : "") << c.lambda[j];
    out << "],\n  \"beta\": [";
    for (int j = 0; j < c.r; ++j) {
        out << (j ? ",\n           [" : "[");
        for (int k = 0; k < c.r; ++k) out << (k ? ", " : "") << c.beta[j][k];
        out << "]";
    }
    out << "]\n}\n";
}

}  // namespace primerace
