#pragma once
// Logarithmic densities of prime races.  The density of
// {x : pi(x;q,a1) > ... > pi(x;q,ar)} is expanded around 1/r! in powers of
// 1/sqrt(N_q):
//   delta = 1/r! - (1/sqrt(N)) sum_j alpha_j C_j
//                + (1/N) sum_{j<k} beta_jk B_jk
//                + (1/2N) (sum_j lambda_j C_j^2 + 2 sum_{j<k} beta_jk C_j C_k)
// with C_j the square-root-count biases and N, B_jk the zero-sum functionals
// from spectral.hpp.  A surrogate Gaussian model (means -C_j, covariance
// N on the diagonal and B_jk off it) backs the Monte Carlo cross-check and
// the exact two-competitor formula.

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "primerace/config.hpp"
#include "primerace/ntheory.hpp"
#include "primerace/rng.hpp"
#include "primerace/simplex.hpp"
#include "primerace/spectral.hpp"

namespace primerace {

struct DensityReport {
    u64 q = 0;
    std::vector<u64> tuple;
    int r = 0;
    std::string method;  // "series" | "pair-exact" | "squares-collapse" | "surrogate-mc"
    double delta = 0.0;
    double baseline = 0.0;
    double alpha_term = 0.0;
    double beta_term = 0.0;
    double c2_term = 0.0;
    double error_budget = 0.0;
    double coefficient_error = 0.0;
    double n_value = 0.0;
    double y = 0.0;
    double sigma = 0.0;  // surrogate-mc standard error, else 0
    u64 seed = 0;
    u64 samples = 0;
    bool degenerate = false;
};

namespace detail {

inline void require_race_tuple(u64 q, const std::vector<u64>& a) {
    if (q < 3) throw std::domain_error("density: q < 3");
    if (a.size() < 2) throw std::domain_error("density: need at least two competitors");
    for (u64 x : a)
        if (std::gcd(x % q, q) != 1) throw std::domain_error("density: competitors must be units");
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j)
            if (a[i] % q == a[j] % q) throw std::domain_error("density: repeated competitor");
}

}  // namespace detail

// Series evaluation from raw inputs; B is r x r symmetric with zero diagonal.
inline DensityReport evaluate_series(double n_value, const std::vector<double>& c,
                                     const std::vector<std::vector<double>>& b,
                                     const SimplexCoefficients& coeffs,
                                     const Config& cfg = {}) {
    int r = coeffs.r;
    if ((int)c.size() != r || (int)b.size() != r)
        throw std::domain_error("evaluate_series: dimension mismatch");
    if (n_value <= 0.0) throw std::domain_error("evaluate_series: N <= 0 (degenerate context)");
    DensityReport rep;
    rep.r = r;
    rep.method = "series";
    rep.n_value = n_value;
    rep.coefficient_error = coeffs.max_error;
    rep.baseline = 1.0 / detail::factorial(r);

    double sn = std::sqrt(n_value);
    double la = 0.0;
    for (int j = 0; j < r; ++j) la += coeffs.alpha[j] * c[j];
    rep.alpha_term = -la / sn;

    double lb = 0.0, lq = 0.0;
    for (int j = 0; j < r; ++j) {
        lq += coeffs.lambda[j] * c[j] * c[j];
        for (int k = j + 1; k < r; ++k) {
            lb += coeffs.beta[j][k] * b[j][k];
            lq += 2.0 * coeffs.beta[j][k] * c[j] * c[k];
        }
    }
    rep.beta_term = lb / n_value;
    rep.c2_term = 0.5 * lq / n_value;
    rep.delta = rep.baseline + rep.alpha_term + rep.beta_term + rep.c2_term;

    double cmax = 0.0, bmax = 0.0;
    for (int j = 0; j < r; ++j) {
        cmax = std::max(cmax, std::abs(c[j]));
        for (int k = j + 1; k < r; ++k) bmax = std::max(bmax, std::abs(b[j][k]));
    }
    rep.error_budget = cfg.c_series * (1.0 / n_value + cmax * bmax / std::pow(n_value, 1.5) +
                                       bmax * bmax / (n_value * n_value));
    return rep;
}

inline DensityReport density_series(const SpectralContext& ctx, const std::vector<u64>& a) {
    detail::require_race_tuple(ctx.q(), a);
    int r = (int)a.size();
    const SimplexCoefficients& coeffs = simplex_coefficients_cached(r);
    std::vector<double> c(r);
    std::vector<std::vector<double>> b(r, std::vector<double>(r, 0.0));
    for (int j = 0; j < r; ++j) c[j] = (double)chebyshev_c(a[j], ctx.q());
    for (int j = 0; j < r; ++j)
        for (int k = j + 1; k < r; ++k) b[j][k] = b[k][j] = ctx.b_q(a[j], a[k]);

    // sanity guard on the zero-sum inputs
    double phi = (double)ctx.group().phi();
    for (int j = 0; j < r; ++j)
        for (int k = j + 1; k < r; ++k)
            if (std::abs(b[j][k]) > ctx.config().c_bq_phi * phi)
                throw std::domain_error("density: |B_q| out of admissible range");

    DensityReport rep = evaluate_series(ctx.n_q(), c, b, coeffs, ctx.config());
    rep.q = ctx.q();
    rep.tuple = a;
    rep.y = ctx.y();
    rep.error_budget += ctx.n_q_budget() / (ctx.n_q() * ctx.n_q()) + ctx.b_q_budget() / ctx.n_q();
    return rep;
}

// exact within the surrogate model: P(X1 > X2) = Phi((C2 - C1)/sqrt(V))
inline DensityReport density_pair(const SpectralContext& ctx, u64 a, u64 b) {
    detail::require_race_tuple(ctx.q(), {a, b});
    double c1 = (double)chebyshev_c(a, ctx.q());
    double c2 = (double)chebyshev_c(b, ctx.q());
    double v = ctx.v_q(a, b);
    DensityReport rep;
    rep.q = ctx.q();
    rep.tuple = {a, b};
    rep.r = 2;
    rep.method = "pair-exact";
    rep.n_value = ctx.n_q();
    rep.y = ctx.y();
    rep.baseline = 0.5;
    rep.delta = detail::norm_cdf((c2 - c1) / std::sqrt(v));
    rep.alpha_term = rep.delta - 0.5;
    double c1q = (double)chebyshev_c(1, ctx.q());
    double lq = std::log((double)ctx.q());
    rep.error_budget = ctx.config().c_two_way * c1q * c1q * lq * lq / v +
                       ctx.v_q_budget() / v;
    return rep;
}

// all C_j equal (a tuple of squares, or of fixed square-count): the linear
// and quadratic C-terms cancel and delta = 1/r! + (1/N) sum beta_jk B_jk
inline DensityReport density_squares(const SpectralContext& ctx, const std::vector<u64>& a) {
    detail::require_race_tuple(ctx.q(), a);
    int r = (int)a.size();
    i64 c0 = chebyshev_c(a[0], ctx.q());
    for (u64 x : a)
        if (chebyshev_c(x, ctx.q()) != c0)
            throw std::domain_error("density_squares: square-root counts differ across tuple");
    const SimplexCoefficients& coeffs = simplex_coefficients_cached(r);
    double lb = 0.0, bmax = 0.0;
    for (int j = 0; j < r; ++j)
        for (int k = j + 1; k < r; ++k) {
            double bjk = ctx.b_q(a[j], a[k]);
            lb += coeffs.beta[j][k] * bjk;
            bmax = std::max(bmax, std::abs(bjk));
        }
    DensityReport rep;
    rep.q = ctx.q();
    rep.tuple = a;
    rep.r = r;
    rep.method = "squares-collapse";
    rep.n_value = ctx.n_q();
    rep.y = ctx.y();
    rep.coefficient_error = coeffs.max_error;
    rep.baseline = 1.0 / detail::factorial(r);
    rep.beta_term = lb / ctx.n_q();
    rep.delta = rep.baseline + rep.beta_term;
    rep.error_budget = ctx.config().c_series *
                           (1.0 / ctx.n_q() + bmax * bmax / (ctx.n_q() * ctx.n_q())) +
                       ctx.n_q_budget() / (ctx.n_q() * ctx.n_q()) +
                       ctx.b_q_budget() / ctx.n_q();
    return rep;
}

// Monte Carlo under the surrogate Gaussian: X ~ N(-C, Sigma) with
// Sigma_jj = N, Sigma_jk = B_jk; estimates P(X1 > ... > Xr).
inline DensityReport surrogate_density_mc(const SpectralContext& ctx, const std::vector<u64>& a,
                                          u64 samples, u64 seed) {
    detail::require_race_tuple(ctx.q(), a);
    int r = (int)a.size();
    if (samples == 0) throw std::domain_error("surrogate mc: zero samples");
    std::vector<double> mean(r);
    std::vector<std::vector<double>> sigma(r, std::vector<double>(r, 0.0));
    for (int j = 0; j < r; ++j) {
        mean[j] = -(double)chebyshev_c(a[j], ctx.q());
        sigma[j][j] = ctx.n_q();
        for (int k = j + 1; k < r; ++k) sigma[j][k] = sigma[k][j] = ctx.b_q(a[j], a[k]);
    }
    // Cholesky; failure means the covariance is not positive definite
    std::vector<std::vector<double>> l(r, std::vector<double>(r, 0.0));
    for (int j = 0; j < r; ++j) {
        for (int k = 0; k <= j; ++k) {
            double s = sigma[j][k];
            for (int m = 0; m < k; ++m) s -= l[j][m] * l[k][m];
            if (j == k) {
                if (s <= 0.0)
                    throw std::domain_error("surrogate mc: covariance not positive definite");
                l[j][j] = std::sqrt(s);
            } else {
                l[j][k] = s / l[k][k];
            }
        }
    }
    CounterRng rng(seed);
    std::vector<double> z(r), x(r);
    u64 hits = 0;
    for (u64 i = 0; i < samples; ++i) {
        for (int j = 0; j < r; ++j) z[j] = rng.next_normal();
        bool ok = true;
        double prev = 0.0;
        for (int j = 0; j < r && ok; ++j) {
            double v = mean[j];
            for (int m = 0; m <= j; ++m) v += l[j][m] * z[m];
            if (j > 0 && v >= prev) ok = false;
            prev = v;
        }
        if (ok) ++hits;
    }
    double p = (double)hits / (double)samples;
    DensityReport rep;
    rep.q = ctx.q();
    rep.tuple = a;
    rep.r = r;
    rep.method = "surrogate-mc";
    rep.n_value = ctx.n_q();
    rep.y = ctx.y();
    rep.baseline = 1.0 / detail::factorial(r);
    rep.delta = p;
    rep.sigma = std::sqrt(std::max(p * (1.0 - p), 1.0 / (double)samples) / (double)samples);
    rep.seed = seed;
    rep.samples = samples;
    rep.error_budget = 3.0 * rep.sigma;
    return rep;
}

// ---------------------------------------------------------------------------
// Extreme-bias detection from signed representatives.

// weight of the pair: log 2 when u = -v; Lambda(t)/t when one representative
// is an exact integer multiple t of the other with the same sign; else 0
inline double pair_weight(u64 q, u64 a, u64 b) {
    i64 u = Residue{q, (i64)(a % q)}.signed_rep();
    i64 v = Residue{q, (i64)(b % q)}.signed_rep();
    if (u == -v) return 0.69314718055994530942;
    if ((u > 0) == (v > 0)) {
        u64 au = (u64)std::abs(u), av = (u64)std::abs(v);
        if (au < av) std::swap(au, av);
        return lambda0_ratio(au, av);
    }
    return 0.0;
}

// second-order bias functional of an ordered triple; nonzero means the
// beta-weighted combination w12 + w23 - 2 w13 survives at scale phi(q)/N
inline double extreme_bias_witness(u64 q, u64 a1, u64 a2, u64 a3) {
    return pair_weight(q, a1, a2) + pair_weight(q, a2, a3) - 2.0 * pair_weight(q, a1, a3);
}

inline double max_extreme_bias_witness(u64 q, u64 a1, u64 a2, u64 a3) {
    std::array<u64, 3> t{a1, a2, a3};
    std::sort(t.begin(), t.end());
    double best = 0.0;
    do {
        double w = extreme_bias_witness(q, t[0], t[1], t[2]);
        if (std::abs(w) > std::abs(best)) best = w;
    } while (std::next_permutation(t.begin(), t.end()));
    return best;
}

struct BiasClassification {
    std::string verdict;  // "symmetric-unbiased-candidate" | "q-extreme-predicted" | "biased"
    bool cube_root = false;
    double witness = 0.0;        // witness of the given ordering
    double witness_max = 0.0;    // best over orderings (r = 3)
    std::vector<i64> c_values;
};

inline BiasClassification classify_bias(u64 q, const std::vector<u64>& a) {
    detail::require_race_tuple(q, a);
    BiasClassification out;
    for (u64 x : a) out.c_values.push_back(chebyshev_c(x, q));
    if (a.size() == 3) {
        out.cube_root = cube_root_condition(q, a[0], a[1], a[2]);
        out.witness = extreme_bias_witness(q, a[0], a[1], a[2]);
        out.witness_max = max_extreme_bias_witness(q, a[0], a[1], a[2]);
        if (out.cube_root) {
            out.verdict = "symmetric-unbiased-candidate";
            return out;
        }
        if (out.witness_max != 0.0) {
            out.verdict = "q-extreme-predicted";
            return out;
        }
    }
    out.verdict = "biased";
    return out;
}

// ---------------------------------------------------------------------------
// Constructions of provably biased tuples.

enum class ConstructVariant { mixed, squares, nonsquares };

struct ConstructReport {
    u64 q = 0;
    int r = 0;
    ConstructVariant variant = ConstructVariant::mixed;
    std::vector<u64> tuple;
    std::vector<u64> exponents;  // exponent of the base used per slot (0 where fixed)
    AuxPrimes aux;
    u64 base = 0;                // p1*p2 (mixed) or p1 (squares/nonsquares)
    u64 multiplier = 1;          // non-square factor for the nonsquares variant
    int bumps = 0;               // collision-resolving exponent shifts applied
    bool minus_one_square = false;  // q = 1 mod 4 style caveat for the mixed variant
};

inline ConstructReport construct_biased_tuple(u64 q, ConstructVariant variant, int r = 3) {
    if (q < 3) throw std::domain_error("construct: q < 3");
    if (r < 3 || r > 6) throw std::domain_error("construct: r out of [3,6]");
    ConstructReport rep;
    rep.q = q;
    rep.r = r;
    rep.variant = variant;
    rep.aux = aux_primes(q);

    u64 base;
    if (variant == ConstructVariant::mixed)
        base = mulmod(rep.aux.p1 % q, rep.aux.p2 % q, q);
    else
        base = rep.aux.p1 % q;
    rep.base = variant == ConstructVariant::mixed ? rep.aux.p1 * rep.aux.p2 : rep.aux.p1;

    u64 mult = 1;
    if (variant == ConstructVariant::nonsquares) {
        mult = rep.aux.p0;
        if (std::gcd(mult, q) != 1 || is_square_mod(mult, q)) {
            mult = 2;
            while (std::gcd(mult, q) != 1 || !is_prime(mult) || is_square_mod(mult, q)) ++mult;
        }
        rep.multiplier = mult;
    }

    // slot exponents before collision bumps
    auto exponents_for = [&](int bump) {
        std::vector<u64> e(r, 0);
        if (variant == ConstructVariant::mixed) {
            // (1, s^2, s^4, ..., -1)
            for (int j = 1; j + 1 < r; ++j) e[j] = 2 * (u64)(j + bump);
        } else {
            // (1, p1^4, p1^6, ..., p1^2): squares throughout
            e[r - 1] = 2 * (u64)(1 + bump);
            for (int j = 1; j + 1 < r; ++j) e[j] = 2 * (u64)(j + 1 + bump);
        }
        return e;
    };

    for (int bump = 0;; ++bump) {
        if (bump > 64) throw std::domain_error("construct: no collision-free tuple found");
        std::vector<u64> e = exponents_for(bump == 0 ? 0 : bump * r);
        std::vector<u64> t(r);
        for (int j = 0; j < r; ++j) t[j] = mulmod(mult % q, powmod(base, e[j], q), q);
        if (variant == ConstructVariant::mixed) t[r - 1] = q - 1;
        bool distinct = true;
        for (int i = 0; i < r && distinct; ++i)
            for (int j = i + 1; j < r; ++j)
                if (t[i] == t[j]) { distinct = false; break; }
        if (distinct) {
            rep.tuple = t;
            rep.exponents = e;
            rep.bumps = bump;
            break;
        }
    }
    if (variant == ConstructVariant::mixed) rep.minus_one_square = is_square_mod(q - 1, q);
    return rep;
}

// ---------------------------------------------------------------------------
// Counterexamples to "larger kappa-weighted C implies larger density".

struct BiasFactorCase {
    std::array<i64, 3> kappa{};
    std::vector<u64> a, b;
    double weighted_c_a = 0.0, weighted_c_b = 0.0;
    double delta_a = 0.0, delta_b = 0.0;
    bool counterexample = false;  // weighted C strictly larger yet density smaller
};

inline BiasFactorCase bias_factor_evaluate(const SpectralContext& ctx,
                                           const std::array<i64, 3>& kappa,
                                           const std::vector<u64>& a,
                                           const std::vector<u64>& b) {
    BiasFactorCase cs;
    cs.kappa = kappa;
    cs.a = a;
    cs.b = b;
    for (int j = 0; j < 3; ++j) {
        cs.weighted_c_a += (double)kappa[j] * (double)chebyshev_c(a[j], ctx.q());
        cs.weighted_c_b += (double)kappa[j] * (double)chebyshev_c(b[j], ctx.q());
    }
    cs.delta_a = density_series(ctx, a).delta;
    cs.delta_b = density_series(ctx, b).delta;
    cs.counterexample = cs.weighted_c_a > cs.weighted_c_b && cs.delta_a < cs.delta_b;
    return cs;
}

// built-in demonstration pairs; the tuples live in the multiplicative family
// {5^i 6^j} so every entry is reproducible from q alone
inline std::vector<BiasFactorCase> bias_factor_demo_cases(const SpectralContext& ctx) {
    u64 q = ctx.q();
    if (q != 10007)
        throw std::domain_error("bias factor demo: built-in cases require q = 10007");
    u64 s64_4 = mulmod(5, powmod(6, 4, q), q);    // 5*6^4
    u64 s64_6 = mulmod(5, powmod(6, 6, q), q);    // 5*6^6
    u64 s64_8 = mulmod(5, powmod(6, 8, q), q);    // 5*6^8
    u64 s64_12 = mulmod(5, powmod(6, 12, q), q);  // 5*6^12
    u64 six2 = 36;
    std::vector<BiasFactorCase> out;
    out.push_back(bias_factor_evaluate(ctx, {0, 0, 1}, {1, s64_4, six2}, {1, s64_4, 5}));
    out.push_back(bias_factor_evaluate(ctx, {0, 0, -1}, {1, s64_4, s64_6}, {1, s64_4, 4}));
    out.push_back(bias_factor_evaluate(ctx, {0, 1, 0}, {1, six2, s64_12}, {1, s64_8, 5}));
    return out;
}

// ---------------------------------------------------------------------------
// Marginal consistency: the density of a sub-triple equals the sum of the
// full-tuple densities over all orderings that keep the sub-triple in order.

inline double marginal_density_sum(const SpectralContext& ctx, const std::vector<u64>& a,
                                   const std::array<int, 3>& idx) {
    detail::require_race_tuple(ctx.q(), a);
    int r = (int)a.size();
    for (int i : idx)
        if (i < 0 || i >= r) throw std::domain_error("marginal: index out of range");
    std::vector<int> perm(r);
    for (int i = 0; i < r; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end());
    double total = 0.0;
    do {
        std::array<int, 3> pos{};
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < 3; ++j)
                if (perm[i] == idx[j]) pos[j] = i;
        if (pos[0] < pos[1] && pos[1] < pos[2]) {
            std::vector<u64> t(r);
            for (int i = 0; i < r; ++i) t[i] = a[perm[i]];
            total += density_series(ctx, t).delta;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

// ---------------------------------------------------------------------------

inline const char* construct_variant_name(ConstructVariant v) {
    switch (v) {
        case ConstructVariant::mixed: return "mixed";
        case ConstructVariant::squares: return "squares";
        case ConstructVariant::nonsquares: return "nonsquares";
    }
    return "?";
}

inline void write_density_json(std::ostream& out, const DensityReport& rep) {
    out.precision(17);
    out << "{\n  \"q\": " << rep.q << ",\n  \"tuple\": [";
    for (size_t i = 0; i < rep.tuple.size(); ++i) out << (i ? ", " : "") << rep.tuple[i];
    out << "],\n  \"r\": " << rep.r << ",\n  \"method\": \"" << rep.method << "\""
        << ",\n  \"delta\": " << rep.delta << ",\n  \"terms\": {"
        << "\"baseline\": " << rep.baseline << ", \"alpha\": " << rep.alpha_term
        << ", \"beta\": " << rep.beta_term << ", \"quadratic\": " << rep.c2_term << "}"
        << ",\n  \"error_budget\": " << rep.error_budget
        << ",\n  \"coefficient_error\": " << rep.coefficient_error
        << ",\n  \"n_value\": " << rep.n_value << ",\n  \"y\": " << rep.y;
    if (rep.method == "surrogate-mc")
        out << ",\n  \"sigma\": " << rep.sigma << ",\n  \"seed\": " << rep.seed
            << ",\n  \"samples\": " << rep.samples;
    out << ",\n  \"degenerate\": " << (rep.degenerate ? "true" : "false") << "\n}\n";
}

}  // namespace primerace
