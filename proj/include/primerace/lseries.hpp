#pragma once
// Smoothed logarithmic derivatives L'/L(1, chi*) via
//     -sum_{n <= 2 y log y} chi*(n) Lambda(n)/n e^{-n/y},
// organized as one prime-power pass into residue-class buckets per modulus,
// then an O(phi(q)) character dot product.  Values are cached on disk because
// the prime pass dominates everything else at large y.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "primerace/characters.hpp"
#include "primerace/config.hpp"
#include "primerace/sieve.hpp"

namespace primerace {

struct SmoothedLogDeriv {
    u64 q = 0;
    u64 chi_index = 0;
    double y = 0.0;
    std::complex<double> value;  // approximates L'/L(1, chi*)
    double tail_bound = 0.0;     // smoothing remainder + truncation budget
};

class SmoothedSums {
  public:
    SmoothedSums(const CharacterGroup& group, double y, const Config& cfg,
                 std::string cache_dir = default_cache_dir())
        : g_(group), y_(y), cfg_(cfg) {
        if (y_ < (double)g_.q()) throw std::domain_error("SmoothedSums: y < q");
        trunc_ = Config::truncation(y_);
        tail_ = cfg.c_smooth * std::log((double)g_.q()) / std::sqrt(y_) +
                1.0 / ((double)g_.q() * (double)g_.q());
        if (!cache_dir.empty()) {
            std::filesystem::create_directories(cache_dir);
            cache_path_ = cache_dir + "/smoothed_q" + std::to_string(g_.q()) + "_y" +
                          std::to_string((u64)y_) + ".bin";
            if (load_cache()) return;
        }
        build_buckets();
        compute_all();
        if (!cache_path_.empty()) write_cache();
    }

    static std::string default_cache_dir() {
        const char* env = std::getenv("PRIMERACE_CACHE_DIR");
        return env ? std::string(env) : std::string(".primerace-cache");
    }

    const CharacterGroup& group() const { return g_; }
    double y() const { return y_; }
    u64 truncation() const { return trunc_; }

    SmoothedLogDeriv log_deriv(u64 chi_index) const {
        if (chi_index == 0) throw std::domain_error("log_deriv: principal character");
        if (chi_index >= g_.phi()) throw std::domain_error("log_deriv: index out of range");
        return {g_.q(), chi_index, y_, values_[chi_index], tail_};
    }

    // sum over n coprime to q of Lambda(n)/n e^{-n/y}; about log y
    double principal_sum() const { return principal_; }

    // sum over all n of Lambda(n)/n e^{-n/y} (the modulus-one aggregate)
    double full_sum() const { return full_; }

  private:
    void build_buckets() {
        buckets_.assign(g_.phi(), 0.0);
        full_ = 0.0;
        u64 q = g_.q();
        for_each_prime(trunc_, [&](u64 p) {
            double lp = std::log((double)p);
            for (u64 pk = p;; ) {
                double w = lp / (double)pk * std::exp(-(double)pk / y_);
                full_ += w;
                if (q % p != 0) buckets_[(std::size_t)g_.unit_index(pk % q)] += w;
                if (pk > trunc_ / p) break;
                pk *= p;
            }
        });
        principal_ = 0.0;
        for (double b : buckets_) principal_ += b;
    }

    void compute_all() {
        u64 phi = g_.phi();
        u64 N = g_.exponent();
        std::size_t nf = g_.num_factors();
        values_.assign(phi, {0.0, 0.0});

        // dlog scaled into exponent-of-unity units: u_t(c) = d_t(c) * (N / ord_t) mod N
        std::vector<u64> scaled(phi * nf);
        std::vector<std::size_t> live;  // buckets with mass
        for (std::size_t c = 0; c < phi; ++c) {
            if (buckets_[c] == 0.0) continue;
            live.push_back(c);
            const std::uint32_t* d = g_.dlog(g_.unit_by_index(c));
            for (std::size_t t = 0; t < nf; ++t)
                scaled[c * nf + t] = (u64)d[t] * (N / g_.factor_order(t)) % N;
        }

        auto qfac = factorize(g_.q());
        std::vector<u64> jexp(nf);
        for (u64 j = 1; j < phi; ++j) {
            u64 rem = j;
            for (std::size_t t = 0; t < nf; ++t) {
                jexp[t] = rem % g_.factor_order(t);
                rem /= g_.factor_order(t);
            }
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t c : live) {
                u64 ang = 0;
                const u64* u = scaled.data() + c * nf;
                for (std::size_t t = 0; t < nf; ++t) ang += jexp[t] * u[t] % N;
                acc += g_.root(ang) * buckets_[c];
            }
            // prime powers dividing q enter chi* but not chi
            Character chi = g_.character(j);
            u64 cond = chi.conductor();
            for (auto [p, e] : qfac) {
                if (cond % p == 0) continue;
                double lp = std::log((double)p);
                for (u64 pk = p;;) {
                    acc += chi.primitive_at(pk) * (lp / (double)pk * std::exp(-(double)pk / y_));
                    if (pk > trunc_ / p) break;
                    pk *= p;
                }
            }
            values_[j] = -acc;
        }
    }

    // cache layout, little-endian doubles/ints:
    //   magic 'PRSM', u32 version, u64 q, f64 y, u64 truncation,
    //   f64 principal, f64 full, u64 count,
    //   then count records of (u64 chi_index, f64 re, f64 im, f64 tail_bound)
    static constexpr std::uint32_t kMagic = 0x4d535250;  // "PRSM"
    static constexpr std::uint32_t kVersion = 1;

    bool load_cache() {
        std::FILE* f = std::fopen(cache_path_.c_str(), "rb");
        if (!f) return false;
        auto rd = [&](void* p, std::size_t n) { return std::fread(p, 1, n, f) == n; };
        std::uint32_t magic = 0, ver = 0;
        u64 q = 0, tr = 0, count = 0;
        double y = 0;
        bool ok = rd(&magic, 4) && rd(&ver, 4) && rd(&q, 8) && rd(&y, 8) && rd(&tr, 8) &&
                  rd(&principal_, 8) && rd(&full_, 8) && rd(&count, 8);
        ok = ok && magic == kMagic && ver == kVersion && q == g_.q() && y == y_ &&
             tr == trunc_ && count == g_.phi();
        if (ok) {
            values_.assign(g_.phi(), {0.0, 0.0});
            for (u64 i = 0; i < count && ok; ++i) {
                u64 idx;
                double re, im, tb;
                ok = rd(&idx, 8) && rd(&re, 8) && rd(&im, 8) && rd(&tb, 8) && idx < g_.phi();
                if (ok) values_[idx] = {re, im};
                (void)tb;
            }
        }
        std::fclose(f);
        return ok;
    }

    void write_cache() const {
        std::string tmp = cache_path_ + ".tmp";
        std::FILE* f = std::fopen(tmp.c_str(), "wb");
        if (!f) return;  // cache is best-effort
        auto wr = [&](const void* p, std::size_t n) { std::fwrite(p, 1, n, f); };
        std::uint32_t magic = kMagic, ver = kVersion;
        u64 q = g_.q(), count = g_.phi();
        wr(&magic, 4); wr(&ver, 4); wr(&q, 8); wr(&y_, 8); wr(&trunc_, 8);
        wr(&principal_, 8); wr(&full_, 8); wr(&count, 8);
        for (u64 i = 0; i < count; ++i) {
            double re = values_[i].real(), im = values_[i].imag(), tb = tail_;
            wr(&i, 8); wr(&re, 8); wr(&im, 8); wr(&tb, 8);
        }
        std::fclose(f);
        std::error_code ec;
        std::filesystem::rename(tmp, cache_path_, ec);  // atomic publish
    }

    const CharacterGroup& g_;
    double y_;
    Config cfg_;
    u64 trunc_ = 0;
    double tail_ = 0.0;
    std::string cache_path_;
    std::vector<double> buckets_;
    std::vector<std::complex<double>> values_;
    double principal_ = 0.0, full_ = 0.0;
};

// One-shot principal sum; pre: y >= q.
inline double principal_smoothed_sum(u64 q, double y) {
    if (q < 3) throw std::domain_error("principal_smoothed_sum: q < 3");
    if (y < (double)q) throw std::domain_error("principal_smoothed_sum: y < q");
    u64 trunc = Config::truncation(y);
    double s = 0.0;
    for_each_prime(trunc, [&](u64 p) {
        if (q % p == 0) return;
        double lp = std::log((double)p);
        for (u64 pk = p;;) {
            s += lp / (double)pk * std::exp(-(double)pk / y);
            if (pk > trunc / p) break;
            pk *= p;
        }
    });
    return s;
}

}  // namespace primerace
