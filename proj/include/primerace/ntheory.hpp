#pragma once
// Modular arithmetic, square counting, von Mangoldt weights and the auxiliary
// primes used by the biased-tuple constructions.

#include <cstdint>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace primerace {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline u64 invmod(u64 a, u64 m) {
    // extended Euclid; requires gcd(a, m) == 1
    i64 t = 0, nt = 1;
    i64 r = (i64)m, nr = (i64)(a % m);
    while (nr != 0) {
        i64 qq = r / nr;
        t -= qq * nt; std::swap(t, nt);
        r -= qq * nr; std::swap(r, nr);
    }
    if (r != 1) throw std::domain_error("invmod: not invertible");
    if (t < 0) t += (i64)m;
    return (u64)t;
}

// Deterministic Miller-Rabin, valid for all 64-bit n.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

struct PrimePower { u64 p; int e; };

inline std::vector<PrimePower> factorize(u64 n) {
    std::vector<PrimePower> f;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.push_back({p, e});
        }
    }
    if (n > 1) f.push_back({n, 1});
    return f;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

inline u64 largest_prime_factor(u64 n) {
    if (n < 2) throw std::domain_error("largest_prime_factor: n < 2");
    return factorize(n).back().p;
}

// ---------------------------------------------------------------------------
// residues

struct Residue {
    u64 q = 0;
    u64 value = 0;  // reduced into [0, q)

    Residue() = default;
    Residue(u64 q_, i64 v) : q(q_) {
        if (q_ < 1) throw std::domain_error("Residue: modulus < 1");
        i64 m = (i64)q_;
        i64 r = v % m;
        if (r < 0) r += m;
        value = (u64)r;
    }
    bool is_unit() const { return std::gcd(value, q) == 1; }
    // representative in (-q/2, q/2]
    i64 signed_rep() const {
        return (value * 2 > q) ? (i64)value - (i64)q : (i64)value;
    }
};

// ---------------------------------------------------------------------------
// square roots of units: C_q(a) = #{b : b^2 = a (q)} - 1

namespace detail {

inline int sqrt_count_odd_prime_power(u64 a, u64 p) {
    // unit a mod p^e: lifts Hensel-style, so the count is decided mod p
    return powmod(a % p, (p - 1) / 2, p) == 1 ? 2 : 0;
}

inline int sqrt_count_two_power(u64 a, int e) {
    if (e == 1) return 1;
    if (e == 2) return a % 4 == 1 ? 2 : 0;
    return a % 8 == 1 ? 4 : 0;
}

}  // namespace detail

inline u64 count_sqrt(u64 a, u64 q) {
    if (q < 3) throw std::domain_error("count_sqrt: q < 3");
    a %= q;
    if (std::gcd(a, q) != 1) throw std::domain_error("count_sqrt: gcd(a,q) != 1");
    if (q <= 1000000) {
        u64 c = 0;
        for (u64 b = 0; b < q; ++b)
            if (mulmod(b, b, q) == a) ++c;
        return c;
    }
    u64 c = 1;
    for (auto [p, e] : factorize(q)) {
        int cp = (p == 2) ? detail::sqrt_count_two_power(a, e)
                          : detail::sqrt_count_odd_prime_power(a, p);
        if (cp == 0) return 0;
        c *= (u64)cp;
    }
    return c;
}

inline double chebyshev_c(u64 a, u64 q) {
    return (double)count_sqrt(a, q) - 1.0;
}

inline bool is_square_mod(u64 a, u64 q) {
    if (q < 3) throw std::domain_error("is_square_mod: q < 3");
    a %= q;
    if (std::gcd(a, q) != 1) throw std::domain_error("is_square_mod: gcd(a,q) != 1");
    for (auto [p, e] : factorize(q)) {
        if (p == 2) {
            if (e == 2 && a % 4 != 1) return false;
            if (e >= 3 && a % 8 != 1) return false;
        } else if (powmod(a % p, (p - 1) / 2, p) != 1) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// von Mangoldt
//
// Random-access Lambda(n) uses a smallest-prime-factor table below a bound and
// trial division above it.  Dense access along the smoothed sums never comes
// through here (those stream primes directly), so the table stays small.

class LambdaAccess {
  public:
    static constexpr u64 kDefaultBound = 1000000;

    static LambdaAccess& instance() {
        static LambdaAccess t;
        return t;
    }

    void ensure(u64 bound) {
        std::lock_guard<std::mutex> lk(mu_);
        if (bound <= spf_.size()) return;
        spf_.assign(bound + 1, 0);
        for (u64 i = 2; i <= bound; ++i) {
            if (spf_[i] == 0) {
                for (u64 j = i; j <= bound; j += i)
                    if (spf_[j] == 0) spf_[j] = (std::uint32_t)i;
            }
        }
    }

    double lambda(u64 n) {
        if (n == 0) throw std::domain_error("von_mangoldt: n = 0");
        if (n == 1) return 0.0;
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (spf_.empty()) {
                // lazy first build
            } else if (n < spf_.size()) {
                u64 p = spf_[n];
                u64 m = n;
                while (m % p == 0) m /= p;
                return m == 1 ? std::log((double)p) : 0.0;
            }
        }
        if (n < kDefaultBound) {
            ensure(kDefaultBound);
            return lambda(n);
        }
        // trial division: n = p^k?
        for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
            if (n % p == 0) {
                u64 m = n;
                while (m % p == 0) m /= p;
                return m == 1 ? std::log((double)p) : 0.0;
            }
        }
        return std::log((double)n);  // n prime
    }

  private:
    std::mutex mu_;
    std::vector<std::uint32_t> spf_;
};

inline double von_mangoldt(u64 n) { return LambdaAccess::instance().lambda(n); }

// Lambda_0(n) = Lambda(n)/n on the integers, 0 elsewhere.  Peak is at n = 3.
inline double lambda0(u64 n) {
    double l = von_mangoldt(n);
    return l == 0.0 ? 0.0 : l / (double)n;
}

// Lambda_0 of the rational num/den (0 unless the ratio is a positive integer).
inline double lambda0_ratio(u64 num, u64 den) {
    if (den == 0) throw std::domain_error("lambda0_ratio: zero denominator");
    if (num % den != 0) return 0.0;
    return lambda0(num / den);
}

inline constexpr double kLambda0Max = 0.36620409622270328;  // log(3)/3

// ---------------------------------------------------------------------------
// auxiliary primes for the constructions

// least prime quadratic non-residue mod the odd prime p (3 when p = 2)
inline u64 least_nonresidue(u64 p) {
    if (p == 2) return 3;
    if (!is_prime(p)) throw std::domain_error("least_nonresidue: p not prime");
    for (u64 r = 2;; r = (r == 2 ? 3 : r + 2)) {
        if (!is_prime(r)) continue;
        if (powmod(r % p, (p - 1) / 2, p) == p - 1) return r;
    }
}

struct AuxPrimes {
    u64 p0;  // least non-residue mod the largest prime factor of q
    u64 p1;  // two smallest primes != p0 and coprime to q
    u64 p2;
};

inline AuxPrimes aux_primes(u64 q) {
    if (q < 3) throw std::domain_error("aux_primes: q < 3");
    u64 p0 = least_nonresidue(largest_prime_factor(q));
    u64 found[2];
    int n = 0;
    for (u64 r = 2; n < 2; r = (r == 2 ? 3 : r + 2)) {
        if (!is_prime(r) || r == p0 || std::gcd(r, q) != 1) continue;
        found[n++] = r;
    }
    return {p0, found[0], found[1]};
}

// ---------------------------------------------------------------------------
// cube-root symmetry: exists rho != 1 with rho^3 = 1, a2 = a1 rho, a3 = a1 rho^2

inline bool cube_root_condition(u64 q, u64 a1, u64 a2, u64 a3) {
    if (q < 3) throw std::domain_error("cube_root_condition: q < 3");
    a1 %= q; a2 %= q; a3 %= q;
    for (u64 a : {a1, a2, a3})
        if (std::gcd(a, q) != 1) throw std::domain_error("cube_root_condition: non-unit");
    u64 rho = mulmod(a2, invmod(a1, q), q);
    if (rho == 1) return false;
    if (powmod(rho, 3, q) != 1) return false;
    return a3 == mulmod(a1, mulmod(rho, rho, q), q);
}

}  // namespace primerace
