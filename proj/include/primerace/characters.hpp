#pragma once
// Dirichlet characters mod q via the cyclic decomposition of (Z/q)^*.
// Exponent arithmetic stays in integers mod the group exponent; floating
// point enters only through a shared root-of-unity table, so orthogonality
// holds at rounding level.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "primerace/ntheory.hpp"

namespace primerace {

namespace detail {

inline u64 primitive_root_mod_prime(u64 p) {
    if (p == 2) return 1;
    auto fac = factorize(p - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (auto [r, e] : fac)
            if (powmod(g, (p - 1) / r, p) == 1) { ok = false; break; }
        if (ok) return g;
    }
}

inline u64 primitive_root_mod_odd_prime_power(u64 p, int e) {
    u64 g = primitive_root_mod_prime(p);
    if (e == 1) return g;
    u64 p2 = p * p;
    if (powmod(g, p - 1, p2) == 1) g += p;  // then g generates mod p^e for all e
    return g;
}

}  // namespace detail

class CharacterGroup;

class Character {
  public:
    Character() = default;
    Character(const CharacterGroup* g, u64 index);

    std::complex<double> operator()(u64 n) const;
    std::complex<double> operator()(i64 n) const;
    // value of the inducing primitive character; needs gcd(n, conductor) == 1
    std::complex<double> primitive_at(u64 n) const;

    u64 index() const { return index_; }
    bool is_principal() const { return index_ == 0; }
    u64 conductor() const;
    int parity() const;  // chi(-1)
    Character conjugate() const;
    u64 order() const;

  private:
    friend class CharacterGroup;
    const CharacterGroup* g_ = nullptr;
    u64 index_ = 0;
    std::vector<u64> exps_;  // exponent on each cyclic factor
};

class CharacterGroup {
  public:
    explicit CharacterGroup(u64 q) : q_(q) {
        if (q < 3) throw std::domain_error("CharacterGroup: q < 3");
        build_factors();
        build_dlog();
        build_roots();
    }

    u64 q() const { return q_; }
    u64 phi() const { return phi_; }
    u64 exponent() const { return exponent_; }
    std::size_t num_factors() const { return orders_.size(); }
    u64 factor_order(std::size_t t) const { return orders_[t]; }

    Character character(u64 index) const {
        if (index >= phi_) throw std::domain_error("character index out of range");
        return Character(this, index);
    }

    bool is_unit(u64 a) const { return unit_index_[a % q_] >= 0; }
    // dense unit numbering in [0, phi); order is the fixed enumeration order
    i64 unit_index(u64 a) const { return unit_index_[a % q_]; }
    u64 unit_by_index(std::size_t i) const { return units_[i]; }
    const std::vector<u64>& units() const { return units_; }

    std::complex<double> root(u64 k) const { return roots_[k % exponent_]; }

    // exponent vector of unit a
    const std::uint32_t* dlog(u64 a) const {
        i64 i = unit_index_[a % q_];
        if (i < 0) throw std::domain_error("dlog: not a unit");
        return dlog_.data() + (std::size_t)i * orders_.size();
    }

  private:
    friend class Character;

    struct Factor {
        u64 p;           // underlying prime
        int e;           // p^e divides q exactly
        u64 modulus;     // p^e
        u64 generator;   // CRT-lifted to a unit mod q
        u64 order;
        bool minus_one;  // the <-1> factor of a 2-part with e >= 3
    };

    void build_factors() {
        auto fac = factorize(q_);
        phi_ = 1;
        for (auto [p, e] : fac) {
            u64 pe = 1;
            for (int i = 0; i < e; ++i) pe *= p;
            u64 rest = q_ / pe;
            auto lift = [&](u64 g) {
                // g mod pe, 1 mod rest
                if (rest == 1) return g % pe;
                u64 m1 = mulmod(mulmod(g % pe, rest % q_, q_), invmod(rest % pe, pe), q_);
                u64 m2 = mulmod(pe % q_, invmod(pe % rest, rest), q_);
                return (m1 + m2) % q_;
            };
            if (p == 2) {
                phi_ *= pe / 2;
                if (e == 1) continue;  // trivial unit group
                if (e == 2) {
                    factors_.push_back({2, e, pe, lift(3), 2, false});
                } else {
                    factors_.push_back({2, e, pe, lift(pe - 1), 2, true});
                    factors_.push_back({2, e, pe, lift(5), pe / 4, false});
                }
            } else {
                u64 ord = pe / p * (p - 1);
                phi_ *= ord;
                u64 g = detail::primitive_root_mod_odd_prime_power(p, e);
                factors_.push_back({p, e, pe, lift(g % pe), ord, false});
            }
        }
        exponent_ = 1;
        orders_.clear();
        for (auto& f : factors_) {
            orders_.push_back(f.order);
            exponent_ = std::lcm(exponent_, f.order);
        }
        if (factors_.empty()) {  // q in {3,4} never lands here; guard q = 2^1 forms
            exponent_ = 1;
            orders_.clear();
        }
    }

    void build_dlog() {
        std::size_t k = orders_.size();
        unit_index_.assign(q_, -1);
        units_.assign(phi_, 0);
        dlog_.assign(phi_ * k, 0);

        // odometer over exponent vectors, maintaining the running product
        std::vector<u64> exps(k, 0);
        u64 cur = 1 % q_;
        for (std::size_t idx = 0;; ++idx) {
            units_[idx] = cur;
            unit_index_[cur] = (i64)idx;
            for (std::size_t t = 0; t < k; ++t) dlog_[idx * k + t] = (std::uint32_t)exps[t];
            // increment
            std::size_t t = 0;
            while (t < k) {
                ++exps[t];
                cur = mulmod(cur, factors_[t].generator, q_);
                if (exps[t] < orders_[t]) break;
                // generator^order == 1, so cur is already reset on this digit
                exps[t] = 0;
                ++t;
            }
            if (t == k) break;
        }
        // unit order is enumeration order, not numeric; re-sort into numeric order
        // for a stable external numbering while keeping dlog addressed by it.
        std::vector<std::size_t> perm(phi_);
        for (std::size_t i = 0; i < phi_; ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return units_[a] < units_[b]; });
        std::vector<u64> su(phi_);
        std::vector<std::uint32_t> sd(phi_ * k);
        for (std::size_t i = 0; i < phi_; ++i) {
            su[i] = units_[perm[i]];
            for (std::size_t t = 0; t < k; ++t) sd[i * k + t] = dlog_[perm[i] * k + t];
            unit_index_[su[i]] = (i64)i;
        }
        units_ = std::move(su);
        dlog_ = std::move(sd);
    }

    void build_roots() {
        roots_.resize(exponent_);
        const double two_pi = 6.283185307179586476925286766559;
        u64 half = exponent_ / 2;
        for (u64 k = 0; k <= half; ++k) {
            double ang = two_pi * (double)k / (double)exponent_;
            roots_[k] = {std::cos(ang), std::sin(ang)};
        }
        // enforce exact conjugate symmetry
        for (u64 k = half + 1; k < exponent_; ++k) roots_[k] = std::conj(roots_[exponent_ - k]);
        roots_[0] = {1.0, 0.0};
        if (exponent_ % 2 == 0 && exponent_ > 1) roots_[half] = {-1.0, 0.0};
    }

    u64 q_, phi_ = 1, exponent_ = 1;
    std::vector<Factor> factors_;
    std::vector<u64> orders_;
    std::vector<i64> unit_index_;
    std::vector<u64> units_;
    std::vector<std::uint32_t> dlog_;
    std::vector<std::complex<double>> roots_;
};

inline Character::Character(const CharacterGroup* g, u64 index) : g_(g), index_(index) {
    std::size_t k = g->orders_.size();
    exps_.resize(k);
    u64 rem = index;
    for (std::size_t t = 0; t < k; ++t) {
        exps_[t] = rem % g->orders_[t];
        rem /= g->orders_[t];
    }
}

inline std::complex<double> Character::operator()(u64 n) const {
    u64 a = n % g_->q_;
    i64 i = g_->unit_index_[a];
    if (i < 0) return {0.0, 0.0};
    const std::uint32_t* d = g_->dlog_.data() + (std::size_t)i * g_->orders_.size();
    u64 N = g_->exponent_;
    u64 k = 0;
    for (std::size_t t = 0; t < exps_.size(); ++t)
        k = (k + exps_[t] % g_->orders_[t] * (N / g_->orders_[t]) % N * (d[t] % g_->orders_[t])) % N;
    return g_->roots_[k];
}

inline std::complex<double> Character::operator()(i64 n) const {
    i64 m = n % (i64)g_->q_;
    if (m < 0) m += (i64)g_->q_;
    return (*this)((u64)m);
}

inline u64 Character::conductor() const {
    u64 cond = 1;
    std::size_t t = 0;
    while (t < g_->factors_.size()) {
        const auto& f = g_->factors_[t];
        if (f.p == 2 && f.minus_one) {
            // joint 2-part: (eps, j) on <-1> x <5>
            u64 eps = exps_[t];
            u64 j = exps_[t + 1];
            u64 m = g_->factors_[t + 1].order;
            if (j != 0) {
                u64 d = m / std::gcd(j, m);  // order of the <5>-component, a power of 2
                u64 f2 = 4;
                while (d > 1) { f2 *= 2; d /= 2; }
                cond *= f2;
            } else if (eps != 0) {
                cond *= 4;
            }
            t += 2;
            continue;
        }
        u64 j = exps_[t];
        if (j != 0) {
            if (f.p == 2) {
                cond *= 4;  // the e = 2 factor
            } else {
                u64 d = f.order / std::gcd(j, f.order);
                u64 pf = f.p;
                while (d % f.p == 0) { pf *= f.p; d /= f.p; }
                cond *= pf;
            }
        }
        ++t;
    }
    return cond;
}

inline int Character::parity() const {
    auto v = (*this)(g_->q_ - 1);
    return v.real() > 0 ? 1 : -1;
}

inline Character Character::conjugate() const {
    u64 idx = 0, stride = 1;
    for (std::size_t t = 0; t < exps_.size(); ++t) {
        u64 ord = g_->orders_[t];
        u64 e = exps_[t] == 0 ? 0 : ord - exps_[t];
        idx += e * stride;
        stride *= ord;
    }
    return Character(g_, idx);
}

inline u64 Character::order() const {
    u64 o = 1;
    for (std::size_t t = 0; t < exps_.size(); ++t) {
        u64 ord = g_->orders_[t];
        o = std::lcm(o, ord / std::gcd(exps_[t], ord));
    }
    return o;
}

inline std::complex<double> Character::primitive_at(u64 n) const {
    u64 cond = conductor();
    if (cond == 1) return {1.0, 0.0};
    if (std::gcd(n % cond, cond) != 1)
        throw std::domain_error("primitive_at: gcd(n, conductor) != 1");
    if (std::gcd(n % g_->q_, g_->q_) == 1) return (*this)(n);
    // CRT-lift: match n modulo each component conductor, 1 elsewhere
    u64 m = 1 % g_->q_;
    std::size_t t = 0;
    while (t < g_->factors_.size()) {
        const auto& f = g_->factors_[t];
        std::size_t span = (f.p == 2 && f.minus_one) ? 2 : 1;
        // component conductor p^fc
        u64 pf = 1;
        {
            u64 c = cond;
            while (c % f.p == 0) { pf *= f.p; c /= f.p; }
        }
        u64 pe = f.modulus;
        u64 rest = g_->q_ / pe;
        u64 target = pf > 1 ? (n % pf) : 1;  // unit mod p since gcd(n, cond)=1
        u64 lifted;
        if (rest == 1) {
            lifted = target % pe;
        } else {
            u64 m1 = mulmod(mulmod(target % pe, rest % g_->q_, g_->q_), invmod(rest % pe, pe), g_->q_);
            u64 m2 = mulmod(pe % g_->q_, invmod(pe % rest, rest), g_->q_);
            lifted = (m1 + m2) % g_->q_;
        }
        m = mulmod(m, lifted, g_->q_);
        t += span;
    }
    return (*this)(m);
}

// ---------------------------------------------------------------------------
// sum_{chi mod q} chi(a) log(conductor of chi), in closed form

inline double log_conductor_sum(u64 q, u64 a) {
    if (q < 3) throw std::domain_error("log_conductor_sum: q < 3");
    a %= q;
    if (std::gcd(a, q) != 1) throw std::domain_error("log_conductor_sum: gcd(a,q) != 1");
    double phi = (double)euler_phi(q);
    if (a == 1) {
        double s = std::log((double)q);
        for (auto [p, e] : factorize(q)) s -= std::log((double)p) / (double)(p - 1);
        return phi * s;
    }
    u64 g = std::gcd(q, a - 1);
    u64 m = q / g;
    return -phi * von_mangoldt(m) / (double)euler_phi(m);
}

}  // namespace primerace
