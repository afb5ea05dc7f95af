#pragma once
// Zero-sum functionals N_q, B_q(a,b), V_q(a,b) with the zeros eliminated:
// each character contributes
//     K_chi = log(cond chi) + 2 Re L'/L(1, chi*) - chi(-1) log 2 + gamma0,
// and
//     N_q = sum_{chi != chi0} K_chi,      B_q(a,b) = sum Re chi(a/b) K_chi.
//
// Two independent evaluations of B_q:
//   * character route: the sum above (needs the smoothed sums; validation)
//   * residue route:   the collapsed closed form
//         4 log q - phi(q) [ l(a,b) log 2 + Lambda(q/(q,a-b))/phi(q/(q,a-b))
//                            + Lambda(s1)/s1 + Lambda(s2)/s2 + (p^nu | q sums) ]
//     where s1, s2 are the least positive residues of a/b and b/a (production).

#include <complex>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "primerace/characters.hpp"
#include "primerace/config.hpp"
#include "primerace/lseries.hpp"

namespace primerace {

namespace detail {

inline void require_race_pair(u64 q, u64 a, u64 b) {
    if (q < 3) throw std::domain_error("B_q: q < 3");
    if (std::gcd(a % q, q) != 1 || std::gcd(b % q, q) != 1)
        throw std::domain_error("B_q: arguments must be units");
    if (a % q == b % q) throw std::domain_error("B_q: a = b mod q");
}

}  // namespace detail

// production route; O(polylog q) given Lambda lookups
inline double b_q_residue_route(u64 q, u64 a, u64 b, const Config& cfg = {}) {
    (void)cfg;
    detail::require_race_pair(q, a, b);
    a %= q; b %= q;
    double logq = std::log((double)q);
    double phi = (double)euler_phi(q);

    u64 s1 = mulmod(a, invmod(b, q), q);
    u64 s2 = mulmod(b, invmod(a, q), q);
    if (s1 > s2) std::swap(s1, s2);  // symmetric in (a,b) by construction

    double terms = 0.0;
    if ((a + b) % q == 0) terms += 0.69314718055994530942;

    u64 d = (a + q - b) % q;
    u64 g = std::gcd(q, d);
    u64 m = q / g;
    if (m > 1) terms += von_mangoldt(m) / (double)euler_phi(m);

    terms += lambda0(s1) + lambda0(s2);

    // prime powers dividing q, smoothing parameter x = (q log q)^2
    double x = (double)q * logq * (double)q * logq;
    int e_max = (int)(2.0 * std::log(x));
    for (auto [p, nu] : factorize(q)) {
        u64 mq = q;
        for (int i = 0; i < nu; ++i) mq /= p;  // q / p^nu
        for (u64 s : {s1, s2}) {
            u64 target = mq > 1 ? s % mq : 0;
            u64 pe_mod = mq > 1 ? 1 % mq : 0;
            double pw = 1.0;  // p^{e-1}
            for (int e = 1; e <= e_max; ++e) {
                if (mq > 1) pe_mod = mulmod(pe_mod, p % mq, mq);
                bool hit = (mq == 1) || (pe_mod == target);
                if (hit) {
                    double t = std::log((double)p) /
                               (pw * std::pow((double)p, (double)nu) * (double)(p - 1));
                    terms += t;
                    if (t < 1e-18) break;
                }
                pw *= (double)p;
                if (pw > 1e18) break;
            }
        }
    }
    return 4.0 * logq - phi * terms;
}

inline double b_q_residue_budget(u64 q, const Config& cfg = {}) {
    double logq = std::log((double)q);
    return cfg.c_residue_tail * logq * logq * (double)euler_phi(q) / (double)q;
}

// ---------------------------------------------------------------------------

enum class BRoute { residue, character };

class SpectralContext {
  public:
    explicit SpectralContext(u64 q, Config cfg = {},
                             std::string cache_dir = SmoothedSums::default_cache_dir())
        : q_(q), cfg_(cfg) {
        if (q < 3) throw std::domain_error("SpectralContext: q < 3");
        y_ = cfg_.y_for(q);
        group_ = std::make_unique<CharacterGroup>(q);
        sums_ = std::make_unique<SmoothedSums>(*group_, y_, cfg_, cache_dir);
        u64 phi = group_->phi();
        k_.assign(phi, 0.0);
        nq_ = 0.0;
        for (u64 j = 1; j < phi; ++j) {
            Character chi = group_->character(j);
            double K = std::log((double)chi.conductor()) +
                       2.0 * sums_->log_deriv(j).value.real() -
                       (double)chi.parity() * 0.69314718055994530942 + kGamma0;
            k_[j] = K;
            nq_ += K;
        }
    }

    u64 q() const { return q_; }
    const Config& config() const { return cfg_; }
    double y() const { return y_; }
    const CharacterGroup& group() const { return *group_; }
    const SmoothedSums& sums() const { return *sums_; }

    double n_q() const { return nq_; }
    // accumulated smoothing budget of N_q
    double n_q_budget() const {
        return 2.0 * (double)(group_->phi() - 1) * smoothing_tail();
    }

    double smoothing_tail() const {
        return cfg_.c_smooth * std::log((double)q_) / std::sqrt(y_) +
               1.0 / ((double)q_ * (double)q_);
    }

    // validation route: explicit character sum; checks the imaginary residual
    double b_q_char(u64 a, u64 b) const {
        detail::require_race_pair(q_, a, b);
        u64 s = mulmod(a % q_, invmod(b % q_, q_), q_);
        u64 si = invmod(s, q_);
        if (si < s) s = si;  // exact (a,b) <-> (b,a) symmetry
        std::complex<double> acc{0.0, 0.0};
        u64 phi = group_->phi();
        for (u64 j = 1; j < phi; ++j) acc += group_->character(j)(s) * k_[j];
        if (std::abs(acc.imag()) > 1e-9 * (double)phi)
            throw std::logic_error("b_q_char: imaginary residual out of tolerance");
        return acc.real();
    }

    double b_q_char_budget() const {
        return 2.0 * (double)(group_->phi() - 1) * smoothing_tail();
    }

    // production route, memoized by the invariant a b^{-1}
    double b_q(u64 a, u64 b) const {
        detail::require_race_pair(q_, a, b);
        u64 s = mulmod(a % q_, invmod(b % q_, q_), q_);
        u64 si = invmod(s, q_);
        u64 key = std::min(s, si);
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = bmemo_.find(key);
            if (it != bmemo_.end()) return it->second;
        }
        double v = b_q_residue_route(q_, a, b, cfg_);
        std::lock_guard<std::mutex> lk(mu_);
        bmemo_.emplace(key, v);
        return v;
    }

    double b_q(u64 a, u64 b, BRoute route) const {
        return route == BRoute::residue ? b_q(a, b) : b_q_char(a, b);
    }

    double b_q_budget(BRoute route = BRoute::residue) const {
        return route == BRoute::residue ? b_q_residue_budget(q_, cfg_) : b_q_char_budget();
    }

    double v_q(u64 a, u64 b) const {
        double v = 2.0 * nq_ - 2.0 * b_q(a, b);
        if (v <= 0.0) throw std::domain_error("v_q: non-positive variance (degenerate context)");
        return v;
    }
    double v_q_budget() const { return 2.0 * n_q_budget() + 2.0 * b_q_budget(); }

    // all ordered pairs of distinct units; header a,b,B,route,error_budget
    void export_b_matrix_csv(std::ostream& out, BRoute route = BRoute::residue) const {
        out << "a,b,B,route,error_budget\n";
        const char* name = route == BRoute::residue ? "residue" : "character";
        double budget = b_q_budget(route);
        for (u64 a : group_->units())
            for (u64 b : group_->units()) {
                if (a == b) continue;
                out << a << ',' << b << ',' << b_q(a, b, route) << ',' << name << ','
                    << budget << '\n';
            }
    }

  private:
    u64 q_;
    Config cfg_;
    double y_;
    std::unique_ptr<CharacterGroup> group_;
    std::unique_ptr<SmoothedSums> sums_;
    std::vector<double> k_;
    double nq_ = 0.0;
    mutable std::mutex mu_;
    mutable std::unordered_map<u64, double> bmemo_;
};

}  // namespace primerace
