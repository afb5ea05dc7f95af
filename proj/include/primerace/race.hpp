#pragma once
// Empirical side of the race: sieve primes, bucket the logarithmic measure
// of [2, x] by the ranking signature of the counters, and compare against
// the analytic densities.  Counts only change at primes, so the measure of
// each constant-signature interval [t, t') is log(t'/t), accumulated as
// log1p((t'-t)/t) with compensated summation; the bucket totals then match
// log(x/2) to near machine precision (the partition identity).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "primerace/ntheory.hpp"
#include "primerace/sieve.hpp"

namespace primerace {

struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct RaceCheckpoint {
    u64 x = 0;
    std::vector<u64> counts;
};

// ranking with ties: rank[j] = number of strictly larger distinct counts
inline std::vector<int> race_signature(const std::vector<u64>& counts) {
    std::vector<int> rank(counts.size(), 0);
    for (size_t j = 0; j < counts.size(); ++j)
        for (size_t k = 0; k < counts.size(); ++k)
            if (counts[k] > counts[j]) {
                bool counted = false;
                for (size_t m = 0; m < k; ++m)
                    if (counts[m] == counts[k]) { counted = true; break; }
                if (!counted) ++rank[j];
            }
    return rank;
}

struct RaceState {
    u64 q = 0;
    std::vector<u64> residues;
    u64 x_done = 2;   // measure covers [2, x_done]
    u64 t_last = 2;   // last counter change; buckets cover [2, t_last]
    std::vector<u64> counts;
    std::map<std::vector<int>, Kahan> buckets;
    u64 lead_changes = 0;
    int last_leader = -1;  // index of the last unique front-runner
    double checkpoint_ratio = 1.25;
    u64 next_checkpoint = 0;
    std::vector<RaceCheckpoint> checkpoints;
};

namespace detail {

inline void race_event(RaceState& st, u64 p, int slot) {
    if (p > st.t_last)
        st.buckets[race_signature(st.counts)].add(
            std::log1p((double)(p - st.t_last) / (double)st.t_last));
    ++st.counts[(size_t)slot];
    st.t_last = p;
    int leader = 0;
    bool unique = true;
    for (size_t j = 1; j < st.counts.size(); ++j) {
        if (st.counts[j] > st.counts[(size_t)leader]) {
            leader = (int)j;
            unique = true;
        } else if (st.counts[j] == st.counts[(size_t)leader]) {
            unique = false;
        }
    }
    if (unique && leader != st.last_leader) {
        if (st.last_leader >= 0) ++st.lead_changes;
        st.last_leader = leader;
    }
}

}  // namespace detail

inline void race_extend(RaceState& st, u64 x) {
    if (x < st.x_done) throw std::domain_error("race: cannot shrink the sieved range");
    if (x == st.x_done) return;
    std::vector<int> slot(st.q, -1);
    for (size_t j = 0; j < st.residues.size(); ++j) slot[st.residues[j] % st.q] = (int)j;
    if (st.next_checkpoint == 0) st.next_checkpoint = 4;
    for_each_prime_range(st.x_done + 1, x, [&](u64 p) {
        int s = slot[(size_t)(p % st.q)];
        if (s >= 0) detail::race_event(st, p, s);
        if (p >= st.next_checkpoint) {
            st.checkpoints.push_back({p, st.counts});
            u64 nx = (u64)((double)p * st.checkpoint_ratio);
            st.next_checkpoint = nx > p ? nx : p + 1;
        }
    });
    st.x_done = x;
}

inline RaceState race_counts(u64 q, const std::vector<u64>& residues, u64 x,
                             double checkpoint_ratio = 1.25) {
    if (q < 3) throw std::domain_error("race: q < 3");
    if (x < 2) throw std::domain_error("race: x < 2");
    if (residues.size() < 2) throw std::domain_error("race: need at least two residues");
    if (checkpoint_ratio <= 1.0) throw std::domain_error("race: checkpoint ratio must exceed 1");
    for (u64 a : residues)
        if (std::gcd(a % q, q) != 1) throw std::domain_error("race: residues must be units");
    for (size_t i = 0; i < residues.size(); ++i)
        for (size_t j = i + 1; j < residues.size(); ++j)
            if (residues[i] % q == residues[j] % q)
                throw std::domain_error("race: repeated residue");
    RaceState st;
    st.q = q;
    st.residues = residues;
    st.counts.assign(residues.size(), 0);
    st.checkpoint_ratio = checkpoint_ratio;
    // the prime 2 is already <= the starting point t = 2
    for (size_t j = 0; j < residues.size(); ++j)
        if (residues[j] % q == 2 % q) {
            st.counts[j] = 1;
            st.last_leader = (int)j;
        }
    race_extend(st, x);
    return st;
}

// measure of {t in [2, x_done] : signature(t) = sig}
inline double race_measure(const RaceState& st, const std::vector<int>& sig) {
    double v = 0.0;
    auto it = st.buckets.find(sig);
    if (it != st.buckets.end()) v = it->second.value();
    if (st.x_done > st.t_last && race_signature(st.counts) == sig)
        v += std::log1p((double)(st.x_done - st.t_last) / (double)st.t_last);
    return v;
}

inline double race_total_measure(const RaceState& st) {
    Kahan k;
    for (const auto& [sig, acc] : st.buckets) k.add(acc.value());
    if (st.x_done > st.t_last)
        k.add(std::log1p((double)(st.x_done - st.t_last) / (double)st.t_last));
    return k.value();
}

inline double race_expected_measure(const RaceState& st) {
    return std::log((double)st.x_done / 2.0);
}

// strict: counts strictly decreasing in listed order.
// weak:   ties allowed anywhere (signature ranks nondecreasing).
// split:  tie intervals shared equally among the strict orders they are
//         compatible with; the split densities of the r! orders sum to 1.
enum class TieRule { strict, weak, split };

namespace detail {

inline bool weak_compatible(const std::vector<int>& sig) {
    for (size_t j = 1; j < sig.size(); ++j)
        if (sig[j] < sig[j - 1]) return false;
    return true;
}

// number of strict orderings consistent with a tied signature:
// product of (tie-group size)! over the rank groups
inline double strict_orders_of(const std::vector<int>& sig) {
    double prod = 1.0;
    for (int rank = 0; rank < (int)sig.size(); ++rank) {
        int cnt = 0;
        for (int v : sig)
            if (v == rank) ++cnt;
        for (int i = 2; i <= cnt; ++i) prod *= (double)i;
    }
    return prod;
}

inline double tie_weight(const std::vector<int>& sig, TieRule rule) {
    switch (rule) {
        case TieRule::strict: {
            for (size_t j = 0; j < sig.size(); ++j)
                if (sig[j] != (int)j) return 0.0;
            return 1.0;
        }
        case TieRule::weak:
            return weak_compatible(sig) ? 1.0 : 0.0;
        case TieRule::split:
            return weak_compatible(sig) ? 1.0 / strict_orders_of(sig) : 0.0;
    }
    return 0.0;
}

}  // namespace detail

inline double race_ordered_measure(const RaceState& st, TieRule rule) {
    double v = 0.0;
    for (const auto& [sig, acc] : st.buckets) v += detail::tie_weight(sig, rule) * acc.value();
    if (st.x_done > st.t_last)
        v += detail::tie_weight(race_signature(st.counts), rule) *
             std::log1p((double)(st.x_done - st.t_last) / (double)st.t_last);
    return v;
}

// measure for a permuted reading of the same counters: order lists indices
// into residues, first = claimed front-runner
inline double race_permutation_measure(const RaceState& st, const std::vector<int>& order,
                                       TieRule rule) {
    if (order.size() != st.residues.size())
        throw std::domain_error("race: permutation size mismatch");
    auto permuted = [&](const std::vector<int>& sig) {
        std::vector<int> out(sig.size());
        for (size_t j = 0; j < sig.size(); ++j) out[j] = sig[(size_t)order[j]];
        return out;
    };
    double v = 0.0;
    for (const auto& [sig, acc] : st.buckets)
        v += detail::tie_weight(permuted(sig), rule) * acc.value();
    if (st.x_done > st.t_last)
        v += detail::tie_weight(permuted(race_signature(st.counts)), rule) *
             std::log1p((double)(st.x_done - st.t_last) / (double)st.t_last);
    return v;
}

inline double race_strict_measure(const RaceState& st) {
    return race_ordered_measure(st, TieRule::strict);
}

inline double race_weak_measure(const RaceState& st) {
    return race_ordered_measure(st, TieRule::weak);
}

inline double race_density(const RaceState& st, TieRule rule = TieRule::split) {
    double total = race_expected_measure(st);
    if (total <= 0.0) return 0.0;
    return race_ordered_measure(st, rule) / total;
}

// ---------------------------------------------------------------------------
// Versioned binary trace; saving and reloading preserves state bit-exactly.

namespace detail {

constexpr std::uint32_t kRaceMagic = 0x54525250;  // "PRRT"
constexpr std::uint32_t kRaceVersion = 1;

template <class T>
void put_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("race trace: truncated file");
    return v;
}

}  // namespace detail

inline void save_race_trace(const RaceState& st, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("race trace: cannot open " + tmp);
        detail::put_pod(out, detail::kRaceMagic);
        detail::put_pod(out, detail::kRaceVersion);
        detail::put_pod(out, st.q);
        detail::put_pod(out, (std::uint32_t)st.residues.size());
        for (u64 a : st.residues) detail::put_pod(out, a);
        detail::put_pod(out, st.x_done);
        detail::put_pod(out, st.t_last);
        for (u64 c : st.counts) detail::put_pod(out, c);
        detail::put_pod(out, st.lead_changes);
        detail::put_pod(out, (std::int32_t)st.last_leader);
        detail::put_pod(out, st.checkpoint_ratio);
        detail::put_pod(out, st.next_checkpoint);
        detail::put_pod(out, (u64)st.buckets.size());
        for (const auto& [sig, acc] : st.buckets) {
            for (int v : sig) detail::put_pod(out, (std::int32_t)v);
            detail::put_pod(out, acc.sum);
            detail::put_pod(out, acc.carry);
        }
        detail::put_pod(out, (u64)st.checkpoints.size());
        for (const auto& cp : st.checkpoints) {
            detail::put_pod(out, cp.x);
            for (u64 c : cp.counts) detail::put_pod(out, c);
        }
        if (!out) throw std::runtime_error("race trace: write failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("race trace: rename failed");
}

inline RaceState load_race_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("race trace: cannot open " + path);
    if (detail::get_pod<std::uint32_t>(in) != detail::kRaceMagic)
        throw std::runtime_error("race trace: bad magic");
    if (detail::get_pod<std::uint32_t>(in) != detail::kRaceVersion)
        throw std::runtime_error("race trace: unsupported version");
    RaceState st;
    st.q = detail::get_pod<u64>(in);
    auto r = detail::get_pod<std::uint32_t>(in);
    st.residues.resize(r);
    for (auto& a : st.residues) a = detail::get_pod<u64>(in);
    st.x_done = detail::get_pod<u64>(in);
    st.t_last = detail::get_pod<u64>(in);
    st.counts.resize(r);
    for (auto& c : st.counts) c = detail::get_pod<u64>(in);
    st.lead_changes = detail::get_pod<u64>(in);
    st.last_leader = (int)detail::get_pod<std::int32_t>(in);
    st.checkpoint_ratio = detail::get_pod<double>(in);
    st.next_checkpoint = detail::get_pod<u64>(in);
    u64 nb = detail::get_pod<u64>(in);
    for (u64 i = 0; i < nb; ++i) {
        std::vector<int> sig(r);
        for (auto& v : sig) v = (int)detail::get_pod<std::int32_t>(in);
        Kahan k;
        k.sum = detail::get_pod<double>(in);
        k.carry = detail::get_pod<double>(in);
        st.buckets.emplace(std::move(sig), k);
    }
    u64 nc = detail::get_pod<u64>(in);
    st.checkpoints.resize(nc);
    for (auto& cp : st.checkpoints) {
        cp.x = detail::get_pod<u64>(in);
        cp.counts.resize(r);
        for (auto& c : cp.counts) c = detail::get_pod<u64>(in);
    }
    return st;
}

// checkpoint table: x,count_<a1>,count_<a2>,...
inline void export_race_csv(std::ostream& out, const RaceState& st) {
    out << "x";
    for (u64 a : st.residues) out << ",count_" << a;
    out << '\n';
    for (const auto& cp : st.checkpoints) {
        out << cp.x;
        for (u64 c : cp.counts) out << ',' << c;
        out << '\n';
    }
}

}  // namespace primerace
