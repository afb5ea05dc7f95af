#pragma once
// Segmented Eratosthenes sieve.  Shared by the race simulator and the smoothed
// prime-power sums, both of which only ever stream primes in increasing order.

#include <cstdint>
#include <cstring>
#include <vector>

#include "primerace/ntheory.hpp"

namespace primerace {

inline std::vector<std::uint32_t> base_primes(u64 limit) {
    std::vector<std::uint32_t> ps;
    if (limit < 2) return ps;
    std::vector<bool> comp(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (!comp[i]) {
            ps.push_back((std::uint32_t)i);
            for (u64 j = i * i; j <= limit; j += i) comp[j] = true;
        }
    }
    return ps;
}

// Calls f(p) for every prime p <= limit, in increasing order.
template <class F>
void for_each_prime(u64 limit, F&& f, std::size_t segment_len = 1u << 21) {
    if (limit < 2) return;
    f((u64)2);
    if (limit < 3) return;

    u64 root = (u64)std::sqrt((double)limit);
    while (root * root > limit) --root;
    while ((root + 1) * (root + 1) <= limit) ++root;
    auto base = base_primes(root);

    // segment covers odd numbers lo, lo+2, ..., lo+2*(segment_len-1)
    std::vector<std::uint8_t> mark(segment_len);
    for (u64 lo = 3; lo <= limit; lo += 2 * segment_len) {
        u64 hi = lo + 2 * (segment_len - 1);
        if (hi > limit) hi = limit;
        std::size_t n = (std::size_t)((hi - lo) / 2 + 1);
        std::memset(mark.data(), 0, n);
        for (std::uint32_t p : base) {
            if (p == 2) continue;
            u64 pp = (u64)p * p;
            if (pp > hi) break;
            u64 start = pp >= lo ? pp : ((lo + p - 1) / p) * p;
            if (start % 2 == 0) start += p;
            for (u64 m = start; m <= hi; m += 2 * (u64)p) mark[(std::size_t)((m - lo) / 2)] = 1;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!mark[i]) f(lo + 2 * i);
    }
}

// primes in [lo, hi], ordered; used to resume a partially sieved race
template <class F>
void for_each_prime_range(u64 lo, u64 hi, F&& f, std::size_t segment_len = 1u << 21) {
    if (hi < 2 || hi < lo) return;
    if (lo <= 2) f((u64)2);
    u64 start = lo <= 3 ? 3 : (lo | 1);
    if (start > hi) return;

    u64 root = (u64)std::sqrt((double)hi);
    while (root * root > hi) --root;
    while ((root + 1) * (root + 1) <= hi) ++root;
    auto base = base_primes(root);

    std::vector<std::uint8_t> mark(segment_len);
    for (u64 slo = start; slo <= hi; slo += 2 * segment_len) {
        u64 shi = slo + 2 * (segment_len - 1);
        if (shi > hi) shi = hi;
        std::size_t n = (std::size_t)((shi - slo) / 2 + 1);
        std::memset(mark.data(), 0, n);
        for (std::uint32_t p : base) {
            if (p == 2) continue;
            u64 pp = (u64)p * p;
            if (pp > shi) break;
            u64 first = pp >= slo ? pp : ((slo + p - 1) / p) * p;
            if (first % 2 == 0) first += p;
            for (u64 m = first; m <= shi; m += 2 * (u64)p) mark[(std::size_t)((m - slo) / 2)] = 1;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!mark[i]) f(slo + 2 * i);
    }
}

inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> ps;
    for_each_prime(limit, [&](u64 p) { ps.push_back(p); });
    return ps;
}

inline u64 prime_count(u64 limit) {
    u64 n = 0;
    for_each_prime(limit, [&](u64) { ++n; });
    return n;
}

}  // namespace primerace
