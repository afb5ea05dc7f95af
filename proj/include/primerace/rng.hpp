#pragma once
// Counter-based RNG: draw k is a pure function of (seed, k), so streams are
// reproducible across platforms and trivially shardable for Monte Carlo.

#include <cmath>
#include <cstdint>

#include "primerace/ntheory.hpp"

namespace primerace {

inline u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
  public:
    explicit CounterRng(u64 seed, u64 stream = 0)
        : base_(splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL))) {}

    u64 next_u64() { return splitmix64(base_ + counter_++); }

    // in (0,1); never exactly 0 or 1
    double next_unit() {
        return ((double)(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // standard normal, Box-Muller; second value cached
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = next_unit();
        double v = next_unit();
        double r = std::sqrt(-2.0 * std::log(u));
        double t = 6.28318530717958647692 * v;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    u64 counter() const { return counter_; }

  private:
    u64 base_;
    u64 counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Streaming mean/variance (Welford); merge() combines shards exactly.
class Welford {
  public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / (double)n_;
        m2_ += d * (x - mean_);
    }

    void merge(const Welford& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        u64 n = n_ + o.n_;
        double d = o.mean_ - mean_;
        mean_ += d * (double)o.n_ / (double)n;
        m2_ += o.m2_ + d * d * (double)n_ * (double)o.n_ / (double)n;
        n_ = n;
    }

    u64 count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (double)(n_ - 1) : 0.0; }
    double std_error() const { return n_ > 1 ? std::sqrt(variance() / (double)n_) : 0.0; }

  private:
    u64 n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace primerace
