#pragma once
// All numeric calibration constants in one place.  Every report echoes this
// block so a result can be reproduced from its own output.

#include <cmath>
#include <cstdint>
#include <string>

namespace primerace {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Constant term of the zero-sum identity behind N_q and the character route:
// gamma0 = Gamma'(1)/Gamma(1) - log 2.
inline constexpr double kGamma0 = -kEulerGamma - 0.69314718055994530942;

struct Config {
    // smoothing parameter for the L'/L sums; 0 means max(q^2, 1e6)
    double y_override = 0.0;

    // budget constant for the smoothed L'/L remainder  c * log q / sqrt(y)
    double c_smooth = 3.0;

    // residue-route tail budget  c * log^2(q) * phi(q)/q
    double c_residue_tail = 3.0;

    // cross-route agreement constant (acceptance gate; must stay <= 25)
    double c0_cross_route = 22.0;

    // scale guard |B_q| <= c * phi(q)
    double c_bq_phi = 2.0;

    // series remainder constant: c * (1/N + C B / N^{3/2} + B^2 / N^2)
    double c_series = 1.0;

    // two-way remainder constant: c * C_q(1)^2 log^2(q) / V_q
    double c_two_way = 1.0;

    // structural-bias threshold tau / log q
    double tau = 0.01;

    double y_for(std::uint64_t q) const {
        if (y_override > 0.0) return y_override;
        double qq = (double)q * (double)q;
        return qq > 1e6 ? qq : 1e6;
    }
    // truncation point of every smoothed sum
    static std::uint64_t truncation(double y) {
        return (std::uint64_t)(2.0 * y * std::log(y));
    }
};

}  // namespace primerace
