#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numeric>

#include "primerace/characters.hpp"

using namespace primerace;

namespace {

// conductor by definition: smallest divisor f of q such that chi is trivial
// on every unit a = 1 mod f
u64 brute_conductor(const CharacterGroup& g, const Character& chi) {
    u64 q = g.q();
    for (u64 f = 1; f <= q; ++f) {
        if (q % f != 0) continue;
        bool ok = true;
        for (u64 a : g.units())
            if (a % f == 1 % f && std::abs(chi(a) - std::complex<double>(1.0, 0.0)) > 1e-9) {
                ok = false;
                break;
            }
        if (ok) return f;
    }
    return q;
}

}  // namespace

TEST_CASE("group structure", "[characters]") {
    for (u64 q : {12ull, 101ull, 420ull}) {
        CharacterGroup g(q);
        CHECK(g.phi() == euler_phi(q));
        CHECK(g.units().size() == g.phi());
        for (u64 a : g.units()) {
            CHECK(std::gcd(a, q) == 1ull);
            CHECK(g.is_unit(a));
        }
        CHECK_FALSE(g.is_unit(0));
    }
    CHECK_THROWS_AS(CharacterGroup(2), std::domain_error);
}

TEST_CASE("character values are roots of unity and multiplicative", "[characters]") {
    for (u64 q : {12ull, 101ull, 420ull}) {
        CharacterGroup g(q);
        for (u64 j : {u64{0}, u64{1}, g.phi() / 2, g.phi() - 1}) {
            auto chi = g.character(j);
            for (u64 a : g.units()) {
                CHECK(std::abs(std::abs(chi(a)) - 1.0) < 1e-12);
                for (u64 b : {g.units().front(), g.units().back()}) {
                    auto lhs = chi(mulmod(a, b, q));
                    auto rhs = chi(a) * chi(b);
                    CHECK(std::abs(lhs - rhs) < 1e-12);
                }
            }
            CHECK(std::abs(chi(u64{1}) - std::complex<double>(1.0, 0.0)) < 1e-12);
        }
        // non-units map to zero
        CHECK(std::abs(g.character(1)((u64)0)) == 0.0);
    }
}

TEST_CASE("orthogonality", "[characters]") {
    for (u64 q : {12ull, 101ull, 420ull}) {
        CharacterGroup g(q);
        // sum over a of chi(a) vanishes unless chi is principal
        for (u64 j = 0; j < g.phi(); ++j) {
            auto chi = g.character(j);
            std::complex<double> s = 0.0;
            for (u64 a : g.units()) s += chi(a);
            if (j == 0)
                CHECK(std::abs(s - std::complex<double>((double)g.phi(), 0.0)) < 1e-9);
            else
                CHECK(std::abs(s) < 1e-9);
        }
        // sum over chi of chi(a) vanishes unless a = 1
        for (u64 a : g.units()) {
            std::complex<double> s = 0.0;
            for (u64 j = 0; j < g.phi(); ++j) s += g.character(j)(a);
            if (a == 1)
                CHECK(std::abs(s - std::complex<double>((double)g.phi(), 0.0)) < 1e-9);
            else
                CHECK(std::abs(s) < 1e-9);
        }
    }
}

TEST_CASE("conductors match the definition", "[characters]") {
    for (u64 q : {12ull, 24ull, 36ull, 101ull}) {
        CharacterGroup g(q);
        for (u64 j = 0; j < g.phi(); ++j) {
            auto chi = g.character(j);
            CHECK(chi.conductor() == brute_conductor(g, chi));
        }
    }
}

TEST_CASE("parity", "[characters]") {
    for (u64 q : {12ull, 101ull, 420ull}) {
        CharacterGroup g(q);
        u64 even = 0, odd = 0;
        for (u64 j = 0; j < g.phi(); ++j) {
            auto chi = g.character(j);
            auto v = chi(q - 1);  // chi(-1)
            CHECK(std::abs(v.imag()) < 1e-12);
            int p = v.real() > 0 ? 1 : -1;
            CHECK(chi.parity() == p);
            (p == 1 ? even : odd) += 1;
        }
        CHECK(even == g.phi() / 2);  // -1 is not a square mod 12, 101, 420
        CHECK(odd == g.phi() / 2);
        CHECK(g.character(0).parity() == 1);
    }
}

TEST_CASE("conjugate characters", "[characters]") {
    CharacterGroup g(101);
    for (u64 j : {1ull, 7ull, 50ull, 99ull}) {
        auto chi = g.character(j);
        auto bar = chi.conjugate();
        for (u64 a : {2ull, 3ull, 42ull, 100ull})
            CHECK(std::abs(bar(a) - std::conj(chi(a))) < 1e-12);
    }
}

TEST_CASE("the real non-principal character mod a prime is the Legendre symbol",
          "[characters]") {
    CharacterGroup g(101);
    u64 found = 0, index = 0;
    for (u64 j = 1; j < g.phi(); ++j) {
        auto chi = g.character(j);
        bool real = true;
        for (u64 a : g.units())
            if (std::abs(chi(a).imag()) > 1e-12) { real = false; break; }
        if (real) { ++found; index = j; }
    }
    REQUIRE(found == 1);
    auto chi = g.character(index);
    for (u64 a : g.units()) {
        double want = is_square_mod(a, 101) ? 1.0 : -1.0;
        CHECK(std::abs(chi(a).real() - want) < 1e-12);
    }
}

TEST_CASE("conductor-weighted character sums", "[characters]") {
    SECTION("closed form against direct summation") {
        for (u64 q : {12ull, 101ull, 420ull}) {
            CharacterGroup g(q);
            for (u64 a : {u64{1}, q - 1, g.units()[g.units().size() / 2]}) {
                std::complex<double> s = 0.0;
                for (u64 j = 0; j < g.phi(); ++j) {
                    auto chi = g.character(j);
                    s += chi(a) * std::log((double)chi.conductor());
                }
                CHECK(std::abs(s.imag()) < 1e-9);
                CHECK(log_conductor_sum(q, a) == Catch::Approx(s.real()).margin(1e-9));
            }
        }
    }
    SECTION("frozen small cases") {
        CHECK(log_conductor_sum(4, 1) == Catch::Approx(2.0 * std::log(2.0)).margin(1e-12));
        CHECK(log_conductor_sum(4, 3) == Catch::Approx(-2.0 * std::log(2.0)).margin(1e-12));
        CHECK(log_conductor_sum(5, 2) == Catch::Approx(-std::log(5.0)).margin(1e-12));
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(log_conductor_sum(12, 4), std::domain_error);
        CHECK_THROWS_AS(log_conductor_sum(2, 1), std::domain_error);
    }
}
