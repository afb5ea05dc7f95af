#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <sstream>

#include "primerace/race.hpp"
#include "primerace/sieve.hpp"

using namespace primerace;

TEST_CASE("prime sieve", "[sieve]") {
    SECTION("small primes") {
        auto p = primes_up_to(100);
        REQUIRE(p.size() == 25);
        CHECK(p.front() == 2);
        CHECK(p.back() == 97);
    }
    SECTION("prime counting checkpoints") {
        CHECK(prime_count(10) == 4);
        CHECK(prime_count(1000000) == 78498);
    }
    SECTION("segmented enumeration matches the flat list") {
        auto want = primes_up_to(300000);
        std::vector<u64> got;
        for_each_prime(300000, [&](u64 p) { got.push_back(p); });
        CHECK(got == want);
    }
    SECTION("range enumeration glues back together") {
        auto want = primes_up_to(300000);
        std::vector<u64> got;
        // deliberately awkward split points: even/odd boundaries, singleton range
        u64 cuts[] = {2, 99, 100, 1000, 1001, 1009, 1010, 299999, 300000};
        for (size_t i = 0; i + 1 < std::size(cuts); ++i)
            for_each_prime_range(cuts[i] + (i ? 1 : 0), cuts[i + 1],
                                 [&](u64 p) { got.push_back(p); });
        CHECK(got == want);
    }
    SECTION("range edge cases") {
        std::vector<u64> got;
        for_each_prime_range(2, 2, [&](u64 p) { got.push_back(p); });
        CHECK(got == std::vector<u64>{2});
        got.clear();
        for_each_prime_range(14, 16, [&](u64 p) { got.push_back(p); });
        CHECK(got.empty());
        got.clear();
        for_each_prime_range(10, 5, [&](u64 p) { got.push_back(p); });
        CHECK(got.empty());
    }
}

namespace {

u64 brute_pi(u64 x, u64 q, u64 a) {
    u64 c = 0;
    for (u64 p : primes_up_to(x))
        if (p % q == a % q) ++c;
    return c;
}

}  // namespace

TEST_CASE("race counters match direct counts", "[race]") {
    SECTION("initial state covers the prime 2") {
        auto st = race_counts(3, {2, 1}, 10);
        CHECK(st.counts == std::vector<u64>{2, 1});  // primes 2,5 vs 7
        CHECK(st.x_done == 10);
    }
    SECTION("q = 4 at 1e5") {
        auto st = race_counts(4, {3, 1}, 100000);
        CHECK(st.counts[0] == brute_pi(100000, 4, 3));
        CHECK(st.counts[1] == brute_pi(100000, 4, 1));
    }
    SECTION("q = 8, four-way at 1e5") {
        auto st = race_counts(8, {1, 3, 5, 7}, 100000);
        for (int j = 0; j < 4; ++j)
            CHECK(st.counts[j] == brute_pi(100000, 8, st.residues[j]));
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(race_counts(4, {3, 1}, 1), std::domain_error);
        CHECK_THROWS_AS(race_counts(4, {3}, 100), std::domain_error);
        CHECK_THROWS_AS(race_counts(4, {3, 2}, 100), std::domain_error);
        CHECK_THROWS_AS(race_counts(4, {3, 7}, 100), std::domain_error);  // 7 = 3 mod 4
        CHECK_THROWS_AS(race_counts(2, {1, 3}, 100), std::domain_error);
        auto st = race_counts(4, {3, 1}, 1000);
        CHECK_THROWS_AS(race_extend(st, 500), std::domain_error);
    }
}

TEST_CASE("rank signatures", "[race]") {
    CHECK(race_signature({5, 3, 2}) == std::vector<int>{0, 1, 2});
    CHECK(race_signature({5, 5, 3}) == std::vector<int>{0, 0, 1});
    CHECK(race_signature({3, 5, 5}) == std::vector<int>{1, 0, 0});
    CHECK(race_signature({7, 7, 7}) == std::vector<int>{0, 0, 0});
    CHECK(race_signature({1, 2}) == std::vector<int>{1, 0});
}

TEST_CASE("logarithmic measure partitions", "[race]") {
    auto st = race_counts(8, {1, 3, 5, 7}, 1000000);
    double total = race_total_measure(st);
    double expected = race_expected_measure(st);
    CHECK(std::abs(total - expected) <= 1e-12 * expected);

    SECTION("split rule distributes everything once") {
        std::vector<int> order = {0, 1, 2, 3};
        double sum = 0.0;
        std::sort(order.begin(), order.end());
        do sum += race_permutation_measure(st, order, TieRule::split);
        while (std::next_permutation(order.begin(), order.end()));
        CHECK(std::abs(sum - total) <= 1e-12 * total);
    }
    SECTION("strict <= split <= weak") {
        double s = race_density(st, TieRule::strict);
        double m = race_density(st, TieRule::split);
        double w = race_density(st, TieRule::weak);
        CHECK(s <= m);
        CHECK(m <= w);
    }
}

TEST_CASE("two-way tie accounting is exact", "[race]") {
    auto st = race_counts(4, {3, 1}, 200000);
    double ahead = race_strict_measure(st);                           // 3 strictly ahead
    double behind = race_permutation_measure(st, {1, 0}, TieRule::strict);
    double tied = 0.0;
    auto it = st.buckets.find(std::vector<int>{0, 0});
    if (it != st.buckets.end()) tied = it->second.value();
    if (race_signature(st.counts) == std::vector<int>{0, 0} && st.x_done > st.t_last)
        tied += std::log1p((double)(st.x_done - st.t_last) / (double)st.t_last);
    double total = race_total_measure(st);
    CHECK(std::abs(ahead + behind + tied - total) <= 1e-12 * total);
    // split shares the tie between the two orders
    double split = race_density(st, TieRule::split) * race_expected_measure(st);
    CHECK(std::abs(split - (ahead + 0.5 * tied)) <= 1e-12 * total);
}

TEST_CASE("incremental extension is bit-exact", "[race]") {
    auto one = race_counts(4, {3, 1}, 200000);
    auto inc = race_counts(4, {3, 1}, 50000);
    race_extend(inc, 120001);  // even endpoint inside a segment
    race_extend(inc, 120001);  // no-op extension
    race_extend(inc, 200000);

    CHECK(one.counts == inc.counts);
    CHECK(one.t_last == inc.t_last);
    CHECK(one.x_done == inc.x_done);
    CHECK(one.lead_changes == inc.lead_changes);
    REQUIRE(one.buckets.size() == inc.buckets.size());
    for (auto& [sig, acc] : one.buckets) {
        auto it = inc.buckets.find(sig);
        REQUIRE(it != inc.buckets.end());
        CHECK(acc.sum == it->second.sum);      // bitwise, not approximate
        CHECK(acc.carry == it->second.carry);
    }
}

TEST_CASE("trace round-trip preserves state", "[race]") {
    auto st = race_counts(8, {1, 3, 5, 7}, 300000);
    auto path = (std::filesystem::temp_directory_path() / "prc_trace_test.bin").string();
    save_race_trace(st, path);
    auto rt = load_race_trace(path);
    std::remove(path.c_str());

    CHECK(rt.q == st.q);
    CHECK(rt.residues == st.residues);
    CHECK(rt.x_done == st.x_done);
    CHECK(rt.t_last == st.t_last);
    CHECK(rt.counts == st.counts);
    CHECK(rt.lead_changes == st.lead_changes);
    CHECK(rt.last_leader == st.last_leader);
    CHECK(rt.checkpoint_ratio == st.checkpoint_ratio);
    CHECK(rt.next_checkpoint == st.next_checkpoint);
    REQUIRE(rt.buckets.size() == st.buckets.size());
    for (auto& [sig, acc] : st.buckets) {
        CHECK(rt.buckets.at(sig).sum == acc.sum);
        CHECK(rt.buckets.at(sig).carry == acc.carry);
    }
    REQUIRE(rt.checkpoints.size() == st.checkpoints.size());
    for (size_t i = 0; i < st.checkpoints.size(); ++i) {
        CHECK(rt.checkpoints[i].x == st.checkpoints[i].x);
        CHECK(rt.checkpoints[i].counts == st.checkpoints[i].counts);
    }

    // resuming from the reloaded state matches a fresh run
    race_extend(rt, 500000);
    auto fresh = race_counts(8, {1, 3, 5, 7}, 500000);
    CHECK(rt.counts == fresh.counts);
    for (auto& [sig, acc] : fresh.buckets)
        CHECK(rt.buckets.at(sig).sum == acc.sum);

    CHECK_THROWS_AS(load_race_trace("/nonexistent/prc.bin"), std::runtime_error);
}

TEST_CASE("checkpoints and csv export", "[race]") {
    auto st = race_counts(4, {3, 1}, 100000, 1.5);
    REQUIRE(!st.checkpoints.empty());
    for (size_t i = 1; i < st.checkpoints.size(); ++i)
        CHECK(st.checkpoints[i].x > st.checkpoints[i - 1].x);
    for (auto& cp : st.checkpoints)
        CHECK(cp.counts.size() == 2);

    std::ostringstream out;
    export_race_csv(out, st);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,count_3,count_1");
    size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == st.checkpoints.size());
}

TEST_CASE("known race verdicts at 1e7", "[race][slow]") {
    SECTION("mod 3: the non-residue class never trails") {
        auto st = race_counts(3, {2, 1}, 10000000);
        CHECK(std::abs(race_density(st, TieRule::strict) - 1.0) <= 1e-12);
        CHECK(st.lead_changes == 0);
    }
    SECTION("mod 4: strong but not total lead") {
        auto st = race_counts(4, {3, 1}, 10000000);
        double split = race_density(st, TieRule::split);
        CHECK(split >= 0.95);
        CHECK(split <= 0.99);
        CHECK(st.lead_changes == 48);
    }
}
