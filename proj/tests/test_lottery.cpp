#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "schoice/lottery.hpp"
#include "schoice/oracle.hpp"
#include "schoice/stable_matching.hpp"

#include "support.hpp"

using namespace schoice;
using test_support::Builder;
using test_support::named_matching;

namespace {

Rational marginal_of(const Problem& p, const RandomMatching& rm, const char* student,
                     const char* school) {
    return rm.prob(*p.find_student(student), *p.find_school(school));
}

} // namespace

TEST_CASE("lottery construction", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto mu = named_matching(p, {"a", "c", "a", "c", "d", "b"});
    auto nu = named_matching(p, {"a", "a", "c", "c", "b", "d"});

    SECTION("degenerate lottery has a single unit atom") {
        auto lot = degenerate(mu);
        REQUIRE(lot.support_size() == 1);
        CHECK(lot.support()[0].second == 1);
        auto rm = marginals(p, lot);
        for (StudentIdx i = 0; i < p.num_students(); ++i)
            for (SchoolIdx c = 0; c < p.num_schools(); ++c)
                CHECK(rm.prob(i, c) == (mu.school_of(i) == c ? 1 : 0));
    }
    SECTION("duplicate support entries merge") {
        Lottery lot(p, {{mu, Rational(1, 4)}, {mu, Rational(1, 4)}, {nu, Rational(1, 2)}});
        REQUIRE(lot.support_size() == 2);
        CHECK(lot.probability_of(mu) == Rational(1, 2));
    }
    SECTION("weights must be positive and sum to one") {
        CHECK_THROWS_AS(Lottery(p, {{mu, Rational(1, 2)}}), ValidationError);
        CHECK_THROWS_AS(Lottery(p, {{mu, Rational(3, 2)}, {nu, Rational(-1, 2)}}),
                        ValidationError);
        CHECK_THROWS_AS(Lottery(p, {{mu, Rational(1, 2)}, {nu, Rational(1, 3)}}),
                        ValidationError);
    }
}

TEST_CASE("marginals of the example lotteries", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;

    SECTION("uniform reassignment lottery") {
        auto lot = io::load_lottery(test_support::data_path("example1_reassigned.json"), p);
        auto rm = marginals(p, lot);
        for (const char* s : {"i", "i'", "j", "j'"}) {
            CHECK(marginal_of(p, rm, s, "a") == Rational(1, 2));
            CHECK(marginal_of(p, rm, s, "c") == Rational(1, 2));
            CHECK(marginal_of(p, rm, s, "b") == 0);
            CHECK(marginal_of(p, rm, s, "d") == 0);
        }
        CHECK(marginal_of(p, rm, "k", "d") == 1);
        CHECK(marginal_of(p, rm, "l", "b") == 1);
    }
    SECTION("half-half mixture of two stable matchings") {
        auto lot = io::load_lottery(test_support::data_path("example1_mix.json"), p);
        auto rm = marginals(p, lot);
        CHECK(marginal_of(p, rm, "k", "b") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "k", "d") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "l", "b") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "l", "d") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "i", "a") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "i", "c") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "j'", "a") == Rational(1, 2));
        CHECK(marginal_of(p, rm, "j'", "c") == Rational(1, 2));
    }
}

TEST_CASE("upper CDF runs along each preference list", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto k = *p.find_student("k");

    auto reassigned = io::load_lottery(test_support::data_path("example1_reassigned.json"), p);
    auto cdf = upper_cdf(p, marginals(p, reassigned));
    // k ranks b, d, a, c; all mass sits on d.
    CHECK(cdf.value(k, *p.find_school("b")) == 0);
    CHECK(cdf.value(k, *p.find_school("d")) == 1);
    CHECK(cdf.value(k, *p.find_school("a")) == 1);
    CHECK(cdf.value(k, *p.find_school("c")) == 1);

    auto mix = io::load_lottery(test_support::data_path("example1_mix.json"), p);
    auto cdf_mix = upper_cdf(p, marginals(p, mix));
    CHECK(cdf_mix.value(k, *p.find_school("b")) == Rational(1, 2));
    CHECK(cdf_mix.value(k, *p.find_school("d")) == 1);
}

TEST_CASE("upper CDF is monotone and ends at one", "[lottery]") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        oracle::RandomProblemParams params;
        params.num_students = 5;
        params.num_schools = 4;
        params.tie_density = 0.5;
        Problem p = oracle::random_problem(seed, params);
        Rng rng(seed);
        auto lot = test_support::random_lottery(p, rng);
        auto cdf = upper_cdf(p, marginals(p, lot));
        for (StudentIdx i = 0; i < p.num_students(); ++i) {
            Rational previous = 0;
            for (SchoolIdx c : p.preference(i)) {
                CHECK(cdf.value(i, c) >= previous);
                previous = cdf.value(i, c);
            }
            CHECK(previous == 1);
        }
    }
}

TEST_CASE("per-student stochastic dominance classification", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto reassigned =
        marginals(p, io::load_lottery(test_support::data_path("example1_reassigned.json"), p));
    auto mix = marginals(p, io::load_lottery(test_support::data_path("example1_mix.json"), p));

    CHECK(compare_student(p, *p.find_student("k"), reassigned, mix) ==
          StudentDominance::second_strictly_dominates);
    CHECK(compare_student(p, *p.find_student("l"), reassigned, mix) ==
          StudentDominance::second_strictly_dominates);
    CHECK(compare_student(p, *p.find_student("i"), reassigned, mix) ==
          StudentDominance::equal);
    CHECK(compare_student(p, *p.find_student("k"), mix, reassigned) ==
          StudentDominance::incomparable);
    CHECK(compare_student(p, *p.find_student("j"), mix, mix) == StudentDominance::equal);
}

TEST_CASE("ordinal dominance on the example lotteries", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto reassigned = io::load_lottery(test_support::data_path("example1_reassigned.json"), p);
    auto mix = io::load_lottery(test_support::data_path("example1_mix.json"), p);
    auto alt = io::load_lottery(test_support::data_path("example1_alt.json"), p);

    CHECK(ordinally_dominates(p, mix, reassigned));
    CHECK(ordinally_dominates(p, mix, alt));
    CHECK_FALSE(ordinally_dominates(p, reassigned, mix));
    CHECK_FALSE(ordinally_dominates(p, alt, mix));
    CHECK_FALSE(ordinally_dominates(p, reassigned, alt)); // identical marginals
    CHECK_FALSE(ordinally_dominates(p, alt, reassigned));
    CHECK_FALSE(ordinally_dominates(p, mix, mix));
}

TEST_CASE("ordinal dominance is irreflexive and transitive", "[lottery]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        oracle::RandomProblemParams params;
        params.num_students = 4;
        params.num_schools = 3;
        params.tie_density = 0.5;
        Problem p = oracle::random_problem(seed, params);
        Rng rng(seed + 99);
        std::vector<Lottery> pool;
        for (int t = 0; t < 6; ++t)
            pool.push_back(test_support::random_lottery(p, rng));
        for (const auto& a : pool)
            CHECK_FALSE(ordinally_dominates(p, a, a));
        for (const auto& a : pool)
            for (const auto& b : pool)
                for (const auto& c : pool)
                    if (ordinally_dominates(p, a, b) && ordinally_dominates(p, b, c))
                        CHECK(ordinally_dominates(p, a, c));
    }
}

TEST_CASE("explicit-support reassignment of the example matching", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto mu_star = named_matching(p, {"a", "c", "a", "c", "d", "b"});
    auto reassigned = ete_reassignment_support(p, instance.groups, degenerate(mu_star));

    REQUIRE(reassigned.support_size() == 4);
    std::set<Matching> expected{
        named_matching(p, {"a", "c", "a", "c", "d", "b"}),
        named_matching(p, {"c", "a", "a", "c", "d", "b"}),
        named_matching(p, {"c", "a", "c", "a", "d", "b"}),
        named_matching(p, {"a", "c", "c", "a", "d", "b"}),
    };
    for (const auto& [m, w] : reassigned.support()) {
        CHECK(w == Rational(1, 4));
        CHECK(expected.count(m) == 1);
    }
}

TEST_CASE("reassignment edge cases", "[lottery]") {
    SECTION("singleton groups leave the lottery unchanged") {
        Problem p = Builder{}
                        .student("x", {"s", "t"})
                        .student("y", {"t", "s"})
                        .school("s", 1, {{"x"}, {"y"}})
                        .school("t", 1, {{"y"}, {"x"}})
                        .build();
        auto groups = GroupPartition::compute(p);
        REQUIRE(groups.num_groups() == 2);
        auto lot = degenerate(named_matching(p, {"s", "t"}));
        auto reassigned = ete_reassignment_support(p, groups, lot);
        REQUIRE(reassigned.support_size() == 1);
        CHECK(reassigned.support()[0].first == lot.support()[0].first);
    }
    SECTION("a group sharing one school collapses by symmetry") {
        Problem p = Builder{}
                        .student("x", {"s", "t"})
                        .student("y", {"s", "t"})
                        .school("s", 2, {{"x", "y"}})
                        .school("t", 2, {{"x", "y"}})
                        .build();
        auto groups = GroupPartition::compute(p);
        REQUIRE(groups.num_groups() == 1);
        auto lot = degenerate(named_matching(p, {"s", "s"}));
        auto reassigned = ete_reassignment_support(p, groups, lot);
        REQUIRE(reassigned.support_size() == 1);
        CHECK(reassigned.support()[0].second == 1);
    }
    SECTION("the original matching stays in its own reassignment's support") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            oracle::RandomProblemParams params;
            params.num_students = 5;
            params.num_schools = 3;
            params.tie_density = 1.0;
            Problem p = oracle::random_problem(seed, params);
            auto groups = GroupPartition::compute(p);
            Rng rng(seed);
            auto m = test_support::random_matching(p, rng);
            auto reassigned = ete_reassignment_support(p, groups, degenerate(m));
            auto share = Rational(BigInt(1), group_permutation_count(groups));
            CHECK(reassigned.probability_of(m) >= share);
        }
    }
    SECTION("oversized permutation counts are refused with advice") {
        Builder b;
        std::vector<std::string> all;
        for (int t = 0; t < 8; ++t)
            all.push_back("x" + std::to_string(t));
        for (const auto& id : all)
            b.student(id, {"s"});
        b.school("s", 8, {all});
        Problem p = b.build();
        auto groups = GroupPartition::compute(p);
        REQUIRE(group_permutation_count(groups) == 40320);
        Rng rng(1);
        auto lot = degenerate(test_support::random_matching(p, rng));
        CHECK_THROWS_AS(ete_reassignment_support(p, groups, lot), SupportTooLarge);
        CHECK_NOTHROW(ete_reassignment_support(p, groups, lot, 50000));
    }
}

TEST_CASE("group-averaged marginals reproduce the example block", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto mu_star = named_matching(p, {"a", "c", "a", "c", "d", "b"});
    auto rm = ete_reassignment_marginals(instance.groups, marginals(p, degenerate(mu_star)));
    for (const char* s : {"i", "i'", "j", "j'"}) {
        CHECK(marginal_of(p, rm, s, "a") == Rational(1, 2));
        CHECK(marginal_of(p, rm, s, "c") == Rational(1, 2));
    }
    CHECK(marginal_of(p, rm, "k", "d") == 1);
    CHECK(marginal_of(p, rm, "l", "b") == 1);

    // with singleton groups the averaging is the identity
    Problem singles = Builder{}
                          .student("x", {"s", "t"})
                          .student("y", {"t", "s"})
                          .school("s", 1, {{"x"}, {"y"}})
                          .school("t", 1, {{"y"}, {"x"}})
                          .build();
    Rng rng(21);
    auto original = marginals(singles, test_support::random_lottery(singles, rng));
    CHECK(ete_reassignment_marginals(GroupPartition::compute(singles), original) == original);
}

TEST_CASE("support and marginal reassignment routes agree", "[lottery]") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        oracle::RandomProblemParams params;
        params.num_students = 5;
        params.num_schools = 3;
        params.tie_density = (seed % 2) ? 1.0 : 0.6;
        Problem p = oracle::random_problem(seed, params);
        auto groups = GroupPartition::compute(p);
        Rng rng(seed + 7);
        auto lot = test_support::random_lottery(p, rng, 5);
        auto via_support = marginals(p, ete_reassignment_support(p, groups, lot));
        auto via_rows = ete_reassignment_marginals(groups, marginals(p, lot));
        CHECK(via_support == via_rows);
    }
}

TEST_CASE("reassigned marginals always treat equals equally", "[lottery]") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        oracle::RandomProblemParams params;
        params.num_students = 6;
        params.num_schools = 3;
        params.tie_density = 1.0;
        Problem p = oracle::random_problem(seed, params);
        auto groups = GroupPartition::compute(p);
        Rng rng(seed);
        auto rm = marginals(p, test_support::random_lottery(p, rng));
        auto averaged = ete_reassignment_marginals(groups, rm);
        CHECK(satisfies_ete(groups, averaged));
        // Averaging a group-constant matrix changes nothing.
        CHECK(ete_reassignment_marginals(groups, averaged) == averaged);
    }
}

TEST_CASE("reassignment conserves each school's expected enrollment", "[lottery]") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        oracle::RandomProblemParams params;
        params.num_students = 5;
        params.num_schools = 4;
        params.tie_density = 0.9;
        Problem p = oracle::random_problem(seed, params);
        auto groups = GroupPartition::compute(p);
        Rng rng(seed + 13);
        auto rm = marginals(p, test_support::random_lottery(p, rng));
        auto averaged = ete_reassignment_marginals(groups, rm);
        for (SchoolIdx c = 0; c < p.num_schools(); ++c) {
            Rational before = 0, after = 0;
            for (StudentIdx i = 0; i < p.num_students(); ++i) {
                before += rm.prob(i, c);
                after += averaged.prob(i, c);
            }
            CHECK(before == after);
        }
    }
}

TEST_CASE("equal treatment of equals predicate", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto mu_star = named_matching(p, {"a", "c", "a", "c", "d", "b"});

    auto reassigned = io::load_lottery(test_support::data_path("example1_reassigned.json"), p);
    CHECK(satisfies_ete(instance.groups, marginals(p, reassigned)));

    auto discrepancy =
        find_ete_discrepancy(instance.groups, marginals(p, degenerate(mu_star)));
    REQUIRE(discrepancy.has_value()); // i holds a for sure, i' holds c for sure
    CHECK(p.student_name(discrepancy->first) == "i");
    CHECK(p.student_name(discrepancy->second) == "i'");

    Problem singles = Builder{}
                          .student("x", {"s", "t"})
                          .student("y", {"t", "s"})
                          .school("s", 1, {{"x"}, {"y"}})
                          .school("t", 1, {{"y"}, {"x"}})
                          .build();
    Rng rng(5);
    auto lot = test_support::random_lottery(singles, rng);
    CHECK(satisfies_ete(GroupPartition::compute(singles), marginals(singles, lot)));
}

TEST_CASE("two-step sampling", "[lottery]") {
    auto instance = test_support::load_example1();
    const Problem& p = instance.problem;
    auto mu_star = named_matching(p, {"a", "c", "a", "c", "d", "b"});

    SECTION("degenerate lottery with singleton groups returns the matching") {
        Problem singles = Builder{}
                              .student("x", {"s", "t"})
                              .student("y", {"t", "s"})
                              .school("s", 1, {{"x"}, {"y"}})
                              .school("t", 1, {{"y"}, {"x"}})
                              .build();
        auto groups = GroupPartition::compute(singles);
        auto m = named_matching(singles, {"s", "t"});
        for (std::uint64_t seed : {0, 1, 17, 123456})
            CHECK(sample_ete_realization(singles, groups, degenerate(m), seed) == m);
    }
    SECTION("a group sharing one school is fixed under resampling") {
        Problem p2 = Builder{}
                         .student("x", {"s", "t"})
                         .student("y", {"s", "t"})
                         .school("s", 2, {{"x", "y"}})
                         .school("t", 2, {{"x", "y"}})
                         .build();
        auto groups = GroupPartition::compute(p2);
        auto m = named_matching(p2, {"s", "s"});
        for (std::uint64_t seed = 0; seed < 50; ++seed)
            CHECK(sample_ete_realization(p2, groups, degenerate(m), seed) == m);
    }
    SECTION("draws are deterministic given the seed") {
        auto lot = degenerate(mu_star);
        for (std::uint64_t seed = 0; seed < 10; ++seed)
            CHECK(sample_ete_realization(p, instance.groups, lot, seed) ==
                  sample_ete_realization(p, instance.groups, lot, seed));
    }
    SECTION("draws land in the reassignment's support at plausible rates") {
        auto lot = degenerate(mu_star);
        auto reassigned = ete_reassignment_support(p, instance.groups, lot);
        std::map<Matching, int> counts;
        const int draws = 4000;
        for (int t = 0; t < draws; ++t)
            ++counts[sample_ete_realization(p, instance.groups, lot, 900 + t)];
        REQUIRE(counts.size() == 4);
        for (const auto& [m, count] : counts) {
            CHECK(reassigned.probability_of(m) == Rational(1, 4));
            CHECK(count > draws / 4 - 200);
            CHECK(count < draws / 4 + 200);
        }
    }
}
