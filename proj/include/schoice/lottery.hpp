#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "schoice/model.hpp"
#include "schoice/rational.hpp"
#include "schoice/rng.hpp"

namespace schoice {

/// A probability distribution over matchings with finite support. Exact
/// rational weights, strictly positive, summing to one; duplicate matchings
/// are merged at construction.
class Lottery {
public:
    Lottery(const Problem& problem, std::vector<std::pair<Matching, Rational>> entries) {
        std::map<Matching, Rational> merged;
        for (auto& [m, w] : entries) {
            if (m.num_students() != problem.num_students())
                throw ValidationError(ValidationCode::BadLottery,
                                      "support matching does not match the problem");
            Matching(problem, m.assignment()); // re-validate against this problem
            if (w <= 0)
                throw ValidationError(ValidationCode::BadLottery,
                                      "non-positive probability " + rational_to_string(w));
            merged[std::move(m)] += w;
        }
        Rational total = 0;
        for (auto& [m, w] : merged) {
            total += w;
            support_.emplace_back(m, w);
        }
        if (total != 1)
            throw ValidationError(ValidationCode::BadLottery,
                                  "probabilities sum to " + rational_to_string(total) +
                                      ", expected 1");
    }

    /// Probability one on a single matching.
    static Lottery degenerate(Matching m) {
        Lottery out;
        out.support_.emplace_back(std::move(m), Rational(1));
        return out;
    }

    const std::vector<std::pair<Matching, Rational>>& support() const { return support_; }
    int support_size() const { return static_cast<int>(support_.size()); }

    /// Probability mass on a specific matching (0 when outside the support).
    Rational probability_of(const Matching& m) const {
        for (const auto& [entry, w] : support_)
            if (entry == m)
                return w;
        return Rational(0);
    }

private:
    Lottery() = default;

    std::vector<std::pair<Matching, Rational>> support_; // sorted by matching, weights > 0
};

inline Lottery degenerate(Matching m) { return Lottery::degenerate(std::move(m)); }

/// Per-student marginal distribution over schools. Rows sum to one.
class RandomMatching {
public:
    RandomMatching(int num_students, int num_schools)
        : rows_(num_students, std::vector<Rational>(num_schools, Rational(0))) {}

    RandomMatching(const Problem& problem, std::vector<std::vector<Rational>> rows)
        : rows_(std::move(rows)) {
        if (static_cast<int>(rows_.size()) != problem.num_students())
            throw ValidationError(ValidationCode::BadLottery, "marginal matrix has wrong height");
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            if (static_cast<int>(rows_[i].size()) != problem.num_schools())
                throw ValidationError(ValidationCode::BadLottery,
                                      "marginal row of student " + problem.student_name(i) +
                                          " has wrong width");
            Rational total = 0;
            for (const auto& v : rows_[i]) {
                if (v < 0)
                    throw ValidationError(ValidationCode::BadLottery,
                                          "negative marginal for student " +
                                              problem.student_name(i));
                total += v;
            }
            if (total != 1)
                throw ValidationError(ValidationCode::BadLottery,
                                      "marginals of student " + problem.student_name(i) +
                                          " sum to " + rational_to_string(total));
        }
    }

    const Rational& prob(StudentIdx i, SchoolIdx c) const { return rows_[i][c]; }
    const std::vector<Rational>& row(StudentIdx i) const { return rows_[i]; }
    int num_students() const { return static_cast<int>(rows_.size()); }
    int num_schools() const { return rows_.empty() ? 0 : static_cast<int>(rows_[0].size()); }

    friend bool operator==(const RandomMatching&, const RandomMatching&) = default;

    friend RandomMatching marginals(const Problem&, const Lottery&);
    friend RandomMatching ete_reassignment_marginals(const GroupPartition&,
                                                     const RandomMatching&);

private:
    std::vector<std::vector<Rational>> rows_;
};

/// The marginal assignment probabilities induced by a lottery: the chance
/// student i receives school c is the total weight of support matchings that
/// send i to c.
inline RandomMatching marginals(const Problem& problem, const Lottery& lot) {
    RandomMatching out(problem.num_students(), problem.num_schools());
    for (const auto& [m, w] : lot.support())
        for (StudentIdx i = 0; i < problem.num_students(); ++i)
            out.rows_[i][m.school_of(i)] += w;
    return out;
}

/// For each student and school c: the probability of receiving a school the
/// student weakly prefers to c. Weakly increasing down each preference list,
/// ending at exactly one.
class UpperCDF {
public:
    UpperCDF(const Problem& problem, const RandomMatching& rm)
        : values_(problem.num_students(), std::vector<Rational>(problem.num_schools())) {
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            Rational running = 0;
            for (SchoolIdx c : problem.preference(i)) {
                running += rm.prob(i, c);
                values_[i][c] = running;
            }
        }
    }

    const Rational& value(StudentIdx i, SchoolIdx c) const { return values_[i][c]; }

private:
    std::vector<std::vector<Rational>> values_;
};

inline UpperCDF upper_cdf(const Problem& problem, const RandomMatching& rm) {
    return UpperCDF(problem, rm);
}

/// First-order stochastic dominance of `second` over `first` for one
/// student, classified from the two upper CDFs. A pointwise >= that is not
/// an identity is already strict, so the weak label is never produced.
enum class StudentDominance {
    incomparable,
    equal,
    second_weakly_dominates,
    second_strictly_dominates,
};

inline StudentDominance compare_student(const Problem& problem, StudentIdx i,
                                        const RandomMatching& first,
                                        const RandomMatching& second) {
    Rational cum_first = 0;
    Rational cum_second = 0;
    bool some_strict = false;
    bool all_weak = true;
    for (SchoolIdx c : problem.preference(i)) {
        cum_first += first.prob(i, c);
        cum_second += second.prob(i, c);
        if (cum_second > cum_first)
            some_strict = true;
        else if (cum_second < cum_first)
            all_weak = false;
    }
    if (!all_weak)
        return StudentDominance::incomparable;
    if (!some_strict)
        return StudentDominance::equal;
    return StudentDominance::second_strictly_dominates;
}

/// True iff `dominator` weakly first-order stochastically dominates
/// `dominated` for every student and strictly for at least one.
inline bool ordinally_dominates(const Problem& problem, const Lottery& dominator,
                                const Lottery& dominated) {
    RandomMatching rm_dominated = marginals(problem, dominated);
    RandomMatching rm_dominator = marginals(problem, dominator);
    bool some_strict = false;
    for (StudentIdx i = 0; i < problem.num_students(); ++i) {
        switch (compare_student(problem, i, rm_dominated, rm_dominator)) {
        case StudentDominance::second_strictly_dominates:
            some_strict = true;
            break;
        case StudentDominance::equal:
        case StudentDominance::second_weakly_dominates:
            break;
        case StudentDominance::incomparable:
            return false;
        }
    }
    return some_strict;
}

namespace detail {

/// All within-group permutations of each group, as reorderings of the
/// group's member list.
inline std::vector<std::vector<std::vector<StudentIdx>>>
group_permutations(const GroupPartition& groups) {
    std::vector<std::vector<std::vector<StudentIdx>>> out(groups.num_groups());
    for (int g = 0; g < groups.num_groups(); ++g) {
        auto perm = groups.group(g);
        std::sort(perm.begin(), perm.end());
        do {
            out[g].push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
}

} // namespace detail

inline BigInt group_permutation_count(const GroupPartition& groups) {
    BigInt count = 1;
    for (const auto& group : groups.groups())
        count *= factorial(static_cast<int>(group.size()));
    return count;
}

/// Explicit-support form of the ETE reassignment: every support matching is
/// replaced by the uniform mixture over all within-group relabelings of its
/// seats, and duplicate matchings are merged. Throws SupportTooLarge when the
/// number of relabelings exceeds `max_permutations`; the marginal and
/// sampling forms remain available at any scale.
inline Lottery ete_reassignment_support(const Problem& problem, const GroupPartition& groups,
                                        const Lottery& lot,
                                        std::uint64_t max_permutations = 10000) {
    const BigInt total = group_permutation_count(groups);
    if (total > max_permutations)
        throw SupportTooLarge(
            "within-group permutation count " + total.str() + " exceeds the bound " +
            std::to_string(max_permutations) +
            "; use the marginal or sampling form for instances of this size");
    const Rational share(BigInt(1), total);

    auto perms = detail::group_permutations(groups);
    std::map<Matching, Rational> merged;
    std::vector<std::size_t> pick(groups.num_groups(), 0);
    for (const auto& [m, w] : lot.support()) {
        std::fill(pick.begin(), pick.end(), 0);
        while (true) {
            auto assignment = m.assignment();
            for (int g = 0; g < groups.num_groups(); ++g) {
                const auto& members = groups.group(g);
                const auto& image = perms[g][pick[g]];
                for (std::size_t t = 0; t < members.size(); ++t)
                    assignment[members[t]] = m.school_of(image[t]);
            }
            merged[Matching(problem, std::move(assignment))] += w * share;

            int g = 0;
            while (g < groups.num_groups() && ++pick[g] == perms[g].size())
                pick[g++] = 0;
            if (g == groups.num_groups())
                break;
        }
    }
    std::vector<std::pair<Matching, Rational>> entries(merged.begin(), merged.end());
    return Lottery(problem, std::move(entries));
}

/// Marginal form of the ETE reassignment: within every group of equals each
/// student's row becomes the group average. Polynomial in the instance size,
/// so this is the scalable route.
inline RandomMatching ete_reassignment_marginals(const GroupPartition& groups,
                                                 const RandomMatching& rm) {
    RandomMatching out(rm.num_students(), rm.num_schools());
    for (const auto& group : groups.groups()) {
        const Rational share(1, static_cast<int>(group.size()));
        std::vector<Rational> average(rm.num_schools(), Rational(0));
        for (StudentIdx i : group)
            for (SchoolIdx c = 0; c < rm.num_schools(); ++c)
                average[c] += rm.prob(i, c);
        for (SchoolIdx c = 0; c < rm.num_schools(); ++c)
            average[c] *= share;
        for (StudentIdx i : group)
            out.rows_[i] = average;
    }
    return out;
}

/// One draw of the two-step realization: pick a matching according to the
/// lottery, then redistribute each group's seats uniformly at random among
/// its members. Deterministic given the seed.
inline Matching sample_ete_realization(const Problem& problem, const GroupPartition& groups,
                                       const Lottery& lot, std::uint64_t seed) {
    Rng rng(seed);

    BigInt common_den = 1;
    for (const auto& [m, w] : lot.support())
        common_den = boost::multiprecision::lcm(common_den, denominator(w));
    BigInt draw = rng.below_big(common_den);
    const Matching* realized = nullptr;
    BigInt cumulative = 0;
    for (const auto& [m, w] : lot.support()) {
        cumulative += numerator(w) * (common_den / denominator(w));
        if (draw < cumulative) {
            realized = &m;
            break;
        }
    }

    auto assignment = realized->assignment();
    for (const auto& group : groups.groups()) {
        std::vector<SchoolIdx> seats;
        seats.reserve(group.size());
        for (StudentIdx i : group)
            seats.push_back(assignment[i]);
        rng.shuffle(seats);
        for (std::size_t t = 0; t < group.size(); ++t)
            assignment[group[t]] = seats[t];
    }
    return Matching(problem, std::move(assignment));
}

/// A violation of equal treatment of equals: two students of one group whose
/// marginal probabilities differ at some school.
struct EteDiscrepancy {
    int group = -1;
    StudentIdx first = -1;
    StudentIdx second = -1;
    SchoolIdx school = -1;
};

inline std::optional<EteDiscrepancy> find_ete_discrepancy(const GroupPartition& groups,
                                                          const RandomMatching& rm) {
    for (int g = 0; g < groups.num_groups(); ++g) {
        const auto& members = groups.group(g);
        for (std::size_t t = 1; t < members.size(); ++t)
            for (SchoolIdx c = 0; c < rm.num_schools(); ++c)
                if (rm.prob(members[t], c) != rm.prob(members[0], c))
                    return EteDiscrepancy{g, members[0], members[t], c};
    }
    return std::nullopt;
}

/// True iff all members of every group of equals receive identical marginal
/// distributions (exact comparison of probability vectors).
inline bool satisfies_ete(const GroupPartition& groups, const RandomMatching& rm) {
    return !find_ete_discrepancy(groups, rm).has_value();
}

} // namespace schoice
