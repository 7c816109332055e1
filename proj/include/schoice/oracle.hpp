#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schoice/lottery.hpp"
#include "schoice/model.hpp"
#include "schoice/rng.hpp"

namespace schoice::oracle {

/// Hard limits for brute-force enumeration. Oracles refuse oversized
/// instances instead of truncating, so they stay trustworthy as ground truth.
struct EnumerationBudget {
    int max_students = 6;
    long long max_total_assignments = 10'000'000;
};

/// Every capacity-respecting total assignment, in lexicographic order of the
/// assignment vector. Throws BudgetExceeded when the instance is too large.
inline std::vector<Matching> enumerate_matchings(const Problem& problem,
                                                 const EnumerationBudget& budget = {}) {
    if (problem.num_students() > budget.max_students)
        throw BudgetExceeded("instance has " + std::to_string(problem.num_students()) +
                             " students, budget allows " + std::to_string(budget.max_students));
    std::vector<Matching> out;
    std::vector<SchoolIdx> assignment(problem.num_students(), -1);
    std::vector<int> remaining(problem.num_schools());
    for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
        remaining[c] = problem.quota(c);

    auto recurse = [&](auto&& self, StudentIdx i) -> void {
        if (i == problem.num_students()) {
            if (static_cast<long long>(out.size()) >= budget.max_total_assignments)
                throw BudgetExceeded("more than " +
                                     std::to_string(budget.max_total_assignments) +
                                     " matchings");
            out.emplace_back(problem, assignment);
            return;
        }
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c) {
            if (remaining[c] == 0)
                continue;
            --remaining[c];
            assignment[i] = c;
            self(self, i + 1);
            ++remaining[c];
        }
    };
    recurse(recurse, 0);
    return out;
}

inline std::vector<Matching> enumerate_stable(const Problem& problem,
                                              const EnumerationBudget& budget = {}) {
    std::vector<Matching> out;
    for (auto& m : enumerate_matchings(problem, budget))
        if (is_stable(problem, m))
            out.push_back(std::move(m));
    return out;
}

/// Definition-level check: stable and not Pareto dominated by any stable
/// matching, verified by full enumeration.
inline bool constrained_efficient(const Problem& problem, const Matching& m,
                                  const EnumerationBudget& budget = {}) {
    if (!is_stable(problem, m))
        return false;
    for (const auto& other : enumerate_stable(problem, budget))
        if (pareto_dominates(problem, other, m))
            return false;
    return true;
}

/// Literal quantifier sweep over students, a school, and ordered support
/// pairs; the reference the marginal-level audit check is tested against.
inline bool ex_ante_stable(const Problem& problem, const Lottery& lot) {
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        for (StudentIdx j = 0; j < problem.num_students(); ++j) {
            if (i == j)
                continue;
            for (SchoolIdx s = 0; s < problem.num_schools(); ++s) {
                if (!problem.higher_priority(s, i, j))
                    continue;
                for (const auto& [mu, w_mu] : lot.support()) {
                    if (!problem.prefers(i, s, mu.school_of(i)))
                        continue;
                    for (const auto& [mu_prime, w_prime] : lot.support())
                        if (mu_prime.school_of(j) == s)
                            return false;
                }
            }
        }
    return true;
}

struct RandomProblemParams {
    int num_students = 4;
    int num_schools = 3;
    /// Probability that consecutive students in a school's random order are
    /// tied: 0 makes every priority strict, 1 makes one school-wide tier.
    double tie_density = 0.5;
};

/// Seeded random instance: uniform preference orders, random ordered tier
/// partitions with the given tie density, and random quotas covering all
/// students. Identical output for identical inputs.
inline Problem random_problem(std::uint64_t seed, const RandomProblemParams& params) {
    Rng rng(seed);
    const int n = params.num_students;
    const int m = params.num_schools;

    ProblemData data;
    for (int i = 0; i < n; ++i)
        data.students.push_back("s" + std::to_string(i + 1));
    std::vector<int> quotas(m, 1);
    int total = m;
    for (int c = 0; c < m; ++c) {
        int extra = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, n / m + 1))));
        quotas[c] += extra;
        total += extra;
    }
    while (total < n) {
        ++quotas[rng.below(static_cast<std::uint64_t>(m))];
        ++total;
    }
    for (int c = 0; c < m; ++c)
        data.schools.emplace_back("c" + std::to_string(c + 1), quotas[c]);

    for (int i = 0; i < n; ++i) {
        std::vector<int> order(m);
        for (int c = 0; c < m; ++c)
            order[c] = c;
        rng.shuffle(order);
        auto& prefs = data.preferences[data.students[i]];
        for (int c : order)
            prefs.push_back(data.schools[c].first);
    }

    for (int c = 0; c < m; ++c) {
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i)
            order[i] = i;
        rng.shuffle(order);
        auto& tiers = data.priorities[data.schools[c].first];
        for (int i = 0; i < n; ++i) {
            if (i == 0 || !rng.bernoulli(params.tie_density))
                tiers.emplace_back();
            tiers.back().push_back(data.students[order[i]]);
        }
    }
    return Problem::validate(data);
}

} // namespace schoice::oracle
