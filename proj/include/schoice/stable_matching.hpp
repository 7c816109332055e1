#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "schoice/model.hpp"
#include "schoice/rng.hpp"

namespace schoice {

/// A strict per-school order over students extending the weak priorities:
/// whenever i strictly outranks j, i comes first. Ties are broken either by
/// student input order or by a seeded uniform draw per tier.
class TieBreakRule {
public:
    static TieBreakRule by_input_order(const Problem& problem) {
        std::vector<std::vector<StudentIdx>> orders(problem.num_schools());
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
            for (const auto& tier : problem.tiers(c)) {
                auto sorted = tier;
                std::sort(sorted.begin(), sorted.end());
                orders[c].insert(orders[c].end(), sorted.begin(), sorted.end());
            }
        return TieBreakRule(problem, std::move(orders));
    }

    static TieBreakRule seeded(const Problem& problem, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::vector<StudentIdx>> orders(problem.num_schools());
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
            for (const auto& tier : problem.tiers(c)) {
                auto shuffled = tier;
                std::sort(shuffled.begin(), shuffled.end());
                rng.shuffle(shuffled);
                orders[c].insert(orders[c].end(), shuffled.begin(), shuffled.end());
            }
        return TieBreakRule(problem, std::move(orders));
    }

    const std::vector<StudentIdx>& order(SchoolIdx c) const { return order_[c]; }
    int rank(SchoolIdx c, StudentIdx i) const { return rank_[c][i]; }
    bool before(SchoolIdx c, StudentIdx i, StudentIdx j) const {
        return rank_[c][i] < rank_[c][j];
    }

private:
    TieBreakRule(const Problem& problem, std::vector<std::vector<StudentIdx>> orders)
        : order_(std::move(orders)) {
        rank_.assign(problem.num_schools(), std::vector<int>(problem.num_students(), -1));
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c) {
            for (int r = 0; r < static_cast<int>(order_[c].size()); ++r)
                rank_[c][order_[c][r]] = r;
            // Extension property: the strict order never inverts a strict
            // priority comparison.
            for (int r = 1; r < static_cast<int>(order_[c].size()); ++r)
                if (problem.higher_priority(c, order_[c][r], order_[c][r - 1]))
                    throw ValidationError(ValidationCode::OverlappingTiers,
                                          "tie-break order violates the priorities of school " +
                                              problem.school_name(c));
        }
    }

    std::vector<std::vector<StudentIdx>> order_; // [school] students, highest first
    std::vector<std::vector<int>> rank_;         // [school][student]
};

/// Student-proposing deferred acceptance on the tie-broken strict instance.
/// The output is stable for the tie-broken instance and hence for the
/// original weak priorities. Total capacity >= student count guarantees
/// every student ends up assigned.
inline Matching deferred_acceptance(const Problem& problem, const TieBreakRule& rule) {
    const int n = problem.num_students();
    std::vector<int> next_choice(n, 0);
    std::vector<SchoolIdx> held(n, -1);
    std::vector<std::vector<StudentIdx>> holders(problem.num_schools());
    std::deque<StudentIdx> pending;
    for (StudentIdx i = 0; i < n; ++i)
        pending.push_back(i);

    while (!pending.empty()) {
        StudentIdx i = pending.front();
        pending.pop_front();
        if (next_choice[i] >= problem.num_schools())
            throw Error("student exhausted every school despite sufficient capacity");
        SchoolIdx c = problem.preference(i)[next_choice[i]];
        auto& current = holders[c];
        current.push_back(i);
        std::sort(current.begin(), current.end(),
                  [&](StudentIdx a, StudentIdx b) { return rule.before(c, a, b); });
        if (static_cast<int>(current.size()) > problem.quota(c)) {
            StudentIdx bumped = current.back();
            current.pop_back();
            held[bumped] = -1;
            ++next_choice[bumped];
            pending.push_back(bumped);
        }
        if (std::find(current.begin(), current.end(), i) != current.end())
            held[i] = c;
    }
    return Matching(problem, std::move(held));
}

/// A Pareto-improving relocation: each listed student moves to the paired
/// school. Either a cyclic exchange of occupied seats or a single hop into
/// spare capacity; every mover strictly prefers the target and is
/// tier-maximal among the students desiring it.
struct ImprovementCycle {
    std::vector<std::pair<StudentIdx, SchoolIdx>> hops;
};

inline Matching apply_cycle(const Problem& problem, const Matching& m,
                            const ImprovementCycle& cycle) {
    auto assignment = m.assignment();
    for (const auto& [student, target] : cycle.hops) {
        if (!problem.prefers(student, target, m.school_of(student)))
            throw ValidationError(ValidationCode::BadMatching,
                                  "improvement hop does not improve student " +
                                      problem.student_name(student));
        assignment[student] = target;
    }
    return Matching(problem, std::move(assignment)); // re-validates capacity
}

namespace detail {

/// Per school: the students who strictly prefer it to their current seat,
/// restricted to the highest priority tier among them.
inline std::vector<std::vector<StudentIdx>> maximal_desirers(const Problem& problem,
                                                             const Matching& m) {
    std::vector<std::vector<StudentIdx>> out(problem.num_schools());
    for (SchoolIdx c = 0; c < problem.num_schools(); ++c) {
        int best_tier = -1;
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            if (!problem.prefers(i, c, m.school_of(i)))
                continue;
            int t = problem.tier(c, i);
            if (best_tier == -1 || t < best_tier) {
                best_tier = t;
                out[c].clear();
            }
            if (t == best_tier)
                out[c].push_back(i);
        }
    }
    return out;
}

} // namespace detail

/// Searches a stable matching for a Pareto-improving move that keeps it
/// stable: first a relocation of a tier-maximal desirer into spare capacity,
/// then a cyclic seat exchange among tier-maximal desirers (scanned from the
/// lowest-indexed student, shortest cycle by BFS). Returns nothing exactly
/// when the matching is constrained efficient. Throws MatchingUnstable if the
/// input is not stable.
inline std::optional<ImprovementCycle> find_stable_improvement_cycle(const Problem& problem,
                                                                     const Matching& m) {
    if (auto envy = has_justified_envy(problem, m))
        throw MatchingUnstable("matching is not stable: " +
                               problem.student_name(envy->envier) + " justifiably envies " +
                               problem.student_name(envy->envied) + " at " +
                               problem.school_name(envy->school));

    auto desirers = detail::maximal_desirers(problem, m);
    auto load = occupancy(problem, m);

    for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
        if (load[c] < problem.quota(c) && !desirers[c].empty())
            return ImprovementCycle{{{desirers[c].front(), c}}};

    // Exchange graph: x -> y when x is a tier-maximal desirer of y's seat.
    const int n = problem.num_students();
    std::vector<std::vector<StudentIdx>> edges(n);
    for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
        for (StudentIdx x : desirers[c])
            for (StudentIdx y = 0; y < n; ++y)
                if (m.school_of(y) == c)
                    edges[x].push_back(y);
    for (auto& adj : edges)
        std::sort(adj.begin(), adj.end());

    for (StudentIdx start = 0; start < n; ++start) {
        std::vector<int> parent(n, -1);
        std::vector<bool> seen(n, false);
        std::deque<StudentIdx> queue;
        seen[start] = true;
        queue.push_back(start);
        while (!queue.empty()) {
            StudentIdx x = queue.front();
            queue.pop_front();
            for (StudentIdx y : edges[x]) {
                if (y == start) {
                    std::vector<StudentIdx> members{x};
                    while (x != start) {
                        x = parent[x];
                        members.push_back(x);
                    }
                    std::reverse(members.begin(), members.end());
                    ImprovementCycle cycle;
                    for (std::size_t t = 0; t < members.size(); ++t) {
                        StudentIdx mover = members[t];
                        StudentIdx vacates = members[(t + 1) % members.size()];
                        cycle.hops.emplace_back(mover, m.school_of(vacates));
                    }
                    return cycle;
                }
                if (!seen[y]) {
                    seen[y] = true;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
    }
    return std::nullopt;
}

/// The two-phase construction of a constrained efficient stable matching:
/// deferred acceptance under the tie-break rule, then improvement cycles
/// until none remains. Deterministic given the rule.
inline Matching constrained_efficient_matching(const Problem& problem, const TieBreakRule& rule) {
    Matching m = deferred_acceptance(problem, rule);
    const long long cap =
        static_cast<long long>(problem.num_students()) * problem.num_schools() + 1;
    for (long long round = 0; round < cap; ++round) {
        auto cycle = find_stable_improvement_cycle(problem, m);
        if (!cycle)
            return m;
        m = apply_cycle(problem, m, *cycle);
    }
    // Unreachable: each cycle strictly lowers the total preference rank,
    // which is bounded by students * schools.
    throw Error("improvement cycle iteration failed to terminate");
}

} // namespace schoice
