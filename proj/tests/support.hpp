#pragma once

#include <string>
#include <utility>
#include <vector>

#include "schoice/audit.hpp"
#include "schoice/io.hpp"
#include "schoice/lottery.hpp"
#include "schoice/model.hpp"
#include "schoice/rng.hpp"

namespace test_support {

inline std::string data_path(const std::string& name) {
    return std::string(SCHOICE_DATA_DIR) + "/" + name;
}

inline schoice::io::Instance load_example1() {
    return schoice::io::load_instance(data_path("example1.json"));
}

/// Compact instance builder: preference and tier lists given positionally in
/// student/school declaration order.
struct Builder {
    schoice::ProblemData data;

    Builder& student(const std::string& id, std::vector<std::string> prefs) {
        data.students.push_back(id);
        data.preferences[id] = std::move(prefs);
        return *this;
    }
    Builder& school(const std::string& id, int quota,
                    std::vector<std::vector<std::string>> tiers) {
        data.schools.emplace_back(id, quota);
        data.priorities[id] = std::move(tiers);
        return *this;
    }
    schoice::Problem build() const { return schoice::Problem::validate(data); }
};

inline schoice::Matching named_matching(const schoice::Problem& p,
                                        const std::vector<std::string>& schools) {
    std::vector<schoice::SchoolIdx> assignment;
    for (const auto& id : schools)
        assignment.push_back(*p.find_school(id));
    return schoice::Matching(p, std::move(assignment));
}

/// Random capacity-respecting matching: shuffle the multiset of seats and
/// hand the first seats out in student order.
inline schoice::Matching random_matching(const schoice::Problem& p, schoice::Rng& rng) {
    std::vector<schoice::SchoolIdx> seats;
    for (schoice::SchoolIdx c = 0; c < p.num_schools(); ++c)
        for (int t = 0; t < p.quota(c); ++t)
            seats.push_back(c);
    rng.shuffle(seats);
    seats.resize(p.num_students());
    return schoice::Matching(p, std::move(seats));
}

/// Random lottery over at most `max_support` random matchings with random
/// rational weights (duplicates merge, so the support may be smaller).
inline schoice::Lottery random_lottery(const schoice::Problem& p, schoice::Rng& rng,
                                       int max_support = 4) {
    int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_support)));
    std::vector<schoice::BigInt> weights(count);
    schoice::BigInt total = 0;
    for (auto& w : weights) {
        w = 1 + rng.below(20);
        total += w;
    }
    std::vector<std::pair<schoice::Matching, schoice::Rational>> entries;
    for (int t = 0; t < count; ++t)
        entries.emplace_back(random_matching(p, rng), schoice::Rational(weights[t], total));
    return schoice::Lottery(p, std::move(entries));
}

/// Definition-level digraph construction, kept deliberately naive (per-edge
/// quantifier loops) as an independent reference for the library's builder.
inline schoice::PairDigraph reference_digraph(const schoice::Problem& p,
                                              const schoice::RandomMatching& rm) {
    schoice::PairDigraph g;
    for (schoice::StudentIdx i = 0; i < p.num_students(); ++i)
        for (schoice::SchoolIdx c = 0; c < p.num_schools(); ++c)
            if (rm.prob(i, c) > 0)
                g.nodes.emplace_back(i, c);
    const int size = static_cast<int>(g.nodes.size());
    g.pointed_edges.assign(size, {});
    g.arrow_edges.assign(size, {});
    auto points = [&](int u, int v) {
        auto [i, c] = g.nodes[u];
        auto [j, d] = g.nodes[v];
        (void)j;
        return p.prefers(i, d, c);
    };
    for (int u = 0; u < size; ++u)
        for (int v = 0; v < size; ++v) {
            if (!points(u, v))
                continue;
            g.pointed_edges[u].push_back(v);
            bool maximal = true;
            for (int w = 0; w < size && maximal; ++w)
                if (points(w, v) &&
                    !p.weakly_higher_priority(g.nodes[v].second, g.nodes[u].first,
                                              g.nodes[w].first))
                    maximal = false;
            if (maximal)
                g.arrow_edges[u].push_back(v);
        }
    return g;
}

} // namespace test_support
