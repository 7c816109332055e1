#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "schoice/lottery.hpp"
#include "schoice/model.hpp"

namespace schoice {

/// Directed graph on the (student, school) pairs that occur with positive
/// probability. pointed(u, v) holds when u's student strictly prefers v's
/// school to u's. arrow(u, v) additionally requires u's student to be
/// weakly above every student pointing at v in the priorities of v's school.
struct PairDigraph {
    std::vector<std::pair<StudentIdx, SchoolIdx>> nodes; // (student, school) input order
    std::vector<std::vector<int>> pointed_edges;         // adjacency by node index
    std::vector<std::vector<int>> arrow_edges;           // subset of pointed_edges
};

inline PairDigraph build_pair_digraph(const Problem& problem, const RandomMatching& rm) {
    PairDigraph g;
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
            if (rm.prob(i, c) > 0)
                g.nodes.emplace_back(i, c);
    const int size = static_cast<int>(g.nodes.size());
    g.pointed_edges.assign(size, {});
    g.arrow_edges.assign(size, {});

    for (int v = 0; v < size; ++v) {
        auto [j, d] = g.nodes[v];
        // Everyone pointing at (j, d); the arrows keep the top priority tier.
        std::vector<int> pointers;
        int best_tier = -1;
        for (int u = 0; u < size; ++u) {
            auto [i, c] = g.nodes[u];
            if (!problem.prefers(i, d, c))
                continue;
            pointers.push_back(u);
            int t = problem.tier(d, i);
            if (best_tier == -1 || t < best_tier)
                best_tier = t;
        }
        for (int u : pointers) {
            g.pointed_edges[u].push_back(v);
            if (problem.tier(d, g.nodes[u].first) == best_tier)
                g.arrow_edges[u].push_back(v);
        }
    }
    return g;
}

/// Witness of ex ante justified envy: student i prefers school s to a seat
/// they receive with positive probability, outranks j at s, and j receives s
/// with positive probability.
struct ExAnteWitness {
    StudentIdx envier = -1;
    StudentIdx envied = -1;
    SchoolIdx school = -1;

    friend bool operator==(const ExAnteWitness&, const ExAnteWitness&) = default;
};

/// Marginal-level ex ante stability check, equivalent to the quantification
/// over support pairs: a witness (i, j, s) exists iff j holds s with positive
/// probability, i strictly outranks j at s, and i is assigned something worse
/// than s with positive probability. Returns the first witness in
/// (envier, envied, school) input order, or nothing if the lottery is ex ante
/// stable.
inline std::optional<ExAnteWitness> is_ex_ante_stable(const Problem& problem,
                                                      const Lottery& lot) {
    RandomMatching rm = marginals(problem, lot);
    for (StudentIdx i = 0; i < problem.num_students(); ++i) {
        std::vector<Rational> mass_below(problem.num_schools());
        Rational running = 0;
        const auto& prefs = problem.preference(i);
        for (auto it = prefs.rbegin(); it != prefs.rend(); ++it) {
            mass_below[*it] = running; // strictly-worse-than-*it mass
            running += rm.prob(i, *it);
        }
        for (StudentIdx j = 0; j < problem.num_students(); ++j) {
            if (i == j)
                continue;
            for (SchoolIdx s = 0; s < problem.num_schools(); ++s)
                if (rm.prob(j, s) > 0 && problem.higher_priority(s, i, j) && mass_below[s] > 0)
                    return ExAnteWitness{i, j, s};
        }
    }
    return std::nullopt;
}

/// Witness of an unstable support matching.
struct ExPostWitness {
    int matching_index = -1;
    EnvyWitness envy;
};

/// Checks that every support matching is stable; returns the first failure.
inline std::optional<ExPostWitness> is_ex_post_stable(const Problem& problem,
                                                      const Lottery& lot) {
    for (int idx = 0; idx < lot.support_size(); ++idx)
        if (auto envy = has_justified_envy(problem, lot.support()[idx].first))
            return ExPostWitness{idx, *envy};
    return std::nullopt;
}

using EasicCycle = std::vector<std::pair<StudentIdx, SchoolIdx>>;

namespace detail {

/// Iterative Tarjan strongly connected components; returns a component id
/// per node.
inline std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj,
                                                      int& component_count) {
    const int size = static_cast<int>(adj.size());
    std::vector<int> index(size, -1), lowlink(size, 0), component(size, -1);
    std::vector<bool> on_stack(size, false);
    std::vector<int> stack;
    int next_index = 0;
    component_count = 0;

    struct Frame {
        int node;
        std::size_t edge;
    };
    for (int root = 0; root < size; ++root) {
        if (index[root] != -1)
            continue;
        std::vector<Frame> call_stack{{root, 0}};
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call_stack.empty()) {
            auto& frame = call_stack.back();
            if (frame.edge < adj[frame.node].size()) {
                int next = adj[frame.node][frame.edge++];
                if (index[next] == -1) {
                    index[next] = lowlink[next] = next_index++;
                    stack.push_back(next);
                    on_stack[next] = true;
                    call_stack.push_back({next, 0});
                } else if (on_stack[next]) {
                    lowlink[frame.node] = std::min(lowlink[frame.node], index[next]);
                }
            } else {
                int node = frame.node;
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().node] =
                        std::min(lowlink[call_stack.back().node], lowlink[node]);
                if (lowlink[node] == index[node]) {
                    while (true) {
                        int member = stack.back();
                        stack.pop_back();
                        on_stack[member] = false;
                        component[member] = component_count;
                        if (member == node)
                            break;
                    }
                    ++component_count;
                }
            }
        }
    }
    return component;
}

/// Shortest directed cycle through `start` within one component; empty when
/// none exists.
inline std::vector<int> shortest_cycle_through(const std::vector<std::vector<int>>& adj,
                                               const std::vector<int>& component, int start) {
    const int size = static_cast<int>(adj.size());
    std::vector<int> parent(size, -1);
    std::vector<bool> seen(size, false);
    std::deque<int> queue;
    seen[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        for (int next : adj[node]) {
            if (component[next] != component[start])
                continue;
            if (next == start) {
                std::vector<int> cycle{node};
                while (node != start) {
                    node = parent[node];
                    cycle.push_back(node);
                }
                std::reverse(cycle.begin(), cycle.end());
                return cycle;
            }
            if (!seen[next]) {
                seen[next] = true;
                parent[next] = node;
                queue.push_back(next);
            }
        }
    }
    return {};
}

} // namespace detail

/// Searches for a cycle in the arrow relation of the pair digraph. Its
/// absence certifies that an ex ante stable lottery is not ordinally
/// dominated by any other ex ante stable lottery. Reports a shortest cycle,
/// tie-broken by node input order; nothing when the arrow digraph is acyclic.
inline std::optional<EasicCycle> find_easic(const Problem& problem, const RandomMatching& rm) {
    PairDigraph g = build_pair_digraph(problem, rm);
    const int size = static_cast<int>(g.nodes.size());
    int component_count = 0;
    auto component = detail::strongly_connected_components(g.arrow_edges, component_count);

    std::vector<int> component_size(component_count, 0);
    for (int v = 0; v < size; ++v)
        ++component_size[component[v]];

    std::vector<int> best;
    for (int v = 0; v < size; ++v) {
        if (component_size[component[v]] < 2)
            continue; // self-loops are impossible in the arrow relation
        if (!best.empty() && component[v] != component[best.front()])
            continue; // stay in the first cyclic component by node order
        auto cycle = detail::shortest_cycle_through(g.arrow_edges, component, v);
        if (!cycle.empty() && (best.empty() || cycle.size() < best.size()))
            best = std::move(cycle);
    }
    if (best.empty())
        return std::nullopt;
    EasicCycle out;
    for (int v : best)
        out.push_back(g.nodes[v]);
    return out;
}

/// Support-level ex ante witness: indices of a matching giving the envier a
/// worse seat and a matching giving the envied student the contested school.
struct ExAnteSupportWitness {
    ExAnteWitness witness;
    int envier_matching = -1;
    int envied_matching = -1;
};

/// Combined certificate for a lottery: ex ante stability, ex post stability,
/// equal treatment of equals, and (for ex ante stable lotteries only) the
/// improvement-cycle certificate of non-domination.
struct AuditReport {
    bool ex_ante_stable = false;
    std::optional<ExAnteSupportWitness> ex_ante_witness;
    bool ex_post_stable = false;
    std::optional<ExPostWitness> ex_post_witness;
    bool ete_satisfied = false;
    std::optional<EteDiscrepancy> ete_discrepancy;
    bool easic_evaluated = false;
    std::optional<EasicCycle> easic;

    bool clean() const {
        return ex_ante_stable && ete_satisfied && easic_evaluated && !easic.has_value();
    }
};

inline AuditReport full_audit(const Problem& problem, const GroupPartition& groups,
                              const Lottery& lot) {
    AuditReport report;
    RandomMatching rm = marginals(problem, lot);

    auto witness = is_ex_ante_stable(problem, lot);
    report.ex_ante_stable = !witness.has_value();
    if (witness) {
        ExAnteSupportWitness support_witness;
        support_witness.witness = *witness;
        for (int idx = 0; idx < lot.support_size(); ++idx) {
            const Matching& m = lot.support()[idx].first;
            if (support_witness.envier_matching == -1 &&
                problem.prefers(witness->envier, witness->school, m.school_of(witness->envier)))
                support_witness.envier_matching = idx;
            if (support_witness.envied_matching == -1 &&
                m.school_of(witness->envied) == witness->school)
                support_witness.envied_matching = idx;
        }
        // Re-verify against the raw definition before reporting.
        if (support_witness.envier_matching == -1 || support_witness.envied_matching == -1)
            throw Error("ex ante witness failed re-verification");
        const Matching& worse = lot.support()[support_witness.envier_matching].first;
        const Matching& holds = lot.support()[support_witness.envied_matching].first;
        if (!problem.prefers(witness->envier, witness->school,
                             worse.school_of(witness->envier)) ||
            holds.school_of(witness->envied) != witness->school ||
            !problem.higher_priority(witness->school, witness->envier, witness->envied))
            throw Error("ex ante witness failed re-verification");
        report.ex_ante_witness = support_witness;
    }

    auto ex_post = is_ex_post_stable(problem, lot);
    report.ex_post_stable = !ex_post.has_value();
    if (ex_post) {
        const Matching& m = lot.support()[ex_post->matching_index].first;
        if (!problem.prefers(ex_post->envy.envier, m.school_of(ex_post->envy.envied),
                             m.school_of(ex_post->envy.envier)) ||
            !problem.higher_priority(ex_post->envy.school, ex_post->envy.envier,
                                     ex_post->envy.envied))
            throw Error("ex post witness failed re-verification");
        report.ex_post_witness = ex_post;
    }

    auto discrepancy = find_ete_discrepancy(groups, rm);
    report.ete_satisfied = !discrepancy.has_value();
    if (discrepancy) {
        if (rm.prob(discrepancy->first, discrepancy->school) ==
            rm.prob(discrepancy->second, discrepancy->school))
            throw Error("ETE discrepancy failed re-verification");
        report.ete_discrepancy = discrepancy;
    }

    // The cycle certificate is meaningful only for ex ante stable lotteries.
    if (report.ex_ante_stable) {
        report.easic_evaluated = true;
        report.easic = find_easic(problem, rm);
    }
    return report;
}

} // namespace schoice
