#pragma once

#include <cstdint>
#include <iostream>
#include <string>

#include "schoice/audit.hpp"
#include "schoice/io.hpp"
#include "schoice/oracle.hpp"
#include "schoice/stable_matching.hpp"

namespace schoice::cli {

// Exit codes are a scriptability contract: 0 success, 1 invalid input,
// 2 explicit support form requested but too large, 3 audit verdict failed.
constexpr int exit_ok = 0;
constexpr int exit_invalid_input = 1;
constexpr int exit_support_too_large = 2;
constexpr int exit_audit_failed = 3;

struct SolveOptions {
    std::string instance_path;
    std::string tie_break = "input-order"; // "input-order" | "seed"
    std::uint64_t seed = 0;
    std::string out_path;           // lottery in support form, when given
    std::string marginals_out_path; // marginal matrix, when given
    std::string matching_path;      // skip the first step and reassign this matching
    std::uint64_t support_bound = 10000;
};

struct AuditOptions {
    std::string instance_path;
    std::string lottery_path;
    bool json = false;
};

struct SampleOptions {
    std::string instance_path;
    std::string lottery_path;
    std::uint64_t seed = 0;
    int count = 1;
};

struct CompareOptions {
    std::string instance_path;
    std::string lottery_a_path;
    std::string lottery_b_path;
};

struct GenOptions {
    std::uint64_t seed = 0;
    int students = 6;
    int schools = 4;
    double tie_density = 0.5;
    std::string out_path; // stdout when empty
};

inline TieBreakRule make_tie_break(const Problem& problem, const std::string& mode,
                                   std::uint64_t seed) {
    if (mode == "input-order")
        return TieBreakRule::by_input_order(problem);
    if (mode == "seed")
        return TieBreakRule::seeded(problem, seed);
    throw ValidationError(ValidationCode::ParseError,
                          "unknown tie-break mode \"" + mode + "\" (use input-order or seed)");
}

inline void print_matching(const Problem& problem, const Matching& m, std::ostream& out) {
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        out << "  " << problem.student_name(i) << " -> "
            << problem.school_name(m.school_of(i)) << '\n';
}

inline void print_groups(const Problem& problem, const GroupPartition& groups,
                         std::ostream& out) {
    for (const auto& group : groups.groups()) {
        out << "  {";
        for (std::size_t t = 0; t < group.size(); ++t)
            out << (t ? ", " : "") << problem.student_name(group[t]);
        out << "}\n";
    }
}

/// Two-step pipeline: a constrained efficient stable matching, then its ETE
/// reassignment, written in support form (when within the bound) and as a
/// marginal matrix.
inline int run_solve(const SolveOptions& options, std::ostream& out, std::ostream& err) {
    try {
        io::Instance instance = io::load_instance(options.instance_path);
        const Problem& problem = instance.problem;

        Matching matching = [&] {
            if (!options.matching_path.empty()) {
                Matching given = io::load_matching(options.matching_path, problem);
                if (auto cycle = find_stable_improvement_cycle(problem, given))
                    throw ValidationError(ValidationCode::BadMatching,
                                          "given matching is not constrained efficient: "
                                          "a stable improvement is available");
                return given; // find_stable_improvement_cycle rejects unstable input
            }
            return constrained_efficient_matching(
                problem, make_tie_break(problem, options.tie_break, options.seed));
        }();

        out << "constrained efficient matching:\n";
        print_matching(problem, matching, out);
        out << "groups of equals:\n";
        print_groups(problem, instance.groups, out);

        const BigInt permutations = group_permutation_count(instance.groups);
        const bool support_form = permutations <= options.support_bound;
        if (!support_form) {
            if (!options.out_path.empty()) {
                err << "error: explicit support would need " << permutations.str()
                    << " within-group permutations (bound " << options.support_bound
                    << "); use --marginals-out or sample instead\n";
                return exit_support_too_large;
            }
            err << "warning: support form skipped (" << permutations.str()
                << " within-group permutations exceed the bound " << options.support_bound
                << "); writing marginals only\n";
        }

        Lottery seed_lottery = degenerate(matching);
        if (support_form && !options.out_path.empty()) {
            Lottery reassigned = ete_reassignment_support(problem, instance.groups, seed_lottery,
                                                          options.support_bound);
            io::write_json_file(options.out_path, io::lottery_to_json(problem, reassigned));
            out << "lottery written to " << options.out_path << " (support size "
                << reassigned.support_size() << ")\n";
        }
        RandomMatching reassigned_marginals =
            ete_reassignment_marginals(instance.groups, marginals(problem, seed_lottery));
        if (!options.marginals_out_path.empty()) {
            io::write_json_file(options.marginals_out_path,
                                io::marginals_to_json(problem, reassigned_marginals));
            out << "marginals written to " << options.marginals_out_path << '\n';
        }
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const MatchingUnstable& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const SupportTooLarge& e) {
        err << "error: " << e.what() << '\n';
        return exit_support_too_large;
    }
}

inline int run_audit(const AuditOptions& options, std::ostream& out, std::ostream& err) {
    try {
        io::Instance instance = io::load_instance(options.instance_path);
        Lottery lot = io::load_lottery(options.lottery_path, instance.problem);
        AuditReport report = full_audit(instance.problem, instance.groups, lot);
        if (options.json)
            out << io::report_to_json(instance.problem, report).dump(2) << '\n';
        else
            out << io::report_to_text(instance.problem, report);
        return report.clean() ? exit_ok : exit_audit_failed;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
}

/// Prints `count` draws of the two-step realization, one JSON object per
/// line. Draw t uses seed + t, so runs are reproducible and extendable.
inline int run_sample(const SampleOptions& options, std::ostream& out, std::ostream& err) {
    try {
        io::Instance instance = io::load_instance(options.instance_path);
        Lottery lot = io::load_lottery(options.lottery_path, instance.problem);
        for (int t = 0; t < options.count; ++t) {
            Matching m = sample_ete_realization(instance.problem, instance.groups, lot,
                                                options.seed + static_cast<std::uint64_t>(t));
            out << io::matching_to_json(instance.problem, m).dump() << '\n';
        }
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
}

inline int run_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
    try {
        io::Instance instance = io::load_instance(options.instance_path);
        const Problem& problem = instance.problem;
        Lottery lot_a = io::load_lottery(options.lottery_a_path, problem);
        Lottery lot_b = io::load_lottery(options.lottery_b_path, problem);
        RandomMatching rm_a = marginals(problem, lot_a);
        RandomMatching rm_b = marginals(problem, lot_b);

        out << "per-student comparison (first-order stochastic dominance):\n";
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            auto a_over_b = compare_student(problem, i, rm_b, rm_a);
            auto b_over_a = compare_student(problem, i, rm_a, rm_b);
            out << "  " << problem.student_name(i) << ": ";
            if (a_over_b == StudentDominance::equal)
                out << "equal\n";
            else if (a_over_b == StudentDominance::second_strictly_dominates)
                out << "A strictly dominates\n";
            else if (b_over_a == StudentDominance::second_strictly_dominates)
                out << "B strictly dominates\n";
            else
                out << "incomparable\n";
        }
        bool a_dominates = ordinally_dominates(problem, lot_a, lot_b);
        bool b_dominates = ordinally_dominates(problem, lot_b, lot_a);
        if (a_dominates)
            out << "A ordinally dominates B\n";
        if (b_dominates)
            out << "B ordinally dominates A\n";
        if (!a_dominates && !b_dominates)
            out << "neither lottery ordinally dominates the other\n";
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
}

inline int run_gen(const GenOptions& options, std::ostream& out, std::ostream& err) {
    try {
        oracle::RandomProblemParams params;
        params.num_students = options.students;
        params.num_schools = options.schools;
        params.tie_density = options.tie_density;
        if (params.num_students <= 0 || params.num_schools <= 0 || params.tie_density < 0 ||
            params.tie_density > 1)
            throw ValidationError(ValidationCode::ParseError,
                                  "gen needs positive sizes and tie density in [0, 1]");
        Problem problem = oracle::random_problem(options.seed, params);

        io::Json doc;
        doc["students"] = problem.student_names();
        io::Json schools = io::Json::array();
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
            schools.push_back({{"id", problem.school_name(c)}, {"quota", problem.quota(c)}});
        doc["schools"] = std::move(schools);
        io::Json prefs = io::Json::object();
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            io::Json list = io::Json::array();
            for (SchoolIdx c : problem.preference(i))
                list.push_back(problem.school_name(c));
            prefs[problem.student_name(i)] = std::move(list);
        }
        doc["preferences"] = std::move(prefs);
        io::Json priorities = io::Json::object();
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c) {
            io::Json tiers = io::Json::array();
            for (const auto& tier : problem.tiers(c)) {
                io::Json members = io::Json::array();
                for (StudentIdx i : tier)
                    members.push_back(problem.student_name(i));
                tiers.push_back(std::move(members));
            }
            priorities[problem.school_name(c)] = std::move(tiers);
        }
        doc["priorities"] = std::move(priorities);

        if (options.out_path.empty())
            out << doc.dump(2) << '\n';
        else
            io::write_json_file(options.out_path, doc);
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
}

} // namespace schoice::cli
