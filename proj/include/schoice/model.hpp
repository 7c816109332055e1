#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schoice/errors.hpp"

namespace schoice {

using StudentIdx = int;
using SchoolIdx = int;

/// Raw, unvalidated description of a school choice problem. Ids are the
/// opaque strings used in input files; validation maps them to dense indices
/// and every output converts back to the original strings.
struct ProblemData {
    std::vector<std::string> students;
    std::vector<std::pair<std::string, int>> schools; // (id, quota)
    std::map<std::string, std::vector<std::string>> preferences;
    /// Ordered tier lists per school; students within a tier are tied,
    /// earlier tiers have strictly higher priority.
    std::map<std::string, std::vector<std::vector<std::string>>> priorities;
};

/// Immutable school choice problem. Students rank all schools strictly;
/// schools rank students weakly (ordered tiers). Comparison queries are O(1)
/// after construction.
class Problem {
public:
    /// Checks every invariant of a candidate problem and builds the indexed
    /// form. Throws ValidationError naming the offending entity.
    static Problem validate(const ProblemData& raw);

    int num_students() const { return static_cast<int>(student_names_.size()); }
    int num_schools() const { return static_cast<int>(school_names_.size()); }
    int quota(SchoolIdx c) const { return quotas_[c]; }
    int total_quota() const { return total_quota_; }

    const std::string& student_name(StudentIdx i) const { return student_names_[i]; }
    const std::string& school_name(SchoolIdx c) const { return school_names_[c]; }
    const std::vector<std::string>& student_names() const { return student_names_; }
    const std::vector<std::string>& school_names() const { return school_names_; }

    std::optional<StudentIdx> find_student(const std::string& id) const {
        auto it = student_index_.find(id);
        if (it == student_index_.end())
            return std::nullopt;
        return it->second;
    }
    std::optional<SchoolIdx> find_school(const std::string& id) const {
        auto it = school_index_.find(id);
        if (it == school_index_.end())
            return std::nullopt;
        return it->second;
    }

    /// Schools in descending order of student i's preference.
    const std::vector<SchoolIdx>& preference(StudentIdx i) const { return prefs_[i]; }
    /// 0 = most preferred.
    int pref_rank(StudentIdx i, SchoolIdx c) const { return pref_rank_[i][c]; }
    /// c P_i d: i strictly prefers c to d.
    bool prefers(StudentIdx i, SchoolIdx c, SchoolIdx d) const {
        return pref_rank_[i][c] < pref_rank_[i][d];
    }
    /// c R_i d: c P_i d or c == d.
    bool weakly_prefers(StudentIdx i, SchoolIdx c, SchoolIdx d) const {
        return pref_rank_[i][c] <= pref_rank_[i][d];
    }

    const std::vector<std::vector<StudentIdx>>& tiers(SchoolIdx c) const { return tiers_[c]; }
    /// 0 = highest-priority tier at school c.
    int tier(SchoolIdx c, StudentIdx i) const { return tier_of_[c][i]; }
    /// i strictly outranks j at c.
    bool higher_priority(SchoolIdx c, StudentIdx i, StudentIdx j) const {
        return tier_of_[c][i] < tier_of_[c][j];
    }
    bool tied(SchoolIdx c, StudentIdx i, StudentIdx j) const {
        return tier_of_[c][i] == tier_of_[c][j];
    }
    bool weakly_higher_priority(SchoolIdx c, StudentIdx i, StudentIdx j) const {
        return tier_of_[c][i] <= tier_of_[c][j];
    }

private:
    Problem() = default;

    std::vector<std::string> student_names_;
    std::vector<std::string> school_names_;
    std::map<std::string, int> student_index_;
    std::map<std::string, int> school_index_;
    std::vector<int> quotas_;
    int total_quota_ = 0;
    std::vector<std::vector<SchoolIdx>> prefs_;
    std::vector<std::vector<int>> pref_rank_; // [student][school]
    std::vector<std::vector<std::vector<StudentIdx>>> tiers_; // [school][tier] -> members
    std::vector<std::vector<int>> tier_of_; // [school][student]
};

/// Total assignment of students to schools. Capacity and totality are
/// enforced at construction; the school -> students inverse is derived.
class Matching {
public:
    Matching() = default;

    Matching(const Problem& problem, std::vector<SchoolIdx> assignment)
        : assignment_(std::move(assignment)) {
        if (static_cast<int>(assignment_.size()) != problem.num_students())
            throw ValidationError(ValidationCode::BadMatching,
                                  "assignment does not cover every student");
        std::vector<int> load(problem.num_schools(), 0);
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            SchoolIdx c = assignment_[i];
            if (c < 0 || c >= problem.num_schools())
                throw ValidationError(ValidationCode::BadMatching,
                                      "student " + problem.student_name(i) +
                                          " assigned to an unknown school");
            ++load[c];
        }
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c) {
            if (load[c] > problem.quota(c))
                throw ValidationError(ValidationCode::BadMatching,
                                      "school " + problem.school_name(c) +
                                          " over quota: " + std::to_string(load[c]) + " > " +
                                          std::to_string(problem.quota(c)));
        }
    }

    SchoolIdx school_of(StudentIdx i) const { return assignment_[i]; }
    const std::vector<SchoolIdx>& assignment() const { return assignment_; }
    int num_students() const { return static_cast<int>(assignment_.size()); }

    std::vector<StudentIdx> students_at(SchoolIdx c) const {
        std::vector<StudentIdx> out;
        for (StudentIdx i = 0; i < num_students(); ++i)
            if (assignment_[i] == c)
                out.push_back(i);
        return out;
    }

    friend bool operator==(const Matching&, const Matching&) = default;
    friend auto operator<=>(const Matching&, const Matching&) = default;

private:
    std::vector<SchoolIdx> assignment_;
};

inline std::vector<int> occupancy(const Problem& problem, const Matching& m) {
    std::vector<int> load(problem.num_schools(), 0);
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        ++load[m.school_of(i)];
    return load;
}

/// Student `envier` prefers `envied`'s school and strictly outranks `envied`
/// there.
struct EnvyWitness {
    StudentIdx envier = -1;
    StudentIdx envied = -1;
    SchoolIdx school = -1;

    friend bool operator==(const EnvyWitness&, const EnvyWitness&) = default;
};

/// Returns the lexicographically first justified-envy witness in
/// (envier, envied) input order, or nothing if the matching is stable.
inline std::optional<EnvyWitness> has_justified_envy(const Problem& problem, const Matching& m) {
    for (StudentIdx i = 0; i < problem.num_students(); ++i) {
        for (StudentIdx j = 0; j < problem.num_students(); ++j) {
            if (i == j)
                continue;
            SchoolIdx s = m.school_of(j);
            if (problem.prefers(i, s, m.school_of(i)) && problem.higher_priority(s, i, j))
                return EnvyWitness{i, j, s};
        }
    }
    return std::nullopt;
}

inline bool is_stable(const Problem& problem, const Matching& m) {
    return !has_justified_envy(problem, m).has_value();
}

/// True iff everyone weakly prefers their seat under `better` and at least
/// one student strictly does.
inline bool pareto_dominates(const Problem& problem, const Matching& better,
                             const Matching& worse) {
    bool strict = false;
    for (StudentIdx i = 0; i < problem.num_students(); ++i) {
        SchoolIdx b = better.school_of(i);
        SchoolIdx w = worse.school_of(i);
        if (b == w)
            continue;
        if (!problem.prefers(i, b, w))
            return false;
        strict = true;
    }
    return strict;
}

/// True iff i and j have identical preference orders and sit in the same
/// priority tier at every school.
inline bool are_equals(const Problem& problem, StudentIdx i, StudentIdx j) {
    if (problem.preference(i) != problem.preference(j))
        return false;
    for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
        if (!problem.tied(c, i, j))
            return false;
    return true;
}

/// Partition of the students into groups whose members are equals: identical
/// preferences and, at every school, membership in the same priority tier.
class GroupPartition {
public:
    /// The maximal (coarsest) partition: any two equal students share a group.
    /// Groups are ordered by first member; members keep input order.
    static GroupPartition compute(const Problem& problem) {
        using Key = std::pair<std::vector<SchoolIdx>, std::vector<int>>;
        std::map<Key, int> seen;
        GroupPartition out;
        out.group_of_.assign(problem.num_students(), -1);
        for (StudentIdx i = 0; i < problem.num_students(); ++i) {
            std::vector<int> tier_column(problem.num_schools());
            for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
                tier_column[c] = problem.tier(c, i);
            Key key{problem.preference(i), std::move(tier_column)};
            auto [it, inserted] = seen.try_emplace(key, static_cast<int>(out.groups_.size()));
            if (inserted)
                out.groups_.emplace_back();
            out.groups_[it->second].push_back(i);
            out.group_of_[i] = it->second;
        }
        return out;
    }

    /// Builds a user-supplied partition, which may split equals into finer
    /// groups but must never mix non-equals.
    static GroupPartition from_blocks(const Problem& problem,
                                      const std::vector<std::vector<StudentIdx>>& blocks) {
        GroupPartition out;
        out.group_of_.assign(problem.num_students(), -1);
        for (const auto& block : blocks) {
            if (block.empty())
                throw ValidationError(ValidationCode::InvalidGroups, "empty group");
            for (StudentIdx i : block) {
                if (i < 0 || i >= problem.num_students())
                    throw ValidationError(ValidationCode::InvalidGroups,
                                          "group member out of range");
                if (out.group_of_[i] != -1)
                    throw ValidationError(ValidationCode::InvalidGroups,
                                          "student " + problem.student_name(i) +
                                              " appears in two groups");
                out.group_of_[i] = static_cast<int>(out.groups_.size());
                if (!are_equals(problem, block.front(), i))
                    throw ValidationError(ValidationCode::InvalidGroups,
                                          "students " + problem.student_name(block.front()) +
                                              " and " + problem.student_name(i) +
                                              " are not equals but share a group");
            }
            out.groups_.push_back(block);
        }
        for (StudentIdx i = 0; i < problem.num_students(); ++i)
            if (out.group_of_[i] == -1)
                throw ValidationError(ValidationCode::InvalidGroups,
                                      "student " + problem.student_name(i) +
                                          " missing from the group partition");
        return out;
    }

    int num_groups() const { return static_cast<int>(groups_.size()); }
    const std::vector<std::vector<StudentIdx>>& groups() const { return groups_; }
    const std::vector<StudentIdx>& group(int g) const { return groups_[g]; }
    int group_of(StudentIdx i) const { return group_of_[i]; }

private:
    std::vector<std::vector<StudentIdx>> groups_;
    std::vector<int> group_of_;
};

inline Problem Problem::validate(const ProblemData& raw) {
    Problem p;
    if (raw.students.empty())
        throw ValidationError(ValidationCode::UnknownId, "no students given");
    if (raw.schools.empty())
        throw ValidationError(ValidationCode::UnknownId, "no schools given");

    for (const auto& id : raw.students) {
        if (!p.student_index_.try_emplace(id, static_cast<int>(p.student_names_.size())).second)
            throw ValidationError(ValidationCode::DuplicateId, "duplicate student \"" + id + "\"");
        p.student_names_.push_back(id);
    }
    for (const auto& [id, quota] : raw.schools) {
        if (!p.school_index_.try_emplace(id, static_cast<int>(p.school_names_.size())).second)
            throw ValidationError(ValidationCode::DuplicateId, "duplicate school \"" + id + "\"");
        p.school_names_.push_back(id);
        p.quotas_.push_back(quota);
    }
    const int n = p.num_students();
    const int m = p.num_schools();

    // Aggregate capacity first, so an instance whose only defect is a school
    // zeroed out reports the shortfall rather than the bad quota.
    long long total = 0;
    for (int q : p.quotas_)
        total += q;
    if (total < n)
        throw ValidationError(ValidationCode::CapacityShortfall,
                              "total quota " + std::to_string(total) + " is below the " +
                                  std::to_string(n) + " students");
    p.total_quota_ = static_cast<int>(std::min<long long>(total, 1LL << 30));
    for (SchoolIdx c = 0; c < m; ++c)
        if (p.quotas_[c] <= 0)
            throw ValidationError(ValidationCode::BadQuota,
                                  "school " + p.school_names_[c] + " has non-positive quota");

    p.prefs_.assign(n, {});
    p.pref_rank_.assign(n, std::vector<int>(m, -1));
    for (StudentIdx i = 0; i < n; ++i) {
        auto it = raw.preferences.find(p.student_names_[i]);
        if (it == raw.preferences.end())
            throw ValidationError(ValidationCode::IncompletePreference,
                                  "student " + p.student_names_[i] + " has no preference list");
        for (const auto& school_id : it->second) {
            auto c = p.find_school(school_id);
            if (!c)
                throw ValidationError(ValidationCode::UnknownId,
                                      "student " + p.student_names_[i] +
                                          " ranks unknown school \"" + school_id + "\"");
            if (p.pref_rank_[i][*c] != -1)
                throw ValidationError(ValidationCode::IncompletePreference,
                                      "student " + p.student_names_[i] + " ranks school " +
                                          school_id + " twice");
            p.pref_rank_[i][*c] = static_cast<int>(p.prefs_[i].size());
            p.prefs_[i].push_back(*c);
        }
        if (static_cast<int>(p.prefs_[i].size()) != m) {
            for (SchoolIdx c = 0; c < m; ++c)
                if (p.pref_rank_[i][c] == -1)
                    throw ValidationError(ValidationCode::IncompletePreference,
                                          "student " + p.student_names_[i] +
                                              " does not rank school " + p.school_names_[c]);
        }
    }
    for (const auto& [student_id, _] : raw.preferences)
        if (!p.find_student(student_id))
            throw ValidationError(ValidationCode::UnknownId,
                                  "preferences given for unknown student \"" + student_id + "\"");

    p.tiers_.assign(m, {});
    p.tier_of_.assign(m, std::vector<int>(n, -1));
    for (const auto& [school_id, _] : raw.priorities)
        if (!p.find_school(school_id))
            throw ValidationError(ValidationCode::UnknownId,
                                  "priorities given for unknown school \"" + school_id + "\"");
    for (SchoolIdx c = 0; c < m; ++c) {
        auto it = raw.priorities.find(p.school_names_[c]);
        if (it == raw.priorities.end())
            throw ValidationError(ValidationCode::IncompletePriority,
                                  "school " + p.school_names_[c] + " has no priority tiers");
        for (const auto& tier : it->second) {
            if (tier.empty())
                throw ValidationError(ValidationCode::IncompletePriority,
                                      "school " + p.school_names_[c] + " has an empty tier");
            for (const auto& student_id : tier) {
                auto i = p.find_student(student_id);
                if (!i)
                    throw ValidationError(ValidationCode::UnknownId,
                                          "school " + p.school_names_[c] +
                                              " ranks unknown student \"" + student_id + "\"");
                if (p.tier_of_[c][*i] != -1)
                    throw ValidationError(ValidationCode::OverlappingTiers,
                                          "student " + student_id + " appears twice in the " +
                                              "priorities of school " + p.school_names_[c]);
                p.tier_of_[c][*i] = static_cast<int>(p.tiers_[c].size());
            }
            std::vector<StudentIdx> members;
            for (const auto& student_id : tier)
                members.push_back(*p.find_student(student_id));
            p.tiers_[c].push_back(std::move(members));
        }
        for (StudentIdx i = 0; i < n; ++i)
            if (p.tier_of_[c][i] == -1)
                throw ValidationError(ValidationCode::IncompletePriority,
                                      "school " + p.school_names_[c] + " does not rank student " +
                                          p.student_names_[i]);
    }
    return p;
}

} // namespace schoice
