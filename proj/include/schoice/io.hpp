#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "schoice/audit.hpp"
#include "schoice/lottery.hpp"
#include "schoice/model.hpp"

namespace schoice::io {

using Json = nlohmann::ordered_json;

/// A validated problem together with its group partition (the maximal one, or
/// the finer partition supplied in the instance file).
struct Instance {
    Problem problem;
    GroupPartition groups;
};

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(ValidationCode::ParseError, "cannot open \"" + path + "\"");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ValidationCode::ParseError,
                              "\"" + path + "\" is not valid JSON: " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& value) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write \"" + path + "\"");
    out << value.dump(2) << '\n';
}

/// Accepted `priority_completion` values: "error" (the default) rejects
/// schools whose tiers do not cover every student; "bottom-tie" appends the
/// unlisted students as one final tier, all tied below every listed student.
inline Instance parse_instance(const Json& doc) {
    ProblemData data;
    std::string completion = "error";
    try {
        for (const auto& id : doc.at("students"))
            data.students.push_back(id.get<std::string>());
        for (const auto& school : doc.at("schools"))
            data.schools.emplace_back(school.at("id").get<std::string>(),
                                      school.at("quota").get<int>());
        for (const auto& [student, list] : doc.at("preferences").items()) {
            auto& prefs = data.preferences[student];
            for (const auto& school : list)
                prefs.push_back(school.get<std::string>());
        }
        if (doc.contains("priorities"))
            for (const auto& [school, tiers] : doc.at("priorities").items()) {
                auto& out = data.priorities[school];
                for (const auto& tier : tiers) {
                    out.emplace_back();
                    for (const auto& student : tier)
                        out.back().push_back(student.get<std::string>());
                }
            }
        completion = doc.value("priority_completion", completion);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ValidationCode::ParseError,
                              std::string("malformed instance: ") + e.what());
    }
    if (completion != "error" && completion != "bottom-tie")
        throw ValidationError(ValidationCode::ParseError,
                              "unknown priority_completion \"" + completion + "\"");
    if (completion == "bottom-tie") {
        for (const auto& [school_id, quota] : data.schools) {
            auto& tiers = data.priorities[school_id]; // creates empty list if absent
            std::set<std::string> listed;
            for (const auto& tier : tiers)
                listed.insert(tier.begin(), tier.end());
            std::vector<std::string> missing;
            for (const auto& student : data.students)
                if (!listed.count(student))
                    missing.push_back(student);
            if (!missing.empty())
                tiers.push_back(std::move(missing));
        }
    }

    Instance instance{Problem::validate(data), GroupPartition{}};
    if (doc.contains("groups")) {
        std::vector<std::vector<StudentIdx>> blocks;
        try {
            for (const auto& block : doc.at("groups")) {
                blocks.emplace_back();
                for (const auto& student : block) {
                    auto idx = instance.problem.find_student(student.get<std::string>());
                    if (!idx)
                        throw ValidationError(ValidationCode::UnknownId,
                                              "groups mention unknown student \"" +
                                                  student.get<std::string>() + "\"");
                    blocks.back().push_back(*idx);
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(ValidationCode::ParseError,
                                  std::string("malformed groups: ") + e.what());
        }
        instance.groups = GroupPartition::from_blocks(instance.problem, blocks);
    } else {
        instance.groups = GroupPartition::compute(instance.problem);
    }
    return instance;
}

inline Instance load_instance(const std::string& path) {
    return parse_instance(read_json_file(path));
}

inline Matching parse_matching(const Json& doc, const Problem& problem) {
    std::vector<SchoolIdx> assignment(problem.num_students(), -1);
    try {
        for (const auto& [student, school] : doc.items()) {
            auto i = problem.find_student(student);
            if (!i)
                throw ValidationError(ValidationCode::UnknownId,
                                      "matching assigns unknown student \"" + student + "\"");
            auto c = problem.find_school(school.get<std::string>());
            if (!c)
                throw ValidationError(ValidationCode::UnknownId,
                                      "student " + student + " assigned to unknown school \"" +
                                          school.get<std::string>() + "\"");
            assignment[*i] = *c;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ValidationCode::ParseError,
                              std::string("malformed matching: ") + e.what());
    }
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        if (assignment[i] == -1)
            throw ValidationError(ValidationCode::BadMatching,
                                  "student " + problem.student_name(i) + " is unassigned");
    return Matching(problem, std::move(assignment));
}

inline Matching load_matching(const std::string& path, const Problem& problem) {
    return parse_matching(read_json_file(path), problem);
}

inline Json matching_to_json(const Problem& problem, const Matching& m) {
    Json out = Json::object();
    for (StudentIdx i = 0; i < problem.num_students(); ++i)
        out[problem.student_name(i)] = problem.school_name(m.school_of(i));
    return out;
}

inline Lottery parse_lottery(const Json& doc, const Problem& problem) {
    std::vector<std::pair<Matching, Rational>> entries;
    try {
        const auto& matchings = doc.at("matchings");
        const auto& probabilities = doc.at("probabilities");
        if (matchings.size() != probabilities.size())
            throw ValidationError(ValidationCode::BadLottery,
                                  "matchings and probabilities differ in length");
        for (std::size_t idx = 0; idx < matchings.size(); ++idx)
            entries.emplace_back(parse_matching(matchings[idx], problem),
                                 parse_rational(probabilities[idx].get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ValidationCode::ParseError,
                              std::string("malformed lottery: ") + e.what());
    }
    return Lottery(problem, std::move(entries));
}

inline Lottery load_lottery(const std::string& path, const Problem& problem) {
    return parse_lottery(read_json_file(path), problem);
}

inline Json lottery_to_json(const Problem& problem, const Lottery& lot) {
    Json matchings = Json::array();
    Json probabilities = Json::array();
    for (const auto& [m, w] : lot.support()) {
        matchings.push_back(matching_to_json(problem, m));
        probabilities.push_back(rational_to_string(w));
    }
    return Json{{"matchings", std::move(matchings)},
                {"probabilities", std::move(probabilities)}};
}

inline Json marginals_to_json(const Problem& problem, const RandomMatching& rm) {
    Json rows = Json::object();
    for (StudentIdx i = 0; i < problem.num_students(); ++i) {
        Json row = Json::object();
        for (SchoolIdx c = 0; c < problem.num_schools(); ++c)
            row[problem.school_name(c)] = rational_to_string(rm.prob(i, c));
        rows[problem.student_name(i)] = std::move(row);
    }
    Json out;
    out["students"] = problem.student_names();
    out["schools"] = problem.school_names();
    out["marginals"] = std::move(rows);
    return out;
}

inline Json report_to_json(const Problem& problem, const AuditReport& report) {
    Json out;
    out["ex_ante_stable"] = report.ex_ante_stable;
    if (report.ex_ante_witness) {
        const auto& w = *report.ex_ante_witness;
        out["ex_ante_witness"] = {
            {"envier", problem.student_name(w.witness.envier)},
            {"envied", problem.student_name(w.witness.envied)},
            {"school", problem.school_name(w.witness.school)},
            {"envier_matching", w.envier_matching},
            {"envied_matching", w.envied_matching},
        };
    }
    out["ex_post_stable"] = report.ex_post_stable;
    if (report.ex_post_witness) {
        const auto& w = *report.ex_post_witness;
        out["ex_post_witness"] = {
            {"matching_index", w.matching_index},
            {"envier", problem.student_name(w.envy.envier)},
            {"envied", problem.student_name(w.envy.envied)},
            {"school", problem.school_name(w.envy.school)},
        };
    }
    out["ete_satisfied"] = report.ete_satisfied;
    if (report.ete_discrepancy) {
        const auto& d = *report.ete_discrepancy;
        out["ete_discrepancy"] = {
            {"group", d.group},
            {"first", problem.student_name(d.first)},
            {"second", problem.student_name(d.second)},
            {"school", problem.school_name(d.school)},
        };
    }
    out["easic_evaluated"] = report.easic_evaluated;
    if (report.easic_evaluated) {
        if (report.easic) {
            Json cycle = Json::array();
            for (const auto& [student, school] : *report.easic)
                cycle.push_back(Json::array(
                    {problem.student_name(student), problem.school_name(school)}));
            out["easic"] = std::move(cycle);
        } else {
            out["easic"] = nullptr;
        }
    }
    return out;
}

inline std::string report_to_text(const Problem& problem, const AuditReport& report) {
    std::ostringstream out;
    out << "ex ante stable : " << (report.ex_ante_stable ? "yes" : "no");
    if (report.ex_ante_witness) {
        const auto& w = *report.ex_ante_witness;
        out << "  (" << problem.student_name(w.witness.envier) << " envies "
            << problem.student_name(w.witness.envied) << " at "
            << problem.school_name(w.witness.school) << "; worse seat in matching #"
            << w.envier_matching << ", school held in matching #" << w.envied_matching << ")";
    }
    out << "\nex post stable : " << (report.ex_post_stable ? "yes" : "no");
    if (report.ex_post_witness) {
        const auto& w = *report.ex_post_witness;
        out << "  (matching #" << w.matching_index << ": "
            << problem.student_name(w.envy.envier) << " justifiably envies "
            << problem.student_name(w.envy.envied) << " at "
            << problem.school_name(w.envy.school) << ")";
    }
    out << "\nETE satisfied  : " << (report.ete_satisfied ? "yes" : "no");
    if (report.ete_discrepancy) {
        const auto& d = *report.ete_discrepancy;
        out << "  (" << problem.student_name(d.first) << " and "
            << problem.student_name(d.second) << " are equals but differ at "
            << problem.school_name(d.school) << ")";
    }
    out << "\nimprovement cycle : ";
    if (!report.easic_evaluated) {
        out << "not evaluated (lottery is not ex ante stable)";
    } else if (!report.easic) {
        out << "none (not ordinally dominated by any other ex ante stable lottery)";
    } else {
        out << "found:";
        for (const auto& [student, school] : *report.easic)
            out << " (" << problem.student_name(student) << ", "
                << problem.school_name(school) << ")";
    }
    out << '\n';
    return out.str();
}

} // namespace schoice::io
