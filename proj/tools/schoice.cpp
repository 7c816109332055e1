#include <iostream>

#include <CLI11.hpp>

#include "schoice/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"school choice lottery toolkit: build ex ante stable lotteries that treat "
                 "equals equally, and audit lotteries with exact rational arithmetic"};
    app.require_subcommand(1);

    schoice::cli::SolveOptions solve;
    auto* solve_cmd = app.add_subcommand(
        "solve", "compute a constrained efficient stable matching and its ETE reassignment");
    solve_cmd->add_option("instance", solve.instance_path, "instance file (JSON)")->required();
    solve_cmd->add_option("--tie-break", solve.tie_break,
                          "tie-break mode: input-order or seed (default input-order)");
    solve_cmd->add_option("--seed", solve.seed, "seed for --tie-break seed");
    solve_cmd->add_option("--out", solve.out_path, "write the lottery in support form");
    solve_cmd->add_option("--marginals-out", solve.marginals_out_path,
                          "write the marginal assignment probabilities");
    solve_cmd->add_option("--matching", solve.matching_path,
                          "reassign this matching instead of computing one (must be "
                          "constrained efficient)");
    solve_cmd->add_option("--support-bound", solve.support_bound,
                          "largest within-group permutation count for support form");

    schoice::cli::AuditOptions audit;
    auto* audit_cmd = app.add_subcommand(
        "audit", "check ex ante stability, ex post stability, equal treatment of equals, and "
                 "the improvement-cycle certificate");
    audit_cmd->add_option("instance", audit.instance_path, "instance file (JSON)")->required();
    audit_cmd->add_option("lottery", audit.lottery_path, "lottery file (JSON)")->required();
    audit_cmd->add_flag("--json", audit.json, "print the report as JSON");

    schoice::cli::SampleOptions sample;
    auto* sample_cmd = app.add_subcommand(
        "sample", "draw matchings: realize the lottery, then redistribute each group's seats");
    sample_cmd->add_option("instance", sample.instance_path, "instance file (JSON)")->required();
    sample_cmd->add_option("lottery", sample.lottery_path, "lottery file (JSON)")->required();
    sample_cmd->add_option("--seed", sample.seed, "base seed (draw t uses seed + t)");
    sample_cmd->add_option("--count", sample.count, "number of draws")
        ->check(CLI::PositiveNumber);

    schoice::cli::CompareOptions compare;
    auto* compare_cmd =
        app.add_subcommand("compare", "stochastic-dominance comparison of two lotteries");
    compare_cmd->add_option("instance", compare.instance_path, "instance file (JSON)")
        ->required();
    compare_cmd->add_option("lottery_a", compare.lottery_a_path, "first lottery")->required();
    compare_cmd->add_option("lottery_b", compare.lottery_b_path, "second lottery")->required();

    schoice::cli::GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a random instance file");
    gen_cmd->add_option("--seed", gen.seed, "random seed");
    gen_cmd->add_option("--students", gen.students, "number of students")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--schools", gen.schools, "number of schools")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--tie-density", gen.tie_density,
                        "0 = strict priorities, 1 = one school-wide tier")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--out", gen.out_path, "output path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed())
        return schoice::cli::run_solve(solve, std::cout, std::cerr);
    if (audit_cmd->parsed())
        return schoice::cli::run_audit(audit, std::cout, std::cerr);
    if (sample_cmd->parsed())
        return schoice::cli::run_sample(sample, std::cout, std::cerr);
    if (compare_cmd->parsed())
        return schoice::cli::run_compare(compare, std::cout, std::cerr);
    if (gen_cmd->parsed())
        return schoice::cli::run_gen(gen, std::cout, std::cerr);
    return schoice::cli::exit_invalid_input;
}
