#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arrival/json_report.hpp"
#include "arrival/normalize.hpp"
#include "arrival/reduce.hpp"

namespace arrival {

namespace cli_detail {

inline std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_output(const std::optional<std::string>& path, const std::string& text,
                         std::ostream& fallback) {
    if (!path) {
        fallback << text;
        return;
    }
    std::ofstream f(*path);
    if (!f) throw std::runtime_error("cannot open '" + *path + "' for writing");
    f << text;
}

}  // namespace cli_detail

// Exit codes: 0 success, 1 usage, 2 input validation, 3 capacity/budget.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"generalized arrival instances: exact solving, transformations, gadgets",
                 "arrival"};
    app.require_subcommand(1);

    std::string in_path, to_variant, family, problem_name, op_name, p_text;
    std::optional<std::string> out_path, instance_out, dump_path;
    size_t budget = kDefaultStateBudget;
    uint64_t samples = 100000, seed = 1;
    std::optional<long> depth_l;
    std::optional<unsigned> gen_n;

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        if (needs_input)
            sub->add_option("input", in_path, "instance file ('-' for stdin)")->required();
        sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
        sub->add_option("--budget", budget, "expanded-state budget");
    };

    auto* analyze = app.add_subcommand("analyze", "hopeful vertices and desperation");
    add_common(analyze, true);
    auto* normalize = app.add_subcommand("normalize", "value-preserving transformations");
    add_common(normalize, true);
    normalize->add_option("--op", op_name, "simple|prune|swap|prefix-target|prefix-dead|geq-strict")
        ->required();
    normalize->add_option("--l", depth_l, "depth for geq-strict (default: 3Mn+3n+3)");
    normalize->add_option("--instance-out", instance_out, "write the transformed instance here");
    auto* reduce = app.add_subcommand("reduce", "inter-variant reductions");
    add_common(reduce, true);
    reduce->add_option("--to", to_variant, "player|random|dual")->required();
    reduce->add_option("--instance-out", instance_out, "write the reduced instance here");
    auto* expand = app.add_subcommand("expand", "explicit expansion and modified matrix");
    add_common(expand, true);
    expand->add_option("--dump", dump_path, "write the sparse system as row/col/a/b triplets");
    auto* solve = app.add_subcommand("solve", "exact value and verdicts");
    add_common(solve, true);
    solve->add_option("--p", p_text, "also decide val > p (exact rational a/b)");
    auto* decide_cmd = app.add_subcommand("decide", "qualitative/quantitative decision");
    add_common(decide_cmd, true);
    decide_cmd->add_option("--problem", problem_name, "qual0|qual1|quant")->required();
    decide_cmd->add_option("--p", p_text, "threshold for quant (exact rational a/b)");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimation and edge statistics");
    add_common(simulate, true);
    simulate->add_option("--samples", samples, "number of runs");
    simulate->add_option("--seed", seed, "base seed");
    bool traversal = false;
    simulate->add_flag("--traversal", traversal,
                       "per-edge traversal statistics (pruned simple {R,S} input)");
    auto* generate = app.add_subcommand("generate", "hardness-gadget instance families");
    generate->add_option("input", in_path, "DIMACS cnf file (ssat/majsat families)");
    generate->add_option("--out", out_path, "write the JSON report here instead of stdout");
    generate->add_option("--family", family, "double-exp|ssat-rs1|ssat-rs2|majsat-rs")->required();
    generate->add_option("--n", gen_n, "chain length for double-exp");
    generate->add_option("--instance-out", instance_out, "write the generated instance here");
    auto* stats = app.add_subcommand("stats", "instance size statistics");
    add_common(stats, true);

    std::vector<std::string> rargs(args.rbegin(), args.rend());
    try {
        app.parse(rargs);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 1;
    }

    try {
        Json report;
        std::optional<std::string> instance_text;
        if (*analyze) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            report = hope_to_json(inst, hopeful_set(inst));
        } else if (*normalize) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            ArrivalInstance res;
            if (op_name == "simple") {
                res = to_simple_form(inst);
            } else if (op_name == "prune") {
                res = prune_dead_edges(inst);
            } else if (op_name == "swap") {
                res = swap_target_dead(inst);
            } else if (op_name == "prefix-target") {
                res = prefix_coin(inst, CoinBranch::ToTarget);
            } else if (op_name == "prefix-dead") {
                res = prefix_coin(inst, CoinBranch::ToDead);
            } else if (op_name == "geq-strict") {
                std::optional<BigInt> d;
                if (depth_l) d = BigInt(*depth_l);
                report["depth"] =
                    (depth_l ? BigInt(*depth_l) : geq_to_strict_default_depth(inst)).get_str();
                res = geq_to_strict(inst, CoinBranch::ToTarget, d);
            } else {
                err << "unknown --op '" << op_name << "'\n";
                return 1;
            }
            report["op"] = op_name;
            instance_text = serialize_instance(res);
            report["instance_stats"] = instance_stats_to_json(res);
        } else if (*reduce) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            ArrivalInstance res;
            if (to_variant == "player") {
                res = random_to_player(inst);
            } else if (to_variant == "random") {
                res = player_to_random(inst);
            } else if (to_variant == "dual") {
                auto dual = dualize_players(inst);
                report["identity_guaranteed"] = dual.identity_guaranteed;
                res = std::move(dual.instance);
            } else {
                err << "unknown --to '" << to_variant << "'\n";
                return 1;
            }
            report["to"] = to_variant;
            instance_text = serialize_instance(res);
            report["instance_stats"] = instance_stats_to_json(res);
        } else if (*expand) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            ExpandedGame g = build_reachable_game(inst, budget);
            report["reachable_states"] = g.size();
            if (!inst.has_kind(NodeKind::MaxPlayer) && !inst.has_kind(NodeKind::MinPlayer)) {
                ExpandedSystem sys = modified_matrix(inst, budget);
                report["retained_states"] = sys.states.size();
                size_t entries = 0;
                for (const auto& r : sys.rows) entries += r.size();
                report["matrix_entries"] = entries;
                if (dump_path)
                    cli_detail::write_output(dump_path, dump_system(sys, inst), out);
            }
        } else if (*solve) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            std::optional<Rational> p;
            if (!p_text.empty()) p = parse_rational(p_text);
            report = solve_to_json(inst, solve_instance(inst, budget, p));
        } else if (*decide_cmd) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            Problem prob;
            if (problem_name == "qual0") prob = Problem::Qual0;
            else if (problem_name == "qual1") prob = Problem::Qual1;
            else if (problem_name == "quant") prob = Problem::Quant;
            else {
                err << "unknown --problem '" << problem_name << "'\n";
                return 1;
            }
            std::optional<Rational> p;
            if (!p_text.empty()) p = parse_rational(p_text);
            if (prob == Problem::Quant && !p) {
                err << "quant needs --p\n";
                return 1;
            }
            bool verdict = decide(inst, prob, p, budget);
            report["problem"] = problem_name;
            if (p) put_rational(report, "p", *p);
            report["verdict"] = verdict;
        } else if (*simulate) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            if (traversal) {
                report = sim_to_json(inst, traversal_stats(inst, samples, seed));
            } else {
                StrategyMap strategy;
                report = sim_to_json(inst, estimate_value(inst, strategy, samples, seed));
            }
        } else if (*generate) {
            ArrivalInstance inst;
            GadgetStats st;
            bool have_stats = true;
            if (family == "double-exp") {
                if (!gen_n) {
                    err << "double-exp needs --n\n";
                    return 1;
                }
                inst = gen_double_exp(*gen_n);
                have_stats = false;
            } else if (family == "ssat-rs1" || family == "ssat-rs2") {
                if (in_path.empty()) {
                    err << family << " needs a DIMACS input\n";
                    return 1;
                }
                SsatInstance ssat = make_ssat(parse_dimacs(cli_detail::read_input(in_path)));
                auto pair = family == "ssat-rs1" ? gen_ssat_rs1(ssat) : gen_ssat_rs2(ssat);
                inst = std::move(pair.first);
                st = std::move(pair.second);
            } else if (family == "majsat-rs") {
                if (in_path.empty()) {
                    err << "majsat-rs needs a DIMACS input\n";
                    return 1;
                }
                auto pair = gen_majsat_rs(parse_dimacs(cli_detail::read_input(in_path)));
                inst = std::move(pair.first);
                st = std::move(pair.second);
            } else {
                err << "unknown --family '" << family << "'\n";
                return 1;
            }
            report["family"] = family;
            if (have_stats) report["gadget_stats"] = gadget_stats_to_json(st);
            report["instance_stats"] = instance_stats_to_json(inst);
            instance_text = serialize_instance(inst);
        } else if (*stats) {
            ArrivalInstance inst = parse_instance(cli_detail::read_input(in_path));
            report = instance_stats_to_json(inst);
        }

        if (instance_text) {
            if (instance_out)
                cli_detail::write_output(instance_out, *instance_text, out);
            else
                report["instance_text"] = *instance_text;
        }
        cli_detail::write_output(out_path, report.dump(2) + "\n", out);
        return 0;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        err << "input: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        err << "input: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        err << "input: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "input: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace arrival
