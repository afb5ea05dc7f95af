// Command line front end for the prime race density library.
// Every command is deterministic given its arguments; JSON reports echo the
// numerical configuration they were produced with.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "primerace/primerace.hpp"

using nlohmann::json;
using namespace primerace;

namespace {

json config_echo(const Config& cfg, u64 q) {
    return json{{"y", cfg.y_for(q)},
                {"c_smooth", cfg.c_smooth},
                {"c_residue_tail", cfg.c_residue_tail},
                {"c0_cross_route", cfg.c0_cross_route},
                {"c_bq_phi", cfg.c_bq_phi},
                {"c_series", cfg.c_series},
                {"c_two_way", cfg.c_two_way},
                {"tau", cfg.tau}};
}

json report_json(const DensityReport& rep, const Config& cfg) {
    json j{{"q", rep.q},
           {"tuple", rep.tuple},
           {"r", rep.r},
           {"method", rep.method},
           {"delta", rep.delta},
           {"terms",
            {{"baseline", rep.baseline},
             {"alpha", rep.alpha_term},
             {"beta", rep.beta_term},
             {"quadratic", rep.c2_term}}},
           {"error_budget", rep.error_budget},
           {"coefficient_error", rep.coefficient_error},
           {"n_value", rep.n_value},
           {"y", rep.y},
           {"degenerate", rep.degenerate},
           {"config", config_echo(cfg, rep.q)}};
    if (rep.method == "surrogate-mc") {
        j["sigma"] = rep.sigma;
        j["seed"] = rep.seed;
        j["samples"] = rep.samples;
    }
    return j;
}

void print_report(const DensityReport& rep, const Config& cfg, const std::string& format) {
    if (format == "json") {
        std::cout << report_json(rep, cfg).dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "q,tuple,method,delta,error_budget\n" << rep.q << ",\"";
        for (size_t i = 0; i < rep.tuple.size(); ++i)
            std::cout << (i ? " " : "") << rep.tuple[i];
        std::cout << "\"," << rep.method << "," << rep.delta << "," << rep.error_budget << "\n";
    } else {
        std::cout << "q = " << rep.q << "  tuple =";
        for (u64 a : rep.tuple) std::cout << " " << a;
        std::cout << "\nmethod        " << rep.method << "\ndelta         " << rep.delta
                  << "\nbaseline      " << rep.baseline << "\nalpha term    " << rep.alpha_term
                  << "\nbeta term     " << rep.beta_term << "\nquadratic     " << rep.c2_term
                  << "\nerror budget  " << rep.error_budget << "\n";
        if (rep.method == "surrogate-mc")
            std::cout << "sigma         " << rep.sigma << "  (n = " << rep.samples
                      << ", seed = " << rep.seed << ")\n";
    }
}

std::vector<u64> units_of(u64 q) {
    std::vector<u64> u;
    for (u64 a = 1; a < q; ++a)
        if (std::gcd(a, q) == 1) u.push_back(a);
    return u;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"logarithmic densities of prime number races"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand name
    std::cout.precision(17);

    std::string format = "json";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    std::string cache_dir = SmoothedSums::default_cache_dir();
    app.add_option("--cache-dir", cache_dir, "smoothed-sum cache directory");
    double y_override = 0.0;
    app.add_option("--y", y_override, "smoothing parameter (default max(q^2, 1e6))");

    u64 q = 0;
    std::vector<u64> tuple;
    u64 seed = 20011;
    u64 samples = 1000000;

    auto* density = app.add_subcommand("density", "density of an ordered race");
    density->add_option("--q", q, "modulus")->required();
    density->add_option("--tuple", tuple, "competitors, comma separated")
        ->required()
        ->delimiter(',');
    std::string method = "series";
    density->add_option("--method", method)
        ->check(CLI::IsMember({"series", "pair", "squares", "mc"}));
    density->add_option("--samples", samples, "surrogate-mc sample count");
    density->add_option("--seed", seed, "surrogate-mc seed");

    auto* bq = app.add_subcommand("bq", "pair functional B_q(a,b)");
    bq->add_option("--q", q, "modulus")->required();
    u64 arg_a = 0, arg_b = 0;
    auto* bq_a = bq->add_option("--a", arg_a, "first residue");
    auto* bq_b = bq->add_option("--b", arg_b, "second residue");
    std::string route = "residue";
    bq->add_option("--route", route)->check(CLI::IsMember({"residue", "char"}));
    bool scan_all = false;
    bq->add_flag("--scan-all", scan_all, "emit B for every ordered pair (CSV)");

    auto* nq = app.add_subcommand("nq", "zero-sum functional N_q");
    nq->add_option("--q", q, "modulus")->required();

    auto* simplex = app.add_subcommand("simplex", "order-statistic coefficients");
    int r_arg = 3;
    simplex->add_option("--r", r_arg, "competitors (2..6)")->required();
    double tol = 1e-10;
    simplex->add_option("--tol", tol, "quadrature certification target");
    u64 mc_check = 0;
    simplex->add_option("--mc-check", mc_check, "also run a Monte Carlo cross-check");
    simplex->add_option("--seed", seed, "Monte Carlo seed");
    bool force_quadrature = false;
    simplex->add_flag("--quadrature", force_quadrature, "skip closed forms");

    auto* construct = app.add_subcommand("construct", "build a provably biased tuple");
    construct->add_option("--q", q, "modulus")->required();
    std::string variant = "mixed";
    construct->add_option("--variant", variant)
        ->check(CLI::IsMember({"mixed", "squares", "nonsquares"}));
    construct->add_option("--r", r_arg, "competitors (3..6)");

    auto* classify = app.add_subcommand("classify", "bias classification of a tuple");
    classify->add_option("--q", q, "modulus")->required();
    classify->add_option("--tuple", tuple, "competitors")->required()->delimiter(',');

    auto* race = app.add_subcommand("race", "empirical race by sieving");
    race->add_option("--q", q, "modulus")->required();
    race->add_option("--tuple", tuple, "residues")->delimiter(',');
    u64 x_limit = 0;
    race->add_option("--x", x_limit, "sieve bound")->required();
    std::string trace_path, csv_path;
    race->add_option("--trace", trace_path, "binary trace to write (and resume from)");
    bool resume = false;
    race->add_flag("--resume", resume, "extend an existing trace");
    race->add_option("--csv", csv_path, "write checkpoint table");
    double ratio = 1.25;
    race->add_option("--checkpoint-ratio", ratio);

    auto* avg = app.add_subcommand("avg-bq", "average of B_q over ordered pairs");
    avg->add_option("--q", q, "modulus")->required();
    // character route: the pair average satisfies -N_q/(phi-1) to rounding error
    std::string avg_route = "char";
    avg->add_option("--route", avg_route)->check(CLI::IsMember({"residue", "char"}));

    auto* biasf = app.add_subcommand("bias-factor", "monotonicity counterexamples");
    biasf->add_option("--q", q, "modulus")->required();

    CLI11_PARSE(app, argc, argv);

    Config cfg;
    cfg.y_override = y_override;

    try {
        if (density->parsed()) {
            SpectralContext ctx(q, cfg, cache_dir);
            DensityReport rep;
            if (method == "series") rep = density_series(ctx, tuple);
            else if (method == "pair") {
                if (tuple.size() != 2) throw std::domain_error("pair method needs r = 2");
                rep = density_pair(ctx, tuple[0], tuple[1]);
            } else if (method == "squares") rep = density_squares(ctx, tuple);
            else rep = surrogate_density_mc(ctx, tuple, samples, seed);
            print_report(rep, cfg, format);
        } else if (bq->parsed()) {
            if (scan_all) {
                if (route == "residue") {
                    std::cout << "a,b,B,route,error_budget\n";
                    double budget = b_q_residue_budget(q, cfg);
                    auto us = units_of(q);
                    for (u64 a : us)
                        for (u64 b : us) {
                            if (a == b) continue;
                            std::cout << a << ',' << b << ','
                                      << b_q_residue_route(q, a, b, cfg) << ",residue,"
                                      << budget << "\n";
                        }
                } else {
                    SpectralContext ctx(q, cfg, cache_dir);
                    ctx.export_b_matrix_csv(std::cout, BRoute::character);
                }
            } else {
                if (!*bq_a || !*bq_b) throw std::domain_error("bq: need --a and --b or --scan-all");
                double v, budget;
                if (route == "residue") {
                    v = b_q_residue_route(q, arg_a, arg_b, cfg);
                    budget = b_q_residue_budget(q, cfg);
                } else {
                    SpectralContext ctx(q, cfg, cache_dir);
                    v = ctx.b_q_char(arg_a, arg_b);
                    budget = ctx.b_q_char_budget();
                }
                if (format == "json")
                    std::cout << json{{"q", q}, {"a", arg_a}, {"b", arg_b}, {"route", route},
                                      {"B", v},  {"error_budget", budget},
                                      {"config", config_echo(cfg, q)}}
                                     .dump(2)
                              << "\n";
                else
                    std::cout << "B_" << q << "(" << arg_a << "," << arg_b << ") = " << v
                              << "  [" << route << ", budget " << budget << "]\n";
            }
        } else if (nq->parsed()) {
            SpectralContext ctx(q, cfg, cache_dir);
            if (format == "json")
                std::cout << json{{"q", q}, {"phi", ctx.group().phi()}, {"y", ctx.y()},
                                  {"n_q", ctx.n_q()}, {"error_budget", ctx.n_q_budget()},
                                  {"config", config_echo(cfg, q)}}
                                 .dump(2)
                          << "\n";
            else
                std::cout << "N_" << q << " = " << ctx.n_q() << "  (y = " << ctx.y()
                          << ", budget " << ctx.n_q_budget() << ")\n";
        } else if (simplex->parsed()) {
            SimplexCoefficients c = force_quadrature ? simplex_coefficients_quadrature(r_arg, tol)
                                                     : simplex_coefficients(r_arg, tol);
            if (mc_check == 0) {
                write_simplex_json(std::cout, c);
            } else {
                SimplexMcResult mc = simplex_mc(r_arg, mc_check, seed);
                json j{{"r", c.r},
                       {"closed_form", c.closed_form},
                       {"max_error", c.max_error},
                       {"alpha", c.alpha},
                       {"lambda", c.lambda},
                       {"beta", c.beta},
                       {"mc",
                        {{"n", mc.n}, {"seed", mc.seed}, {"alpha", mc.alpha},
                         {"alpha_se", mc.alpha_se}, {"lambda", mc.lambda},
                         {"lambda_se", mc.lambda_se}, {"beta", mc.beta},
                         {"beta_se", mc.beta_se}}}};
                std::cout << j.dump(2) << "\n";
            }
        } else if (construct->parsed()) {
            ConstructVariant v = variant == "mixed" ? ConstructVariant::mixed
                                 : variant == "squares" ? ConstructVariant::squares
                                                        : ConstructVariant::nonsquares;
            ConstructReport rep = construct_biased_tuple(q, v, r_arg);
            json j{{"q", rep.q},
                   {"r", rep.r},
                   {"variant", construct_variant_name(rep.variant)},
                   {"tuple", rep.tuple},
                   {"exponents", rep.exponents},
                   {"aux_primes", {{"p0", rep.aux.p0}, {"p1", rep.aux.p1}, {"p2", rep.aux.p2}}},
                   {"base", rep.base},
                   {"multiplier", rep.multiplier},
                   {"bumps", rep.bumps},
                   {"minus_one_square", rep.minus_one_square}};
            if (rep.r == 3)
                j["witness"] = max_extreme_bias_witness(rep.q, rep.tuple[0], rep.tuple[1],
                                                        rep.tuple[2]);
            std::cout << j.dump(2) << "\n";
        } else if (classify->parsed()) {
            BiasClassification c = classify_bias(q, tuple);
            std::cout << json{{"q", q}, {"tuple", tuple}, {"verdict", c.verdict},
                              {"cube_root_condition", c.cube_root}, {"witness", c.witness},
                              {"witness_max", c.witness_max}, {"c_values", c.c_values}}
                             .dump(2)
                      << "\n";
        } else if (race->parsed()) {
            RaceState st;
            if (resume) {
                if (trace_path.empty()) throw std::domain_error("race: --resume needs --trace");
                st = load_race_trace(trace_path);
                race_extend(st, x_limit);
            } else {
                if (tuple.empty()) throw std::domain_error("race: need --tuple");
                st = race_counts(q, tuple, x_limit, ratio);
            }
            if (!trace_path.empty()) save_race_trace(st, trace_path);
            if (!csv_path.empty()) {
                std::ofstream out(csv_path);
                if (!out) throw std::runtime_error("race: cannot open " + csv_path);
                export_race_csv(out, st);
            }
            double total = race_total_measure(st);
            double expected = race_expected_measure(st);
            std::cout << json{{"q", st.q},
                              {"residues", st.residues},
                              {"x", st.x_done},
                              {"counts", st.counts},
                              {"lead_changes", st.lead_changes},
                              {"strict_density", race_density(st, TieRule::strict)},
                              {"weak_density", race_density(st, TieRule::weak)},
                              {"split_density", race_density(st, TieRule::split)},
                              {"total_measure", total},
                              {"expected_measure", expected},
                              {"partition_residual", total - expected}}
                             .dump(2)
                      << "\n";
        } else if (avg->parsed()) {
            SpectralContext ctx(q, cfg, cache_dir);
            auto us = units_of(q);
            Kahan acc;
            u64 pairs = 0;
            for (u64 a : us)
                for (u64 b : us) {
                    if (a == b) continue;
                    acc.add(avg_route == "residue" ? ctx.b_q(a, b) : ctx.b_q_char(a, b));
                    ++pairs;
                }
            double average = acc.value() / (double)pairs;
            double expected = -ctx.n_q() / (double)(ctx.group().phi() - 1);
            std::cout << json{{"q", q}, {"phi", ctx.group().phi()}, {"pairs", pairs},
                              {"route", avg_route}, {"average_b", average},
                              {"expected", expected}, {"abs_error", average - expected}}
                             .dump(2)
                      << "\n";
        } else if (biasf->parsed()) {
            SpectralContext ctx(q, cfg, cache_dir);
            json arr = json::array();
            for (const auto& cs : bias_factor_demo_cases(ctx)) {
                arr.push_back(json{{"kappa", cs.kappa},
                                   {"a", cs.a},
                                   {"b", cs.b},
                                   {"weighted_c_a", cs.weighted_c_a},
                                   {"weighted_c_b", cs.weighted_c_b},
                                   {"delta_a", cs.delta_a},
                                   {"delta_b", cs.delta_b},
                                   {"counterexample", cs.counterexample}});
            }
            std::cout << json{{"q", q}, {"cases", arr}}.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
