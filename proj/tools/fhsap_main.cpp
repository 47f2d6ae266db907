// fhsap: benchmark CLI for the fixed-hub single allocation solver library.
//
// Subcommands:
//   gen     write a random instance (.fhsap.json)
//   solve   solve one LP relaxation of an instance and round it
//   bench   run a setup x hub-cost matrix and emit a CSV/JSON report
//   robust  compare the nominal and robust pipelines on one instance
//
// Exit codes: 0 success, 2 usage error, 3 size guard, 4 solver failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fhsap/fhsap.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSizeGuard = 3;
constexpr int kExitSolver = 4;

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_value) {
    if (seed_opt->count() > 0) return seed_value;
    if (const char* env = std::getenv("FHSAP_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CLI::ValidationError("FHSAP_SEED", "not a valid unsigned integer");
        }
    }
    return seed_value;
}

fhsap::Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return fhsap::from_json(ss.str());
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

struct SetupSpec {
    int n = 0, k = 0;
};

std::vector<SetupSpec> parse_setups(const std::string& text) {
    std::vector<SetupSpec> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        const auto x = piece.find('x');
        if (x == std::string::npos)
            throw CLI::ValidationError("--setups", "expected entries like 50x5");
        SetupSpec s;
        try {
            s.n = std::stoi(piece.substr(0, x));
            s.k = std::stoi(piece.substr(x + 1));
        } catch (...) {
            throw CLI::ValidationError("--setups", "expected entries like 50x5");
        }
        if (s.n < 1 || s.k < 1) throw CLI::ValidationError("--setups", "sizes must be >= 1");
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) out.push_back(piece);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-hub single allocation: LP relaxations, geometric rounding, robust "
                 "counterpart"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    int gen_n = 0, gen_k = 0;
    std::string gen_hub = "const:10", gen_out;
    std::uint64_t gen_seed = 0;
    gen->add_option("--n", gen_n, "terminal count")->required();
    gen->add_option("--k", gen_k, "hub count")->required();
    gen->add_option("--hub-cost", gen_hub, "inter-hub cost spec: const:<c> | uniform:<a>:<b>");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "rng seed (fallback: FHSAP_SEED)");
    gen->add_option("--out", gen_out, "output .fhsap.json path")->required();

    // ---- solve ----
    auto* slv = app.add_subcommand("solve", "solve one relaxation and round");
    std::string slv_instance, slv_relax = "lp3", slv_format = "json", slv_out, slv_dump;
    int slv_trials = 5000;
    std::uint64_t slv_seed = 0;
    long long slv_lp1_cap = 2'000'000;
    slv->add_option("--instance", slv_instance, "instance file")->required();
    slv->add_option("--relaxation", slv_relax, "lp1 | lp2 | lp2p | lp3");
    slv->add_option("--trials", slv_trials, "rounding trials (default 5000)");
    auto* slv_seed_opt = slv->add_option("--seed", slv_seed, "rng seed (fallback: FHSAP_SEED)");
    slv->add_option("--format", slv_format, "json | csv");
    slv->add_option("--out", slv_out, "output path (default stdout)");
    slv->add_option("--lp1-cap", slv_lp1_cap, "route-variable cap for lp1");
    slv->add_option("--dump", slv_dump,
                    "write <prefix>.lp and <prefix>.map.json for the built model");

    // ---- bench ----
    auto* bch = app.add_subcommand("bench", "run a benchmark matrix");
    std::string bch_setups = "50x5", bch_specs = "uniform:0:20,uniform:4:20,uniform:14:20,const:10,const:20";
    std::string bch_csv, bch_json, bch_times = "wall";
    int bch_trials = 5000;
    std::uint64_t bch_seed = 0;
    long long bch_lp1_cap = 2'000'000;
    std::uint64_t bch_enum_cap = 1'000'000;
    bch->add_option("--setups", bch_setups, "comma list of <n>x<k> setups");
    bch->add_option("--hub-costs", bch_specs, "comma list of hub-cost specs");
    bch->add_option("--trials", bch_trials, "rounding trials per relaxation");
    auto* bch_seed_opt = bch->add_option("--seed", bch_seed, "master seed (fallback: FHSAP_SEED)");
    bch->add_option("--out-csv", bch_csv, "CSV output path (default stdout)");
    bch->add_option("--out-json", bch_json, "JSON output path");
    bch->add_option("--times", bch_times, "wall | omit (omit for byte-reproducible output)");
    bch->add_option("--lp1-cap", bch_lp1_cap, "route-variable cap for lp1");
    bch->add_option("--enum-cap", bch_enum_cap, "k^n cap for the exact column (0 = skip)");

    // ---- robust ----
    auto* rob = app.add_subcommand("robust", "nominal vs robust pipeline on one instance");
    std::string rob_instance, rob_set, rob_format = "json", rob_out;
    double rob_budget = -1.0, rob_p = 2.0, rob_scale = 100.0;
    int rob_trials = 5000;
    std::uint64_t rob_seed = 0;
    bool rob_has_sigma_seed = false;
    std::uint64_t rob_sigma_seed = 0;
    rob->add_option("--instance", rob_instance, "instance file")->required();
    rob->add_option("--set", rob_set, "uncertainty-set JSON file");
    auto* rob_ss = rob->add_option("--sigma-seed", rob_sigma_seed,
                                   "generate the set instead: lognormal sigma seed");
    rob->add_option("--sigma-scale", rob_scale, "sigma scale for --sigma-seed (default 100)");
    rob->add_option("--budget", rob_budget, "budget Q (required with --sigma-seed; overrides --set)");
    rob->add_option("--p", rob_p, "norm order for --sigma-seed (default 2)");
    rob->add_option("--trials", rob_trials, "rounding trials");
    auto* rob_seed_opt = rob->add_option("--seed", rob_seed, "rng seed (fallback: FHSAP_SEED)");
    rob->add_option("--format", rob_format, "json | csv");
    rob->add_option("--out", rob_out, "output path (default stdout)");
    std::string rob_times = "wall";
    rob->add_option("--times", rob_times, "wall | omit (omit for byte-reproducible output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) {
            const auto spec = fhsap::HubCostSpec::parse(gen_hub);
            const auto seed = resolve_seed(gen_seed_opt, gen_seed);
            const fhsap::Instance inst = fhsap::generate_random(gen_n, gen_k, spec, seed);
            write_text(gen_out, fhsap::to_json(inst));
            return kExitOk;
        }

        if (*slv) {
            if (slv_trials < 1) {
                std::cerr << "solve: --trials must be >= 1\n";
                return kExitUsage;
            }
            const auto relax = fhsap::parse_relaxation(slv_relax);
            if (!relax) {
                std::cerr << "solve: unknown relaxation '" << slv_relax << "'\n";
                return kExitUsage;
            }
            const auto seed = resolve_seed(slv_seed_opt, slv_seed);
            const fhsap::Instance inst = load_instance(slv_instance);

            fhsap::OptModel model;
            fhsap::Assignment frac;
            double v = 0.0, seconds = 0.0;
            fhsap::SolveResult res;
            nlohmann::json map_json;
            if (*relax == fhsap::Relaxation::lp1) {
                fhsap::Milp1Options o;
                o.max_route_vars = slv_lp1_cap;
                auto built = fhsap::build_milp1(inst, true, o);
                map_json = built.map.to_json();
                if (!slv_dump.empty()) write_text(slv_dump + ".lp", fhsap::write_lp(built.model));
                res = fhsap::solve(built.model);
                if (res.status != fhsap::SolveStatus::Optimal) {
                    std::cerr << "solve: lp1 ended with status " << to_string(res.status) << "\n";
                    return kExitSolver;
                }
                frac = fhsap::extract_assignment(res, built.map);
            } else {
                auto built = *relax == fhsap::Relaxation::lp2
                                 ? fhsap::build_milp2(inst, true)
                                 : (*relax == fhsap::Relaxation::lp2p
                                        ? fhsap::build_milp2prime(inst, true)
                                        : fhsap::build_milp3(inst, true));
                map_json = built.map.to_json();
                if (!slv_dump.empty()) write_text(slv_dump + ".lp", fhsap::write_lp(built.model));
                res = fhsap::solve(built.model);
                if (res.status != fhsap::SolveStatus::Optimal) {
                    std::cerr << "solve: " << to_string(*relax) << " ended with status "
                              << to_string(res.status) << "\n";
                    return kExitSolver;
                }
                frac = fhsap::extract_assignment(res, built.map);
            }
            if (!slv_dump.empty()) write_text(slv_dump + ".map.json", map_json.dump(2));
            v = res.objective;
            seconds = res.seconds;

            fhsap::Assignment x = frac;
            double w;
            if (fhsap::snap_integral(x)) {
                w = fhsap::eval_cost(inst, x).total;
            } else {
                w = fhsap::gra_best_of(inst, frac, slv_trials, seed).cost.total;
            }
            const double gap = v != 0.0 ? (w / v - 1.0) * 100.0 : 0.0;

            if (slv_format == "csv") {
                std::ostringstream os;
                os << "instance,relaxation,n,k,trials,seed,v,cpu,w,gap_pct\n"
                   << slv_instance << ',' << to_string(*relax) << ',' << inst.n << ',' << inst.k
                   << ',' << slv_trials << ',' << seed << ',' << fhsap::detail::cell(v) << ','
                   << fhsap::detail::cell(seconds) << ',' << fhsap::detail::cell(w) << ','
                   << fhsap::detail::cell(gap);
                write_text(slv_out, os.str());
            } else {
                nlohmann::json j;
                j["instance"] = slv_instance;
                j["relaxation"] = to_string(*relax);
                j["n"] = inst.n;
                j["k"] = inst.k;
                j["trials"] = slv_trials;
                j["seed"] = seed;
                j["v"] = v;
                j["cpu"] = seconds;
                j["w"] = w;
                j["gap_pct"] = gap;
                write_text(slv_out, j.dump(2));
            }
            return kExitOk;
        }

        if (*bch) {
            if (bch_trials < 1) {
                std::cerr << "bench: --trials must be >= 1\n";
                return kExitUsage;
            }
            if (bch_times != "wall" && bch_times != "omit") {
                std::cerr << "bench: --times must be wall or omit\n";
                return kExitUsage;
            }
            const bool with_times = bch_times == "wall";
            const auto setups = parse_setups(bch_setups);
            std::vector<fhsap::HubCostSpec> specs;
            for (const auto& s : split_commas(bch_specs))
                specs.push_back(fhsap::HubCostSpec::parse(s));
            const auto master = resolve_seed(bch_seed_opt, bch_seed);

            std::ostringstream csv;
            csv << fhsap::bench_csv_header() << '\n';
            nlohmann::json rows = nlohmann::json::array();
            std::uint64_t row_idx = 0;
            for (const auto& setup : setups) {
                for (const auto& spec : specs) {
                    fhsap::BenchParams params;
                    params.trials = bch_trials;
                    params.seed = fhsap::derive_seed(master, row_idx);
                    params.lp1_cap = bch_lp1_cap;
                    params.enum_cap = bch_enum_cap;
                    const fhsap::Instance inst =
                        fhsap::generate_random(setup.n, setup.k, spec, params.seed);
                    std::ostringstream name;
                    name << 'n' << setup.n << 'k' << setup.k << '-' << spec.str();
                    const fhsap::BenchRow row =
                        fhsap::run_bench_row(name.str(), inst, spec.str(), params);
                    csv << fhsap::bench_csv_row(row, with_times) << '\n';
                    rows.push_back(fhsap::bench_json_row(row, with_times));
                    ++row_idx;
                }
            }
            write_text(bch_csv, csv.str());
            if (!bch_json.empty()) write_text(bch_json, rows.dump(2));
            return kExitOk;
        }

        if (*rob) {
            if (rob_trials < 1) {
                std::cerr << "robust: --trials must be >= 1\n";
                return kExitUsage;
            }
            rob_has_sigma_seed = rob_ss->count() > 0;
            if (rob_set.empty() && !rob_has_sigma_seed) {
                std::cerr << "robust: need --set or --sigma-seed\n";
                return kExitUsage;
            }
            const auto seed = resolve_seed(rob_seed_opt, rob_seed);
            const fhsap::Instance inst = load_instance(rob_instance);

            fhsap::UncertaintySet set;
            if (!rob_set.empty()) {
                std::ifstream in(rob_set);
                if (!in) throw std::invalid_argument("cannot open set file '" + rob_set + "'");
                std::stringstream ss;
                ss << in.rdbuf();
                try {
                    set = fhsap::uncertainty_set_from_json(ss.str());
                } catch (const std::runtime_error& e) {
                    throw std::invalid_argument(e.what());
                }
                if (rob_budget >= 0.0) set.budget = rob_budget;
            } else {
                if (rob_budget < 0.0) {
                    std::cerr << "robust: --sigma-seed requires --budget\n";
                    return kExitUsage;
                }
                set = fhsap::lognormal_set(inst, rob_budget, rob_p, rob_sigma_seed, rob_scale);
            }

            if (rob_times != "wall" && rob_times != "omit") {
                std::cerr << "robust: --times must be wall or omit\n";
                return kExitUsage;
            }
            const bool rob_with_times = rob_times == "wall";
            const fhsap::RobustRow row =
                fhsap::run_robust_row(rob_instance, inst, set, rob_trials, seed);
            if (rob_format == "csv") {
                std::ostringstream os;
                os << fhsap::robust_csv_header() << '\n'
                   << fhsap::robust_csv_row(row, rob_with_times);
                write_text(rob_out, os.str());
            } else {
                write_text(rob_out, fhsap::robust_json_row(row, rob_with_times).dump(2));
            }
            return kExitOk;
        }
    } catch (const fhsap::SizeGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeGuard;
    } catch (const fhsap::CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
