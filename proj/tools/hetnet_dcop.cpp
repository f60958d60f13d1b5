// hetnet-dcop: scenario generation, single-instance solving and experiment
// drivers for ECAV-eta user association.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetnet/hetnet.hpp"

namespace {

template <typename Fn>
void with_output(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    fn(out);
    if (!out) throw std::runtime_error("failed writing " + path);
}

struct SolveOptions
{
    std::string scenario;
    std::string algo = "mc";
    std::size_t eta = 3;
    std::optional<double> beta;
    std::optional<std::uint64_t> steps;
    std::uint64_t seed = 0;
    bool anneal = false;
    std::string out;
    std::string trace;
    std::uint64_t report_every = 100;
    std::string model_dump;
};

int run_solve(const SolveOptions& o)
{
    using namespace hetnet;
    const Scenario s = load_scenario(o.scenario);
    const ChannelState ch = compute_channel(s);

    Assignment result;
    if (o.algo == "maxsinr") {
        result = max_sinr_solve(s, ch);
    } else {
        const EcavModel model = build_ecav(s, ch, o.eta);
        if (!o.model_dump.empty()) with_output(o.model_dump, [&](std::ostream& os) { dump_model(os, model); });
        if (o.algo == "brute") {
            auto oracle = brute_force_solve(model);
            fmt::print(std::cerr, "brute: {} states, optimum {} bit/s\n", oracle.states_enumerated,
                       oracle.optimal_utility);
            result = std::move(oracle.optimal_assignment);
        } else if (o.algo == "mc") {
            SolverConfig cfg;
            if (o.beta) cfg.beta = *o.beta;
            cfg.steps = o.steps;
            cfg.seed = o.seed;
            if (o.anneal) cfg.annealing = AnnealingSchedule{};
            if (!o.trace.empty()) cfg.report_every = o.report_every;
            auto r = solve(model, cfg);
            fmt::print(std::cerr, "mc: {} variables, {} steps, acceptance {:.4f}, best {} bit/s, {:.1f} ms\n",
                       model.variables.size(), r.stats.steps, r.stats.acceptance_rate(), r.utility,
                       r.stats.wall_clock_ms);
            if (!o.trace.empty()) with_output(o.trace, [&](std::ostream& os) { write_trace_csv(os, r.stats); });
            result = std::move(r.assignment);
        } else {
            throw StructuralError("unknown algorithm '" + o.algo + "'");
        }
    }
    fmt::print(std::cerr, "total rate {} bit/s, non-served {} of {}\n", total_rate(result, ch),
               non_served_users(result, s).size(), s.user_count());
    with_output(o.out, [&](std::ostream& os) { write_assignment_csv(os, result, ch); });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ECAV-eta user association in heterogeneous cellular networks"};
    app.require_subcommand(1);

    std::uint64_t gen_seed = 1;
    std::size_t gen_users = 200;
    std::uint64_t gen_macro_rbs = 200;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Generate a three-tier reference scenario");
    gen->add_option("--seed", gen_seed, "Scenario seed")->required();
    gen->add_option("--users", gen_users, "Number of users")->required();
    gen->add_option("--macro-rbs", gen_macro_rbs, "RBs at the macro BS")->capture_default_str();
    gen->add_option("--out", gen_out, "Output scenario file (JSON)")->required();

    SolveOptions so;
    auto* sol = app.add_subcommand("solve", "Solve one scenario and write the assignment CSV");
    sol->add_option("--scenario", so.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sol->add_option("--algo", so.algo, "Algorithm")
        ->check(CLI::IsMember({"mc", "maxsinr", "brute"}))
        ->capture_default_str();
    sol->add_option("--eta", so.eta, "Candidate BSs kept per user")->check(CLI::PositiveNumber)->capture_default_str();
    sol->add_option("--beta", so.beta, "Inverse temperature (default 1.25)");
    sol->add_option("--steps", so.steps, "Chain steps (default 2000 per variable)");
    sol->add_option("--seed", so.seed, "Chain seed")->capture_default_str();
    sol->add_flag("--anneal", so.anneal, "Use the geometric annealing schedule");
    sol->add_option("--out", so.out, "Assignment CSV (default stdout)");
    sol->add_option("--trace", so.trace, "Write the chain trace CSV");
    sol->add_option("--report-every", so.report_every, "Trace subsampling")->capture_default_str();
    sol->add_option("--dump-model", so.model_dump, "Write the constraint model listing");

    std::string exp_kind;
    std::size_t exp_reps = 10;
    std::uint64_t exp_seed = 1;
    std::string exp_out;
    auto* exp = app.add_subcommand("experiment", "Run an experiment family and write CSVs into a directory");
    exp->add_option("kind", exp_kind, "table1 | runtime | nonserved | cdf | macro-rb")
        ->required()
        ->check(CLI::IsMember({"table1", "runtime", "nonserved", "cdf", "macro-rb", "macro_rb"}));
    exp->add_option("--reps", exp_reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
    exp->add_option("--seed", exp_seed, "Master seed")->capture_default_str();
    exp->add_option("--out", exp_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            hetnet::DeploymentOptions opt;
            opt.macro_rbs = gen_macro_rbs;
            hetnet::save_scenario(hetnet::generate_scenario(gen_seed, gen_users, opt), gen_out);
            return 0;
        }
        if (sol->parsed()) return run_solve(so);
        if (exp->parsed()) {
            const auto spec = hetnet::default_experiment(hetnet::parse_experiment_kind(exp_kind), exp_reps, exp_seed);
            const auto result = hetnet::run_experiment(spec);
            hetnet::write_experiment(result, exp_out);
            fmt::print(std::cerr, "{}: {} metric rows written to {}\n", exp_kind, result.metrics.size(), exp_out);
            return 0;
        }
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "hetnet-dcop: error: {}\n", e.what());
        return 1;
    }
    return 1;
}
