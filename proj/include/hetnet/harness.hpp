#ifndef HETNET_HARNESS_HPP
#define HETNET_HARNESS_HPP

// Scenario generation for the three-tier reference deployment and the
// experiment drivers behind the `experiment` CLI subcommand.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetnet/assignment.hpp"
#include "hetnet/baselines.hpp"
#include "hetnet/ecav.hpp"
#include "hetnet/mcsolver.hpp"
#include "hetnet/netmodel.hpp"

namespace hetnet {

struct DeploymentOptions
{
    Area area;
    std::size_t pico_count = 5;
    std::size_t femto_count = 10;
    std::uint64_t macro_rbs = 200;
    std::uint64_t pico_rbs = 100;
    std::uint64_t femto_rbs = 50;
    double qos_threshold_bps = 3.0;
    RadioParams radio;
};

inline std::vector<Tier> reference_tiers()
{
    return {Tier{0, "macro", 46.0, 34.0, 40.0}, Tier{1, "pico", 35.0, 34.0, 40.0}, Tier{2, "femto", 20.0, 37.0, 30.0}};
}

/// One macro BS at the center, pico and femto BSs and users placed uniformly
/// at random. BS positions are drawn before users, so scenarios with the same
/// seed share their BS layout regardless of the user count.
inline Scenario generate_scenario(std::uint64_t seed, std::size_t n_users, const DeploymentOptions& opt = {})
{
    std::mt19937_64 rng(mix_seed(seed));
    std::uniform_real_distribution<double> ux(0.0, opt.area.width_m);
    std::uniform_real_distribution<double> uy(0.0, opt.area.height_m);
    auto random_point = [&] {
        const double x = ux(rng);
        return Point{x, uy(rng)};
    };

    Scenario s;
    s.area = opt.area;
    s.tiers = reference_tiers();
    s.radio = opt.radio;
    s.qos_threshold_bps = opt.qos_threshold_bps;
    s.rng_seed = derive_seed(seed, 1);

    s.base_stations.push_back(
        BaseStation{BsId(0), 0, Point{opt.area.width_m / 2.0, opt.area.height_m / 2.0}, opt.macro_rbs});
    for (std::size_t k = 0; k < opt.pico_count; ++k)
        s.base_stations.push_back(BaseStation{BsId(s.base_stations.size()), 1, random_point(), opt.pico_rbs});
    for (std::size_t k = 0; k < opt.femto_count; ++k)
        s.base_stations.push_back(BaseStation{BsId(s.base_stations.size()), 2, random_point(), opt.femto_rbs});
    for (std::size_t j = 0; j < n_users; ++j) s.users.push_back(User{UserId(j), random_point(), std::nullopt});
    return s;
}

enum class ExperimentKind { Table1, Runtime, NonServed, Cdf, MacroRb };

inline std::string_view to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::Table1: return "table1";
    case ExperimentKind::Runtime: return "runtime";
    case ExperimentKind::NonServed: return "nonserved";
    case ExperimentKind::Cdf: return "cdf";
    case ExperimentKind::MacroRb: return "macro-rb";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(std::string_view name)
{
    for (auto k : {ExperimentKind::Table1, ExperimentKind::Runtime, ExperimentKind::NonServed, ExperimentKind::Cdf,
                   ExperimentKind::MacroRb}) {
        if (name == to_string(k)) return k;
    }
    if (name == "macro_rb") return ExperimentKind::MacroRb;
    throw StructuralError(fmt::format("unknown experiment '{}'", name));
}

/// Solver settings used by the experiment drivers: fixed beta, default step
/// budget, best state visited is reported.
inline SolverConfig default_experiment_solver() { return SolverConfig{}; }

struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::Table1;
    std::vector<std::size_t> user_counts;
    std::vector<std::size_t> etas;
    std::vector<std::uint64_t> macro_rbs; ///< empty: deployment default only
    std::size_t replications = 10;
    std::uint64_t master_seed = 1;
    bool run_max_sinr = true;
    SolverConfig solver = default_experiment_solver();
    DeploymentOptions deployment;

    void validate() const
    {
        if (replications < 1) throw StructuralError("replications must be at least 1");
        if (user_counts.empty() || etas.empty()) throw StructuralError("experiment needs user counts and eta values");
        for (auto n : user_counts)
            if (n == 0) throw StructuralError("user counts must be positive");
        for (auto e : etas)
            if (e == 0) throw StructuralError("eta must be at least 1");
    }
};

inline ExperimentSpec default_experiment(ExperimentKind kind, std::size_t replications = 10, std::uint64_t seed = 1)
{
    ExperimentSpec spec;
    spec.kind = kind;
    spec.replications = replications;
    spec.master_seed = seed;
    switch (kind) {
    case ExperimentKind::Table1:
        spec.user_counts = {50, 80, 100};
        spec.etas = {1, 2, 3, 4, 5};
        break;
    case ExperimentKind::Runtime:
        spec.user_counts = {20, 30, 40, 50, 60, 70, 80, 90, 100};
        spec.etas = {1, 2, 3, 4, 5};
        spec.run_max_sinr = false;
        break;
    case ExperimentKind::NonServed:
        spec.user_counts = {120, 160, 200, 240};
        spec.etas = {3};
        break;
    case ExperimentKind::Cdf:
        spec.user_counts = {200};
        spec.etas = {3};
        break;
    case ExperimentKind::MacroRb:
        spec.user_counts = {200};
        spec.etas = {3};
        spec.macro_rbs = {150, 175, 200, 225, 250};
        break;
    }
    return spec;
}

struct MetricsRow
{
    std::string experiment;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::size_t n_users = 0;
    std::size_t eta = 0; ///< 0 for algorithms that do not use the constraint model
    std::uint64_t macro_rbs = 0;
    std::string algorithm;
    double total_rate_bps = 0.0;
    double avg_rate_bps = 0.0; ///< total / n_users; unserved users count as 0
    std::size_t non_served = 0;
    std::size_t variables = 0;
    std::size_t inter_constraints = 0;
    double wall_clock_ms = 0.0;
};

/// One user's achieved rate; long-format rows for rate CDFs.
struct UserRateRow
{
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::size_t n_users = 0;
    std::size_t eta = 0;
    std::string algorithm;
    std::uint32_t user_id = 0;
    double rate_bps = 0.0;
};

struct ExperimentResult
{
    std::vector<MetricsRow> metrics;
    std::vector<UserRateRow> user_rates; ///< filled for the cdf experiment
};

/// Outcome of running one algorithm on one scenario instance.
struct InstanceRun
{
    Assignment assignment;
    std::size_t variables = 0;
    std::size_t inter_constraints = 0;
    double wall_clock_ms = 0.0;
};

/// Builds the ECAV-eta model and runs the chain; the timing covers both.
inline InstanceRun run_mc(const Scenario& s, const ChannelState& ch, std::size_t eta, const SolverConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = build_ecav(s, ch, eta);
    auto result = solve(model, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    return {std::move(result.assignment), model.variables.size(), model.inter_count(),
            std::chrono::duration<double, std::milli>(t1 - t0).count()};
}

inline InstanceRun run_max_sinr(const Scenario& s, const ChannelState& ch)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto a = max_sinr_solve(s, ch);
    const auto t1 = std::chrono::steady_clock::now();
    return {std::move(a), 0, 0, std::chrono::duration<double, std::milli>(t1 - t0).count()};
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    ExperimentResult out;
    const std::string name(to_string(spec.kind));
    const std::vector<std::uint64_t> macro_points =
        spec.macro_rbs.empty() ? std::vector<std::uint64_t>{spec.deployment.macro_rbs} : spec.macro_rbs;

    for (std::size_t rep = 0; rep < spec.replications; ++rep) {
        const std::uint64_t rep_seed = derive_seed(spec.master_seed, rep);
        for (auto macro : macro_points) {
            for (auto n_users : spec.user_counts) {
                DeploymentOptions dep = spec.deployment;
                dep.macro_rbs = macro;
                const Scenario s = generate_scenario(rep_seed, n_users, dep);
                const ChannelState ch = compute_channel(s);

                auto record = [&](const std::string& algo, std::size_t eta, const InstanceRun& run) {
                    MetricsRow row;
                    row.experiment = name;
                    row.replication = rep;
                    row.seed = rep_seed;
                    row.n_users = n_users;
                    row.eta = eta;
                    row.macro_rbs = macro;
                    row.algorithm = algo;
                    row.total_rate_bps = total_rate(run.assignment, ch);
                    row.avg_rate_bps = row.total_rate_bps / static_cast<double>(n_users);
                    row.non_served = non_served_users(run.assignment, s).size();
                    row.variables = run.variables;
                    row.inter_constraints = run.inter_constraints;
                    row.wall_clock_ms = run.wall_clock_ms;
                    out.metrics.push_back(row);
                    if (spec.kind == ExperimentKind::Cdf) {
                        const auto rates = user_rates(run.assignment, ch);
                        for (std::size_t j = 0; j < rates.size(); ++j)
                            out.user_rates.push_back(UserRateRow{rep, rep_seed, n_users, eta, algo,
                                                                 static_cast<std::uint32_t>(j), rates[j]});
                    }
                };

                for (auto eta : spec.etas) {
                    SolverConfig cfg = spec.solver;
                    cfg.seed = derive_seed(rep_seed, 1000 + eta);
                    record("mc", eta, run_mc(s, ch, eta, cfg));
                }
                if (spec.run_max_sinr) record("maxsinr", 0, run_max_sinr(s, ch));
            }
        }
    }
    return out;
}

struct MeanStd
{
    double mean = 0.0;
    double stddev = 0.0; ///< sample (n - 1) standard deviation; 0 for n < 2
};

inline MeanStd mean_std(const std::vector<double>& xs)
{
    MeanStd r;
    if (xs.empty()) return r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return r;
}

inline double median(std::vector<double> xs)
{
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

struct SummaryRow
{
    std::string experiment;
    std::size_t n_users = 0;
    std::size_t eta = 0;
    std::uint64_t macro_rbs = 0;
    std::string algorithm;
    std::size_t count = 0;
    MeanStd total_rate_bps;
    MeanStd avg_rate_bps;
    MeanStd non_served;
    MeanStd wall_clock_ms;
    double wall_clock_ms_median = 0.0;
};

/// Means and sample standard deviations grouped by experiment point and algorithm.
inline std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows)
{
    if (rows.empty()) throw StructuralError("summarize needs at least one row");
    using Key = std::tuple<std::string, std::size_t, std::uint64_t, std::string, std::size_t>;
    std::map<Key, std::vector<const MetricsRow*>> groups;
    for (const auto& r : rows) groups[{r.experiment, r.n_users, r.macro_rbs, r.algorithm, r.eta}].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        auto collect_raw = [&](auto field) {
            std::vector<double> xs;
            for (const auto* m : members) xs.push_back(static_cast<double>(m->*field));
            return xs;
        };
        auto collect = [&](auto field) { return mean_std(collect_raw(field)); };
        SummaryRow s;
        s.experiment = std::get<0>(key);
        s.n_users = std::get<1>(key);
        s.macro_rbs = std::get<2>(key);
        s.algorithm = std::get<3>(key);
        s.eta = std::get<4>(key);
        s.count = members.size();
        s.total_rate_bps = collect(&MetricsRow::total_rate_bps);
        s.avg_rate_bps = collect(&MetricsRow::avg_rate_bps);
        s.non_served = collect(&MetricsRow::non_served);
        s.wall_clock_ms = collect(&MetricsRow::wall_clock_ms);
        s.wall_clock_ms_median = median(collect_raw(&MetricsRow::wall_clock_ms));
        out.push_back(std::move(s));
    }
    return out;
}

// CSV writers. Metric and summary files carry no timing so that reruns are
// byte-identical; wall-clock times go to the timing files.

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows)
{
    os << "experiment,replication,seed,n_users,eta,macro_rbs,algorithm,total_rate_bps,avg_rate_bps,non_served,"
          "variables,inter_constraints\n";
    for (const auto& r : rows)
        fmt::print(os, "{},{},{},{},{},{},{},{},{},{},{},{}\n", r.experiment, r.replication, r.seed, r.n_users, r.eta,
                   r.macro_rbs, r.algorithm, r.total_rate_bps, r.avg_rate_bps, r.non_served, r.variables,
                   r.inter_constraints);
}

inline void write_timing_csv(std::ostream& os, const std::vector<MetricsRow>& rows)
{
    os << "experiment,replication,seed,n_users,eta,macro_rbs,algorithm,wall_clock_ms\n";
    for (const auto& r : rows)
        fmt::print(os, "{},{},{},{},{},{},{},{:.3f}\n", r.experiment, r.replication, r.seed, r.n_users, r.eta,
                   r.macro_rbs, r.algorithm, r.wall_clock_ms);
}

inline void write_user_rates_csv(std::ostream& os, const std::vector<UserRateRow>& rows)
{
    os << "replication,seed,n_users,eta,algorithm,user_id,rate_bps\n";
    for (const auto& r : rows)
        fmt::print(os, "{},{},{},{},{},{},{}\n", r.replication, r.seed, r.n_users, r.eta, r.algorithm, r.user_id,
                   r.rate_bps);
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "experiment,n_users,eta,macro_rbs,algorithm,count,total_rate_mean,total_rate_std,avg_rate_mean,avg_rate_std,"
          "non_served_mean,non_served_std\n";
    for (const auto& r : rows)
        fmt::print(os, "{},{},{},{},{},{},{},{},{},{},{},{}\n", r.experiment, r.n_users, r.eta, r.macro_rbs, r.algorithm,
                   r.count, r.total_rate_bps.mean, r.total_rate_bps.stddev, r.avg_rate_bps.mean, r.avg_rate_bps.stddev,
                   r.non_served.mean, r.non_served.stddev);
}

inline void write_timing_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "experiment,n_users,eta,macro_rbs,algorithm,count,wall_clock_ms_mean,wall_clock_ms_std,wall_clock_ms_median\n";
    for (const auto& r : rows)
        fmt::print(os, "{},{},{},{},{},{},{:.3f},{:.3f},{:.3f}\n", r.experiment, r.n_users, r.eta, r.macro_rbs,
                   r.algorithm, r.count, r.wall_clock_ms.mean, r.wall_clock_ms.stddev, r.wall_clock_ms_median);
}

namespace detail {

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    fn(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace detail

/// Writes metrics.csv, summary.csv, timing.csv, timing_summary.csv and (cdf
/// only) user_rates.csv into `dir`, creating it if needed.
inline void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    detail::write_file(dir / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, result.metrics); });
    detail::write_file(dir / "timing.csv", [&](std::ostream& os) { write_timing_csv(os, result.metrics); });
    if (!result.metrics.empty()) {
        const auto summary = summarize(result.metrics);
        detail::write_file(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, summary); });
        detail::write_file(dir / "timing_summary.csv", [&](std::ostream& os) { write_timing_summary_csv(os, summary); });
    }
    if (!result.user_rates.empty())
        detail::write_file(dir / "user_rates.csv", [&](std::ostream& os) { write_user_rates_csv(os, result.user_rates); });
}

} // namespace hetnet

#endif
