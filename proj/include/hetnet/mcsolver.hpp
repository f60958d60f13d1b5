#ifndef HETNET_MCSOLVER_HPP
#define HETNET_MCSOLVER_HPP

// Markov-chain solver for the ECAV model.
//
// The combinatorial max over candidate solutions s is smoothed by
// log-sum-exp with inverse temperature beta; the maximizer of the smoothed
// problem is the Gibbs law p_s ~ exp(beta * U(s)) over feasible states. The
// chain below is a discrete-time single-site sampler with that stationary
// law: pick a variable uniformly, toggle it between 0 and n_min, reject the
// move if the variable's intra/inter constraints would be violated, otherwise
// accept with probability min(1, exp(beta * (U(s') - U(s)))).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetnet/ecav.hpp"

namespace hetnet {

/// (1/beta) * log(sum_i exp(beta * y_i)), max-shifted.
inline double logsumexp(std::span<const double> values, double beta)
{
    if (values.empty()) throw StructuralError("logsumexp of an empty list");
    if (!(beta > 0.0)) throw StructuralError("beta must be positive");
    const double top = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double y : values) acc += std::exp(beta * (y - top));
    return top + std::log(acc) / beta;
}

/// max y <= logsumexp <= max y + log(n)/beta, with `slack` absolute tolerance.
inline bool check_gap_bound(std::span<const double> values, double beta, double slack = 1e-9)
{
    const double lse = logsumexp(values, beta);
    const double top = *std::max_element(values.begin(), values.end());
    const double upper = top + std::log(static_cast<double>(values.size())) / beta;
    return top <= lse + slack && lse <= upper + slack;
}

inline double acceptance_probability(double delta, double beta)
{
    return delta >= 0.0 ? 1.0 : std::exp(beta * delta);
}

/// Gibbs law over the feasible states of a small model. States are keyed by
/// bitmask (bit v set = variable v at its nonzero value).
struct StationaryDistribution
{
    std::map<std::uint64_t, double> probability;
    std::map<std::uint64_t, double> utility;

    double at(std::uint64_t mask) const
    {
        auto it = probability.find(mask);
        return it == probability.end() ? 0.0 : it->second;
    }
    std::size_t size() const { return probability.size(); }
};

inline constexpr std::size_t kMaxStationaryVariables = 20;

inline StationaryDistribution exact_stationary(const EcavModel& m, double beta)
{
    const std::size_t n = m.variables.size();
    if (n > kMaxStationaryVariables)
        throw CapacityError(fmt::format("exact_stationary: {} variables exceeds limit {}", n, kMaxStationaryVariables));
    if (!(beta >= 0.0)) throw StructuralError("beta must be nonnegative");

    StationaryDistribution d;
    double top = -std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto r = model_utility(m, values_from_mask(m, mask));
        if (r.is_violated()) continue;
        d.utility[mask] = r.value();
        top = std::max(top, r.value());
    }
    double z = 0.0;
    for (const auto& [mask, u] : d.utility) z += std::exp(beta * (u - top));
    for (const auto& [mask, u] : d.utility) d.probability[mask] = std::exp(beta * (u - top)) / z;
    return d;
}

/// One-step transition probability of the chain between two full states.
/// Zero unless `to` is feasible and differs from `from` in exactly one
/// variable; self-loops are not represented.
inline double transition_probability(const EcavModel& m, std::span<const std::uint64_t> from,
                                     std::span<const std::uint64_t> to, double beta)
{
    const auto uf = model_utility(m, from);
    const auto ut = model_utility(m, to);
    if (uf.is_violated() || ut.is_violated()) return 0.0;
    std::size_t diffs = 0;
    for (std::size_t v = 0; v < from.size(); ++v) diffs += from[v] != to[v];
    if (diffs != 1) return 0.0;
    return acceptance_probability(ut.value() - uf.value(), beta) / static_cast<double>(m.variables.size());
}

/// Geometric schedule beta(t) = beta0 * factor^floor(t / window).
struct AnnealingSchedule
{
    double beta0 = 0.5;
    double factor = 1.5;
    std::uint64_t window = 0; ///< 0: steps / 20

    double beta_at(std::uint64_t step, std::uint64_t total_steps) const
    {
        const std::uint64_t w = window != 0 ? window : std::max<std::uint64_t>(1, total_steps / 20);
        return beta0 * std::pow(factor, static_cast<double>(step / w));
    }
};

struct SolverConfig
{
    double beta = 1.25;
    /// Scales the continuous-time rates; only enters the holding-time statistic.
    double alpha = 1.0;
    std::optional<std::uint64_t> steps; ///< unset: steps_per_variable * |V|
    std::uint64_t steps_per_variable = 2000;
    std::uint64_t seed = 0;
    std::optional<AnnealingSchedule> annealing;
    std::uint64_t report_every = 0; ///< 0: no trace

    void validate() const
    {
        if (!(beta >= 0.0) || !std::isfinite(beta)) throw StructuralError("beta must be finite and nonnegative");
        if (!(alpha > 0.0)) throw StructuralError("alpha must be positive");
        if (annealing && (!(annealing->beta0 > 0.0) || !(annealing->factor > 0.0)))
            throw StructuralError("annealing schedule must be positive");
    }

    std::uint64_t resolved_steps(const EcavModel& m) const
    {
        return steps.value_or(steps_per_variable * m.variables.size());
    }
};

enum class StepOutcome { Accepted, Rejected, Infeasible, Idle };

/// Sampler state: current values, per-agent RB counters and rate sums,
/// per-user link counters, cached utility, and the best state seen.
class Chain
{
public:
    explicit Chain(const EcavModel& m)
        : model_(&m),
          active_(m.variables.size(), 0),
          used_(m.agent_count(), 0),
          agent_rate_(m.agent_count(), 0.0),
          links_(m.user_count, 0),
          best_active_(active_)
    {
    }

    const EcavModel& model() const { return *model_; }
    bool active(std::size_t v) const { return active_[v] != 0; }
    double utility() const { return utility_; }
    double best_utility() const { return best_utility_; }
    std::uint64_t used_rbs(BsId b) const { return used_[b.index()]; }
    bool served(UserId u) const { return links_[u.index()] == 1; }
    std::uint32_t links(UserId u) const { return links_[u.index()]; }

    std::vector<std::uint64_t> values() const { return values_of(active_); }
    std::vector<std::uint64_t> best_values() const { return values_of(best_active_); }

    /// Bitmask of active variables; only meaningful for models with <= 64 variables.
    std::uint64_t mask() const
    {
        std::uint64_t out = 0;
        for (std::size_t v = 0; v < active_.size() && v < 64; ++v) out |= std::uint64_t{active_[v]} << v;
        return out;
    }

    /// Local feasibility of toggling v: consults only v's intra constraint
    /// (agent RB counter) and inter constraint (user link counter).
    bool toggle_feasible(std::size_t v) const
    {
        if (active_[v]) return true;
        const auto& var = model_->variables[v];
        return links_[var.user.index()] == 0 && used_[var.bs.index()] + var.min_rbs <= model_->capacity[var.bs.index()];
    }

    /// Utility after toggling v (v must be toggle-feasible).
    double toggled_utility(std::size_t v) const { return total_with(model_->variables[v].bs.index(), agent_rate_with(v)); }

    void toggle(std::size_t v)
    {
        const auto& var = model_->variables[v];
        const std::size_t a = var.bs.index();
        const double rate = agent_rate_with(v);
        if (active_[v]) {
            active_[v] = 0;
            used_[a] -= var.min_rbs;
            --links_[var.user.index()];
        } else {
            active_[v] = 1;
            used_[a] += var.min_rbs;
            ++links_[var.user.index()];
        }
        agent_rate_[a] = rate;
        utility_ = total_with(a, rate);
        if (utility_ > best_utility_) {
            best_utility_ = utility_;
            best_active_ = active_;
        }
    }

    template <typename Rng>
    StepOutcome step(double beta, Rng& rng)
    {
        const std::size_t n = active_.size();
        if (n == 0) return StepOutcome::Idle;
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t v = pick(rng);
        if (!toggle_feasible(v)) return StepOutcome::Infeasible;
        const double delta = toggled_utility(v) - utility_;
        const double p = acceptance_probability(delta, beta);
        if (p < 1.0) {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            if (!(coin(rng) < p)) return StepOutcome::Rejected;
        }
        toggle(v);
        return StepOutcome::Accepted;
    }

private:
    std::vector<std::uint64_t> values_of(const std::vector<std::uint8_t>& act) const
    {
        std::vector<std::uint64_t> out(act.size(), 0);
        for (std::size_t v = 0; v < act.size(); ++v) {
            if (act[v]) out[v] = model_->variables[v].min_rbs;
        }
        return out;
    }

    // Both helpers rebuild sums in the same order as model_utility so the
    // cached utility matches a from-scratch evaluation bit for bit.
    double agent_rate_with(std::size_t flipped) const
    {
        const std::size_t a = model_->variables[flipped].bs.index();
        double rate = 0.0;
        for (auto v : model_->intra(BsId(a)).scope) {
            const bool on = (v == flipped) ? !active_[v] : active_[v] != 0;
            if (on) rate += model_->variables[v].rate;
        }
        return rate;
    }

    double total_with(std::size_t agent, double rate) const
    {
        double total = 0.0;
        for (std::size_t a = 0; a < agent_rate_.size(); ++a) total += (a == agent) ? rate : agent_rate_[a];
        return total;
    }

    const EcavModel* model_;
    std::vector<std::uint8_t> active_;
    std::vector<std::uint64_t> used_;
    std::vector<double> agent_rate_;
    std::vector<std::uint32_t> links_;
    double utility_ = 0.0;
    std::vector<std::uint8_t> best_active_;
    double best_utility_ = 0.0;
};

struct TraceRow
{
    std::uint64_t step = 0;
    double utility = 0.0;
    double best_utility = 0.0;
    bool accepted = false;
};

struct RunStats
{
    std::uint64_t steps = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t infeasible = 0;
    double final_beta = 0.0;
    double wall_clock_ms = 0.0;
    /// Mean over visited states of log(1 / q_s), q_s = alpha * exp(-beta * U(s)):
    /// the log expected holding time of the continuous-time embedding.
    double mean_log_holding_time = 0.0;
    std::vector<TraceRow> trace;

    double acceptance_rate() const { return steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps); }
};

struct SolveResult
{
    Assignment assignment;
    std::vector<std::uint64_t> values;
    double utility = 0.0;
    RunStats stats;
};

/// Runs the chain from the all-zero state and returns the best feasible
/// state visited.
inline SolveResult solve(const EcavModel& m, const SolverConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t steps = cfg.resolved_steps(m);

    std::mt19937_64 rng(cfg.seed);
    Chain chain(m);
    RunStats stats;
    stats.final_beta = cfg.beta;
    if (cfg.report_every != 0) stats.trace.push_back({0, 0.0, 0.0, false});
    double holding_acc = 0.0;
    for (std::uint64_t t = 0; t < steps; ++t) {
        const double beta = cfg.annealing ? cfg.annealing->beta_at(t, steps) : cfg.beta;
        stats.final_beta = beta;
        const auto outcome = chain.step(beta, rng);
        switch (outcome) {
        case StepOutcome::Accepted: ++stats.accepted; break;
        case StepOutcome::Rejected: ++stats.rejected; break;
        case StepOutcome::Infeasible: ++stats.infeasible; break;
        case StepOutcome::Idle: break;
        }
        holding_acc += beta * chain.utility() - std::log(cfg.alpha);
        if (cfg.report_every != 0 && (t + 1) % cfg.report_every == 0)
            stats.trace.push_back({t + 1, chain.utility(), chain.best_utility(), outcome == StepOutcome::Accepted});
    }
    stats.steps = steps;
    if (steps != 0) stats.mean_log_holding_time = holding_acc / static_cast<double>(steps);

    SolveResult out;
    out.values = chain.best_values();
    out.utility = chain.best_utility();
    out.assignment = to_assignment(m, out.values);
    stats.wall_clock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.stats = std::move(stats);
    return out;
}

/// CSV trace `step,utility_bps,best_utility_bps,accepted`.
inline void write_trace_csv(std::ostream& os, const RunStats& stats)
{
    os << "step,utility_bps,best_utility_bps,accepted\n";
    for (const auto& r : stats.trace) fmt::print(os, "{},{},{},{}\n", r.step, r.utility, r.best_utility, r.accepted ? 1 : 0);
}

} // namespace hetnet

#endif
