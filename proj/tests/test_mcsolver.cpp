#include <bit>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hetnet;
using hetnet::support::rate_instance;
using hetnet::support::worked_example;

namespace {

EcavModel worked_model()
{
    const auto ex = worked_example();
    return build_ecav(ex.scenario, ex.channel, 3);
}

std::uint64_t mask_of(const std::vector<std::uint64_t>& values)
{
    std::uint64_t m = 0;
    for (std::size_t v = 0; v < values.size(); ++v)
        if (values[v] != 0) m |= std::uint64_t{1} << v;
    return m;
}

} // namespace

TEST(LogSumExp, Examples)
{
    const std::vector<double> one{2.5};
    EXPECT_DOUBLE_EQ(logsumexp(one, 0.7), 2.5);

    const std::vector<double> same(7, 1.25);
    EXPECT_NEAR(logsumexp(same, 2.0), 1.25 + std::log(7.0) / 2.0, 1e-12);

    const std::vector<double> zero_one{0.0, 1.0};
    EXPECT_NEAR(logsumexp(zero_one, 1.0), std::log(1.0 + std::exp(1.0)), 1e-12);
    EXPECT_NEAR(logsumexp(zero_one, 1.0), 1.313262, 1e-6);

    const std::vector<double> zeros(10, 0.0);
    EXPECT_NEAR(logsumexp(zeros, 0.1), 10.0 * std::log(10.0), 1e-12);
    EXPECT_TRUE(check_gap_bound(zeros, 0.1));
}

TEST(LogSumExp, LargeValuesDoNotOverflow)
{
    const std::vector<double> big{1000.0, 999.0};
    EXPECT_NEAR(logsumexp(big, 5.0), 1000.0 + std::log1p(std::exp(-5.0)) / 5.0, 1e-12);
}

TEST(LogSumExp, RejectsBadInput)
{
    EXPECT_THROW(logsumexp(std::vector<double>{}, 1.0), StructuralError);
    EXPECT_THROW(logsumexp(std::vector<double>{1.0}, 0.0), StructuralError);
}

TEST(LogSumExp, GapBoundHoldsOnRandomInputs)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(1, 50);
    std::uniform_real_distribution<double> val(-100.0, 100.0), logb(-3.0, 3.0);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> ys(static_cast<std::size_t>(len(rng)));
        for (auto& y : ys) y = val(rng);
        const double beta = std::pow(10.0, logb(rng));
        const double lse = logsumexp(ys, beta);
        const double top = *std::max_element(ys.begin(), ys.end());
        ASSERT_LE(top, lse + 1e-9);
        ASSERT_LE(lse, top + std::log(static_cast<double>(ys.size())) / beta + 1e-9);
        ASSERT_TRUE(check_gap_bound(ys, beta));
    }
}

TEST(Stationary, SumsToOneAndFollowsGibbs)
{
    const auto m = worked_model();
    for (double beta : {0.0, 0.3, 1.0, 4.0}) {
        const auto d = exact_stationary(m, beta);
        double total = 0.0;
        for (const auto& [mask, p] : d.probability) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
        for (const auto& [a, pa] : d.probability)
            for (const auto& [b, pb] : d.probability)
                EXPECT_NEAR(std::log(pa / pb), beta * (d.utility.at(a) - d.utility.at(b)), 1e-9);
    }
}

TEST(Stationary, SingleFeasibleState)
{
    EcavModel empty;
    empty.eta = 1;
    const auto d = exact_stationary(empty, 1.0);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_DOUBLE_EQ(d.at(0), 1.0);
}

TEST(Stationary, ConstantUtilityIsUniform)
{
    EcavModel m;
    m.user_count = 2;
    m.capacity = {10};
    m.variables = {Variable{BsId(0), UserId(0), 2, 0.0}, Variable{BsId(0), UserId(1), 3, 0.0}};
    m.constraints = {Constraint{ConstraintKind::Intra, {0, 1}, 0}};
    m.intra_of = {0, 0};
    m.inter_of = {std::nullopt, std::nullopt};
    m.user_vars = {{0}, {1}};
    const auto d = exact_stationary(m, 3.0);
    ASSERT_EQ(d.size(), 4u);
    for (const auto& [mask, p] : d.probability) EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(Stationary, TooLargeIsCapacityError)
{
    const auto s = generate_scenario(1, 40);
    const auto m = build_ecav(s, compute_channel(s), 3);
    ASSERT_GT(m.variables.size(), kMaxStationaryVariables);
    EXPECT_THROW(exact_stationary(m, 1.0), CapacityError);
}

TEST(ChainStep, TwoStateOccupancy)
{
    const auto inst = rate_instance({{1.0}}, {10});
    const auto m = build_ecav(inst.scenario, inst.channel, 1);
    ASSERT_EQ(m.variables.size(), 1u);
    const double beta = 0.5;
    const double r = m.variables[0].rate;
    const double expected = std::exp(beta * r) / (1.0 + std::exp(beta * r));
    EXPECT_NEAR(exact_stationary(m, beta).at(1), expected, 1e-12);

    Chain chain(m);
    std::mt19937_64 rng(12);
    const int n = 1'000'000;
    int on = 0;
    for (int t = 0; t < n; ++t) {
        chain.step(beta, rng);
        on += chain.active(0);
    }
    EXPECT_NEAR(static_cast<double>(on) / n, expected, 0.01);
}

TEST(ChainStep, OverloadProposalLeavesStateUnchanged)
{
    const auto m = worked_model();
    Chain chain(m);
    // B1 (capacity 8) serves U1 and U3 with 4 RBs each.
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        const auto& var = m.variables[v];
        if (var.bs == BsId(0) && (var.user == UserId(0) || var.user == UserId(2))) chain.toggle(v);
    }
    ASSERT_EQ(chain.used_rbs(BsId(0)), 8u);
    std::size_t u2_on_b1 = 0;
    for (std::size_t v = 0; v < m.variables.size(); ++v)
        if (m.variables[v].bs == BsId(0) && m.variables[v].user == UserId(1)) u2_on_b1 = v;
    EXPECT_FALSE(chain.toggle_feasible(u2_on_b1));

    std::mt19937_64 rng(3);
    int infeasible = 0;
    for (int t = 0; t < 200 && infeasible < 5; ++t) {
        const auto before = chain.values();
        const auto used = chain.used_rbs(BsId(0));
        if (chain.step(0.0, rng) == StepOutcome::Infeasible) {
            ++infeasible;
            EXPECT_EQ(chain.values(), before);
            EXPECT_EQ(chain.used_rbs(BsId(0)), used);
        }
    }
    EXPECT_GT(infeasible, 0);
}

TEST(ChainStep, ZeroBetaAcceptsEveryFeasibleProposal)
{
    const auto m = worked_model();
    Chain chain(m);
    std::mt19937_64 rng(8);
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 20000; ++t) {
        const auto before = chain.mask();
        const auto out = chain.step(0.0, rng);
        ASSERT_NE(out, StepOutcome::Rejected);
        if (out == StepOutcome::Accepted) {
            EXPECT_EQ(std::popcount(before ^ chain.mask()), 1);
        }
        seen.insert(chain.mask());
    }
    EXPECT_EQ(seen.size(), exact_stationary(m, 0.0).size());
}

TEST(ChainStep, IdleOnEmptyModel)
{
    EcavModel empty;
    Chain chain(empty);
    std::mt19937_64 rng(1);
    EXPECT_EQ(chain.step(1.0, rng), StepOutcome::Idle);
}

TEST(Chain, DetailedBalance)
{
    const auto m = worked_model();
    for (double beta : {0.2, 1.0, 3.0}) {
        const auto d = exact_stationary(m, beta);
        int pairs = 0;
        for (const auto& [a, pa] : d.probability) {
            for (std::size_t v = 0; v < m.variables.size(); ++v) {
                const std::uint64_t b = a ^ (std::uint64_t{1} << v);
                if (!d.probability.contains(b)) continue;
                const auto va = values_from_mask(m, a);
                const auto vb = values_from_mask(m, b);
                const double lhs = pa * transition_probability(m, va, vb, beta);
                const double rhs = d.at(b) * transition_probability(m, vb, va, beta);
                ASSERT_GT(lhs, 0.0);
                EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
                ++pairs;
            }
        }
        EXPECT_GT(pairs, 0);
    }
}

TEST(Chain, FeasibleSetIsIrreducible)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = support::tiny_scenario(seed);
        const auto ch = compute_channel(s);
        const auto m = build_ecav(s, ch, s.bs_count());
        if (m.variables.size() > 14) continue;
        const auto d = exact_stationary(m, 1.0);

        std::set<std::uint64_t> reached{0};
        std::deque<std::uint64_t> queue{0};
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            for (std::size_t v = 0; v < m.variables.size(); ++v) {
                const auto next = cur | (std::uint64_t{1} << v);
                if (next == cur || reached.contains(next)) continue;
                if (model_utility(m, values_from_mask(m, next)).is_finite()) {
                    reached.insert(next);
                    queue.push_back(next);
                }
            }
        }
        EXPECT_EQ(reached.size(), d.size()) << "seed " << seed;
        for (const auto& [mask, p] : d.probability) {
            for (std::size_t v = 0; v < m.variables.size(); ++v)
                if ((mask >> v) & 1U) EXPECT_TRUE(d.probability.contains(mask & ~(std::uint64_t{1} << v)));
        }
    }
}

TEST(Chain, CachedStateMatchesRecomputation)
{
    const auto s = generate_scenario(14, 100);
    const auto ch = compute_channel(s);
    const auto m = build_ecav(s, ch, 3);
    Chain chain(m);
    std::mt19937_64 rng(77);
    for (int t = 0; t < 200000; ++t) {
        chain.step(1.25, rng);
        if (t % 997 != 0) continue;
        const auto values = chain.values();
        const auto r = model_utility(m, values);
        ASSERT_TRUE(r.is_finite());
        ASSERT_EQ(chain.utility(), r.value());
        ASSERT_EQ(chain.utility(), total_rate(to_assignment(m, values), ch));
        std::vector<std::uint64_t> used(m.agent_count(), 0);
        std::vector<int> links(m.user_count, 0);
        for (std::size_t v = 0; v < values.size(); ++v) {
            used[m.variables[v].bs.index()] += values[v];
            links[m.variables[v].user.index()] += values[v] != 0;
        }
        for (std::size_t i = 0; i < m.agent_count(); ++i) {
            ASSERT_EQ(chain.used_rbs(BsId(i)), used[i]);
            ASSERT_LE(used[i], m.capacity[i]);
        }
        for (std::size_t j = 0; j < m.user_count; ++j) ASSERT_EQ(chain.served(UserId(j)), links[j] == 1);
    }
    EXPECT_EQ(chain.best_utility(), model_utility(m, chain.best_values()).value());
}

TEST(Chain, ConcentratesOnOptimumAtHighBeta)
{
    // Two users, two BSs: serving both is worth 6 bit/s, serving one 3 bit/s.
    const auto inst = rate_instance({{1.0, 1.0}, {1.0, 1.0}}, {6, 4});
    const auto m = build_ecav(inst.scenario, inst.channel, 2);
    const auto d = exact_stationary(m, 10.0);
    double best = 0.0, second = 0.0;
    for (const auto& [mask, u] : d.utility) best = std::max(best, u);
    for (const auto& [mask, u] : d.utility)
        if (u < best) second = std::max(second, u);
    ASSERT_GE(best - second, 1.0);

    Chain chain(m);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10000; ++t) chain.step(10.0, rng);
    const int n = 100000;
    int at_best = 0;
    for (int t = 0; t < n; ++t) {
        chain.step(10.0, rng);
        at_best += chain.utility() == best;
    }
    EXPECT_GT(static_cast<double>(at_best) / n, 0.9);
}

TEST(Solve, WorkedExampleReachesOptimum)
{
    const auto m = worked_model();
    const auto oracle = brute_force_solve(m);
    EXPECT_NEAR(oracle.optimal_utility, 12.4, 1e-12);
    SolverConfig cfg;
    cfg.seed = 2;
    const auto r = solve(m, cfg);
    EXPECT_EQ(r.utility, oracle.optimal_utility);
    EXPECT_EQ(model_utility(m, r.values).value(), r.utility);
    EXPECT_EQ(r.stats.steps, 2000u * 6u);
    EXPECT_EQ(r.stats.accepted + r.stats.rejected + r.stats.infeasible, r.stats.steps);
}

TEST(Solve, ZeroStepsReturnsEmpty)
{
    const auto m = worked_model();
    SolverConfig cfg;
    cfg.steps = 0;
    const auto r = solve(m, cfg);
    EXPECT_TRUE(r.assignment.empty());
    EXPECT_EQ(r.utility, 0.0);
    EXPECT_EQ(r.stats.acceptance_rate(), 0.0);
}

TEST(Solve, SeedDeterminesOutput)
{
    const auto s = generate_scenario(10, 60);
    const auto m = build_ecav(s, compute_channel(s), 3);
    SolverConfig cfg;
    cfg.seed = 99;
    cfg.steps = 50000;
    cfg.report_every = 1000;
    const auto a = solve(m, cfg);
    const auto b = solve(m, cfg);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.utility, b.utility);
    EXPECT_EQ(a.stats.accepted, b.stats.accepted);
    std::ostringstream ta, tb;
    write_trace_csv(ta, a.stats);
    write_trace_csv(tb, b.stats);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_EQ(a.stats.trace.size(), 51u);
    EXPECT_EQ(ta.str().substr(0, ta.str().find('\n')), "step,utility_bps,best_utility_bps,accepted");
}

TEST(Solve, AnnealingRaisesBeta)
{
    const AnnealingSchedule sched{0.5, 1.5, 0};
    EXPECT_DOUBLE_EQ(sched.beta_at(0, 2000), 0.5);
    EXPECT_DOUBLE_EQ(sched.beta_at(99, 2000), 0.5);
    EXPECT_DOUBLE_EQ(sched.beta_at(100, 2000), 0.75);
    EXPECT_DOUBLE_EQ(sched.beta_at(1999, 2000), 0.5 * std::pow(1.5, 19));

    const auto m = worked_model();
    SolverConfig cfg;
    cfg.annealing = sched;
    cfg.steps = 2000;
    const auto r = solve(m, cfg);
    EXPECT_DOUBLE_EQ(r.stats.final_beta, 0.5 * std::pow(1.5, 19));
}

TEST(Solve, RejectsBadConfig)
{
    const auto m = worked_model();
    SolverConfig cfg;
    cfg.beta = -1.0;
    EXPECT_THROW(solve(m, cfg), StructuralError);
    cfg.beta = 1.0;
    cfg.alpha = 0.0;
    EXPECT_THROW(solve(m, cfg), StructuralError);
}

TEST(Solve, HoldingTimeStatistic)
{
    const auto inst = rate_instance({{1.0}}, {10});
    const auto m = build_ecav(inst.scenario, inst.channel, 1);
    SolverConfig cfg;
    cfg.steps = 200000;
    cfg.beta = 0.5;
    cfg.alpha = 2.0;
    const auto r = solve(m, cfg);
    const double p_on = exact_stationary(m, 0.5).at(1);
    const double expected = p_on * 0.5 * m.variables[0].rate - std::log(2.0);
    EXPECT_NEAR(r.stats.mean_log_holding_time, expected, 0.02);
}
