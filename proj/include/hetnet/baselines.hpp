#ifndef HETNET_BASELINES_HPP
#define HETNET_BASELINES_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "hetnet/assignment.hpp"
#include "hetnet/ecav.hpp"
#include "hetnet/netmodel.hpp"

namespace hetnet {

/// Per user, the BS with the highest SINR among those with a positive unit
/// rate (ties: lower BS id); empty when no BS reaches the user.
inline std::vector<std::optional<BsId>> max_sinr_attachment(const ChannelState& ch)
{
    std::vector<std::optional<BsId>> out(ch.user_count());
    for (std::size_t j = 0; j < ch.user_count(); ++j) {
        const UserId u(j);
        for (std::size_t i = 0; i < ch.bs_count(); ++i) {
            const BsId b(i);
            if (!(ch.unit_rate(b, u) > 0.0)) continue;
            if (!out[j] || ch.sinr(b, u) > ch.sinr(*out[j], u)) out[j] = b;
        }
    }
    return out;
}

/// Centralized Max-SINR association. Each user attaches to the BS with the
/// highest SINR (ties: lower BS id); each BS then grants n_min RBs to its
/// attached users by descending SINR (ties: lower user id) and stops at the
/// first user it cannot fit.
inline Assignment max_sinr_solve(const Scenario& s, const ChannelState& ch)
{
    if (ch.bs_count() != s.bs_count() || ch.user_count() != s.user_count())
        throw StructuralError("channel does not match scenario");

    std::vector<std::vector<UserId>> attached(ch.bs_count());
    const auto choice = max_sinr_attachment(ch);
    for (std::size_t j = 0; j < choice.size(); ++j) {
        if (choice[j]) attached[choice[j]->index()].emplace_back(j);
    }

    Assignment a;
    for (std::size_t i = 0; i < ch.bs_count(); ++i) {
        const BsId b(i);
        auto& users = attached[i];
        std::stable_sort(users.begin(), users.end(), [&](UserId x, UserId y) { return ch.sinr(b, x) > ch.sinr(b, y); });
        std::uint64_t remaining = s.base_stations[i].total_rbs;
        for (UserId u : users) {
            const auto need = ch.min_rbs(b, u);
            if (need == kInfeasibleRbs || need > remaining) break;
            a.set(b, u, need);
            remaining -= need;
        }
    }
    return a;
}

/// Number of users attached to each BS by the Max-SINR rule, before RB rationing.
inline std::vector<std::size_t> max_sinr_attachment_counts(const ChannelState& ch)
{
    std::vector<std::size_t> counts(ch.bs_count(), 0);
    for (const auto& b : max_sinr_attachment(ch)) {
        if (b) ++counts[b->index()];
    }
    return counts;
}

struct OracleResult
{
    Assignment optimal_assignment;
    std::vector<std::uint64_t> optimal_values;
    double optimal_utility = 0.0;
    std::uint64_t states_enumerated = 0;
};

inline constexpr std::size_t kMaxBruteForceVariables = 24;

/// Exhaustive search over all 2^|V| value vectors. Among optimal states the
/// lexicographically smallest value vector wins.
inline OracleResult brute_force_solve(const EcavModel& m)
{
    const std::size_t n = m.variables.size();
    if (n > kMaxBruteForceVariables)
        throw CapacityError(fmt::format("brute force: {} variables exceeds limit {}", n, kMaxBruteForceVariables));

    OracleResult best;
    best.optimal_values.assign(n, 0);
    bool found = false;
    std::vector<std::uint64_t> values(n, 0);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < count; ++code) {
        // Variable 0 is the most significant digit, so `code` walks value
        // vectors in lexicographic order.
        for (std::size_t v = 0; v < n; ++v) values[v] = ((code >> (n - 1 - v)) & 1U) ? m.variables[v].min_rbs : 0;
        ++best.states_enumerated;
        const auto r = model_utility(m, values);
        if (r.is_violated()) continue;
        if (!found || r.value() > best.optimal_utility) {
            found = true;
            best.optimal_utility = r.value();
            best.optimal_values = values;
        }
    }
    best.optimal_assignment = to_assignment(m, best.optimal_values);
    return best;
}

} // namespace hetnet

#endif
