#ifndef HETNET_ECAV_HPP
#define HETNET_ECAV_HPP

// "Each Connection As Variable" DCOP model of user association.
//
// Every (user, candidate BS) pair becomes a binary variable with domain
// {0, n_min^ij} owned by the BS's agent. Two constraint families couple them:
//   - inter: per user, at most one of its variables may be nonzero;
//   - intra: per agent, the RBs claimed by its variables must fit into N_i,
//     and the reward is the rate delivered to the users it serves.
// A violated constraint yields Reward::violated(), which absorbs any sum.
// The eta cap keeps only each user's eta best candidates by SINR.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetnet/assignment.hpp"
#include "hetnet/netmodel.hpp"

namespace hetnet {

inline constexpr std::size_t kUnboundedEta = std::numeric_limits<std::size_t>::max();

/// Extended real used as constraint reward: either a finite rate or
/// "violated" (minus infinity).
class Reward
{
public:
    static constexpr Reward violated() { return Reward(); }
    static constexpr Reward finite(double v) { return Reward(v); }

    constexpr bool is_violated() const { return !finite_; }
    constexpr bool is_finite() const { return finite_; }

    /// Throws std::logic_error when violated.
    double value() const
    {
        if (!finite_) throw std::logic_error("value() of a violated reward");
        return value_;
    }

    constexpr Reward& operator+=(const Reward& o)
    {
        if (!finite_ || !o.finite_) {
            finite_ = false;
            value_ = 0.0;
        } else {
            value_ += o.value_;
        }
        return *this;
    }
    friend constexpr Reward operator+(Reward a, const Reward& b) { return a += b; }
    constexpr bool operator==(const Reward&) const = default;

    friend std::ostream& operator<<(std::ostream& os, const Reward& r)
    {
        if (r.is_violated()) return os << "violated";
        return os << r.value_;
    }

private:
    constexpr Reward() = default;
    constexpr explicit Reward(double v) : finite_(true), value_(v) {}

    bool finite_ = false;
    double value_ = 0.0;
};

struct Variable
{
    BsId bs;   ///< owning agent
    UserId user;
    std::uint64_t min_rbs = 0; ///< the nonzero domain value
    double rate = 0.0;         ///< min_rbs * u_ij, delivered when active

    bool in_domain(std::uint64_t v) const { return v == 0 || v == min_rbs; }
};

enum class ConstraintKind { Inter, Intra };

struct Constraint
{
    ConstraintKind kind = ConstraintKind::Intra;
    std::vector<std::size_t> scope; ///< variable indices
    std::uint32_t anchor = 0;       ///< user id (Inter) or bs id (Intra)
};

struct EcavModel
{
    std::size_t eta = kUnboundedEta;
    std::size_t user_count = 0;
    std::vector<std::uint64_t> capacity; ///< N_i, one entry per agent
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;  ///< all inter constraints, then one intra per agent
    std::vector<std::size_t> intra_of;    ///< per variable: index of its intra constraint
    std::vector<std::optional<std::size_t>> inter_of; ///< per variable
    std::vector<std::vector<std::size_t>> user_vars;  ///< per user: its variable indices

    std::size_t agent_count() const { return capacity.size(); }
    std::size_t inter_count() const { return constraints.size() - capacity.size(); }
    const Constraint& intra(BsId b) const { return constraints[inter_count() + b.index()]; }
};

/// BSs that can meet user j's rate target within their own RB budget,
/// in ascending BS order.
inline std::vector<BsId> candidate_bs(UserId user, const Scenario& s, const ChannelState& ch)
{
    std::vector<BsId> out;
    for (std::size_t i = 0; i < ch.bs_count(); ++i) {
        const BsId b(i);
        if (ch.unit_rate(b, user) > 0.0 && ch.feasible(b, user) &&
            ch.min_rbs(b, user) <= s.base_stations[i].total_rbs)
            out.push_back(b);
    }
    return out;
}

/// Sorts candidates by SINR towards the user, descending and stable, and
/// keeps at most eta of them.
inline std::vector<BsId> top_eta(std::vector<BsId> candidates, UserId user, std::size_t eta, const ChannelState& ch)
{
    if (eta == 0) throw StructuralError("eta must be at least 1");
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](BsId a, BsId b) { return ch.sinr(a, user) > ch.sinr(b, user); });
    if (candidates.size() > eta) candidates.resize(eta);
    return candidates;
}

inline EcavModel build_ecav(const Scenario& s, const ChannelState& ch, std::size_t eta)
{
    if (eta == 0) throw StructuralError("eta must be at least 1");
    if (ch.bs_count() != s.bs_count() || ch.user_count() != s.user_count())
        throw StructuralError("channel does not match scenario");

    EcavModel m;
    m.eta = eta;
    m.user_count = s.user_count();
    for (const auto& b : s.base_stations) m.capacity.push_back(b.total_rbs);
    m.user_vars.resize(s.user_count());

    for (std::size_t j = 0; j < s.user_count(); ++j) {
        const UserId u(j);
        for (BsId b : top_eta(candidate_bs(u, s, ch), u, eta, ch)) {
            const auto n = ch.min_rbs(b, u);
            m.user_vars[j].push_back(m.variables.size());
            m.variables.push_back(Variable{b, u, n, static_cast<double>(n) * ch.unit_rate(b, u)});
        }
    }
    m.intra_of.assign(m.variables.size(), 0);
    m.inter_of.assign(m.variables.size(), std::nullopt);

    for (std::size_t j = 0; j < s.user_count(); ++j) {
        if (m.user_vars[j].size() < 2) continue;
        for (auto v : m.user_vars[j]) m.inter_of[v] = m.constraints.size();
        m.constraints.push_back(Constraint{ConstraintKind::Inter, m.user_vars[j], static_cast<std::uint32_t>(j)});
    }
    const std::size_t first_intra = m.constraints.size();
    for (std::size_t i = 0; i < s.bs_count(); ++i) {
        m.constraints.push_back(Constraint{ConstraintKind::Intra, {}, static_cast<std::uint32_t>(i)});
    }
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        const auto c = first_intra + m.variables[v].bs.index();
        m.constraints[c].scope.push_back(v);
        m.intra_of[v] = c;
    }
    return m;
}

/// Reward of one constraint given the values of its scope variables (aligned
/// with c.scope).
inline Reward constraint_reward(const EcavModel& m, const Constraint& c, std::span<const std::uint64_t> scope_values)
{
    if (scope_values.size() != c.scope.size()) throw StructuralError("scope/value size mismatch");
    for (std::size_t k = 0; k < c.scope.size(); ++k) {
        const auto& var = m.variables.at(c.scope[k]);
        if (!var.in_domain(scope_values[k]))
            throw StructuralError(fmt::format("value {} outside domain {{0, {}}} of variable {}", scope_values[k],
                                              var.min_rbs, c.scope[k]));
    }
    if (c.kind == ConstraintKind::Inter) {
        const auto active = std::count_if(scope_values.begin(), scope_values.end(), [](auto v) { return v != 0; });
        return active >= 2 ? Reward::violated() : Reward::finite(0.0);
    }
    std::uint64_t used = 0;
    double rate = 0.0;
    for (std::size_t k = 0; k < c.scope.size(); ++k) {
        if (scope_values[k] == 0) continue;
        used += scope_values[k];
        rate += m.variables[c.scope[k]].rate;
    }
    if (used > m.capacity.at(c.anchor)) return Reward::violated();
    return Reward::finite(rate);
}

/// Sum of all constraint rewards for a full assignment (one value per variable).
inline Reward model_utility(const EcavModel& m, std::span<const std::uint64_t> values)
{
    if (values.size() != m.variables.size()) throw StructuralError("one value per variable required");
    Reward total = Reward::finite(0.0);
    std::vector<std::uint64_t> scoped;
    for (const auto& c : m.constraints) {
        scoped.clear();
        for (auto v : c.scope) scoped.push_back(values[v]);
        total += constraint_reward(m, c, scoped);
        if (total.is_violated()) return total;
    }
    return total;
}

inline Assignment to_assignment(const EcavModel& m, std::span<const std::uint64_t> values)
{
    if (values.size() != m.variables.size()) throw StructuralError("one value per variable required");
    Assignment a;
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] != 0) a.set(m.variables[v].bs, m.variables[v].user, values[v]);
    }
    return a;
}

/// Value vector with variable v set to its nonzero value iff bit v of mask is set.
inline std::vector<std::uint64_t> values_from_mask(const EcavModel& m, std::uint64_t mask)
{
    std::vector<std::uint64_t> values(m.variables.size(), 0);
    for (std::size_t v = 0; v < values.size(); ++v) {
        if ((mask >> v) & 1U) values[v] = m.variables[v].min_rbs;
    }
    return values;
}

/// Human-readable listing of agents, variables and constraints. Stable
/// format; used for golden-file tests.
inline void dump_model(std::ostream& os, const EcavModel& m)
{
    fmt::print(os, "agents {}\n", m.agent_count());
    for (std::size_t i = 0; i < m.agent_count(); ++i) {
        fmt::print(os, "agent {} capacity {} vars", i, m.capacity[i]);
        for (auto v : m.intra(BsId(i)).scope) fmt::print(os, " {}", v);
        os << '\n';
    }
    fmt::print(os, "variables {}\n", m.variables.size());
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        const auto& var = m.variables[v];
        fmt::print(os, "var {} bs {} user {} domain {{0,{}}} rate {}\n", v, var.bs.value, var.user.value, var.min_rbs,
                   var.rate);
    }
    fmt::print(os, "constraints {}\n", m.constraints.size());
    for (const auto& c : m.constraints) {
        fmt::print(os, "{} {} {} scope", c.kind == ConstraintKind::Inter ? "inter user" : "intra bs", c.anchor,
                   c.scope.size());
        for (auto v : c.scope) fmt::print(os, " {}", v);
        os << '\n';
    }
}

} // namespace hetnet

#endif
