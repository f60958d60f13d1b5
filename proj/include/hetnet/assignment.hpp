#ifndef HETNET_ASSIGNMENT_HPP
#define HETNET_ASSIGNMENT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hetnet/netmodel.hpp"

namespace hetnet {

/// Sparse RB allocation n_ij. Pairs that are absent have n_ij = 0 (x_ij = 0).
class Assignment
{
public:
    using Key = std::pair<BsId, UserId>;

    /// Setting zero removes the pair.
    void set(BsId bs, UserId user, std::uint64_t rbs)
    {
        if (rbs == 0) {
            alloc_.erase({bs, user});
        } else {
            alloc_[{bs, user}] = rbs;
        }
    }

    std::uint64_t rbs(BsId bs, UserId user) const
    {
        auto it = alloc_.find({bs, user});
        return it == alloc_.end() ? 0 : it->second;
    }

    const std::map<Key, std::uint64_t>& entries() const { return alloc_; }
    std::size_t size() const { return alloc_.size(); }
    bool empty() const { return alloc_.empty(); }

    bool operator==(const Assignment&) const = default;

private:
    std::map<Key, std::uint64_t> alloc_;
};

namespace detail {

inline void check_key(const Assignment::Key& k, std::size_t nb, std::size_t nu)
{
    if (k.first.index() >= nb)
        throw StructuralError("assignment references unknown base station " + std::to_string(k.first.value));
    if (k.second.index() >= nu)
        throw StructuralError("assignment references unknown user " + std::to_string(k.second.value));
}

} // namespace detail

/// Objective: sum_i sum_j n_ij * u_ij. Summed per BS first (users ascending),
/// then across BSs, so the result is bit-identical to the per-agent reward sum
/// of the constraint model.
inline double total_rate(const Assignment& a, const ChannelState& ch)
{
    std::vector<double> per_bs(ch.bs_count(), 0.0);
    for (const auto& [key, n] : a.entries()) {
        detail::check_key(key, ch.bs_count(), ch.user_count());
        per_bs[key.first.index()] += static_cast<double>(n) * ch.unit_rate(key.first, key.second);
    }
    double total = 0.0;
    for (double r : per_bs) total += r;
    return total;
}

/// Rate received by each user (0 for users without allocation).
inline std::vector<double> user_rates(const Assignment& a, const ChannelState& ch)
{
    std::vector<double> rates(ch.user_count(), 0.0);
    for (const auto& [key, n] : a.entries()) {
        detail::check_key(key, ch.bs_count(), ch.user_count());
        rates[key.second.index()] += static_cast<double>(n) * ch.unit_rate(key.first, key.second);
    }
    return rates;
}

struct CapacityViolation
{
    BsId bs;
    std::uint64_t used = 0;
    std::uint64_t total = 0;

    bool operator==(const CapacityViolation&) const = default;
};

struct ViolationReport
{
    std::vector<UserId> qos;                          ///< rate below gamma_j
    std::vector<CapacityViolation> capacity;          ///< sum_j n_ij > N_i
    std::vector<UserId> uniqueness;                   ///< served by more than one BS
    std::vector<Assignment::Key> range;               ///< n_ij > N_i

    bool ok() const { return qos.empty() && capacity.empty() && uniqueness.empty() && range.empty(); }

    /// Everything except the QoS family, i.e. the checks that still apply
    /// when serving a user is optional.
    bool structurally_feasible() const { return capacity.empty() && uniqueness.empty() && range.empty(); }
};

/// Checks every constraint family of the association program independently.
/// The QoS family is strict: an unserved user is a violation.
inline ViolationReport validate(const Assignment& a, const Scenario& s, const ChannelState& ch)
{
    const std::size_t nb = s.bs_count();
    const std::size_t nu = s.user_count();
    if (ch.bs_count() != nb || ch.user_count() != nu) throw StructuralError("channel does not match scenario");

    std::vector<std::uint64_t> used(nb, 0);
    std::vector<std::uint32_t> links(nu, 0);
    std::vector<double> rate(nu, 0.0);
    ViolationReport report;
    for (const auto& [key, n] : a.entries()) {
        detail::check_key(key, nb, nu);
        const auto [b, u] = key;
        used[b.index()] += n;
        ++links[u.index()];
        rate[u.index()] += static_cast<double>(n) * ch.unit_rate(b, u);
        if (n > s.base_stations[b.index()].total_rbs) report.range.push_back(key);
    }
    for (std::size_t j = 0; j < nu; ++j) {
        if (rate[j] < s.rate_requirement(UserId(j))) report.qos.emplace_back(j);
        if (links[j] > 1) report.uniqueness.emplace_back(j);
    }
    for (std::size_t i = 0; i < nb; ++i) {
        const auto cap = s.base_stations[i].total_rbs;
        if (used[i] > cap) report.capacity.push_back({BsId(i), used[i], cap});
    }
    return report;
}

inline std::vector<UserId> non_served_users(const Assignment& a, const Scenario& s)
{
    std::vector<bool> served(s.user_count(), false);
    for (const auto& [key, n] : a.entries()) {
        if (key.second.index() < served.size()) served[key.second.index()] = true;
    }
    std::vector<UserId> out;
    for (std::size_t j = 0; j < served.size(); ++j) {
        if (!served[j]) out.emplace_back(j);
    }
    return out;
}

/// CSV with header `bs_id,user_id,n_rbs,rate_bps`, rows in (bs, user) order.
inline void write_assignment_csv(std::ostream& os, const Assignment& a, const ChannelState& ch)
{
    os << "bs_id,user_id,n_rbs,rate_bps\n";
    for (const auto& [key, n] : a.entries()) {
        detail::check_key(key, ch.bs_count(), ch.user_count());
        fmt::print(os, "{},{},{},{}\n", key.first.value, key.second.value, n,
                   static_cast<double>(n) * ch.unit_rate(key.first, key.second));
    }
}

} // namespace hetnet

#endif
