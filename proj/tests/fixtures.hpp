#ifndef HETNET_TESTS_FIXTURES_HPP
#define HETNET_TESTS_FIXTURES_HPP

#include <random>

#include "hetnet/hetnet.hpp"

namespace hetnet::support {

struct Instance
{
    Scenario scenario;
    ChannelState channel;
};

/// Hand-built instance from a BS-major table of unit rates (bit/s per RB)
/// and per-BS RB budgets.
inline Instance rate_instance(const std::vector<std::vector<double>>& unit_rate, const std::vector<std::uint64_t>& rbs,
                              double gamma = 3.0)
{
    Scenario s;
    s.area = {100.0, 100.0};
    s.tiers = {Tier{0, "macro", 46.0, 34.0, 40.0}};
    const std::size_t nb = unit_rate.size();
    const std::size_t nu = nb == 0 ? 0 : unit_rate[0].size();
    for (std::size_t i = 0; i < nb; ++i)
        s.base_stations.push_back(BaseStation{BsId(i), 0, {10.0 * static_cast<double>(i), 0.0}, rbs[i]});
    for (std::size_t j = 0; j < nu; ++j) s.users.push_back(User{UserId(j), {0.0, 10.0 + static_cast<double>(j)}, std::nullopt});
    s.qos_threshold_bps = gamma;
    Grid<double> u(nb, nu, 0.0);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nu; ++j) u(i, j) = unit_rate[i][j];
    return {s, channel_from_unit_rates(s, u)};
}

/// Two-BS, four-user worked example: B1 (N=8) reaches U1..U3 at 0.8 bit/s per
/// RB, B2 (N=10) reaches U1, U2, U4 at 1.0 bit/s per RB, gamma = 3 bit/s.
/// Zero-based: BS 0 = B1, BS 1 = B2, user k = U(k+1).
inline Instance worked_example()
{
    return rate_instance({{0.8, 0.8, 0.8, 0.0}, {1.0, 1.0, 0.0, 1.0}}, {8, 10});
}

/// Small random geometric instance: 2-3 BSs, 3-5 users in a 300 m square,
/// BS budgets of 3-10 RBs.
inline Scenario tiny_scenario(std::uint64_t seed)
{
    std::mt19937_64 rng(mix_seed(seed));
    std::uniform_int_distribution<int> nb_dist(2, 3), nu_dist(3, 5), rb_dist(3, 10), tier_dist(0, 2);
    std::uniform_real_distribution<double> pos(0.0, 300.0);

    Scenario s;
    s.area = {300.0, 300.0};
    s.tiers = reference_tiers();
    s.rng_seed = derive_seed(seed, 7);
    const int nb = nb_dist(rng);
    const int nu = nu_dist(rng);
    for (int i = 0; i < nb; ++i) {
        const int tier = tier_dist(rng);
        const double x = pos(rng);
        s.base_stations.push_back(BaseStation{BsId(i), tier, {x, pos(rng)}, static_cast<std::uint64_t>(rb_dist(rng))});
    }
    for (int j = 0; j < nu; ++j) {
        const double x = pos(rng);
        s.users.push_back(User{UserId(j), {x, pos(rng)}, std::nullopt});
    }
    return s;
}

} // namespace hetnet::support

#endif
