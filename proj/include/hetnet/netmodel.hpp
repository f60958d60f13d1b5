#ifndef HETNET_NETMODEL_HPP
#define HETNET_NETMODEL_HPP

// Physical layer of a k-tier downlink HetNet: distance-based path loss,
// Rayleigh (exponential power) fading, SINR with full-reuse interference,
// per-RB unit rate and the minimum RB count that meets a user's rate target.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "hetnet/common.hpp"

namespace hetnet {

inline constexpr double kMinDistanceM = 1.0;

/// Marks a (BS, user) pair whose unit rate is zero, or whose RB requirement
/// is too large to represent.
inline constexpr std::uint64_t kInfeasibleRbs = std::numeric_limits<std::uint64_t>::max();

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

struct Point
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// All base stations of a tier share power and path-loss law
/// L(d) = pathloss_a + pathloss_b * log10(d).
struct Tier
{
    int id = 0;
    std::string name;
    double tx_power_dbm = 0.0;
    double pathloss_a = 0.0;
    double pathloss_b = 1.0;

    bool operator==(const Tier&) const = default;
};

struct BaseStation
{
    BsId id;
    int tier_id = 0;
    Point position;
    std::uint64_t total_rbs = 0;

    bool operator==(const BaseStation&) const = default;
};

struct User
{
    UserId id;
    Point position;
    /// Overrides Scenario::qos_threshold_bps when set.
    std::optional<double> rate_requirement_bps;

    bool operator==(const User&) const = default;
};

struct RadioParams
{
    double rb_bandwidth_hz = 180e3;
    double rb_time_s = 0.5e-3;
    double scheduling_interval_s = 1.0;
    double noise_power_dbm = -111.45;
    /// Multiplier turning spectral efficiency into per-RB rate. 1.0 keeps
    /// rates in normalized bit/s; literal_rate_scale() gives B*T/Gamma.
    double rate_scale = 1.0;

    double noise_power_w() const { return dbm_to_watts(noise_power_dbm); }
    double literal_rate_scale() const { return rb_bandwidth_hz * rb_time_s / scheduling_interval_s; }

    bool operator==(const RadioParams&) const = default;
};

struct Area
{
    double width_m = 1000.0;
    double height_m = 1000.0;

    bool operator==(const Area&) const = default;
};

struct Scenario
{
    Area area;
    std::vector<Tier> tiers;
    std::vector<BaseStation> base_stations;
    std::vector<User> users;
    RadioParams radio;
    double qos_threshold_bps = 3.0;
    /// Seeds the fading draw of compute_channel(scenario).
    std::uint64_t rng_seed = 0;

    std::size_t bs_count() const { return base_stations.size(); }
    std::size_t user_count() const { return users.size(); }

    double rate_requirement(UserId u) const
    {
        return users[u.index()].rate_requirement_bps.value_or(qos_threshold_bps);
    }

    const Tier& tier_of(BsId b) const
    {
        const int tid = base_stations[b.index()].tier_id;
        for (const auto& t : tiers) {
            if (t.id == tid) return t;
        }
        throw StructuralError("base station " + std::to_string(b.value) + " references unknown tier " +
                              std::to_string(tid));
    }

    bool operator==(const Scenario&) const = default;
};

/// Throws StructuralError describing the first broken invariant.
inline void validate_scenario(const Scenario& s)
{
    auto fail = [](const std::string& msg) { throw StructuralError("invalid scenario: " + msg); };
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

    if (!positive(s.area.width_m) || !positive(s.area.height_m)) fail("area must be positive");
    std::unordered_set<int> tier_ids;
    for (const auto& t : s.tiers) {
        if (!tier_ids.insert(t.id).second) fail("duplicate tier id " + std::to_string(t.id));
        if (!std::isfinite(t.tx_power_dbm)) fail("tier tx power must be finite");
        if (!std::isfinite(t.pathloss_a) || !positive(t.pathloss_b)) fail("tier path-loss slope must be positive");
    }
    auto inside = [&](Point p) {
        return p.x >= 0.0 && p.y >= 0.0 && p.x <= s.area.width_m && p.y <= s.area.height_m;
    };
    for (std::size_t i = 0; i < s.base_stations.size(); ++i) {
        const auto& b = s.base_stations[i];
        if (b.id.index() != i) fail("base station ids must be dense and ordered (expected " + std::to_string(i) + ")");
        if (!tier_ids.contains(b.tier_id)) fail("base station " + std::to_string(i) + " has unknown tier");
        if (!inside(b.position)) fail("base station " + std::to_string(i) + " outside area");
    }
    for (std::size_t j = 0; j < s.users.size(); ++j) {
        const auto& u = s.users[j];
        if (u.id.index() != j) fail("user ids must be dense and ordered (expected " + std::to_string(j) + ")");
        if (!inside(u.position)) fail("user " + std::to_string(j) + " outside area");
        if (u.rate_requirement_bps && !positive(*u.rate_requirement_bps)) fail("user rate requirement must be positive");
    }
    const auto& r = s.radio;
    if (!positive(r.rb_bandwidth_hz) || !positive(r.rb_time_s) || !positive(r.scheduling_interval_s) ||
        !std::isfinite(r.noise_power_dbm) || !positive(r.rate_scale))
        fail("radio parameters must be strictly positive");
    if (!positive(s.qos_threshold_bps)) fail("qos threshold must be positive");
}

/// Path loss in dB; distances below one meter are clamped.
inline double path_loss_db(double distance_m, const Tier& tier)
{
    const double d = std::max(distance_m, kMinDistanceM);
    return tier.pathloss_a + tier.pathloss_b * std::log10(d);
}

/// Unit-mean exponential power fading.
template <typename Rng>
double draw_fading(Rng& rng)
{
    std::exponential_distribution<double> dist(1.0);
    return dist(rng);
}

/// ceil(gamma / unit_rate), corrected so that n*u >= gamma and (n-1)*u < gamma
/// hold in floating point.
inline std::uint64_t min_rbs_for(double gamma_bps, double unit_rate_bps)
{
    if (!(unit_rate_bps > 0.0)) return kInfeasibleRbs;
    const double q = gamma_bps / unit_rate_bps;
    if (!(q < 9007199254740992.0)) return kInfeasibleRbs;
    auto n = static_cast<std::uint64_t>(std::max(1.0, std::ceil(q)));
    while (static_cast<double>(n) * unit_rate_bps < gamma_bps) ++n;
    while (n > 1 && static_cast<double>(n - 1) * unit_rate_bps >= gamma_bps) --n;
    return n;
}

struct ChannelState
{
    Grid<double> gain;      ///< linear path gain times fading (transmit power excluded)
    Grid<double> sinr;      ///< linear
    Grid<double> unit_rate; ///< bit/s per RB
    Grid<std::uint64_t> min_rbs;

    std::size_t bs_count() const { return sinr.rows(); }
    std::size_t user_count() const { return sinr.cols(); }

    bool feasible(BsId b, UserId u) const { return min_rbs(b, u) != kInfeasibleRbs; }

    bool operator==(const ChannelState&) const = default;
};

namespace detail {

inline void fill_rates(const Scenario& s, ChannelState& ch)
{
    for (std::size_t i = 0; i < ch.bs_count(); ++i) {
        for (std::size_t j = 0; j < ch.user_count(); ++j) {
            const double e = std::log2(1.0 + ch.sinr(i, j));
            ch.unit_rate(i, j) = s.radio.rate_scale * e;
            ch.min_rbs(i, j) = min_rbs_for(s.rate_requirement(UserId(j)), ch.unit_rate(i, j));
        }
    }
}

} // namespace detail

/// SINR_ij = P_i g_ij / (sum_{l != i} P_l g_lj + noise); every other BS
/// interferes through its own gain towards the user. Fading is drawn in
/// BS-major order, one draw per pair.
template <typename Rng>
ChannelState compute_channel(const Scenario& s, Rng& rng)
{
    validate_scenario(s);
    const std::size_t nb = s.bs_count();
    const std::size_t nu = s.user_count();

    ChannelState ch{Grid<double>(nb, nu), Grid<double>(nb, nu), Grid<double>(nb, nu),
                    Grid<std::uint64_t>(nb, nu, kInfeasibleRbs)};
    std::vector<double> power_w(nb);
    Grid<double> rx(nb, nu);
    for (std::size_t i = 0; i < nb; ++i) {
        const Tier& tier = s.tier_of(BsId(i));
        power_w[i] = dbm_to_watts(tier.tx_power_dbm);
        for (std::size_t j = 0; j < nu; ++j) {
            const double d = distance(s.base_stations[i].position, s.users[j].position);
            const double fade = draw_fading(rng);
            ch.gain(i, j) = std::pow(10.0, -path_loss_db(d, tier) / 10.0) * fade;
            rx(i, j) = power_w[i] * ch.gain(i, j);
        }
    }
    for (std::size_t j = 0; j < nu; ++j) {
        for (std::size_t i = 0; i < nb; ++i) {
            double interference = 0.0;
            for (std::size_t l = 0; l < nb; ++l) {
                if (l != i) interference += rx(l, j);
            }
            ch.sinr(i, j) = rx(i, j) / (interference + s.radio.noise_power_w());
        }
    }
    detail::fill_rates(s, ch);
    return ch;
}

/// Channel with fading seeded from scenario.rng_seed.
inline ChannelState compute_channel(const Scenario& s)
{
    std::mt19937_64 rng(s.rng_seed);
    return compute_channel(s, rng);
}

/// Builds a channel from prescribed SINRs (gains set to 1). Useful for
/// hand-constructed instances.
inline ChannelState channel_from_sinr(const Scenario& s, const Grid<double>& sinr)
{
    validate_scenario(s);
    if (sinr.rows() != s.bs_count() || sinr.cols() != s.user_count())
        throw StructuralError("SINR grid shape does not match scenario");
    ChannelState ch{Grid<double>(sinr.rows(), sinr.cols(), 1.0), sinr, Grid<double>(sinr.rows(), sinr.cols()),
                    Grid<std::uint64_t>(sinr.rows(), sinr.cols(), kInfeasibleRbs)};
    detail::fill_rates(s, ch);
    return ch;
}

/// Builds a channel from prescribed unit rates; SINR is back-computed so
/// SINR-ordered routines still see a consistent ranking.
inline ChannelState channel_from_unit_rates(const Scenario& s, const Grid<double>& unit_rate)
{
    validate_scenario(s);
    if (unit_rate.rows() != s.bs_count() || unit_rate.cols() != s.user_count())
        throw StructuralError("unit-rate grid shape does not match scenario");
    const std::size_t nb = unit_rate.rows();
    const std::size_t nu = unit_rate.cols();
    ChannelState ch{Grid<double>(nb, nu, 1.0), Grid<double>(nb, nu), unit_rate,
                    Grid<std::uint64_t>(nb, nu, kInfeasibleRbs)};
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < nu; ++j) {
            ch.sinr(i, j) = std::exp2(unit_rate(i, j) / s.radio.rate_scale) - 1.0;
            ch.min_rbs(i, j) = min_rbs_for(s.rate_requirement(UserId(j)), unit_rate(i, j));
        }
    }
    return ch;
}

} // namespace hetnet

#endif
