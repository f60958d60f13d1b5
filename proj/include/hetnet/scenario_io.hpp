#ifndef HETNET_SCENARIO_IO_HPP
#define HETNET_SCENARIO_IO_HPP

// JSON scenario files. Schema (version 1) is documented in docs/formats.md.

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "hetnet/netmodel.hpp"

namespace hetnet {

inline constexpr int kScenarioFormatVersion = 1;

inline nlohmann::ordered_json scenario_to_json(const Scenario& s)
{
    nlohmann::ordered_json j;
    j["version"] = kScenarioFormatVersion;
    j["area"] = {{"width_m", s.area.width_m}, {"height_m", s.area.height_m}};
    j["qos_threshold_bps"] = s.qos_threshold_bps;
    j["rng_seed"] = s.rng_seed;
    j["radio"] = {{"rb_bandwidth_hz", s.radio.rb_bandwidth_hz},
                  {"rb_time_s", s.radio.rb_time_s},
                  {"scheduling_interval_s", s.radio.scheduling_interval_s},
                  {"noise_power_dbm", s.radio.noise_power_dbm},
                  {"rate_scale", s.radio.rate_scale}};
    auto& tiers = j["tiers"] = nlohmann::ordered_json::array();
    for (const auto& t : s.tiers) {
        tiers.push_back({{"id", t.id},
                         {"name", t.name},
                         {"tx_power_dbm", t.tx_power_dbm},
                         {"pathloss_a", t.pathloss_a},
                         {"pathloss_b", t.pathloss_b}});
    }
    auto& bss = j["base_stations"] = nlohmann::ordered_json::array();
    for (const auto& b : s.base_stations) {
        bss.push_back({{"id", b.id.value},
                       {"tier_id", b.tier_id},
                       {"x_m", b.position.x},
                       {"y_m", b.position.y},
                       {"total_rbs", b.total_rbs}});
    }
    auto& users = j["users"] = nlohmann::ordered_json::array();
    for (const auto& u : s.users) {
        nlohmann::ordered_json ju = {{"id", u.id.value}, {"x_m", u.position.x}, {"y_m", u.position.y}};
        if (u.rate_requirement_bps) ju["rate_requirement_bps"] = *u.rate_requirement_bps;
        users.push_back(std::move(ju));
    }
    return j;
}

/// Parses and validates; any missing field, type mismatch or broken
/// invariant raises StructuralError.
inline Scenario scenario_from_json(const nlohmann::json& j)
{
    Scenario s;
    try {
        const int version = j.at("version").get<int>();
        if (version != kScenarioFormatVersion)
            throw StructuralError("unsupported scenario version " + std::to_string(version));
        s.area.width_m = j.at("area").at("width_m").get<double>();
        s.area.height_m = j.at("area").at("height_m").get<double>();
        s.qos_threshold_bps = j.at("qos_threshold_bps").get<double>();
        s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        const auto& r = j.at("radio");
        s.radio.rb_bandwidth_hz = r.at("rb_bandwidth_hz").get<double>();
        s.radio.rb_time_s = r.at("rb_time_s").get<double>();
        s.radio.scheduling_interval_s = r.at("scheduling_interval_s").get<double>();
        s.radio.noise_power_dbm = r.at("noise_power_dbm").get<double>();
        s.radio.rate_scale = r.at("rate_scale").get<double>();
        for (const auto& t : j.at("tiers")) {
            s.tiers.push_back(Tier{t.at("id").get<int>(), t.value("name", std::string{}),
                                   t.at("tx_power_dbm").get<double>(), t.at("pathloss_a").get<double>(),
                                   t.at("pathloss_b").get<double>()});
        }
        for (const auto& b : j.at("base_stations")) {
            s.base_stations.push_back(BaseStation{BsId(b.at("id").get<std::uint32_t>()), b.at("tier_id").get<int>(),
                                                  Point{b.at("x_m").get<double>(), b.at("y_m").get<double>()},
                                                  b.at("total_rbs").get<std::uint64_t>()});
        }
        for (const auto& u : j.at("users")) {
            User user{UserId(u.at("id").get<std::uint32_t>()),
                      Point{u.at("x_m").get<double>(), u.at("y_m").get<double>()}, std::nullopt};
            if (u.contains("rate_requirement_bps")) user.rate_requirement_bps = u["rate_requirement_bps"].get<double>();
            s.users.push_back(user);
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed scenario: ") + e.what());
    }
    validate_scenario(s);
    return s;
}

/// Writes pretty-printed JSON, creating missing parent directories.
inline void save_scenario(const Scenario& s, const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << scenario_to_json(s).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace hetnet

#endif
