// SPDX-License-Identifier: Apache-2.0
#include "thznoma/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace thznoma {

using nlohmann::json;

std::vector<double> SnrGrid::points() const {
    if (step_db <= 0.0) throw std::invalid_argument("snr grid: step must be positive");
    if (max_db < min_db) throw std::invalid_argument("snr grid: max below min");
    std::vector<double> out;
    for (double s = min_db; s <= max_db + 1e-9; s += step_db) out.push_back(s);
    return out;
}

std::vector<double> SystemConfig::power_grid() const {
    std::vector<double> grid;
    for (double f = power_grid_min; f <= power_grid_max + 1e-12; f += power_grid_step)
        grid.push_back(f);
    return grid;
}

LinkScenario SystemConfig::link_scenario() const {
    LinkScenario sc;
    sc.carrier = carrier;
    sc.cell_radius_m = cell.radius_m;
    sc.min_user_distance_m = cell.min_user_distance_m;
    sc.strong_radius_m = strong_radius_m;
    sc.beamwidth_deg = beamwidth_from_gain(beam_gain_dbi, beam_aspect_ratio).first;
    sc.users_per_drop = ber_users_per_drop;
    sc.num_sas = num_sas;
    sc.sa_spacing_m = sa_spacing_m;
    sc.tx_gain_dbi = tx_gain_dbi;
    sc.rx_gain_dbi = rx_gain_dbi;
    sc.nlos_extra_loss_db = nlos_penalty_db;
    sc.num_scatterers = ber_num_scatterers;
    sc.scatter_half_angle_deg = ber_scatter_half_angle_deg;
    sc.power_fraction = power_fraction;
    sc.constellation_order = ber_constellation_order;
    return sc;
}

void SystemConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    require(threads >= 1, "threads must be >= 1");
    require(cell.radius_m > 0.0, "cell.radius_m must be positive");
    require(cell.min_user_distance_m >= 0.0 && cell.min_user_distance_m < cell.radius_m,
            "cell.min_user_distance_m must lie in [0, radius)");
    require(carrier.frequency_hz > 0.0, "carrier.frequency_hz must be positive");
    require(carrier.bandwidth_hz >= 0.0, "carrier.bandwidth_hz must be nonnegative");
    require(carrier.absorption_coeff_per_m >= 0.0,
            "carrier.absorption_coeff_per_m must be nonnegative");
    require(beam_gain_dbi > 0.0, "beam.gain_dbi must be positive");
    require(beam_aspect_ratio > 0.0, "beam.aspect_ratio must be positive");
    require(num_sas >= 1, "arrays.num_sas must be >= 1");
    require(elements_per_sa >= 1, "arrays.elements_per_sa must be >= 1");
    require(sa_spacing_m > 0.0, "arrays.sa_spacing_m must be positive");
    require(nlos_penalty_db >= 0.0, "gains.nlos_penalty_db must be nonnegative");
    require(total_tx_power_w > 0.0, "budget.total_tx_power_w must be positive");
    require(example_budget_w > 0.0, "budget.example_budget_w must be positive");
    require(power_fraction > 0.0 && power_fraction < 1.0,
            "noma.power_fraction must lie in (0, 1)");
    require(ftpa_alpha >= 0.0, "noma.ftpa_alpha must be nonnegative");
    require(strong_radius_m > 0.0 && strong_radius_m < cell.radius_m,
            "noma.strong_radius_m must lie in (0, cell radius)");
    require(group_size_cap == 2, "noma.group_size_cap must be 2");
    require(power_grid_min > 0.0 && power_grid_max < 1.0 && power_grid_min <= power_grid_max,
            "noma.power_grid bounds must satisfy 0 < min <= max < 1");
    require(power_grid_step > 0.0, "noma.power_grid_step must be positive");
    require(subband_hz > 0.0, "spectrum.subband_hz must be positive");
    require(subband_hz <= carrier.bandwidth_hz, "spectrum.subband_hz exceeds the window");
    require(!fairness_user_counts.empty(), "fairness.user_counts must be nonempty");
    for (int n : fairness_user_counts) require(n >= 1, "fairness.user_counts entries must be >= 1");
    require(fairness_drops >= 1, "fairness.drops must be >= 1");
    require(blockage_probability >= 0.0 && blockage_probability <= 1.0,
            "fairness.blockage_probability must lie in [0, 1]");
    require(ber_trials >= 1, "ber.trials must be >= 1");
    require(!ber_detectors.empty(), "ber.detectors must be nonempty");
    for (const auto& d : ber_detectors) detector_from_name(d);
    require(!ber_csi_models.empty(), "ber.csi_models must be nonempty");
    for (const auto& m : ber_csi_models) csi_model_from_name(m);
    require(ber_constellation_order == 4 || ber_constellation_order == 16 ||
                ber_constellation_order == 64,
            "ber.constellation_order must be 4, 16 or 64");
    require(ber_num_scatterers >= 0, "ber.num_scatterers must be nonnegative");
    require(ber_scatter_half_angle_deg > 0.0 && ber_scatter_half_angle_deg <= 90.0,
            "ber.scatter_half_angle_deg must lie in (0, 90]");
    require(ber_users_per_drop >= 2, "ber.users_per_drop must be >= 2");
    require(mulp_trials >= 1, "mulp.trials must be >= 1");
    require(gain_map_min_deg > 0.0 && gain_map_max_deg <= 360.0 &&
                gain_map_min_deg <= gain_map_max_deg,
            "gain_map spread range must satisfy 0 < min <= max <= 360");
    require(gain_map_step_deg > 0.0, "gain_map.step must be positive");
    // SNR grids throw on their own if malformed.
    (void)fairness_snr.points();
    (void)ber_snr.points();
    (void)mulp_snr.points();
    require(!fairness_snr.points().empty(), "fairness.snr grid is empty");
    require(!ber_snr.points().empty(), "ber.snr grid is empty");
    require(!mulp_snr.points().empty(), "mulp.snr grid is empty");
}

namespace {

SnrGrid grid_from_json(const json& j, const SnrGrid& fallback) {
    SnrGrid g = fallback;
    if (j.contains("min_db")) g.min_db = j.at("min_db").get<double>();
    if (j.contains("max_db")) g.max_db = j.at("max_db").get<double>();
    if (j.contains("step_db")) g.step_db = j.at("step_db").get<double>();
    return g;
}

json grid_to_json(const SnrGrid& g) {
    return json{{"min_db", g.min_db}, {"max_db", g.max_db}, {"step_db", g.step_db}};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + where + key + "'");
    }
}

}  // namespace

SystemConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    SystemConfig cfg;
    reject_unknown(j,
                   {"seed", "threads", "cell", "carrier", "beam", "arrays", "gains", "budget",
                    "noma", "spectrum", "fairness", "ber", "mulp", "gain_map"},
                   "");

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("cell")) {
        const json& c = j.at("cell");
        reject_unknown(c, {"radius_m", "min_user_distance_m"}, "cell.");
        if (c.contains("radius_m")) cfg.cell.radius_m = c.at("radius_m").get<double>();
        if (c.contains("min_user_distance_m"))
            cfg.cell.min_user_distance_m = c.at("min_user_distance_m").get<double>();
    }
    if (j.contains("carrier")) {
        const json& c = j.at("carrier");
        reject_unknown(c, {"frequency_hz", "bandwidth_hz", "absorption_coeff_per_m"}, "carrier.");
        if (c.contains("frequency_hz")) cfg.carrier.frequency_hz = c.at("frequency_hz").get<double>();
        if (c.contains("bandwidth_hz")) cfg.carrier.bandwidth_hz = c.at("bandwidth_hz").get<double>();
        if (c.contains("absorption_coeff_per_m"))
            cfg.carrier.absorption_coeff_per_m = c.at("absorption_coeff_per_m").get<double>();
    }
    if (j.contains("beam")) {
        const json& c = j.at("beam");
        reject_unknown(c, {"gain_dbi", "aspect_ratio"}, "beam.");
        if (c.contains("gain_dbi")) cfg.beam_gain_dbi = c.at("gain_dbi").get<double>();
        if (c.contains("aspect_ratio")) cfg.beam_aspect_ratio = c.at("aspect_ratio").get<double>();
    }
    if (j.contains("arrays")) {
        const json& c = j.at("arrays");
        reject_unknown(c, {"num_sas", "elements_per_sa", "sa_spacing_m"}, "arrays.");
        if (c.contains("num_sas")) cfg.num_sas = c.at("num_sas").get<int>();
        if (c.contains("elements_per_sa")) cfg.elements_per_sa = c.at("elements_per_sa").get<int>();
        if (c.contains("sa_spacing_m")) cfg.sa_spacing_m = c.at("sa_spacing_m").get<double>();
    }
    if (j.contains("gains")) {
        const json& c = j.at("gains");
        reject_unknown(c, {"tx_dbi", "rx_dbi", "nlos_penalty_db"}, "gains.");
        if (c.contains("tx_dbi")) cfg.tx_gain_dbi = c.at("tx_dbi").get<double>();
        if (c.contains("rx_dbi")) cfg.rx_gain_dbi = c.at("rx_dbi").get<double>();
        if (c.contains("nlos_penalty_db"))
            cfg.nlos_penalty_db = c.at("nlos_penalty_db").get<double>();
    }
    if (j.contains("budget")) {
        const json& c = j.at("budget");
        reject_unknown(c, {"total_tx_power_w", "example_budget_w"}, "budget.");
        if (c.contains("total_tx_power_w"))
            cfg.total_tx_power_w = c.at("total_tx_power_w").get<double>();
        if (c.contains("example_budget_w"))
            cfg.example_budget_w = c.at("example_budget_w").get<double>();
    }
    if (j.contains("noma")) {
        const json& c = j.at("noma");
        reject_unknown(c,
                       {"power_fraction", "ftpa_alpha", "strong_radius_m", "group_size_cap",
                        "power_grid_min", "power_grid_max", "power_grid_step"},
                       "noma.");
        if (c.contains("power_fraction")) cfg.power_fraction = c.at("power_fraction").get<double>();
        if (c.contains("ftpa_alpha")) cfg.ftpa_alpha = c.at("ftpa_alpha").get<double>();
        if (c.contains("strong_radius_m"))
            cfg.strong_radius_m = c.at("strong_radius_m").get<double>();
        if (c.contains("group_size_cap")) cfg.group_size_cap = c.at("group_size_cap").get<int>();
        if (c.contains("power_grid_min")) cfg.power_grid_min = c.at("power_grid_min").get<double>();
        if (c.contains("power_grid_max")) cfg.power_grid_max = c.at("power_grid_max").get<double>();
        if (c.contains("power_grid_step"))
            cfg.power_grid_step = c.at("power_grid_step").get<double>();
    }
    if (j.contains("spectrum")) {
        const json& c = j.at("spectrum");
        reject_unknown(c, {"subband_hz"}, "spectrum.");
        if (c.contains("subband_hz")) cfg.subband_hz = c.at("subband_hz").get<double>();
    }
    if (j.contains("fairness")) {
        const json& c = j.at("fairness");
        reject_unknown(c, {"user_counts", "drops", "snr", "blockage_probability"}, "fairness.");
        if (c.contains("user_counts"))
            cfg.fairness_user_counts = c.at("user_counts").get<std::vector<int>>();
        if (c.contains("drops")) cfg.fairness_drops = c.at("drops").get<int>();
        if (c.contains("snr")) cfg.fairness_snr = grid_from_json(c.at("snr"), cfg.fairness_snr);
        if (c.contains("blockage_probability"))
            cfg.blockage_probability = c.at("blockage_probability").get<double>();
    }
    if (j.contains("ber")) {
        const json& c = j.at("ber");
        reject_unknown(c,
                       {"trials", "snr", "detectors", "csi_models", "constellation_order",
                        "num_scatterers", "scatter_half_angle_deg", "users_per_drop"},
                       "ber.");
        if (c.contains("trials")) cfg.ber_trials = c.at("trials").get<int>();
        if (c.contains("snr")) cfg.ber_snr = grid_from_json(c.at("snr"), cfg.ber_snr);
        if (c.contains("detectors"))
            cfg.ber_detectors = c.at("detectors").get<std::vector<std::string>>();
        if (c.contains("csi_models"))
            cfg.ber_csi_models = c.at("csi_models").get<std::vector<std::string>>();
        if (c.contains("constellation_order"))
            cfg.ber_constellation_order = c.at("constellation_order").get<int>();
        if (c.contains("num_scatterers"))
            cfg.ber_num_scatterers = c.at("num_scatterers").get<int>();
        if (c.contains("scatter_half_angle_deg"))
            cfg.ber_scatter_half_angle_deg = c.at("scatter_half_angle_deg").get<double>();
        if (c.contains("users_per_drop"))
            cfg.ber_users_per_drop = c.at("users_per_drop").get<int>();
    }
    if (j.contains("mulp")) {
        const json& c = j.at("mulp");
        reject_unknown(c, {"trials", "snr"}, "mulp.");
        if (c.contains("trials")) cfg.mulp_trials = c.at("trials").get<int>();
        if (c.contains("snr")) cfg.mulp_snr = grid_from_json(c.at("snr"), cfg.mulp_snr);
    }
    if (j.contains("gain_map")) {
        const json& c = j.at("gain_map");
        reject_unknown(c, {"spread_min_deg", "spread_max_deg", "spread_step_deg"}, "gain_map.");
        if (c.contains("spread_min_deg"))
            cfg.gain_map_min_deg = c.at("spread_min_deg").get<double>();
        if (c.contains("spread_max_deg"))
            cfg.gain_map_max_deg = c.at("spread_max_deg").get<double>();
        if (c.contains("spread_step_deg"))
            cfg.gain_map_step_deg = c.at("spread_step_deg").get<double>();
    }
    cfg.validate();
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

std::string config_to_json(const SystemConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["cell"] = {{"radius_m", cfg.cell.radius_m},
                 {"min_user_distance_m", cfg.cell.min_user_distance_m}};
    j["carrier"] = {{"frequency_hz", cfg.carrier.frequency_hz},
                    {"bandwidth_hz", cfg.carrier.bandwidth_hz},
                    {"absorption_coeff_per_m", cfg.carrier.absorption_coeff_per_m}};
    j["beam"] = {{"gain_dbi", cfg.beam_gain_dbi}, {"aspect_ratio", cfg.beam_aspect_ratio}};
    j["arrays"] = {{"num_sas", cfg.num_sas},
                   {"elements_per_sa", cfg.elements_per_sa},
                   {"sa_spacing_m", cfg.sa_spacing_m}};
    j["gains"] = {{"tx_dbi", cfg.tx_gain_dbi},
                  {"rx_dbi", cfg.rx_gain_dbi},
                  {"nlos_penalty_db", cfg.nlos_penalty_db}};
    j["budget"] = {{"total_tx_power_w", cfg.total_tx_power_w},
                   {"example_budget_w", cfg.example_budget_w}};
    j["noma"] = {{"power_fraction", cfg.power_fraction},
                 {"ftpa_alpha", cfg.ftpa_alpha},
                 {"strong_radius_m", cfg.strong_radius_m},
                 {"group_size_cap", cfg.group_size_cap},
                 {"power_grid_min", cfg.power_grid_min},
                 {"power_grid_max", cfg.power_grid_max},
                 {"power_grid_step", cfg.power_grid_step}};
    j["spectrum"] = {{"subband_hz", cfg.subband_hz}};
    j["fairness"] = {{"user_counts", cfg.fairness_user_counts},
                     {"drops", cfg.fairness_drops},
                     {"snr", grid_to_json(cfg.fairness_snr)},
                     {"blockage_probability", cfg.blockage_probability}};
    j["ber"] = {{"trials", cfg.ber_trials},
                {"snr", grid_to_json(cfg.ber_snr)},
                {"detectors", cfg.ber_detectors},
                {"csi_models", cfg.ber_csi_models},
                {"constellation_order", cfg.ber_constellation_order},
                {"num_scatterers", cfg.ber_num_scatterers},
                {"scatter_half_angle_deg", cfg.ber_scatter_half_angle_deg},
                {"users_per_drop", cfg.ber_users_per_drop}};
    j["mulp"] = {{"trials", cfg.mulp_trials}, {"snr", grid_to_json(cfg.mulp_snr)}};
    j["gain_map"] = {{"spread_min_deg", cfg.gain_map_min_deg},
                     {"spread_max_deg", cfg.gain_map_max_deg},
                     {"spread_step_deg", cfg.gain_map_step_deg}};
    return j.dump(2);
}

std::string config_hash(const SystemConfig& cfg) {
    const std::string text = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace thznoma
