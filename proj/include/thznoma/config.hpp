// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thznoma/channel.hpp"
#include "thznoma/detect.hpp"
#include "thznoma/geometry.hpp"
#include "thznoma/link_sim.hpp"

namespace thznoma {

struct SnrGrid {
    double min_db = 0.0;
    double max_db = 30.0;
    double step_db = 3.0;

    std::vector<double> points() const;
};

struct SystemConfig {
    std::uint64_t seed = 12345;
    int threads = 1;

    CellSpec cell;                               // 10 m radius, 0.1 m keep-out
    CarrierSpec carrier{300e9, 10e9, 0.0033};    // 300 GHz window, 10 GHz wide
    double beam_gain_dbi = 16.61;                // 30 x 30 degree beams
    double beam_aspect_ratio = 1.0;

    int num_sas = 4;
    int elements_per_sa = 64;
    double sa_spacing_m = 0.025;
    double tx_gain_dbi = 16.61;
    double rx_gain_dbi = 16.61;
    double nlos_penalty_db = 15.0;

    double total_tx_power_w = 0.24;              // 20 mW per beam across 12 beams
    double example_budget_w = 0.02;
    double power_fraction = 0.5;
    double ftpa_alpha = 1.0;
    double strong_radius_m = 5.0;
    int group_size_cap = 2;
    double power_grid_min = 0.05;
    double power_grid_max = 0.95;
    double power_grid_step = 0.05;
    double subband_hz = 1e9;

    // fairness experiment
    std::vector<int> fairness_user_counts{20, 50};
    int fairness_drops = 200;
    SnrGrid fairness_snr{46.0, 100.0, 6.0};
    double blockage_probability = 0.0;

    // ber experiment
    int ber_trials = 12500;
    SnrGrid ber_snr{0.0, 24.0, 3.0};
    std::vector<std::string> ber_detectors{"nc", "lord"};
    std::vector<std::string> ber_csi_models{"perfect", "ignore_squint", "ignore_swp",
                                            "ignore_both"};
    int ber_constellation_order = 4;
    int ber_num_scatterers = 3;
    double ber_scatter_half_angle_deg = 45.0;
    int ber_users_per_drop = 100;

    // mulp experiment
    int mulp_trials = 400;
    SnrGrid mulp_snr{0.0, 30.0, 3.0};

    // gain map
    double gain_map_min_deg = 5.0;
    double gain_map_max_deg = 60.0;
    double gain_map_step_deg = 5.0;

    std::vector<double> power_grid() const;
    LinkScenario link_scenario() const;

    /// Throws std::invalid_argument naming the first violated field.
    void validate() const;
};

/// Parses the JSON config file; unknown keys are rejected, missing keys keep
/// defaults. Validates before returning.
SystemConfig load_config(const std::string& path);
SystemConfig config_from_json_text(const std::string& text);

std::string config_to_json(const SystemConfig& cfg);

/// FNV-1a over the canonical JSON dump, hex-encoded.
std::string config_hash(const SystemConfig& cfg);

}  // namespace thznoma
