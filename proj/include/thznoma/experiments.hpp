// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: the four paper-style experiments as pure
// functions of (config, seed), CSV serialization with unit-bearing headers,
// and the run manifest. All Monte Carlo paths derive per-trial counter
// streams, so outputs are byte-identical for any worker count.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thznoma/config.hpp"
#include "thznoma/link_sim.hpp"
#include "thznoma/mulp.hpp"
#include "thznoma/noma.hpp"

namespace thznoma {

struct FairnessRow {
    std::string scheme;  // noma_distance | noma_exhaustive | oma_fdma
    int n_users = 0;
    double snr_db = 0.0;
    double overall_ff = 0.0;
    double mean_sum_rate_bps = 0.0;
};

/// Per-drop fairness samples for one (scheme, n_users, snr) cell; used for
/// bootstrap confidence checks.
struct FairnessSamples {
    std::string scheme;
    int n_users = 0;
    double snr_db = 0.0;
    std::vector<double> ff_per_drop;
    std::vector<double> sum_rate_per_drop;
};

struct FairnessResult {
    std::vector<FairnessRow> rows;
    std::vector<FairnessSamples> samples;
};

FairnessResult run_fairness_experiment(const SystemConfig& cfg);

/// Link budget used by the system-level experiments:
/// g = 10^((Gt+Gr)/10) * (c/(4*pi*f*d))^2 * e^(-K d) * NLoS penalty.
double system_channel_power_gain(const SystemConfig& cfg, double distance_m, bool is_los);

struct GainMapRow {
    double azimuth_spread_deg;
    double elevation_spread_deg;
    double gain_dbi;
};

std::vector<GainMapRow> gain_map(const SystemConfig& cfg);

struct PowerExampleRow {
    std::string scheme;  // fixed_fraction | ftpa
    int user_index;
    double distance_m;
    double power_mw;
    double receive_power_dbm;
};

/// The three-user worked example: distances 7/1.2/1 m, configured budget and
/// fraction, FTPA with gains proportional to d^-2, receive powers at 0 dBi.
std::vector<PowerExampleRow> power_example(const SystemConfig& cfg);

std::vector<BerCell> run_ber_from_config(const SystemConfig& cfg);
std::vector<SumRateCurve> run_mulp_from_config(const SystemConfig& cfg);

struct ThroughputRow {
    std::string detector;
    int dims;
    int order;
    double bits_per_second;
};

std::vector<ThroughputRow> run_throughput_bench(const SystemConfig& cfg, double duration_s);

// CSV emission; headers name units, numeric formatting is locale-free and
// stable so identical runs produce identical bytes.
std::string fairness_csv(const std::vector<FairnessRow>& rows);
std::string ber_csv(const std::vector<BerCell>& cells);
std::string mulp_csv(const std::vector<SumRateCurve>& curves);
std::string gain_map_csv(const std::vector<GainMapRow>& rows);
std::string power_example_csv(const std::vector<PowerExampleRow>& rows);
std::string throughput_csv(const std::vector<ThroughputRow>& rows);
std::string channel_dump_csv(const Eigen::MatrixXcd& matrix);
std::string groups_csv(const std::vector<NomaGroup>& groups);

std::string run_manifest_json(const SystemConfig& cfg, const std::string& command,
                              const std::vector<std::string>& outputs, double wall_seconds);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace thznoma
