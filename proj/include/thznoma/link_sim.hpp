// SPDX-License-Identifier: Apache-2.0
//
// Link-level Monte Carlo: CSI mismatch models (beam squint, wavefront
// curvature), the two-user BER-versus-SNR experiment, and wall-clock
// detector throughput measurement.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thznoma/channel.hpp"
#include "thznoma/detect.hpp"

namespace thznoma {

enum class CsiModel { Perfect, IgnoreSquint, IgnoreSwp, IgnoreBoth };

std::string csi_model_name(CsiModel model);
CsiModel csi_model_from_name(const std::string& name);

/// Rebuilds the detector's channel knowledge from the truth realization's
/// geometry. Perfect keeps the truth (spherical phases at the band-edge
/// subcarrier); IgnoreSquint evaluates phases at band center; IgnoreSwp
/// substitutes planar wavefronts; IgnoreBoth does both.
ChannelRealization build_csi_estimate(const ChannelRealization& truth, CsiModel model);

/// Carrier-phase synchronization: rotates the estimate by the global phase
/// that best matches the pilot-observed channel. Structural steering and
/// curvature errors survive; the common carrier offset does not.
Eigen::MatrixXcd phase_align(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& reference);

struct LinkScenario {
    CarrierSpec carrier{300e9, 10e9, 0.0033};
    double cell_radius_m = 10.0;
    double min_user_distance_m = 0.1;
    double strong_radius_m = 5.0;
    double beamwidth_deg = 30.0;
    int users_per_drop = 100;
    int num_sas = 4;
    double sa_spacing_m = 0.025;
    double tx_gain_dbi = 16.61;
    double rx_gain_dbi = 16.61;
    double nlos_extra_loss_db = 15.0;
    int num_scatterers = 3;
    double scatter_half_angle_deg = 45.0;
    double power_fraction = 0.5;  // fixed-fraction cascade within the pair
    int constellation_order = 4;
};

struct BerCell {
    DetectorKind detector;
    CsiModel csi;
    SicRole role;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    double ci_halfwidth = 0.0;  // 95% Wilson interval
};

/// Monte Carlo over user drops, multipath channels, and noise. Every trial
/// draws from its own counter-based stream, so results are identical for any
/// worker count. SNR is referenced to the strong user's mean per-entry
/// channel power gain (per-receive-SA average SNR).
std::vector<BerCell> run_ber_experiment(const LinkScenario& scenario,
                                        const std::vector<DetectorKind>& detectors,
                                        const std::vector<CsiModel>& csi_models,
                                        const std::vector<double>& snr_grid_db, int trials,
                                        std::uint64_t seed, int threads = 1);

/// Wall-clock detected-bit throughput on synthetic full-rank channels.
double measure_detector_throughput(DetectorKind detector, int num_streams,
                                   const Constellation& constellation, double duration_s,
                                   std::uint64_t seed = 1);

double wilson_halfwidth(std::uint64_t errors, std::uint64_t bits);

}  // namespace thznoma
