// SPDX-License-Identifier: Apache-2.0
//
// Two-user NOMA versus MU-LP under zero-forcing beamforming: precoder
// construction, sum rates, and the multiplexing-gain (slope) experiment
// across Gaussian, correlated-THz, and orthogonal-THz ensembles.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "thznoma/channel.hpp"

namespace thznoma {

enum class PrecodingScheme { NomaZfbf, MuLpZfbf };

std::string scheme_name(PrecodingScheme scheme);
std::string ensemble_name(ChannelEnsembleKind kind);

struct ZfbfResult {
    Eigen::MatrixXcd precoder;  // one unit-norm column per user
    bool exact = true;          // false when least-squares fallback was used
};

/// Column i maximizes the served gain inside the null space of all other
/// users' rows. Throws SingularChannelError when exact nulling is infeasible
/// unless allow_degraded is set, in which case the minimum-leakage direction
/// is used and flagged.
ZfbfResult zfbf_precoder(const std::vector<Eigen::MatrixXcd>& user_channels,
                         bool allow_degraded = false);

/// Sum of log2(1 + SINR_i) with MRC combining and residual leakage counted
/// as interference. Equal power split across users. Rate in bit/s/Hz.
double mulp_sum_rate(const std::vector<Eigen::MatrixXcd>& user_channels,
                     const Eigen::MatrixXcd& precoder, double power_budget_w, double noise_w);

/// Two-user NOMA with matched beamforming for the weak user, zero-forced
/// strong-user beam, the SIC-decodability cap on the weak message, and a
/// grid search over the power split maximizing the sum rate.
double noma_zfbf_sum_rate(const std::vector<Eigen::MatrixXcd>& user_channels,
                          double power_budget_w, double noise_w,
                          const std::vector<double>& split_grid);

/// Least-squares rate slope over the top octave of the SNR grid, reported in
/// bit/s/Hz per 3.01 dB.
double slope_top_octave(const std::vector<double>& snr_db, const std::vector<double>& rate);

struct SumRateCurve {
    ChannelEnsembleKind ensemble;
    PrecodingScheme scheme;
    std::vector<double> snr_db;
    std::vector<double> mean_rate_bps_hz;
    double slope_top_octave = 0.0;
    int trials = 0;
};

std::vector<SumRateCurve> run_mulp_experiment(const std::vector<double>& snr_grid_db,
                                              const std::vector<ChannelEnsembleKind>& ensembles,
                                              int trials, const CarrierSpec& carrier,
                                              std::uint64_t seed, int threads = 1);

}  // namespace thznoma
