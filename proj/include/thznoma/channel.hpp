// SPDX-License-Identifier: Apache-2.0
//
// Physical-layer primitives for the sub-THz link budget: free-space path
// loss, molecular absorption, the gain/beamwidth tradeoff, steering phases
// under plane- and spherical-wavefront models, and synthesis of SA-level
// MIMO channel matrices.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "thznoma/rng.hpp"

namespace thznoma {

struct CarrierSpec {
    double frequency_hz = 300e9;
    double bandwidth_hz = 0.0;
    double absorption_coeff_per_m = 0.0;  // medium-level molecular coefficient K(f)
};

struct ArrayGeometry {
    std::vector<Eigen::Vector3d> sa_positions;
    Eigen::Vector3d reference_point = Eigen::Vector3d::Zero();
    int elements_per_sa = 1;

    int num_sas() const { return static_cast<int>(sa_positions.size()); }
};

/// Uniform linear array of SA centers along `axis`, centered on `center`.
ArrayGeometry make_ula(const Eigen::Vector3d& center, const Eigen::Vector3d& axis,
                       int num_sas, double spacing_m, int elements_per_sa = 1);

struct BeamSpec {
    double azimuth_spread_deg = 30.0;
    double elevation_spread_deg = 30.0;
    double gain_dbi = 16.61;
    double boresight_azimuth_deg = 0.0;
};

enum class Wavefront { Spherical, Planar };

struct ChannelModelFlags {
    Wavefront wavefront = Wavefront::Spherical;
    // Frequency used to evaluate steering phases. Zero means "use the
    // carrier". Setting this to the band-edge subcarrier while an estimator
    // stays at band center reproduces ignored beam squint.
    double squint_frequency_hz = 0.0;
};

struct PropagationPath {
    bool is_los = true;
    // NLoS paths reflect off a point scatterer; LoS paths go direct.
    std::optional<Eigen::Vector3d> scatter_point;
    double extra_loss_db = 0.0;
    double phase_offset_rad = 0.0;
};

struct PathRecord {
    double distance_m;   // reference-to-reference path length
    double amplitude;    // linear amplitude at that length, gains included
    bool is_los;
};

struct ChannelRealization {
    Eigen::MatrixXcd matrix;  // num_rx_sas x num_tx_sas amplitude gains
    CarrierSpec carrier;
    ArrayGeometry tx_geometry;
    ArrayGeometry rx_geometry;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    std::vector<PropagationPath> paths;
    std::vector<PathRecord> path_inventory;
    ChannelModelFlags model_flags;
};

enum class ChannelEnsembleKind { GaussianIID, ThzCorrelated, ThzOrthogonal };

/// 20*log10(4*pi*d*f/c); strictly increasing in both arguments.
double fspl_db(double distance_m, double frequency_hz);

/// exp(-K(f)*d/2), the amplitude-domain molecular absorption loss.
double absorption_amplitude(double distance_m, const CarrierSpec& carrier);

/// Directivity approximation G_dBi = 10*log10(41253 / (az_deg * el_deg)).
double gain_from_beamwidth(double azimuth_spread_deg, double elevation_spread_deg);

/// Inverse of gain_from_beamwidth with el = aspect_ratio * az.
std::pair<double, double> beamwidth_from_gain(double gain_dbi, double aspect_ratio);

struct CbfWiden {
    double gain_delta_db;
    double beamwidth_scale;
};

/// Conventional beamforming widening: deactivating elements trades gain for width.
CbfWiden cbf_widen(int active_elements, int total_elements);

/// Per-beam gain after splitting transmit power over num_beams directions.
double multibeam_split(double gain_dbi, int num_beams);

std::complex<double> steering_phase(const Eigen::Vector3d& element_position,
                                    const Eigen::Vector3d& source_position,
                                    double frequency_hz, Wavefront wavefront,
                                    const Eigen::Vector3d& reference_point);

ChannelRealization synth_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                                 const CarrierSpec& carrier, double tx_gain_dbi,
                                 double rx_gain_dbi,
                                 const std::vector<PropagationPath>& paths,
                                 const ChannelModelFlags& flags);

/// |<vec(H1), vec(H2)>| / (||H1||_F * ||H2||_F), in [0, 1].
double channel_correlation(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2);
double channel_correlation(const ChannelRealization& h1, const ChannelRealization& h2);

/// SA spacing that makes a matched-ULA LoS link satisfy H^H H ∝ I.
double orthogonal_sa_spacing(double link_distance_m, double frequency_hz, int num_sas);

ChannelRealization gen_ensemble(ChannelEnsembleKind kind, int num_rx, int num_tx,
                                const CarrierSpec& carrier, RngStream& rng);

}  // namespace thznoma
