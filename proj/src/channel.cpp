// SPDX-License-Identifier: Apache-2.0
#include "thznoma/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "thznoma/constants.hpp"
#include "thznoma/errors.hpp"

namespace thznoma {

namespace {

double path_length(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return (a - b).norm();
}

}  // namespace

ArrayGeometry make_ula(const Eigen::Vector3d& center, const Eigen::Vector3d& axis,
                       int num_sas, double spacing_m, int elements_per_sa) {
    if (num_sas < 1) throw std::domain_error("make_ula: num_sas must be >= 1");
    if (num_sas > 1 && spacing_m <= 0.0)
        throw std::domain_error("make_ula: spacing must be positive");
    const Eigen::Vector3d dir = axis.normalized();
    ArrayGeometry geo;
    geo.reference_point = center;
    geo.elements_per_sa = elements_per_sa;
    geo.sa_positions.reserve(num_sas);
    const double half_span = 0.5 * (num_sas - 1) * spacing_m;
    for (int i = 0; i < num_sas; ++i)
        geo.sa_positions.push_back(center + dir * (i * spacing_m - half_span));
    return geo;
}

double fspl_db(double distance_m, double frequency_hz) {
    if (distance_m <= 0.0) throw std::domain_error("fspl_db: distance must be positive");
    if (frequency_hz <= 0.0) throw std::domain_error("fspl_db: frequency must be positive");
    return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kSpeedOfLight);
}

double absorption_amplitude(double distance_m, const CarrierSpec& carrier) {
    if (distance_m < 0.0) throw std::domain_error("absorption_amplitude: negative distance");
    if (carrier.absorption_coeff_per_m < 0.0)
        throw std::domain_error("absorption_amplitude: negative absorption coefficient");
    return std::exp(-0.5 * carrier.absorption_coeff_per_m * distance_m);
}

double gain_from_beamwidth(double azimuth_spread_deg, double elevation_spread_deg) {
    if (azimuth_spread_deg <= 0.0 || azimuth_spread_deg > 360.0 ||
        elevation_spread_deg <= 0.0 || elevation_spread_deg > 360.0)
        throw std::domain_error("gain_from_beamwidth: spreads must lie in (0, 360]");
    return 10.0 * std::log10(kFullSphereSquareDeg / (azimuth_spread_deg * elevation_spread_deg));
}

std::pair<double, double> beamwidth_from_gain(double gain_dbi, double aspect_ratio) {
    if (aspect_ratio <= 0.0)
        throw std::domain_error("beamwidth_from_gain: aspect ratio must be positive");
    const double product = kFullSphereSquareDeg / std::pow(10.0, gain_dbi / 10.0);
    const double azimuth = std::sqrt(product / aspect_ratio);
    const double elevation = aspect_ratio * azimuth;
    if (azimuth > 360.0 || elevation > 360.0)
        throw std::domain_error("beamwidth_from_gain: gain infeasible for spreads <= 360 deg");
    return {azimuth, elevation};
}

CbfWiden cbf_widen(int active_elements, int total_elements) {
    if (active_elements < 1 || total_elements < 1 || active_elements > total_elements)
        throw std::domain_error("cbf_widen: need 1 <= active <= total");
    const double ratio = static_cast<double>(active_elements) / total_elements;
    return {10.0 * std::log10(ratio), std::sqrt(1.0 / ratio)};
}

double multibeam_split(double gain_dbi, int num_beams) {
    if (num_beams < 1) throw std::domain_error("multibeam_split: num_beams must be >= 1");
    return gain_dbi - 10.0 * std::log10(static_cast<double>(num_beams));
}

std::complex<double> steering_phase(const Eigen::Vector3d& element_position,
                                    const Eigen::Vector3d& source_position,
                                    double frequency_hz, Wavefront wavefront,
                                    const Eigen::Vector3d& reference_point) {
    if (frequency_hz <= 0.0) throw std::domain_error("steering_phase: frequency must be positive");
    double distance;
    if (wavefront == Wavefront::Spherical) {
        distance = path_length(source_position, element_position);
        if (distance == 0.0)
            throw std::domain_error("steering_phase: coincident source and element");
    } else {
        const double ref_distance = path_length(source_position, reference_point);
        if (ref_distance == 0.0)
            throw std::domain_error("steering_phase: coincident source and reference");
        const Eigen::Vector3d u = (reference_point - source_position) / ref_distance;
        distance = ref_distance + u.dot(element_position - reference_point);
    }
    const double phase = -2.0 * kPi * frequency_hz * distance / kSpeedOfLight;
    return std::polar(1.0, phase);
}

ChannelRealization synth_channel(const ArrayGeometry& tx, const ArrayGeometry& rx,
                                 const CarrierSpec& carrier, double tx_gain_dbi,
                                 double rx_gain_dbi,
                                 const std::vector<PropagationPath>& paths,
                                 const ChannelModelFlags& flags) {
    if (tx.num_sas() < 1 || rx.num_sas() < 1)
        throw std::domain_error("synth_channel: empty array geometry");
    if (paths.empty()) throw std::domain_error("synth_channel: path list is empty");

    const double f_carrier = carrier.frequency_hz;
    const double f_phase = flags.squint_frequency_hz > 0.0 ? flags.squint_frequency_hz : f_carrier;
    const double gain_amplitude = std::pow(10.0, (tx_gain_dbi + rx_gain_dbi) / 20.0);

    ChannelRealization out;
    out.matrix = Eigen::MatrixXcd::Zero(rx.num_sas(), tx.num_sas());
    out.carrier = carrier;
    out.tx_geometry = tx;
    out.rx_geometry = rx;
    out.tx_gain_dbi = tx_gain_dbi;
    out.rx_gain_dbi = rx_gain_dbi;
    out.paths = paths;
    out.model_flags = flags;

    // Planar mode linearizes each hop around the array references, exactly as
    // steering_phase does with the far end (or scatterer) as the source.
    const auto entry_distance = [&](const PropagationPath& path, int m, int n) -> double {
        const Eigen::Vector3d& tx_pos = tx.sa_positions[n];
        const Eigen::Vector3d& rx_pos = rx.sa_positions[m];
        if (!path.scatter_point) {
            if (flags.wavefront == Wavefront::Spherical) return path_length(tx_pos, rx_pos);
            const double d0 = path_length(tx.reference_point, rx.reference_point);
            if (d0 == 0.0) throw std::domain_error("synth_channel: coincident references");
            const Eigen::Vector3d v = (tx.reference_point - rx.reference_point) / d0;
            return d0 + v.dot(tx_pos - tx.reference_point) - v.dot(rx_pos - rx.reference_point);
        }
        const Eigen::Vector3d& s = *path.scatter_point;
        if (flags.wavefront == Wavefront::Spherical)
            return path_length(tx_pos, s) + path_length(s, rx_pos);
        const double dt = path_length(s, tx.reference_point);
        const double dr = path_length(s, rx.reference_point);
        if (dt == 0.0 || dr == 0.0)
            throw std::domain_error("synth_channel: scatterer coincides with a reference");
        const Eigen::Vector3d ut = (tx.reference_point - s) / dt;
        const Eigen::Vector3d ur = (rx.reference_point - s) / dr;
        return dt + ut.dot(tx_pos - tx.reference_point) + dr + ur.dot(rx_pos - rx.reference_point);
    };

    const auto reference_distance = [&](const PropagationPath& path) -> double {
        if (!path.scatter_point)
            return path_length(tx.reference_point, rx.reference_point);
        return path_length(tx.reference_point, *path.scatter_point) +
               path_length(*path.scatter_point, rx.reference_point);
    };

    double los_ref_amplitude = -1.0;
    for (const PropagationPath& path : paths) {
        const double extra = std::pow(10.0, -path.extra_loss_db / 20.0);
        const double d_ref = reference_distance(path);
        if (d_ref <= 0.0) throw std::domain_error("synth_channel: zero-length path");
        const double a_ref = gain_amplitude * kSpeedOfLight / (4.0 * kPi * f_carrier * d_ref) *
                             absorption_amplitude(d_ref, carrier) * extra;
        out.path_inventory.push_back({d_ref, a_ref, path.is_los});
        if (path.is_los && a_ref > los_ref_amplitude) los_ref_amplitude = a_ref;

        for (int m = 0; m < rx.num_sas(); ++m) {
            for (int n = 0; n < tx.num_sas(); ++n) {
                const double d = entry_distance(path, m, n);
                if (d <= 0.0) throw std::domain_error("synth_channel: zero-distance path entry");
                const double amp = gain_amplitude * kSpeedOfLight / (4.0 * kPi * f_carrier * d) *
                                   absorption_amplitude(d, carrier) * extra;
                const double phase =
                    -2.0 * kPi * f_phase * d / kSpeedOfLight + path.phase_offset_rad;
                out.matrix(m, n) += std::polar(amp, phase);
            }
        }
    }

    if (los_ref_amplitude > 0.0) {
        for (const PathRecord& rec : out.path_inventory)
            if (!rec.is_los && rec.amplitude > los_ref_amplitude)
                throw std::domain_error("synth_channel: NLoS path stronger than the LoS path");
    }
    if (!out.matrix.allFinite())
        throw std::domain_error("synth_channel: non-finite channel entry");
    return out;
}

double channel_correlation(const Eigen::MatrixXcd& h1, const Eigen::MatrixXcd& h2) {
    if (h1.rows() != h2.rows() || h1.cols() != h2.cols())
        throw std::domain_error("channel_correlation: dimension mismatch");
    const double n1 = h1.norm();
    const double n2 = h2.norm();
    if (n1 == 0.0 || n2 == 0.0)
        throw std::domain_error("channel_correlation: zero-norm channel");
    const std::complex<double> inner = (h1.conjugate().cwiseProduct(h2)).sum();
    return std::abs(inner) / (n1 * n2);
}

double channel_correlation(const ChannelRealization& h1, const ChannelRealization& h2) {
    return channel_correlation(h1.matrix, h2.matrix);
}

double orthogonal_sa_spacing(double link_distance_m, double frequency_hz, int num_sas) {
    if (link_distance_m <= 0.0 || frequency_hz <= 0.0 || num_sas < 1)
        throw std::domain_error("orthogonal_sa_spacing: inputs must be positive");
    return std::sqrt(kSpeedOfLight * link_distance_m / (frequency_hz * num_sas));
}

namespace {

ChannelRealization gen_gaussian(int num_rx, int num_tx, const CarrierSpec& carrier,
                                RngStream& rng) {
    ChannelRealization out;
    out.carrier = carrier;
    out.matrix.resize(num_rx, num_tx);
    for (int m = 0; m < num_rx; ++m)
        for (int n = 0; n < num_tx; ++n) out.matrix(m, n) = rng.complex_normal();
    return out;
}

// Two users in one beam at roughly 1 m and 5 m with small angular offsets;
// tightly packed SAs keep the LoS blocks near-collinear across users.
ChannelRealization gen_correlated(int num_rx, int num_tx, const CarrierSpec& carrier,
                                  RngStream& rng) {
    if (num_rx < 2 || num_rx % 2 != 0)
        throw std::domain_error("gen_ensemble: correlated kind needs an even rx count >= 2");
    const double spacing = 0.0025;
    const ArrayGeometry tx =
        make_ula(Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitY(), num_tx, spacing);

    const double d_near = rng.uniform(0.8, 1.2);
    const double d_far = rng.uniform(4.5, 5.5);
    const double az_near = rng.uniform(-2.0, 2.0) * kPi / 180.0;
    // Offsets small enough that the users' steering patterns stay nearly
    // collinear across the tightly packed SAs.
    const double az_far = az_near + rng.uniform(0.02, 0.1) * kPi / 180.0;

    const auto user_block = [&](double d, double az) {
        const Eigen::Vector3d center(d * std::cos(az), d * std::sin(az), 0.0);
        const ArrayGeometry rx = make_ula(center, Eigen::Vector3d::UnitY(), num_rx / 2, spacing);
        return synth_channel(tx, rx, carrier, 0.0, 0.0, {PropagationPath{}}, ChannelModelFlags{});
    };

    const ChannelRealization near = user_block(d_near, az_near);
    const ChannelRealization far = user_block(d_far, az_far);
    ChannelRealization out;
    out.carrier = carrier;
    out.tx_geometry = tx;
    out.matrix.resize(num_rx, num_tx);
    out.matrix.topRows(num_rx / 2) = near.matrix;
    out.matrix.bottomRows(num_rx / 2) = far.matrix;
    return out;
}

ChannelRealization gen_orthogonal(int num_rx, int num_tx, const CarrierSpec& carrier,
                                  RngStream& rng) {
    if (num_rx != num_tx)
        throw std::domain_error("gen_ensemble: orthogonal tuning needs a square channel");
    const double link_distance = 5.0;
    const double spacing = orthogonal_sa_spacing(link_distance, carrier.frequency_hz, num_tx);
    const ArrayGeometry tx =
        make_ula(Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitY(), num_tx, spacing);
    const ArrayGeometry rx = make_ula(Eigen::Vector3d(link_distance, 0.0, 0.0),
                                      Eigen::Vector3d::UnitY(), num_rx, spacing);
    ChannelRealization out =
        synth_channel(tx, rx, carrier, 0.0, 0.0, {PropagationPath{}}, ChannelModelFlags{});
    // Random per-SA phases keep Monte Carlo draws distinct without touching
    // the singular values.
    for (int m = 0; m < num_rx; ++m)
        out.matrix.row(m) *= std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
    for (int n = 0; n < num_tx; ++n)
        out.matrix.col(n) *= std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
    return out;
}

}  // namespace

ChannelRealization gen_ensemble(ChannelEnsembleKind kind, int num_rx, int num_tx,
                                const CarrierSpec& carrier, RngStream& rng) {
    if (num_rx < 1 || num_tx < 1) throw std::domain_error("gen_ensemble: dims must be >= 1x1");
    switch (kind) {
        case ChannelEnsembleKind::GaussianIID:
            return gen_gaussian(num_rx, num_tx, carrier, rng);
        case ChannelEnsembleKind::ThzCorrelated:
            return gen_correlated(num_rx, num_tx, carrier, rng);
        case ChannelEnsembleKind::ThzOrthogonal:
            return gen_orthogonal(num_rx, num_tx, carrier, rng);
    }
    throw std::domain_error("gen_ensemble: unknown ensemble kind");
}

}  // namespace thznoma
