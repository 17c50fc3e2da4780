// SPDX-License-Identifier: Apache-2.0
#include "thznoma/link_sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "thznoma/constants.hpp"
#include "thznoma/geometry.hpp"
#include "thznoma/noma.hpp"
#include "thznoma/parallel.hpp"

namespace thznoma {

namespace {

constexpr std::uint64_t kBerDomain = 0x62657231u;  // per-trial stream salt

Eigen::Vector3d polar_point(double r_m, double phi_deg) {
    const double phi = phi_deg * kPi / 180.0;
    return {r_m * std::cos(phi), r_m * std::sin(phi), 0.0};
}

Eigen::Vector3d broadside_axis(double phi_deg) {
    const double phi = phi_deg * kPi / 180.0;
    return {-std::sin(phi), std::cos(phi), 0.0};
}

}  // namespace

std::string csi_model_name(CsiModel model) {
    switch (model) {
        case CsiModel::Perfect: return "perfect";
        case CsiModel::IgnoreSquint: return "ignore_squint";
        case CsiModel::IgnoreSwp: return "ignore_swp";
        case CsiModel::IgnoreBoth: return "ignore_both";
    }
    return "?";
}

CsiModel csi_model_from_name(const std::string& name) {
    if (name == "perfect") return CsiModel::Perfect;
    if (name == "ignore_squint") return CsiModel::IgnoreSquint;
    if (name == "ignore_swp") return CsiModel::IgnoreSwp;
    if (name == "ignore_both") return CsiModel::IgnoreBoth;
    throw std::domain_error("unknown CSI model: " + name);
}

ChannelRealization build_csi_estimate(const ChannelRealization& truth, CsiModel model) {
    if (model == CsiModel::Perfect) return truth;
    ChannelModelFlags flags = truth.model_flags;
    if (model == CsiModel::IgnoreSquint || model == CsiModel::IgnoreBoth)
        flags.squint_frequency_hz = truth.carrier.frequency_hz;
    if (model == CsiModel::IgnoreSwp || model == CsiModel::IgnoreBoth)
        flags.wavefront = Wavefront::Planar;
    return synth_channel(truth.tx_geometry, truth.rx_geometry, truth.carrier, truth.tx_gain_dbi,
                         truth.rx_gain_dbi, truth.paths, flags);
}

Eigen::MatrixXcd phase_align(const Eigen::MatrixXcd& estimate,
                             const Eigen::MatrixXcd& reference) {
    const std::complex<double> inner =
        (estimate.conjugate().cwiseProduct(reference)).sum();
    if (std::abs(inner) == 0.0) return estimate;
    return estimate * std::polar(1.0, std::arg(inner));
}

double wilson_halfwidth(std::uint64_t errors, std::uint64_t bits) {
    if (bits == 0) return 0.0;
    const double z = 1.959963984540054;
    const double n = static_cast<double>(bits);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    return z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

namespace {

struct PairGeometry {
    double weak_r, weak_phi, strong_r, strong_phi;
    double beam_boresight_deg;  // the serving panel faces the beam center
};

// Distance-based clustering over a fresh drop selects the trial's NOMA pair,
// mirroring the system-level pipeline. The canonical fallback pair only
// triggers when a drop contains no strong/weak beam at all.
PairGeometry draw_pair(const LinkScenario& sc, RngStream& rng) {
    const CellSpec cell{sc.cell_radius_m, sc.min_user_distance_m};
    const UserDrop drop =
        drop_users(cell, sc.users_per_drop, DropDistribution::UniformArea, 1.0, rng);
    BeamPartition partition = partition_beams(cell, sc.beamwidth_deg);
    assign_users_to_beams(drop, partition);

    const int num_beams = static_cast<int>(partition.beams.size());
    for (int b = 0; b < num_beams; ++b) {
        std::vector<LinkBudget> beam_users;
        std::vector<const User*> beam_refs;
        for (const User& u : drop.users) {
            if (partition.assignment[u.id] != b) continue;
            // Only distances and LoS flags matter for pairing here.
            LinkBudget lb;
            lb.user_id = u.id;
            lb.distance_m = u.r_m;
            lb.is_los = u.is_los;
            lb.channel_power_gain = 1.0 / (u.r_m * u.r_m);
            beam_users.push_back(lb);
            beam_refs.push_back(&u);
        }
        if (beam_users.size() < 2) continue;
        const auto groups = cluster_distance_based(beam_users, sc.strong_radius_m);
        for (const NomaGroup& g : groups) {
            if (g.member_ids.size() != 2) continue;
            const auto find = [&](int id) -> const User* {
                for (const User* u : beam_refs)
                    if (u->id == id) return u;
                return nullptr;
            };
            const User* weak = find(g.member_ids[0]);
            const User* strong = find(g.member_ids[1]);
            if (weak && strong)
                return {weak->r_m, weak->phi_deg, strong->r_m, strong->phi_deg,
                        partition.beams[b].boresight_azimuth_deg};
        }
    }
    return {7.0, 15.0, 1.0, 15.0, 15.0};
}

ChannelRealization synth_user_channel(const LinkScenario& sc, double r_m, double phi_deg,
                                      double boresight_deg, RngStream& rng) {
    // One panel serves the whole beam: its axis is set by the beam center,
    // so off-boresight users see a linear path-length gradient across it.
    const ArrayGeometry bs = make_ula(Eigen::Vector3d::Zero(), broadside_axis(boresight_deg),
                                      sc.num_sas, sc.sa_spacing_m);
    const ArrayGeometry user = make_ula(polar_point(r_m, phi_deg), broadside_axis(phi_deg),
                                        sc.num_sas, sc.sa_spacing_m);
    std::vector<PropagationPath> paths;
    paths.push_back(PropagationPath{});
    for (int i = 0; i < sc.num_scatterers; ++i) {
        PropagationPath p;
        p.is_los = false;
        const double az = phi_deg + rng.uniform(-sc.scatter_half_angle_deg, sc.scatter_half_angle_deg);
        const double radius = rng.uniform(0.3 * r_m + 0.1, 0.9 * r_m + 0.2);
        p.scatter_point = polar_point(radius, az);
        p.extra_loss_db = sc.nlos_extra_loss_db;
        p.phase_offset_rad = rng.uniform(0.0, 2.0 * kPi);
        paths.push_back(p);
    }
    ChannelModelFlags truth_flags;
    truth_flags.wavefront = Wavefront::Spherical;
    truth_flags.squint_frequency_hz = sc.carrier.frequency_hz + 0.5 * sc.carrier.bandwidth_hz;
    return synth_channel(bs, user, sc.carrier, sc.tx_gain_dbi, sc.rx_gain_dbi, paths,
                         truth_flags);
}

struct TrialAccumulator {
    // Indexed [detector][csi][role][snr] flattened.
    std::vector<std::uint64_t> bits, errors;
};

}  // namespace

std::vector<BerCell> run_ber_experiment(const LinkScenario& scenario,
                                        const std::vector<DetectorKind>& detectors,
                                        const std::vector<CsiModel>& csi_models,
                                        const std::vector<double>& snr_grid_db, int trials,
                                        std::uint64_t seed, int threads) {
    if (trials < 1) throw std::domain_error("run_ber_experiment: trials must be >= 1");
    if (detectors.empty() || csi_models.empty() || snr_grid_db.empty())
        throw std::domain_error("run_ber_experiment: empty detector/CSI/SNR set");

    const Constellation constel = Constellation::qam(scenario.constellation_order);
    const int num_det = static_cast<int>(detectors.size());
    const int num_csi = static_cast<int>(csi_models.size());
    const int num_snr = static_cast<int>(snr_grid_db.size());
    const int cells = num_det * num_csi * 2 * num_snr;
    const auto cell_index = [&](int d, int m, int role, int s) {
        return ((d * num_csi + m) * 2 + role) * num_snr + s;
    };

    const std::pair<double, double> split = [&] {
        const auto p = allocate_power_fixed_fraction(1.0, scenario.power_fraction, 2);
        return std::make_pair(p[0], p[1]);
    }();

    std::vector<TrialAccumulator> per_trial(trials);

    parallel_for(trials, threads, [&](int t) {
        RngStream rng(seed, kBerDomain, static_cast<std::uint64_t>(t));
        TrialAccumulator& acc = per_trial[t];
        acc.bits.assign(cells, 0);
        acc.errors.assign(cells, 0);

        const PairGeometry pair = draw_pair(scenario, rng);
        const ChannelRealization weak_truth = synth_user_channel(
            scenario, pair.weak_r, pair.weak_phi, pair.beam_boresight_deg, rng);
        const ChannelRealization strong_truth = synth_user_channel(
            scenario, pair.strong_r, pair.strong_phi, pair.beam_boresight_deg, rng);

        std::vector<Eigen::MatrixXcd> weak_est(num_csi), strong_est(num_csi);
        for (int m = 0; m < num_csi; ++m) {
            weak_est[m] = phase_align(build_csi_estimate(weak_truth, csi_models[m]).matrix,
                                      weak_truth.matrix);
            strong_est[m] = phase_align(build_csi_estimate(strong_truth, csi_models[m]).matrix,
                                        strong_truth.matrix);
        }

        const int n_streams = scenario.num_sas;
        const int bits_per_user = n_streams * constel.bits_per_symbol;
        const double mean_gain_strong =
            strong_truth.matrix.squaredNorm() / static_cast<double>(strong_truth.matrix.size());

        std::vector<std::uint8_t> weak_bits(bits_per_user), strong_bits(bits_per_user);
        for (int s = 0; s < num_snr; ++s) {
            const double snr_lin = std::pow(10.0, snr_grid_db[s] / 10.0);
            const double noise_var = n_streams * mean_gain_strong / snr_lin;
            const double sigma = std::sqrt(noise_var);

            for (auto& b : weak_bits) b = static_cast<std::uint8_t>(rng.uniform_int(2));
            for (auto& b : strong_bits) b = static_cast<std::uint8_t>(rng.uniform_int(2));
            const auto weak_symbols = modulate(weak_bits, constel);
            const auto strong_symbols = modulate(strong_bits, constel);

            Eigen::VectorXcd x(n_streams);
            for (int i = 0; i < n_streams; ++i)
                x(i) = std::sqrt(split.first) * weak_symbols[i] +
                       std::sqrt(split.second) * strong_symbols[i];

            Eigen::VectorXcd y_weak = weak_truth.matrix * x;
            Eigen::VectorXcd y_strong = strong_truth.matrix * x;
            for (int i = 0; i < n_streams; ++i) y_weak(i) += sigma * rng.complex_normal();
            for (int i = 0; i < n_streams; ++i) y_strong(i) += sigma * rng.complex_normal();

            for (int d = 0; d < num_det; ++d) {
                for (int m = 0; m < num_csi; ++m) {
                    const SicResult weak_rx =
                        noma_sic_receive(weak_est[m], y_weak, detectors[d], split,
                                         SicRole::Weak, constel, noise_var);
                    const SicResult strong_rx =
                        noma_sic_receive(strong_est[m], y_strong, detectors[d], split,
                                         SicRole::Strong, constel, noise_var);

                    const auto weak_hat = labels_to_bits(weak_rx.own_symbols, constel);
                    const auto strong_hat = labels_to_bits(strong_rx.own_symbols, constel);

                    std::uint64_t weak_err = 0, strong_err = 0;
                    for (int b = 0; b < bits_per_user; ++b) {
                        weak_err += weak_hat[b] != weak_bits[b];
                        strong_err += strong_hat[b] != strong_bits[b];
                    }
                    const int iw = cell_index(d, m, 0, s);
                    const int is = cell_index(d, m, 1, s);
                    acc.bits[iw] += bits_per_user;
                    acc.errors[iw] += weak_err;
                    acc.bits[is] += bits_per_user;
                    acc.errors[is] += strong_err;
                }
            }
        }
    });

    // Keyed integer reduction in trial order.
    std::vector<std::uint64_t> bits(cells, 0), errors(cells, 0);
    for (const TrialAccumulator& acc : per_trial) {
        for (int i = 0; i < cells; ++i) {
            bits[i] += acc.bits[i];
            errors[i] += acc.errors[i];
        }
    }

    std::vector<BerCell> table;
    table.reserve(cells);
    for (int d = 0; d < num_det; ++d) {
        for (int m = 0; m < num_csi; ++m) {
            for (int role = 0; role < 2; ++role) {
                for (int s = 0; s < num_snr; ++s) {
                    const int i = cell_index(d, m, role, s);
                    BerCell cell;
                    cell.detector = detectors[d];
                    cell.csi = csi_models[m];
                    cell.role = role == 0 ? SicRole::Weak : SicRole::Strong;
                    cell.snr_db = snr_grid_db[s];
                    cell.bits = bits[i];
                    cell.errors = errors[i];
                    cell.ber = bits[i] ? static_cast<double>(errors[i]) / bits[i] : 0.0;
                    cell.ci_halfwidth = wilson_halfwidth(errors[i], bits[i]);
                    table.push_back(cell);
                }
            }
        }
    }
    return table;
}

double measure_detector_throughput(DetectorKind detector, int num_streams,
                                   const Constellation& constellation, double duration_s,
                                   std::uint64_t seed) {
    if (duration_s <= 0.0)
        throw std::domain_error("measure_detector_throughput: duration must be positive");

    RngStream rng(seed, 0x7468726fu, 0);
    constexpr int kBatch = 64;
    std::vector<Eigen::MatrixXcd> channels(kBatch);
    std::vector<Eigen::VectorXcd> observations(kBatch);
    for (int i = 0; i < kBatch; ++i) {
        Eigen::MatrixXcd H(num_streams, num_streams);
        for (int r = 0; r < num_streams; ++r)
            for (int col = 0; col < num_streams; ++col) H(r, col) = rng.complex_normal();
        Eigen::VectorXcd s(num_streams);
        for (int r = 0; r < num_streams; ++r)
            s(r) = constellation.points[rng.uniform_int(constellation.order)];
        Eigen::VectorXcd y = H * s;
        for (int r = 0; r < num_streams; ++r) y(r) += 0.1 * rng.complex_normal();
        channels[i] = std::move(H);
        observations[i] = std::move(y);
    }

    const auto start = std::chrono::steady_clock::now();
    std::uint64_t detections = 0;
    double elapsed = 0.0;
    while (elapsed < duration_s) {
        for (int i = 0; i < kBatch; ++i) {
            volatile int sink =
                detect(detector, channels[i], observations[i], constellation).front();
            (void)sink;
        }
        detections += kBatch;
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    const double bits = static_cast<double>(detections) * num_streams *
                        constellation.bits_per_symbol;
    return bits / elapsed;
}

}  // namespace thznoma
