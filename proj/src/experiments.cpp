// SPDX-License-Identifier: Apache-2.0
#include "thznoma/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "thznoma/constants.hpp"
#include "thznoma/errors.hpp"
#include "thznoma/geometry.hpp"
#include "thznoma/parallel.hpp"

namespace thznoma {

namespace {

constexpr std::uint64_t kFairnessDomain = 0x66616972u;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const char* kSchemes[3] = {"noma_distance", "noma_exhaustive", "oma_fdma"};

struct DropRates {
    // rates_per_beam[scheme] for one SNR point
    std::vector<std::vector<double>> beams;
    double sum = 0.0;
};

}  // namespace

double system_channel_power_gain(const SystemConfig& cfg, double distance_m, bool is_los) {
    const double f = cfg.carrier.frequency_hz;
    const double amp = kSpeedOfLight / (4.0 * kPi * f * distance_m);
    double g = std::pow(10.0, (cfg.tx_gain_dbi + cfg.rx_gain_dbi) / 10.0) * amp * amp *
               std::exp(-cfg.carrier.absorption_coeff_per_m * distance_m);
    if (!is_los) g *= std::pow(10.0, -cfg.nlos_penalty_db / 10.0);
    return g;
}

FairnessResult run_fairness_experiment(const SystemConfig& cfg) {
    cfg.validate();
    const std::vector<double> snr_points = cfg.fairness_snr.points();
    const std::vector<double> grid = cfg.power_grid();
    const double beamwidth = beamwidth_from_gain(cfg.beam_gain_dbi, cfg.beam_aspect_ratio).first;
    const int bands_per_beam = static_cast<int>(cfg.carrier.bandwidth_hz / cfg.subband_hz);
    const int num_snr = static_cast<int>(snr_points.size());
    const int cells = 3 * num_snr;

    FairnessResult result;
    for (int n_users : cfg.fairness_user_counts) {
        // Per-drop (ff, sum_rate) per scheme x snr; reduced in drop order.
        std::vector<std::vector<double>> ff(cfg.fairness_drops), sr(cfg.fairness_drops);

        parallel_for(cfg.fairness_drops, cfg.threads, [&](int t) {
            RngStream rng(cfg.seed, kFairnessDomain ^ static_cast<std::uint64_t>(n_users),
                          static_cast<std::uint64_t>(t));
            const UserDrop drop = drop_users(cfg.cell, n_users, DropDistribution::UniformArea,
                                             1.0 - cfg.blockage_probability, rng);
            BeamPartition partition = partition_beams(cfg.cell, beamwidth);
            assign_users_to_beams(drop, partition);
            const int num_beams = static_cast<int>(partition.beams.size());
            // Uniform beamforming keeps all beams powered whether or not
            // they hold users.
            const double beam_budget = cfg.total_tx_power_w / num_beams;

            std::vector<std::vector<LinkBudget>> beam_users(num_beams);
            for (const User& u : drop.users) {
                LinkBudget lb;
                lb.user_id = u.id;
                lb.distance_m = u.r_m;
                lb.is_los = u.is_los;
                lb.channel_power_gain = system_channel_power_gain(cfg, u.r_m, u.is_los);
                beam_users[partition.assignment[u.id]].push_back(lb);
            }

            // SNR-independent structure per scheme.
            std::vector<std::vector<NomaGroup>> distance_groups(num_beams);
            int s_distance = 0, s_exhaustive = 0, s_oma = 0;
            for (int b = 0; b < num_beams; ++b) {
                if (beam_users[b].empty()) continue;
                distance_groups[b] =
                    cluster_distance_based(beam_users[b], cfg.strong_radius_m, cfg.group_size_cap);
                for (NomaGroup& g : distance_groups[b]) {
                    g.beam_index = b;
                    const double group_budget =
                        beam_budget / static_cast<double>(distance_groups[b].size());
                    g.powers_w = allocate_power_fixed_fraction(
                        group_budget, cfg.power_fraction, static_cast<int>(g.member_ids.size()));
                }
                s_distance += static_cast<int>(distance_groups[b].size());
                const int k = static_cast<int>(beam_users[b].size());
                s_exhaustive += (k + 1) / 2;
                s_oma += std::min(k, bands_per_beam);
            }

            ff[t].assign(cells, 0.0);
            sr[t].assign(cells, 0.0);
            for (int s = 0; s < num_snr; ++s) {
                const double snr_lin = std::pow(10.0, snr_points[s] / 10.0);
                const double total_noise_w = cfg.total_tx_power_w / snr_lin;

                for (int scheme = 0; scheme < 3; ++scheme) {
                    const int occupied =
                        scheme == 0 ? s_distance : (scheme == 1 ? s_exhaustive : s_oma);
                    if (occupied == 0) continue;
                    const double noise_per_band = total_noise_w / occupied;
                    const double n0 = noise_per_band / cfg.subband_hz;

                    std::vector<std::vector<double>> rates_per_beam;
                    double sum = 0.0;
                    for (int b = 0; b < num_beams; ++b) {
                        if (beam_users[b].empty()) continue;
                        std::vector<double> rates;
                        if (scheme == 0) {
                            for (const NomaGroup& g : distance_groups[b]) {
                                std::vector<LinkBudget> members;
                                for (int id : g.member_ids)
                                    for (const LinkBudget& u : beam_users[b])
                                        if (u.user_id == id) members.push_back(u);
                                const auto r = noma_rates(g, members, n0, cfg.subband_hz);
                                rates.insert(rates.end(), r.begin(), r.end());
                            }
                        } else if (scheme == 1) {
                            const int k = static_cast<int>(beam_users[b].size());
                            ExhaustiveResult ex;
                            if (k <= 8) {
                                ex = cluster_exhaustive(beam_users[b], grid, beam_budget, n0,
                                                        cfg.subband_hz, cfg.group_size_cap);
                            } else {
                                // Beyond the enumeration guard the pairing
                                // falls back to the distance rule; splits
                                // stay fairness-optimized on the grid.
                                ex = optimize_power_splits(distance_groups[b], beam_users[b],
                                                           grid, beam_budget, n0,
                                                           cfg.subband_hz);
                            }
                            for (const NomaGroup& g : ex.groups) {
                                std::vector<LinkBudget> members;
                                for (int id : g.member_ids)
                                    for (const LinkBudget& u : beam_users[b])
                                        if (u.user_id == id) members.push_back(u);
                                const auto r = noma_rates(g, members, n0, cfg.subband_hz);
                                rates.insert(rates.end(), r.begin(), r.end());
                            }
                        } else {
                            // FDMA: farthest users take the available bands
                            // (DAMC order); past capacity the rate is zero.
                            std::vector<LinkBudget> ordered = beam_users[b];
                            std::sort(ordered.begin(), ordered.end(),
                                      [](const LinkBudget& a, const LinkBudget& x) {
                                          if (a.distance_m != x.distance_m)
                                              return a.distance_m > x.distance_m;
                                          return a.user_id < x.user_id;
                                      });
                            const auto all =
                                oma_rates(ordered, cfg.subband_hz,
                                          beam_budget, n0);
                            for (std::size_t i = 0; i < ordered.size(); ++i)
                                rates.push_back(i < static_cast<std::size_t>(bands_per_beam)
                                                    ? all[i]
                                                    : 0.0);
                        }
                        for (double r : rates) sum += r;
                        rates_per_beam.push_back(std::move(rates));
                    }
                    const FairnessReport report = fairness_factor(rates_per_beam);
                    ff[t][scheme * num_snr + s] = report.overall;
                    sr[t][scheme * num_snr + s] = sum;
                }
            }
        });

        for (int scheme = 0; scheme < 3; ++scheme) {
            for (int s = 0; s < num_snr; ++s) {
                FairnessRow row;
                row.scheme = kSchemes[scheme];
                row.n_users = n_users;
                row.snr_db = snr_points[s];
                FairnessSamples samples;
                samples.scheme = row.scheme;
                samples.n_users = n_users;
                samples.snr_db = row.snr_db;
                for (int t = 0; t < cfg.fairness_drops; ++t) {
                    samples.ff_per_drop.push_back(ff[t][scheme * num_snr + s]);
                    samples.sum_rate_per_drop.push_back(sr[t][scheme * num_snr + s]);
                    row.overall_ff += ff[t][scheme * num_snr + s];
                    row.mean_sum_rate_bps += sr[t][scheme * num_snr + s];
                }
                row.overall_ff /= cfg.fairness_drops;
                row.mean_sum_rate_bps /= cfg.fairness_drops;
                result.rows.push_back(row);
                result.samples.push_back(std::move(samples));
            }
        }
    }
    return result;
}

std::vector<GainMapRow> gain_map(const SystemConfig& cfg) {
    std::vector<GainMapRow> rows;
    for (double az = cfg.gain_map_min_deg; az <= cfg.gain_map_max_deg + 1e-9;
         az += cfg.gain_map_step_deg)
        for (double el = cfg.gain_map_min_deg; el <= cfg.gain_map_max_deg + 1e-9;
             el += cfg.gain_map_step_deg)
            rows.push_back({az, el, gain_from_beamwidth(az, el)});
    return rows;
}

std::vector<PowerExampleRow> power_example(const SystemConfig& cfg) {
    const std::vector<double> distances{7.0, 1.2, 1.0};  // weak first
    std::vector<PowerExampleRow> rows;

    const auto fixed =
        allocate_power_fixed_fraction(cfg.example_budget_w, cfg.power_fraction,
                                      static_cast<int>(distances.size()));
    for (std::size_t i = 0; i < distances.size(); ++i)
        rows.push_back({"fixed_fraction", static_cast<int>(i), distances[i], fixed[i] * 1e3,
                        receive_power_dbm(fixed[i], distances[i], cfg.carrier.frequency_hz, 0.0)});

    std::vector<double> gains;
    for (double d : distances) gains.push_back(1.0 / (d * d));
    const auto ftpa = allocate_power_ftpa(cfg.example_budget_w, gains, cfg.ftpa_alpha);
    for (std::size_t i = 0; i < distances.size(); ++i)
        rows.push_back({"ftpa", static_cast<int>(i), distances[i], ftpa[i] * 1e3,
                        receive_power_dbm(ftpa[i], distances[i], cfg.carrier.frequency_hz, 0.0)});
    return rows;
}

std::vector<BerCell> run_ber_from_config(const SystemConfig& cfg) {
    cfg.validate();
    std::vector<DetectorKind> detectors;
    for (const auto& d : cfg.ber_detectors) detectors.push_back(detector_from_name(d));
    std::vector<CsiModel> models;
    for (const auto& m : cfg.ber_csi_models) models.push_back(csi_model_from_name(m));
    return run_ber_experiment(cfg.link_scenario(), detectors, models, cfg.ber_snr.points(),
                              cfg.ber_trials, cfg.seed, cfg.threads);
}

std::vector<SumRateCurve> run_mulp_from_config(const SystemConfig& cfg) {
    cfg.validate();
    const std::vector<ChannelEnsembleKind> ensembles{ChannelEnsembleKind::GaussianIID,
                                                     ChannelEnsembleKind::ThzCorrelated,
                                                     ChannelEnsembleKind::ThzOrthogonal};
    return run_mulp_experiment(cfg.mulp_snr.points(), ensembles, cfg.mulp_trials, cfg.carrier,
                               cfg.seed, cfg.threads);
}

std::vector<ThroughputRow> run_throughput_bench(const SystemConfig& cfg, double duration_s) {
    std::vector<ThroughputRow> rows;
    const std::vector<DetectorKind> detectors{DetectorKind::Zf, DetectorKind::Nc,
                                              DetectorKind::Lord, DetectorKind::Ml};
    for (DetectorKind d : detectors) {
        for (int order : {4, 16}) {
            const Constellation c = Constellation::qam(order);
            const double bps =
                measure_detector_throughput(d, cfg.num_sas, c, duration_s, cfg.seed);
            rows.push_back({detector_name(d), cfg.num_sas, order, bps});
        }
    }
    return rows;
}

std::string fairness_csv(const std::vector<FairnessRow>& rows) {
    std::string out = "scheme,n_users,snr_db,overall_ff,mean_sum_rate_bps\n";
    for (const FairnessRow& r : rows)
        out += r.scheme + "," + std::to_string(r.n_users) + "," + fmt(r.snr_db) + "," +
               fmt(r.overall_ff) + "," + fmt(r.mean_sum_rate_bps) + "\n";
    return out;
}

std::string ber_csv(const std::vector<BerCell>& cells) {
    std::string out = "detector,csi_model,user_role,snr_db,bits,errors,ber,ci_halfwidth\n";
    for (const BerCell& c : cells)
        out += detector_name(c.detector) + "," + csi_model_name(c.csi) + "," +
               (c.role == SicRole::Weak ? "weak" : "strong") + "," + fmt(c.snr_db) + "," +
               std::to_string(c.bits) + "," + std::to_string(c.errors) + "," + fmt(c.ber) + "," +
               fmt(c.ci_halfwidth) + "\n";
    return out;
}

std::string mulp_csv(const std::vector<SumRateCurve>& curves) {
    std::string out = "ensemble,scheme,snr_db,mean_sum_rate_bps_hz,trials,slope_top_octave\n";
    for (const SumRateCurve& c : curves)
        for (std::size_t i = 0; i < c.snr_db.size(); ++i)
            out += ensemble_name(c.ensemble) + "," + scheme_name(c.scheme) + "," +
                   fmt(c.snr_db[i]) + "," + fmt(c.mean_rate_bps_hz[i]) + "," +
                   std::to_string(c.trials) + "," + fmt(c.slope_top_octave) + "\n";
    return out;
}

std::string gain_map_csv(const std::vector<GainMapRow>& rows) {
    std::string out = "azimuth_spread_deg,elevation_spread_deg,gain_dbi\n";
    for (const GainMapRow& r : rows)
        out += fmt(r.azimuth_spread_deg) + "," + fmt(r.elevation_spread_deg) + "," +
               fmt(r.gain_dbi) + "\n";
    return out;
}

std::string power_example_csv(const std::vector<PowerExampleRow>& rows) {
    std::string out = "scheme,user_index,distance_m,power_mw,receive_power_dbm\n";
    for (const PowerExampleRow& r : rows)
        out += r.scheme + "," + std::to_string(r.user_index) + "," + fmt(r.distance_m) + "," +
               fmt(r.power_mw) + "," + fmt(r.receive_power_dbm) + "\n";
    return out;
}

std::string throughput_csv(const std::vector<ThroughputRow>& rows) {
    std::string out = "detector,dims,order,bits_per_second\n";
    for (const ThroughputRow& r : rows)
        out += r.detector + "," + std::to_string(r.dims) + "x" + std::to_string(r.dims) + "," +
               std::to_string(r.order) + "," + fmt(r.bits_per_second) + "\n";
    return out;
}

std::string channel_dump_csv(const Eigen::MatrixXcd& matrix) {
    std::string out = "row,col,re,im\n";
    for (Eigen::Index r = 0; r < matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < matrix.cols(); ++c)
            out += std::to_string(r) + "," + std::to_string(c) + "," + fmt(matrix(r, c).real()) +
                   "," + fmt(matrix(r, c).imag()) + "\n";
    return out;
}

std::string groups_csv(const std::vector<NomaGroup>& groups) {
    std::string out = "beam_index,group_index,member_ids,subband_center_hz,powers_w\n";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const NomaGroup& g = groups[i];
        std::string members, powers;
        for (std::size_t k = 0; k < g.member_ids.size(); ++k) {
            if (k) members += ';';
            members += std::to_string(g.member_ids[k]);
        }
        for (std::size_t k = 0; k < g.powers_w.size(); ++k) {
            if (k) powers += ';';
            powers += fmt(g.powers_w[k]);
        }
        out += std::to_string(g.beam_index) + "," + std::to_string(i) + "," + members + "," +
               fmt(g.subband.center_hz) + "," + powers + "\n";
    }
    return out;
}

std::string run_manifest_json(const SystemConfig& cfg, const std::string& command,
                              const std::vector<std::string>& outputs, double wall_seconds) {
    nlohmann::json j;
    j["tool"] = "thznoma";
    j["version"] = THZNOMA_VERSION;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    j["outputs"] = outputs;
    j["wall_seconds"] = wall_seconds;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
}

}  // namespace thznoma
