// SPDX-License-Identifier: Apache-2.0
//
// thznoma command-line runner. Subcommands: power-example | fairness | ber |
// mulp | gain-map | bench. Each writes its CSV plus a run manifest to the
// output directory; (config, seed) fully determine the CSV bytes.
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "thznoma/experiments.hpp"
#include "thznoma/geometry.hpp"

namespace fs = std::filesystem;
using namespace thznoma;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::optional<double> snr_min, snr_max, snr_step;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--out-dir", args.out_dir, "output directory for CSV and manifest");
    cmd->add_option("--seed", args.seed, "master seed override");
    cmd->add_option("--trials", args.trials, "trial/drop count override");
    cmd->add_option("--threads", args.threads, "worker count (results are worker-invariant)");
    cmd->add_option("--snr-min", args.snr_min, "SNR grid minimum (dB)");
    cmd->add_option("--snr-max", args.snr_max, "SNR grid maximum (dB)");
    cmd->add_option("--snr-step", args.snr_step, "SNR grid step (dB)");
}

SystemConfig resolve_config(const CommonArgs& args, const std::string& which) {
    SystemConfig cfg =
        args.config_path.empty() ? SystemConfig{} : load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.threads) cfg.threads = *args.threads;
    SnrGrid* grid = nullptr;
    if (which == "fairness") grid = &cfg.fairness_snr;
    if (which == "ber") grid = &cfg.ber_snr;
    if (which == "mulp") grid = &cfg.mulp_snr;
    if (grid) {
        if (args.snr_min) grid->min_db = *args.snr_min;
        if (args.snr_max) grid->max_db = *args.snr_max;
        if (args.snr_step) grid->step_db = *args.snr_step;
    }
    if (args.trials) {
        if (which == "fairness") cfg.fairness_drops = *args.trials;
        if (which == "ber") cfg.ber_trials = *args.trials;
        if (which == "mulp") cfg.mulp_trials = *args.trials;
    }
    cfg.validate();
    return cfg;
}

std::string emit(const SystemConfig& cfg, const std::string& out_dir, const std::string& command,
                 const std::string& csv_name, const std::string& csv,
                 double wall_seconds, std::vector<std::string> extra_outputs = {}) {
    fs::create_directories(out_dir);
    const std::string csv_path = (fs::path(out_dir) / csv_name).string();
    write_text_file(csv_path, csv);
    std::vector<std::string> outputs{csv_name};
    for (auto& e : extra_outputs) outputs.push_back(e);
    const std::string manifest_path =
        (fs::path(out_dir) / (command + "_manifest.json")).string();
    write_text_file(manifest_path, run_manifest_json(cfg, command, outputs, wall_seconds));
    return csv_path;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"THz-band power-domain NOMA system- and link-level simulator"};
    app.require_subcommand(1);

    CommonArgs power_args, fairness_args, ber_args, mulp_args, gain_args, bench_args;
    std::string drops_out, groups_out, channel_out;
    double bench_duration = 0.2;

    CLI::App* power = app.add_subcommand("power-example",
                                         "fixed-fraction and FTPA worked example");
    add_common(power, power_args);

    CLI::App* fairness =
        app.add_subcommand("fairness", "fairness factor versus SNR for NOMA and OMA");
    add_common(fairness, fairness_args);
    fairness->add_option("--dump-drops", drops_out,
                         "also write the first drop per user count as CSV");
    fairness->add_option("--dump-groups", groups_out,
                         "also write the first drop's distance-based groups as CSV");

    CLI::App* ber = app.add_subcommand("ber", "BER versus SNR across detectors and CSI models");
    add_common(ber, ber_args);
    ber->add_option("--dump-channel", channel_out,
                    "also write one true channel realization as CSV (row,col,re,im)");

    CLI::App* mulp = app.add_subcommand("mulp", "NOMA versus MU-LP sum rate across ensembles");
    add_common(mulp, mulp_args);

    CLI::App* gain = app.add_subcommand("gain-map", "subarray gain over angular spreads");
    add_common(gain, gain_args);

    CLI::App* bench = app.add_subcommand("bench", "detector throughput measurement");
    add_common(bench, bench_args);
    bench->add_option("--duration", bench_duration, "seconds per detector/order point");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto t0 = std::chrono::steady_clock::now();
        if (power->parsed()) {
            const SystemConfig cfg = resolve_config(power_args, "power-example");
            const auto rows = power_example(cfg);
            const std::string csv = power_example_csv(rows);
            std::fputs(csv.c_str(), stdout);
            emit(cfg, power_args.out_dir, "power_example", "power_example.csv", csv,
                 seconds_since(t0));
        } else if (fairness->parsed()) {
            const SystemConfig cfg = resolve_config(fairness_args, "fairness");
            std::vector<std::string> extras;
            if (!drops_out.empty()) {
                for (int n : cfg.fairness_user_counts) {
                    RngStream rng(cfg.seed, 0x66616972u ^ static_cast<std::uint64_t>(n), 0);
                    const UserDrop drop = drop_users(cfg.cell, n, DropDistribution::UniformArea,
                                                     1.0 - cfg.blockage_probability, rng);
                    std::ostringstream os;
                    write_drop_csv(os, drop);
                    const std::string name = drops_out + "." + std::to_string(n) + ".csv";
                    write_text_file((fs::path(fairness_args.out_dir) / name).string(), os.str());
                    extras.push_back(name);
                }
            }
            if (!groups_out.empty()) {
                const int n = cfg.fairness_user_counts.front();
                RngStream rng(cfg.seed, 0x66616972u ^ static_cast<std::uint64_t>(n), 0);
                const UserDrop drop = drop_users(cfg.cell, n, DropDistribution::UniformArea,
                                                 1.0 - cfg.blockage_probability, rng);
                const double beamwidth =
                    beamwidth_from_gain(cfg.beam_gain_dbi, cfg.beam_aspect_ratio).first;
                BeamPartition partition = partition_beams(cfg.cell, beamwidth);
                assign_users_to_beams(drop, partition);
                std::vector<NomaGroup> all_groups;
                std::vector<LinkBudget> all_users;
                for (std::size_t b = 0; b < partition.beams.size(); ++b) {
                    std::vector<LinkBudget> beam_users;
                    for (const User& u : drop.users) {
                        if (partition.assignment[u.id] != static_cast<int>(b)) continue;
                        beam_users.push_back({u.id,
                                              system_channel_power_gain(cfg, u.r_m, u.is_los),
                                              u.r_m, u.is_los});
                    }
                    if (beam_users.empty()) continue;
                    auto groups =
                        cluster_distance_based(beam_users, cfg.strong_radius_m,
                                               cfg.group_size_cap);
                    groups = allocate_spectrum_damc(
                        groups, beam_users, {cfg.carrier.frequency_hz, cfg.carrier.bandwidth_hz},
                        cfg.subband_hz);
                    for (NomaGroup& g : groups) {
                        g.beam_index = static_cast<int>(b);
                        g.powers_w = allocate_power_fixed_fraction(
                            cfg.total_tx_power_w / partition.beams.size() / groups.size(),
                            cfg.power_fraction, static_cast<int>(g.member_ids.size()));
                        all_groups.push_back(g);
                    }
                    all_users.insert(all_users.end(), beam_users.begin(), beam_users.end());
                }
                write_text_file((fs::path(fairness_args.out_dir) / groups_out).string(),
                                groups_csv(all_groups));
                extras.push_back(groups_out);
            }
            const FairnessResult result = run_fairness_experiment(cfg);
            emit(cfg, fairness_args.out_dir, "fairness", "fairness.csv",
                 fairness_csv(result.rows), seconds_since(t0), extras);
            std::printf("fairness: %zu rows written\n", result.rows.size());
        } else if (ber->parsed()) {
            const SystemConfig cfg = resolve_config(ber_args, "ber");
            std::vector<std::string> extras;
            if (!channel_out.empty()) {
                RngStream rng(cfg.seed, 0x62657231u, 0);
                const LinkScenario sc = cfg.link_scenario();
                const ArrayGeometry bs = make_ula(Eigen::Vector3d::Zero(),
                                                  Eigen::Vector3d::UnitY(), sc.num_sas,
                                                  sc.sa_spacing_m);
                const ArrayGeometry user =
                    make_ula(Eigen::Vector3d(5.0, 0.0, 0.0), Eigen::Vector3d::UnitY(),
                             sc.num_sas, sc.sa_spacing_m);
                ChannelModelFlags flags;
                flags.squint_frequency_hz =
                    sc.carrier.frequency_hz + 0.5 * sc.carrier.bandwidth_hz;
                const ChannelRealization h = synth_channel(
                    bs, user, sc.carrier, sc.tx_gain_dbi, sc.rx_gain_dbi,
                    {PropagationPath{}}, flags);
                write_text_file((fs::path(ber_args.out_dir) / channel_out).string(),
                                channel_dump_csv(h.matrix));
                extras.push_back(channel_out);
            }
            const auto cells = run_ber_from_config(cfg);
            emit(cfg, ber_args.out_dir, "ber", "ber.csv", ber_csv(cells), seconds_since(t0),
                 extras);
            std::printf("ber: %zu cells written\n", cells.size());
        } else if (mulp->parsed()) {
            const SystemConfig cfg = resolve_config(mulp_args, "mulp");
            const auto curves = run_mulp_from_config(cfg);
            emit(cfg, mulp_args.out_dir, "mulp", "mulp.csv", mulp_csv(curves), seconds_since(t0));
            std::printf("mulp: %zu curves written\n", curves.size());
        } else if (gain->parsed()) {
            const SystemConfig cfg = resolve_config(gain_args, "gain-map");
            const auto rows = gain_map(cfg);
            emit(cfg, gain_args.out_dir, "gain_map", "gain_map.csv", gain_map_csv(rows),
                 seconds_since(t0));
            std::printf("gain-map: %zu cells written\n", rows.size());
        } else if (bench->parsed()) {
            const SystemConfig cfg = resolve_config(bench_args, "bench");
            const auto rows = run_throughput_bench(cfg, bench_duration);
            const std::string csv = throughput_csv(rows);
            std::fputs(csv.c_str(), stdout);
            emit(cfg, bench_args.out_dir, "bench", "throughput.csv", csv, seconds_since(t0));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
