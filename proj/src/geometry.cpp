// SPDX-License-Identifier: Apache-2.0
#include "thznoma/geometry.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace thznoma {

UserDrop drop_users(const CellSpec& cell, int n, DropDistribution distribution,
                    double los_probability, RngStream& rng) {
    if (n < 1) throw std::domain_error("drop_users: need at least one user");
    if (cell.min_user_distance_m < 0.0 || cell.min_user_distance_m >= cell.radius_m)
        throw std::domain_error("drop_users: need 0 <= min_user_distance < radius");
    if (los_probability < 0.0 || los_probability > 1.0)
        throw std::domain_error("drop_users: los_probability must lie in [0, 1]");

    UserDrop drop;
    drop.seed_record = {rng.seed(), rng.domain(), rng.index()};
    drop.users.reserve(n);
    const double r_min = cell.min_user_distance_m;
    const double r_max = cell.radius_m;
    for (int i = 0; i < n; ++i) {
        double r;
        if (distribution == DropDistribution::UniformArea) {
            const double u = rng.uniform();
            r = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
        } else {
            r = rng.uniform(r_min, r_max);
        }
        const double phi = rng.uniform(0.0, 360.0);
        const bool los = rng.uniform() < los_probability;
        drop.users.push_back({i, r, phi, los});
    }
    return drop;
}

BeamPartition partition_beams(const CellSpec& /*cell*/, double beamwidth_deg,
                              double elevation_spread_deg) {
    if (beamwidth_deg <= 0.0) throw std::domain_error("partition_beams: beamwidth must be positive");
    const int num_beams = static_cast<int>(std::ceil(360.0 / beamwidth_deg));
    const double sector = 360.0 / num_beams;
    const double elevation = elevation_spread_deg > 0.0 ? elevation_spread_deg : beamwidth_deg;

    BeamPartition partition;
    partition.sector_width_deg = sector;
    partition.beams.reserve(num_beams);
    for (int b = 0; b < num_beams; ++b) {
        BeamSpec beam;
        beam.azimuth_spread_deg = sector;
        beam.elevation_spread_deg = elevation;
        beam.gain_dbi = gain_from_beamwidth(sector, elevation);
        beam.boresight_azimuth_deg = (b + 0.5) * sector;
        partition.beams.push_back(beam);
    }
    return partition;
}

int beam_index_for_azimuth(const BeamPartition& partition, double phi_deg) {
    const int num_beams = static_cast<int>(partition.beams.size());
    if (num_beams == 0) throw std::domain_error("beam_index_for_azimuth: empty partition");
    double phi = std::fmod(phi_deg, 360.0);
    if (phi < 0.0) phi += 360.0;
    if (phi == 0.0) return 0;
    // Sector boundaries belong to the lower-index beam.
    int idx = static_cast<int>(std::ceil(phi / partition.sector_width_deg)) - 1;
    if (idx >= num_beams) idx = num_beams - 1;
    return idx;
}

void assign_users_to_beams(const UserDrop& drop, BeamPartition& partition) {
    int max_id = -1;
    for (const User& u : drop.users) max_id = std::max(max_id, u.id);
    partition.assignment.assign(max_id + 1, -1);
    for (const User& u : drop.users)
        partition.assignment[u.id] = beam_index_for_azimuth(partition, u.phi_deg);
}

double prob_k_users_in_beam(int n, double beamwidth_deg, int k, int trials, RngStream& rng) {
    if (trials < 1) throw std::domain_error("prob_k_users_in_beam: trials must be >= 1");
    if (k < 0 || k > n) throw std::domain_error("prob_k_users_in_beam: need 0 <= k <= n");
    if (beamwidth_deg <= 0.0 || beamwidth_deg > 360.0)
        throw std::domain_error("prob_k_users_in_beam: beamwidth must lie in (0, 360]");
    if (n == 0) return k == 0 ? 1.0 : 0.0;

    const double p_sector = beamwidth_deg / 360.0;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        int in_sector = 0;
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < p_sector) ++in_sector;
        if (in_sector == k) ++hits;
    }
    return static_cast<double>(hits) / trials;
}

void write_drop_csv(std::ostream& os, const UserDrop& drop) {
    os << "id,r_m,phi_deg,is_los\n";
    for (const User& u : drop.users) {
        char line[96];
        std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%d\n", u.id, u.r_m, u.phi_deg,
                      u.is_los ? 1 : 0);
        os << line;
    }
}

UserDrop read_drop_csv(std::istream& is) {
    UserDrop drop;
    std::string line;
    if (!std::getline(is, line) || line.rfind("id,", 0) != 0)
        throw std::runtime_error("read_drop_csv: missing header row");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        User u;
        if (!std::getline(row, field, ',')) break;
        u.id = std::stoi(field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("read_drop_csv: bad row");
        u.r_m = std::stod(field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("read_drop_csv: bad row");
        u.phi_deg = std::stod(field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("read_drop_csv: bad row");
        u.is_los = std::stoi(field) != 0;
        drop.users.push_back(u);
    }
    return drop;
}

}  // namespace thznoma
