// SPDX-License-Identifier: Apache-2.0
//
// Cell geometry: user drops, beam partitioning, per-beam statistics.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "thznoma/channel.hpp"
#include "thznoma/rng.hpp"

namespace thznoma {

struct CellSpec {
    double radius_m = 10.0;
    double min_user_distance_m = 0.1;
};

struct User {
    int id = 0;
    double r_m = 0.0;
    double phi_deg = 0.0;
    bool is_los = true;
};

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t domain = 0;
    std::uint64_t index = 0;
};

struct UserDrop {
    std::vector<User> users;
    SeedRecord seed_record;
};

enum class DropDistribution { UniformArea, UniformPolar };

UserDrop drop_users(const CellSpec& cell, int n, DropDistribution distribution,
                    double los_probability, RngStream& rng);

struct BeamPartition {
    std::vector<BeamSpec> beams;     // contiguous boresights tiling [0, 360)
    double sector_width_deg = 0.0;
    std::vector<int> assignment;     // user id -> beam index, set by assign_users_to_beams
};

/// ceil(360/beamwidth) equal sectors starting at 0 degrees.
BeamPartition partition_beams(const CellSpec& cell, double beamwidth_deg,
                              double elevation_spread_deg = 0.0);

/// Maps each user to the sector containing its azimuth; boundary angles go
/// to the lower-index beam.
void assign_users_to_beams(const UserDrop& drop, BeamPartition& partition);
int beam_index_for_azimuth(const BeamPartition& partition, double phi_deg);

/// Monte Carlo estimate of P(exactly k of n azimuth-uniform users land in
/// one fixed sector of the given width).
double prob_k_users_in_beam(int n, double beamwidth_deg, int k, int trials, RngStream& rng);

// CSV replay format: header then one row per user (id,r_m,phi_deg,is_los).
void write_drop_csv(std::ostream& os, const UserDrop& drop);
UserDrop read_drop_csv(std::istream& is);

}  // namespace thznoma
