// SPDX-License-Identifier: Apache-2.0
//
// System-level NOMA: strong/weak classification, user clustering, DAMC
// spectrum allocation, power allocation, SIC-constrained achievable rates,
// and the fairness-factor metric.
#pragma once

#include <string>
#include <vector>

namespace thznoma {

struct LinkBudget {
    int user_id = 0;
    double channel_power_gain = 1.0;  // linear; FSPL, absorption, gains, NLoS penalty folded in
    double distance_m = 1.0;
    bool is_los = true;
};

struct Subband {
    double center_hz = 0.0;
    double width_hz = 0.0;
};

struct NomaGroup {
    std::vector<int> member_ids;     // weak first
    Subband subband;
    std::vector<double> powers_w;    // aligned with member_ids
    int beam_index = -1;
};

enum class UserClass { Strong, Weak };

/// NLoS users are weak regardless of distance; LoS users are strong iff
/// distance <= threshold.
std::vector<UserClass> classify_strong_weak(const std::vector<LinkBudget>& users,
                                            double radius_threshold_m);

/// Greedy strong/weak pairing: farthest weak with nearest strong; leftovers
/// become singletons. Members are ordered weak-first.
std::vector<NomaGroup> cluster_distance_based(const std::vector<LinkBudget>& beam_users,
                                              double radius_threshold_m, int cap = 2);

/// Similar-distance grouping: sort by distance, pair consecutive users.
std::vector<NomaGroup> cluster_sdg(const std::vector<LinkBudget>& beam_users, int cap = 2);

struct ExhaustiveResult {
    std::vector<NomaGroup> groups;   // powers filled in
    double beam_fairness = 0.0;
    double sum_rate_bps = 0.0;
};

/// Enumerates every perfect/near-perfect pairing of the beam and every
/// per-group split on the grid; maximizes beam fairness (min rate / max
/// rate), ties broken by sum rate, then by lexicographic pairing. The beam
/// power budget is divided equally across groups.
ExhaustiveResult cluster_exhaustive(const std::vector<LinkBudget>& beam_users,
                                    const std::vector<double>& power_grid, double budget_w,
                                    double noise_w_per_hz, double subband_hz, int cap = 2);

/// Fairness-optimal per-group cascade fractions for a fixed grouping. Grid
/// values are fixed-fraction cascade fractions; the beam budget splits
/// equally across groups. Exact for the fairness objective at any group
/// count; the sum-rate tie rule is exact up to three two-user groups.
ExhaustiveResult optimize_power_splits(const std::vector<NomaGroup>& grouping,
                                       const std::vector<LinkBudget>& beam_users,
                                       const std::vector<double>& power_grid, double budget_w,
                                       double noise_w_per_hz, double subband_hz);

struct SpectrumWindow {
    double center_hz = 300e9;
    double total_bw_hz = 10e9;
};

/// Distance-aware multi-carrier assignment: groups sorted by centroid
/// distance descending take sub-bands in center-outward order.
std::vector<NomaGroup> allocate_spectrum_damc(std::vector<NomaGroup> groups,
                                              const std::vector<LinkBudget>& users,
                                              const SpectrumWindow& window, double subband_hz);

/// p_i proportional to fraction^i, i = 0 for the weakest user, scaled to the budget.
std::vector<double> allocate_power_fixed_fraction(double budget_w, double fraction,
                                                  int num_users);

/// Fractional transmit power allocation: p_i = budget * g_i^-alpha / sum_j g_j^-alpha.
std::vector<double> allocate_power_ftpa(double budget_w, const std::vector<double>& gains,
                                        double alpha);

double receive_power_dbm(double tx_power_w, double distance_m, double frequency_hz,
                         double gains_dbi);

/// Two-user NOMA rates with the SIC-decodability cap on the weak message;
/// singleton groups get single-user capacity. Rates in bit/s.
std::vector<double> noma_rates(const NomaGroup& group, const std::vector<LinkBudget>& members,
                               double noise_w_per_hz, double subband_hz);

/// FDMA baseline: equal power split across the beam's users, orthogonal bands.
std::vector<double> oma_rates(const std::vector<LinkBudget>& users, double per_user_bw_hz,
                              double budget_w, double noise_w_per_hz);

struct FairnessReport {
    std::vector<double> per_beam;
    double overall = 0.0;
};

/// Per-beam min/max rate ratio, user-count weighted across beams. Single-user
/// beams score 1; a beam whose max rate is zero scores 0.
FairnessReport fairness_factor(const std::vector<std::vector<double>>& rates_per_beam);

}  // namespace thznoma
