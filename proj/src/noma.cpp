// SPDX-License-Identifier: Apache-2.0
#include "thznoma/noma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thznoma/channel.hpp"
#include "thznoma/errors.hpp"

namespace thznoma {

namespace {

constexpr int kExhaustiveBeamCap = 8;

bool weaker_than(const LinkBudget& a, const LinkBudget& b) {
    if (a.channel_power_gain != b.channel_power_gain)
        return a.channel_power_gain < b.channel_power_gain;
    if (a.distance_m != b.distance_m) return a.distance_m > b.distance_m;
    return a.user_id < b.user_id;
}

NomaGroup make_group(const LinkBudget& weak, const LinkBudget& strong) {
    NomaGroup g;
    if (weaker_than(weak, strong))
        g.member_ids = {weak.user_id, strong.user_id};
    else
        g.member_ids = {strong.user_id, weak.user_id};
    return g;
}

double log2_rate(double bandwidth_hz, double sinr) {
    return bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace

std::vector<UserClass> classify_strong_weak(const std::vector<LinkBudget>& users,
                                            double radius_threshold_m) {
    std::vector<UserClass> out;
    out.reserve(users.size());
    for (const LinkBudget& u : users) {
        const bool strong = u.is_los && u.distance_m <= radius_threshold_m;
        out.push_back(strong ? UserClass::Strong : UserClass::Weak);
    }
    return out;
}

std::vector<NomaGroup> cluster_distance_based(const std::vector<LinkBudget>& beam_users,
                                              double radius_threshold_m, int cap) {
    if (beam_users.empty()) throw std::domain_error("cluster_distance_based: empty beam");
    if (cap < 1) throw std::domain_error("cluster_distance_based: cap must be >= 1");

    const std::vector<UserClass> classes = classify_strong_weak(beam_users, radius_threshold_m);
    std::vector<LinkBudget> strong, weak;
    for (std::size_t i = 0; i < beam_users.size(); ++i)
        (classes[i] == UserClass::Strong ? strong : weak).push_back(beam_users[i]);

    // Nearest strong user pairs with the farthest weak user.
    auto by_distance_then_id = [](const LinkBudget& a, const LinkBudget& b) {
        if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
        return a.user_id < b.user_id;
    };
    std::sort(strong.begin(), strong.end(), by_distance_then_id);
    std::sort(weak.begin(), weak.end(), by_distance_then_id);
    std::reverse(weak.begin(), weak.end());

    std::vector<NomaGroup> groups;
    const std::size_t pairs = std::min(strong.size(), weak.size());
    for (std::size_t i = 0; i < pairs; ++i) groups.push_back(make_group(weak[i], strong[i]));
    for (std::size_t i = pairs; i < strong.size(); ++i)
        groups.push_back(NomaGroup{{strong[i].user_id}, {}, {}, -1});
    for (std::size_t i = pairs; i < weak.size(); ++i)
        groups.push_back(NomaGroup{{weak[i].user_id}, {}, {}, -1});
    return groups;
}

std::vector<NomaGroup> cluster_sdg(const std::vector<LinkBudget>& beam_users, int cap) {
    if (beam_users.empty()) throw std::domain_error("cluster_sdg: empty beam");
    if (cap < 1) throw std::domain_error("cluster_sdg: cap must be >= 1");

    std::vector<LinkBudget> sorted = beam_users;
    std::sort(sorted.begin(), sorted.end(), [](const LinkBudget& a, const LinkBudget& b) {
        if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
        return a.user_id < b.user_id;
    });

    std::vector<NomaGroup> groups;
    std::size_t i = 0;
    for (; i + 1 < sorted.size(); i += 2) groups.push_back(make_group(sorted[i + 1], sorted[i]));
    if (i < sorted.size()) groups.push_back(NomaGroup{{sorted[i].user_id}, {}, {}, -1});
    return groups;
}

std::vector<double> allocate_power_fixed_fraction(double budget_w, double fraction,
                                                  int num_users) {
    if (num_users < 1) throw std::domain_error("allocate_power_fixed_fraction: no users");
    if (budget_w < 0.0) throw std::domain_error("allocate_power_fixed_fraction: negative budget");
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::domain_error("allocate_power_fixed_fraction: fraction must lie in (0, 1)");
    std::vector<double> weights(num_users);
    double total = 0.0;
    double w = 1.0;
    for (int i = 0; i < num_users; ++i) {
        weights[i] = w;
        total += w;
        w *= fraction;
    }
    for (double& x : weights) x *= budget_w / total;
    return weights;
}

std::vector<double> allocate_power_ftpa(double budget_w, const std::vector<double>& gains,
                                        double alpha) {
    if (gains.empty()) throw std::domain_error("allocate_power_ftpa: no users");
    if (alpha < 0.0) throw std::domain_error("allocate_power_ftpa: alpha must be nonnegative");
    std::vector<double> weights(gains.size());
    double total = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (gains[i] <= 0.0) throw std::domain_error("allocate_power_ftpa: gains must be positive");
        weights[i] = std::pow(gains[i], -alpha);
        total += weights[i];
    }
    for (double& x : weights) x *= budget_w / total;
    return weights;
}

double receive_power_dbm(double tx_power_w, double distance_m, double frequency_hz,
                         double gains_dbi) {
    if (tx_power_w <= 0.0) throw std::domain_error("receive_power_dbm: power must be positive");
    return 10.0 * std::log10(tx_power_w * 1e3) + gains_dbi - fspl_db(distance_m, frequency_hz);
}

std::vector<double> noma_rates(const NomaGroup& group, const std::vector<LinkBudget>& members,
                               double noise_w_per_hz, double subband_hz) {
    if (group.member_ids.size() != members.size() ||
        group.powers_w.size() != members.size())
        throw std::domain_error("noma_rates: group members and powers misaligned");
    if (members.empty()) throw std::domain_error("noma_rates: empty group");
    if (subband_hz <= 0.0) throw std::domain_error("noma_rates: bandwidth must be positive");
    const double noise_w = noise_w_per_hz * subband_hz;
    if (noise_w <= 0.0) throw std::domain_error("noma_rates: noise must be positive");

    if (members.size() == 1) {
        const double sinr = group.powers_w[0] * members[0].channel_power_gain / noise_w;
        return {log2_rate(subband_hz, sinr)};
    }
    if (members.size() != 2)
        throw std::domain_error("noma_rates: NOMA groups hold at most two users");

    const double p_w = group.powers_w[0];
    const double p_s = group.powers_w[1];
    const double g_w = members[0].channel_power_gain;
    const double g_s = members[1].channel_power_gain;

    // The weak message must be decodable both at its own receiver and at the
    // strong user (pre-SIC), where the strong user's own signal is noise.
    const double sinr_weak_own = p_w * g_w / (p_s * g_w + noise_w);
    const double sinr_weak_at_strong = p_w * g_s / (p_s * g_s + noise_w);
    const double rate_weak = log2_rate(subband_hz, std::min(sinr_weak_own, sinr_weak_at_strong));
    const double rate_strong = log2_rate(subband_hz, p_s * g_s / noise_w);
    return {rate_weak, rate_strong};
}

std::vector<double> oma_rates(const std::vector<LinkBudget>& users, double per_user_bw_hz,
                              double budget_w, double noise_w_per_hz) {
    if (users.empty()) throw std::domain_error("oma_rates: no users");
    if (per_user_bw_hz <= 0.0) throw std::domain_error("oma_rates: bandwidth must be positive");
    const double p = budget_w / static_cast<double>(users.size());
    const double noise_w = noise_w_per_hz * per_user_bw_hz;
    std::vector<double> rates;
    rates.reserve(users.size());
    for (const LinkBudget& u : users)
        rates.push_back(log2_rate(per_user_bw_hz, p * u.channel_power_gain / noise_w));
    return rates;
}

FairnessReport fairness_factor(const std::vector<std::vector<double>>& rates_per_beam) {
    FairnessReport report;
    double weighted = 0.0;
    std::size_t total_users = 0;
    for (const std::vector<double>& beam : rates_per_beam) {
        if (beam.empty()) continue;  // empty beams are excluded
        double ff;
        if (beam.size() == 1) {
            ff = 1.0;
        } else {
            const auto [lo, hi] = std::minmax_element(beam.begin(), beam.end());
            ff = (*hi > 0.0) ? (*lo / *hi) : 0.0;
        }
        report.per_beam.push_back(ff);
        weighted += ff * static_cast<double>(beam.size());
        total_users += beam.size();
    }
    if (total_users == 0) throw std::domain_error("fairness_factor: no occupied beams");
    report.overall = weighted / static_cast<double>(total_users);
    return report;
}

std::vector<NomaGroup> allocate_spectrum_damc(std::vector<NomaGroup> groups,
                                              const std::vector<LinkBudget>& users,
                                              const SpectrumWindow& window, double subband_hz) {
    if (subband_hz <= 0.0) throw std::domain_error("allocate_spectrum_damc: bad sub-band width");
    const int num_subbands = static_cast<int>(window.total_bw_hz / subband_hz);
    if (num_subbands < static_cast<int>(groups.size()))
        throw AllocationError("allocate_spectrum_damc: fewer sub-bands than groups");

    const auto distance_of = [&](int id) -> double {
        for (const LinkBudget& u : users)
            if (u.user_id == id) return u.distance_m;
        throw std::domain_error("allocate_spectrum_damc: unknown user id in group");
    };

    // Sub-band centers ordered center-outward; ties toward lower frequency.
    const double window_lo = window.center_hz - 0.5 * window.total_bw_hz;
    std::vector<double> centers(num_subbands);
    for (int i = 0; i < num_subbands; ++i) centers[i] = window_lo + (i + 0.5) * subband_hz;
    std::sort(centers.begin(), centers.end(), [&](double a, double b) {
        const double da = std::abs(a - window.center_hz);
        const double db = std::abs(b - window.center_hz);
        if (da != db) return da < db;
        return a < b;
    });

    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> centroid(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double sum = 0.0;
        for (int id : groups[i].member_ids) sum += distance_of(id);
        centroid[i] = sum / static_cast<double>(groups[i].member_ids.size());
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (centroid[a] != centroid[b]) return centroid[a] > centroid[b];
        return groups[a].member_ids.front() < groups[b].member_ids.front();
    });

    for (std::size_t rank = 0; rank < order.size(); ++rank)
        groups[order[rank]].subband = {centers[rank], subband_hz};
    return groups;
}

namespace {

struct GroupOption {
    double min_rate;
    double max_rate;
    double sum_rate;
    int grid_index;  // -1 for singleton groups
};

void enumerate_pairings(const std::vector<int>& remaining,
                        std::vector<std::pair<int, int>>& current,
                        std::vector<std::vector<std::pair<int, int>>>& out) {
    if (remaining.empty()) {
        out.push_back(current);
        return;
    }
    const int first = remaining.front();
    if (remaining.size() % 2 == 1) {
        const std::vector<int> rest(remaining.begin() + 1, remaining.end());
        current.push_back({first, -1});
        enumerate_pairings(rest, current, out);
        current.pop_back();
        if (remaining.size() == 1) return;
    }
    for (std::size_t j = 1; j < remaining.size(); ++j) {
        std::vector<int> rest;
        rest.reserve(remaining.size() - 2);
        for (std::size_t k = 1; k < remaining.size(); ++k)
            if (k != j) rest.push_back(remaining[k]);
        current.push_back({first, remaining[j]});
        enumerate_pairings(rest, current, out);
        current.pop_back();
    }
}

const LinkBudget& member_budget(const std::vector<LinkBudget>& beam_users, int user_id) {
    for (const LinkBudget& u : beam_users)
        if (u.user_id == user_id) return u;
    throw std::domain_error("optimize_power_splits: group references unknown user id");
}

std::vector<GroupOption> group_options(const std::vector<LinkBudget>& members,
                                       const std::vector<double>& grid, double group_budget_w,
                                       double noise_w_per_hz, double subband_hz) {
    std::vector<GroupOption> options;
    NomaGroup scratch;
    for (const LinkBudget& m : members) scratch.member_ids.push_back(m.user_id);
    if (members.size() == 1) {
        scratch.powers_w = {group_budget_w};
        const double r = noma_rates(scratch, members, noise_w_per_hz, subband_hz)[0];
        options.push_back({r, r, r, -1});
        return options;
    }
    options.reserve(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        scratch.powers_w = allocate_power_fixed_fraction(group_budget_w, grid[gi], 2);
        const std::vector<double> r = noma_rates(scratch, members, noise_w_per_hz, subband_hz);
        options.push_back({std::min(r[0], r[1]), std::max(r[0], r[1]), r[0] + r[1],
                           static_cast<int>(gi)});
    }
    return options;
}

}  // namespace

ExhaustiveResult optimize_power_splits(const std::vector<NomaGroup>& grouping,
                                       const std::vector<LinkBudget>& beam_users,
                                       const std::vector<double>& power_grid, double budget_w,
                                       double noise_w_per_hz, double subband_hz) {
    if (grouping.empty()) throw std::domain_error("optimize_power_splits: no groups");
    if (power_grid.empty()) throw std::domain_error("optimize_power_splits: empty power grid");

    const std::size_t num_groups = grouping.size();
    const double group_budget = budget_w / static_cast<double>(num_groups);

    std::vector<std::vector<GroupOption>> options(num_groups);
    std::vector<std::vector<LinkBudget>> members(num_groups);
    for (std::size_t g = 0; g < num_groups; ++g) {
        for (int id : grouping[g].member_ids)
            members[g].push_back(member_budget(beam_users, id));
        options[g] = group_options(members[g], power_grid, group_budget, noise_w_per_hz,
                                   subband_hz);
    }

    double fairness = -1.0, sum = 0.0;
    std::vector<int> choice(num_groups, 0);
    std::size_t pair_groups = 0;
    for (const auto& m : members)
        if (m.size() == 2) ++pair_groups;

    if (pair_groups <= 3) {
        // Full product enumeration; honors the sum-rate tie rule exactly.
        std::vector<std::size_t> counter(num_groups, 0);
        while (true) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0, s = 0.0;
            for (std::size_t g = 0; g < num_groups; ++g) {
                const GroupOption& o = options[g][counter[g]];
                lo = std::min(lo, o.min_rate);
                hi = std::max(hi, o.max_rate);
                s += o.sum_rate;
            }
            const double ff = hi > 0.0 ? lo / hi : 0.0;
            if (ff > fairness || (ff == fairness && s > sum)) {
                fairness = ff;
                sum = s;
                for (std::size_t g = 0; g < num_groups; ++g)
                    choice[g] = static_cast<int>(counter[g]);
            }
            std::size_t g = 0;
            while (g < num_groups && ++counter[g] == options[g].size()) counter[g++] = 0;
            if (g == num_groups) break;
        }
    } else {
        // Ceiling scan: for every candidate beam-max M, restrict each group
        // to options with max <= M and take its best min. Scanning every M
        // finds the exact fairness optimum without the full grid product;
        // sum-rate ties are broken per group only.
        std::vector<double> ceilings;
        for (const auto& opts : options)
            for (const GroupOption& o : opts) ceilings.push_back(o.max_rate);
        std::sort(ceilings.begin(), ceilings.end());
        ceilings.erase(std::unique(ceilings.begin(), ceilings.end()), ceilings.end());

        for (double M : ceilings) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0, s = 0.0;
            std::vector<int> pick(num_groups, -1);
            bool feasible = true;
            for (std::size_t g = 0; g < num_groups && feasible; ++g) {
                int best_opt = -1;
                for (std::size_t oi = 0; oi < options[g].size(); ++oi) {
                    const GroupOption& o = options[g][oi];
                    if (o.max_rate > M) continue;
                    if (best_opt < 0) {
                        best_opt = static_cast<int>(oi);
                        continue;
                    }
                    const GroupOption& cur = options[g][best_opt];
                    if (o.min_rate > cur.min_rate ||
                        (o.min_rate == cur.min_rate && o.max_rate < cur.max_rate) ||
                        (o.min_rate == cur.min_rate && o.max_rate == cur.max_rate &&
                         o.sum_rate > cur.sum_rate))
                        best_opt = static_cast<int>(oi);
                }
                if (best_opt < 0) {
                    feasible = false;
                    break;
                }
                pick[g] = best_opt;
                const GroupOption& o = options[g][best_opt];
                lo = std::min(lo, o.min_rate);
                hi = std::max(hi, o.max_rate);
                s += o.sum_rate;
            }
            if (!feasible) continue;
            const double ff = hi > 0.0 ? lo / hi : 0.0;
            if (ff > fairness || (ff == fairness && s > sum)) {
                fairness = ff;
                sum = s;
                choice = pick;
            }
        }
    }

    ExhaustiveResult result;
    result.beam_fairness = fairness;
    result.sum_rate_bps = sum;
    for (std::size_t g = 0; g < num_groups; ++g) {
        NomaGroup group = grouping[g];
        const GroupOption& o = options[g][choice[g]];
        if (o.grid_index >= 0)
            group.powers_w =
                allocate_power_fixed_fraction(group_budget, power_grid[o.grid_index], 2);
        else
            group.powers_w = {group_budget};
        result.groups.push_back(std::move(group));
    }
    return result;
}

ExhaustiveResult cluster_exhaustive(const std::vector<LinkBudget>& beam_users,
                                    const std::vector<double>& power_grid, double budget_w,
                                    double noise_w_per_hz, double subband_hz, int cap) {
    if (beam_users.empty()) throw std::domain_error("cluster_exhaustive: empty beam");
    if (cap != 2) throw std::domain_error("cluster_exhaustive: only two-user groups supported");
    if (power_grid.empty()) throw std::domain_error("cluster_exhaustive: empty power grid");
    const int n = static_cast<int>(beam_users.size());
    if (n > kExhaustiveBeamCap)
        throw SearchSpaceError("cluster_exhaustive: beam too large for enumeration");

    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    std::vector<std::vector<std::pair<int, int>>> pairings;
    std::vector<std::pair<int, int>> scratch;
    enumerate_pairings(indices, scratch, pairings);

    ExhaustiveResult best;
    best.beam_fairness = -1.0;
    for (const auto& pairing : pairings) {
        std::vector<NomaGroup> grouping;
        grouping.reserve(pairing.size());
        for (const auto& [i, j] : pairing) {
            if (j < 0)
                grouping.push_back(NomaGroup{{beam_users[i].user_id}, {}, {}, -1});
            else
                grouping.push_back(make_group(beam_users[i], beam_users[j]));
        }
        ExhaustiveResult candidate = optimize_power_splits(grouping, beam_users, power_grid,
                                                           budget_w, noise_w_per_hz, subband_hz);
        if (candidate.beam_fairness > best.beam_fairness ||
            (candidate.beam_fairness == best.beam_fairness &&
             candidate.sum_rate_bps > best.sum_rate_bps)) {
            best = std::move(candidate);
        }
    }
    return best;
}

}  // namespace thznoma
