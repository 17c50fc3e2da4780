// SPDX-License-Identifier: Apache-2.0
#include "thznoma/mulp.hpp"

#include <cmath>
#include <stdexcept>

#include "thznoma/errors.hpp"
#include "thznoma/parallel.hpp"

namespace thznoma {

namespace {

constexpr double kNullSpaceTolerance = 1e-9;
constexpr std::uint64_t kMulpDomain = 0x6d756c70u;

// Direction maximizing ||served * w|| subject to nulled * w = 0. Returns a
// unit-norm column; sets exact=false (least-squares minimum-leakage pick)
// when the nulled rows span the whole space.
Eigen::VectorXcd constrained_beam(const Eigen::MatrixXcd& served,
                                  const Eigen::MatrixXcd& nulled, bool allow_degraded,
                                  bool& exact) {
    const int dim = static_cast<int>(served.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(nulled, Eigen::ComputeFullV);
    const double tol = kNullSpaceTolerance * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;

    if (rank >= dim) {
        if (!allow_degraded)
            throw SingularChannelError("zfbf_precoder: exact nulling infeasible");
        exact = false;
        // Minimum-leakage direction: right singular vector of the smallest
        // singular value.
        return svd.matrixV().col(dim - 1);
    }
    exact = true;
    const Eigen::MatrixXcd null_basis = svd.matrixV().rightCols(dim - rank);
    const Eigen::MatrixXcd projected = served * null_basis;  // Nr x (dim-rank)
    Eigen::JacobiSVD<Eigen::MatrixXcd> gain_svd(projected, Eigen::ComputeFullV);
    const Eigen::VectorXcd w = null_basis * gain_svd.matrixV().col(0);
    return w / w.norm();
}

double mrc_sinr(const Eigen::MatrixXcd& channel, const Eigen::VectorXcd& own_beam,
                double own_power, const Eigen::VectorXcd* other_beam, double other_power,
                double noise_w) {
    const Eigen::VectorXcd served = channel * own_beam;
    const double gain = served.squaredNorm();
    if (gain == 0.0) return 0.0;
    const Eigen::VectorXcd combiner = served / served.norm();
    double interference = 0.0;
    if (other_beam != nullptr) {
        const std::complex<double> leak = combiner.dot(channel * *other_beam);
        interference = other_power * std::norm(leak);
    }
    return own_power * gain / (interference + noise_w);
}

}  // namespace

std::string scheme_name(PrecodingScheme scheme) {
    return scheme == PrecodingScheme::NomaZfbf ? "noma_zfbf" : "mulp_zfbf";
}

std::string ensemble_name(ChannelEnsembleKind kind) {
    switch (kind) {
        case ChannelEnsembleKind::GaussianIID: return "gaussian";
        case ChannelEnsembleKind::ThzCorrelated: return "thz_correlated";
        case ChannelEnsembleKind::ThzOrthogonal: return "thz_orthogonal";
    }
    return "?";
}

ZfbfResult zfbf_precoder(const std::vector<Eigen::MatrixXcd>& user_channels,
                         bool allow_degraded) {
    if (user_channels.size() < 2)
        throw std::domain_error("zfbf_precoder: need at least two users");
    const int dim = static_cast<int>(user_channels.front().cols());
    for (const auto& h : user_channels)
        if (h.cols() != dim || h.rows() < 1)
            throw std::domain_error("zfbf_precoder: inconsistent channel dimensions");

    ZfbfResult result;
    result.precoder.resize(dim, user_channels.size());
    for (std::size_t i = 0; i < user_channels.size(); ++i) {
        int rows = 0;
        for (std::size_t j = 0; j < user_channels.size(); ++j)
            if (j != i) rows += static_cast<int>(user_channels[j].rows());
        Eigen::MatrixXcd others(rows, dim);
        int at = 0;
        for (std::size_t j = 0; j < user_channels.size(); ++j) {
            if (j == i) continue;
            others.middleRows(at, user_channels[j].rows()) = user_channels[j];
            at += static_cast<int>(user_channels[j].rows());
        }
        bool exact = true;
        result.precoder.col(i) =
            constrained_beam(user_channels[i], others, allow_degraded, exact);
        result.exact = result.exact && exact;
    }
    return result;
}

double mulp_sum_rate(const std::vector<Eigen::MatrixXcd>& user_channels,
                     const Eigen::MatrixXcd& precoder, double power_budget_w, double noise_w) {
    if (precoder.cols() != static_cast<Eigen::Index>(user_channels.size()))
        throw std::domain_error("mulp_sum_rate: precoder/user mismatch");
    if (noise_w <= 0.0) throw std::domain_error("mulp_sum_rate: noise must be positive");
    const double per_user = power_budget_w / static_cast<double>(user_channels.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < user_channels.size(); ++i) {
        double interference_sinr_denominator = 0.0;
        const Eigen::VectorXcd served = user_channels[i] * precoder.col(i);
        const double gain = served.squaredNorm();
        if (gain == 0.0) continue;
        const Eigen::VectorXcd combiner = served / served.norm();
        for (std::size_t j = 0; j < user_channels.size(); ++j) {
            if (j == i) continue;
            const std::complex<double> leak =
                combiner.dot(user_channels[i] * precoder.col(j));
            interference_sinr_denominator += per_user * std::norm(leak);
        }
        sum += std::log2(1.0 + per_user * gain / (interference_sinr_denominator + noise_w));
    }
    return sum;
}

double noma_zfbf_sum_rate(const std::vector<Eigen::MatrixXcd>& user_channels,
                          double power_budget_w, double noise_w,
                          const std::vector<double>& split_grid) {
    if (user_channels.size() != 2)
        throw std::domain_error("noma_zfbf_sum_rate: exactly two users required");
    if (split_grid.empty()) throw std::domain_error("noma_zfbf_sum_rate: empty split grid");
    if (noise_w <= 0.0) throw std::domain_error("noma_zfbf_sum_rate: noise must be positive");

    const int weak = user_channels[0].squaredNorm() <= user_channels[1].squaredNorm() ? 0 : 1;
    const int strong = 1 - weak;
    const Eigen::MatrixXcd& H_w = user_channels[weak];
    const Eigen::MatrixXcd& H_s = user_channels[strong];

    // Weak message: matched beam, decoded by both users. Strong message:
    // zero-forced away from the weak user, gain-maximized in that null space.
    Eigen::JacobiSVD<Eigen::MatrixXcd> weak_svd(H_w, Eigen::ComputeFullV);
    const Eigen::VectorXcd w_weak = weak_svd.matrixV().col(0);
    bool exact = true;
    const Eigen::VectorXcd w_strong = constrained_beam(H_s, H_w, true, exact);

    double best = 0.0;
    for (double weak_share : split_grid) {
        if (weak_share <= 0.0 || weak_share >= 1.0)
            throw std::domain_error("noma_zfbf_sum_rate: split grid values must lie in (0, 1)");
        const double p_w = weak_share * power_budget_w;
        const double p_s = power_budget_w - p_w;

        const double sinr_weak_own = mrc_sinr(H_w, w_weak, p_w, &w_strong, p_s, noise_w);
        const double sinr_weak_at_strong = mrc_sinr(H_s, w_weak, p_w, &w_strong, p_s, noise_w);
        const double r_weak = std::log2(1.0 + std::min(sinr_weak_own, sinr_weak_at_strong));
        // No interference after SIC.
        const double r_strong =
            std::log2(1.0 + mrc_sinr(H_s, w_strong, p_s, nullptr, 0.0, noise_w));
        best = std::max(best, r_weak + r_strong);
    }
    return best;
}

double slope_top_octave(const std::vector<double>& snr_db, const std::vector<double>& rate) {
    if (snr_db.size() != rate.size() || snr_db.size() < 2)
        throw std::domain_error("slope_top_octave: need matching grids with >= 2 points");
    const double top = snr_db.back();
    const double octave_db = 10.0 * std::log10(2.0);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        if (snr_db[i] < top - octave_db - 1e-9) continue;
        sx += snr_db[i];
        sy += rate[i];
        sxx += snr_db[i] * snr_db[i];
        sxy += snr_db[i] * rate[i];
        ++n;
    }
    if (n < 2) throw std::domain_error("slope_top_octave: top octave holds fewer than 2 points");
    const double slope_per_db = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope_per_db * octave_db;
}

std::vector<SumRateCurve> run_mulp_experiment(const std::vector<double>& snr_grid_db,
                                              const std::vector<ChannelEnsembleKind>& ensembles,
                                              int trials, const CarrierSpec& carrier,
                                              std::uint64_t seed, int threads) {
    if (snr_grid_db.empty()) throw std::domain_error("run_mulp_experiment: empty SNR grid");
    if (trials < 1) throw std::domain_error("run_mulp_experiment: trials must be >= 1");

    // Strong-user power loading grid shared with the system-level search.
    std::vector<double> split_grid;
    for (int i = 1; i <= 19; ++i) split_grid.push_back(0.05 * i);

    const int num_snr = static_cast<int>(snr_grid_db.size());
    std::vector<SumRateCurve> curves;
    for (ChannelEnsembleKind kind : ensembles) {
        // Per-trial rows: [noma rates..., mulp rates...]; reduced in trial order.
        std::vector<std::vector<double>> rows(trials);
        parallel_for(trials, threads, [&](int t) {
            RngStream rng(seed, kMulpDomain + static_cast<std::uint64_t>(kind) * 131u,
                          static_cast<std::uint64_t>(t));
            ChannelRealization h = gen_ensemble(kind, 4, 4, carrier, rng);
            Eigen::MatrixXcd H = h.matrix;
            if (kind != ChannelEnsembleKind::GaussianIID) {
                // Physical THz amplitudes are ~1e-5; rescale to unit mean
                // entry power so every ensemble shares one SNR axis. The
                // weak/strong gain ratio inside the matrix is preserved.
                H *= std::sqrt(static_cast<double>(H.size())) / H.norm();
            }
            const std::vector<Eigen::MatrixXcd> users = {H.topRows(2), H.bottomRows(2)};

            std::vector<double>& row = rows[t];
            row.assign(2 * num_snr, 0.0);
            const ZfbfResult zf = zfbf_precoder(users, /*allow_degraded=*/true);
            for (int s = 0; s < num_snr; ++s) {
                const double snr = std::pow(10.0, snr_grid_db[s] / 10.0);
                const double noise = 1.0 / snr;  // unit total power budget
                row[s] = noma_zfbf_sum_rate(users, 1.0, noise, split_grid);
                row[num_snr + s] = mulp_sum_rate(users, zf.precoder, 1.0, noise);
            }
        });

        for (int which = 0; which < 2; ++which) {
            SumRateCurve curve;
            curve.ensemble = kind;
            curve.scheme = which == 0 ? PrecodingScheme::NomaZfbf : PrecodingScheme::MuLpZfbf;
            curve.snr_db = snr_grid_db;
            curve.trials = trials;
            curve.mean_rate_bps_hz.assign(num_snr, 0.0);
            for (int t = 0; t < trials; ++t)
                for (int s = 0; s < num_snr; ++s)
                    curve.mean_rate_bps_hz[s] += rows[t][which * num_snr + s];
            for (double& r : curve.mean_rate_bps_hz) r /= trials;
            curve.slope_top_octave = slope_top_octave(curve.snr_db, curve.mean_rate_bps_hz);
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

}  // namespace thznoma
