// SPDX-License-Identifier: Apache-2.0
#include "thznoma/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thznoma/errors.hpp"

namespace thznoma {

namespace {

int gray_encode(int v) { return v ^ (v >> 1); }

int integer_log2(int v) {
    int bits = 0;
    while ((1 << bits) < v) ++bits;
    return bits;
}

constexpr double kRankTolerance = 1e-10;

Eigen::MatrixXcd pseudo_inverse_full_rank(const Eigen::MatrixXcd& H, const char* who) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(H);
    cod.setThreshold(kRankTolerance);
    if (cod.rank() < H.cols())
        throw SingularChannelError(std::string(who) + ": channel matrix is rank deficient");
    return cod.pseudoInverse();
}

}  // namespace

Constellation Constellation::qam(int order) {
    if (order != 4 && order != 16 && order != 64)
        throw std::domain_error("Constellation::qam: supported orders are 4, 16, 64");
    Constellation c;
    c.order = order;
    c.bits_per_symbol = integer_log2(order);
    c.levels_ = 1 << (c.bits_per_symbol / 2);
    const int levels = c.levels_;
    // Unit average power: E|x|^2 over square QAM = 2(L^2-1)/3 * step^2 with
    // points at odd multiples of step.
    c.scale_ = std::sqrt(3.0 / (2.0 * (levels * levels - 1)));
    c.points.resize(order);
    const int half_bits = c.bits_per_symbol / 2;
    for (int ki = 0; ki < levels; ++ki) {
        for (int kq = 0; kq < levels; ++kq) {
            const int label = (gray_encode(ki) << half_bits) | gray_encode(kq);
            const double re = (2 * ki - levels + 1) * c.scale_;
            const double im = (2 * kq - levels + 1) * c.scale_;
            c.points[label] = {re, im};
        }
    }
    return c;
}

int Constellation::slice(std::complex<double> z) const {
    const auto axis_index = [&](double v) {
        int k = static_cast<int>(std::lround((v / scale_ + levels_ - 1) / 2.0));
        return std::clamp(k, 0, levels_ - 1);
    };
    const int half_bits = bits_per_symbol / 2;
    return (gray_encode(axis_index(z.real())) << half_bits) | gray_encode(axis_index(z.imag()));
}

std::vector<std::complex<double>> modulate(const std::vector<std::uint8_t>& bits,
                                           const Constellation& c) {
    if (bits.size() % c.bits_per_symbol != 0)
        throw std::domain_error("modulate: bit count not divisible by bits per symbol");
    std::vector<std::complex<double>> symbols;
    symbols.reserve(bits.size() / c.bits_per_symbol);
    for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
        int label = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b) label = (label << 1) | (bits[i + b] & 1);
        symbols.push_back(c.points[label]);
    }
    return symbols;
}

std::vector<std::uint8_t> labels_to_bits(const std::vector<int>& labels, const Constellation& c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(labels.size() * c.bits_per_symbol);
    for (int label : labels)
        for (int b = c.bits_per_symbol - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
    return bits;
}

std::vector<std::uint8_t> demap(const std::vector<std::complex<double>>& symbols,
                                const Constellation& c) {
    std::vector<int> labels;
    labels.reserve(symbols.size());
    for (const auto& s : symbols) labels.push_back(c.slice(s));
    return labels_to_bits(labels, c);
}

std::string detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Zf: return "zf";
        case DetectorKind::Nc: return "nc";
        case DetectorKind::Lord: return "lord";
        case DetectorKind::Ml: return "ml";
    }
    return "?";
}

DetectorKind detector_from_name(const std::string& name) {
    if (name == "zf") return DetectorKind::Zf;
    if (name == "nc") return DetectorKind::Nc;
    if (name == "lord") return DetectorKind::Lord;
    if (name == "ml") return DetectorKind::Ml;
    throw std::domain_error("unknown detector: " + name);
}

std::vector<int> detect_ml(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c) {
    const int streams = static_cast<int>(H.cols());
    if (streams < 1 || H.rows() != y.size()) throw std::domain_error("detect_ml: bad dimensions");
    double candidates = 1.0;
    for (int i = 0; i < streams; ++i) candidates *= c.order;
    if (streams > 4 || c.order > 16 || candidates > 1e6)
        throw SearchSpaceError("detect_ml: search space too large");

    std::vector<int> labels(streams, 0), best(streams, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd s(streams);
    // Lexicographic scan with strict improvement keeps the first minimizer.
    while (true) {
        for (int i = 0; i < streams; ++i) s(i) = c.points[labels[i]];
        const double metric = (y - H * s).squaredNorm();
        if (metric < best_metric) {
            best_metric = metric;
            best = labels;
        }
        int i = streams - 1;
        while (i >= 0 && ++labels[i] == c.order) labels[i--] = 0;
        if (i < 0) break;
    }
    return best;
}

std::vector<int> detect_zf(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c) {
    const Eigen::MatrixXcd pinv = pseudo_inverse_full_rank(H, "detect_zf");
    const Eigen::VectorXcd z = pinv * y;
    std::vector<int> labels(H.cols());
    for (int i = 0; i < H.cols(); ++i) labels[i] = c.slice(z(i));
    return labels;
}

std::vector<int> detect_nc(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c) {
    const int streams = static_cast<int>(H.cols());
    std::vector<int> labels(streams, 0);
    std::vector<int> active(streams);
    for (int i = 0; i < streams; ++i) active[i] = i;

    Eigen::VectorXcd residual = y;
    while (!active.empty()) {
        Eigen::MatrixXcd Ha(H.rows(), active.size());
        for (std::size_t k = 0; k < active.size(); ++k) Ha.col(k) = H.col(active[k]);
        const Eigen::MatrixXcd pinv = pseudo_inverse_full_rank(Ha, "detect_nc");

        // Post-nulling SNR is inversely proportional to the nulling row norm.
        int pick = 0;
        double best_norm = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < active.size(); ++k) {
            const double norm = pinv.row(k).squaredNorm();
            if (norm < best_norm) {
                best_norm = norm;
                pick = static_cast<int>(k);
            }
        }
        const int stream = active[pick];
        const std::complex<double> z = (pinv.row(pick) * residual).value();
        labels[stream] = c.slice(z);
        residual -= H.col(stream) * c.points[labels[stream]];
        active.erase(active.begin() + pick);
    }
    return labels;
}

std::vector<int> detect_lord(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                             const Constellation& c) {
    const int streams = static_cast<int>(H.cols());
    if (streams < 1 || H.rows() < streams)
        throw std::domain_error("detect_lord: bad dimensions");

    std::vector<int> best(streams, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    Eigen::MatrixXcd Hp(H.rows(), streams);
    std::vector<int> order(streams);

    // Reliable layers sit next to the root so the decision-feedback chain
    // cancels them before reaching the weak ones (post-nulling SNR order,
    // as in NC). Smaller nulling-row norm means more reliable.
    const Eigen::MatrixXcd pinv = pseudo_inverse_full_rank(H, "detect_lord");
    std::vector<int> reliability(streams);
    for (int i = 0; i < streams; ++i) reliability[i] = i;
    std::sort(reliability.begin(), reliability.end(), [&](int a, int b) {
        const double na = pinv.row(a).squaredNorm();
        const double nb = pinv.row(b).squaredNorm();
        if (na != nb) return na > nb;  // least reliable first (detected last)
        return a < b;
    });

    for (int root = 0; root < streams; ++root) {
        // Root layer moves to the last column; the rest are ordered least
        // reliable first.
        int col = 0;
        for (int i : reliability)
            if (i != root) { Hp.col(col) = H.col(i); order[col++] = i; }
        Hp.col(streams - 1) = H.col(root);
        order[streams - 1] = root;

        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Hp);
        const Eigen::MatrixXcd R =
            qr.matrixQR().topRows(streams).triangularView<Eigen::Upper>();
        const Eigen::VectorXcd yt =
            (qr.householderQ().adjoint() * y).head(streams);

        std::vector<int> cand(streams, 0);
        Eigen::VectorXcd s(streams);
        for (int root_label = 0; root_label < c.order; ++root_label) {
            cand[streams - 1] = root_label;
            // Decision-feedback back-substitution over the remaining layers.
            for (int i = streams - 2; i >= 0; --i) {
                std::complex<double> acc = yt(i);
                for (int j = i + 1; j < streams; ++j) acc -= R(i, j) * c.points[cand[j]];
                cand[i] = c.slice(acc / R(i, i));
            }
            for (int i = 0; i < streams; ++i) s(order[i]) = c.points[cand[i]];
            const double metric = (y - H * s).squaredNorm();
            if (metric < best_metric) {
                best_metric = metric;
                for (int i = 0; i < streams; ++i) best[order[i]] = cand[i];
            }
        }
    }
    return best;
}

std::vector<int> detect(DetectorKind kind, const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                        const Constellation& c) {
    switch (kind) {
        case DetectorKind::Zf: return detect_zf(H, y, c);
        case DetectorKind::Nc: return detect_nc(H, y, c);
        case DetectorKind::Lord: return detect_lord(H, y, c);
        case DetectorKind::Ml: return detect_ml(H, y, c);
    }
    throw std::domain_error("detect: unknown detector kind");
}

namespace {

// Whitens y and the served channel by the Cholesky factor of
// interferer_power * H H^H + noise_variance * I before detection.
std::vector<int> detect_treating_as_noise(DetectorKind detector, const Eigen::MatrixXcd& H,
                                          const Eigen::VectorXcd& y, double served_amplitude,
                                          double interferer_power, double noise_variance,
                                          const Constellation& c) {
    if (interferer_power <= 0.0)
        return detect(detector, Eigen::MatrixXcd(served_amplitude * H), y, c);
    Eigen::MatrixXcd cov = interferer_power * (H * H.adjoint());
    double floor = noise_variance;
    if (floor <= 0.0) floor = 1e-9 * cov.trace().real() / static_cast<double>(H.rows());
    cov += floor * Eigen::MatrixXcd::Identity(H.rows(), H.rows());
    const Eigen::LLT<Eigen::MatrixXcd> llt(cov);
    const Eigen::MatrixXcd Hw =
        llt.matrixL().solve(Eigen::MatrixXcd(served_amplitude * H));
    const Eigen::VectorXcd yw = llt.matrixL().solve(y);
    return detect(detector, Hw, yw, c);
}

}  // namespace

SicResult noma_sic_receive(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           DetectorKind detector, std::pair<double, double> power_split,
                           SicRole role, const Constellation& c, double noise_variance) {
    const auto [p_w, p_s] = power_split;
    if (p_w < 0.0 || p_s < 0.0)
        throw std::domain_error("noma_sic_receive: negative power split");
    const double a_w = std::sqrt(p_w);
    const double a_s = std::sqrt(p_s);

    SicResult result;
    if (role == SicRole::Weak) {
        result.own_symbols =
            detect_treating_as_noise(detector, H, y, a_w, p_s, noise_variance, c);
        return result;
    }
    result.weak_symbols = detect_treating_as_noise(detector, H, y, a_w, p_s, noise_variance, c);
    Eigen::VectorXcd weak_points(H.cols());
    for (int i = 0; i < H.cols(); ++i) weak_points(i) = c.points[result.weak_symbols[i]];
    const Eigen::VectorXcd residual = y - a_w * (H * weak_points);
    if (a_s == 0.0) {
        // Degenerate split: no strong-user signal; slice pure noise.
        result.own_symbols.assign(H.cols(), 0);
        for (int i = 0; i < H.cols(); ++i) result.own_symbols[i] = c.slice(residual(i));
        return result;
    }
    result.own_symbols = detect(detector, Eigen::MatrixXcd(a_s * H), residual, c);
    return result;
}

}  // namespace thznoma
