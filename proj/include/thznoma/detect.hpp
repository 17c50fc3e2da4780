// SPDX-License-Identifier: Apache-2.0
//
// QAM constellations and hard-output MIMO detection: zero-forcing,
// nulling-and-cancellation (V-BLAST ordering), the layered orthogonal
// lattice detector, exhaustive maximum likelihood, and the two-user
// power-domain SIC receiver built on top of them.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace thznoma {

struct Constellation {
    int order = 4;
    int bits_per_symbol = 2;
    // points[label] where label is the Gray-coded bit pattern of the symbol.
    std::vector<std::complex<double>> points;

    /// Square Gray-coded QAM, unit average power. Supported orders: 4, 16, 64.
    static Constellation qam(int order);

    /// Exact nearest point (per-axis PAM slicing); returns the label.
    int slice(std::complex<double> z) const;

private:
    int levels_ = 2;
    double scale_ = 1.0;
};

std::vector<std::complex<double>> modulate(const std::vector<std::uint8_t>& bits,
                                           const Constellation& c);
std::vector<std::uint8_t> demap(const std::vector<std::complex<double>>& symbols,
                                const Constellation& c);
std::vector<std::uint8_t> labels_to_bits(const std::vector<int>& labels, const Constellation& c);

enum class DetectorKind { Zf, Nc, Lord, Ml };

std::string detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);

/// Exhaustive search over constellation^streams; guarded at 1e6 candidates.
std::vector<int> detect_ml(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c);

/// slice(pinv(H) y); throws SingularChannelError on rank deficiency.
std::vector<int> detect_zf(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c);

/// Ordered successive nulling and cancellation (highest post-nulling SNR first).
std::vector<int> detect_nc(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           const Constellation& c);

/// Per-root-layer QR enumeration with decision-feedback back-substitution;
/// hard-output ML-achieving for two layers.
std::vector<int> detect_lord(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                             const Constellation& c);

std::vector<int> detect(DetectorKind kind, const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                        const Constellation& c);

enum class SicRole { Weak, Strong };

struct SicResult {
    std::vector<int> own_symbols;
    std::vector<int> weak_symbols;  // filled for the strong role
};

/// Two-user superposition receiver. The weak role detects its own symbols on
/// the sqrt(p_w)-scaled channel, treating the strong component as noise; the
/// strong role detects and reconstructs the weak symbols first, subtracts
/// them, then detects its own. "Treating as noise" whitens by the
/// interference-plus-noise covariance p_other * H H^H + noise_variance * I,
/// so the detector metric matches the actual disturbance statistics.
SicResult noma_sic_receive(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                           DetectorKind detector, std::pair<double, double> power_split,
                           SicRole role, const Constellation& c, double noise_variance = 0.0);

}  // namespace thznoma
