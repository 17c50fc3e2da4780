// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thznoma/errors.hpp"
#include "thznoma/experiments.hpp"

namespace py = pybind11;
using namespace thznoma;

namespace {

SystemConfig config_from_optional_json(const std::string& json_text) {
    if (json_text.empty()) {
        SystemConfig cfg;
        cfg.validate();
        return cfg;
    }
    return config_from_json_text(json_text);
}

}  // namespace

PYBIND11_MODULE(_thznoma, m) {
    m.doc() = "THz-band power-domain NOMA simulation toolkit";

    py::register_exception<SingularChannelError>(m, "SingularChannelError");
    py::register_exception<SearchSpaceError>(m, "SearchSpaceError");
    py::register_exception<AllocationError>(m, "AllocationError");

    // channel primitives
    m.def("fspl_db", &fspl_db, py::arg("distance_m"), py::arg("frequency_hz"));
    m.def(
        "absorption_amplitude",
        [](double d, double f, double k) {
            return absorption_amplitude(d, CarrierSpec{f, 0.0, k});
        },
        py::arg("distance_m"), py::arg("frequency_hz"), py::arg("absorption_coeff_per_m"));
    m.def("gain_from_beamwidth", &gain_from_beamwidth, py::arg("azimuth_spread_deg"),
          py::arg("elevation_spread_deg"));
    m.def("beamwidth_from_gain", &beamwidth_from_gain, py::arg("gain_dbi"),
          py::arg("aspect_ratio") = 1.0);
    m.def(
        "cbf_widen",
        [](int active, int total) {
            const CbfWiden w = cbf_widen(active, total);
            return std::make_pair(w.gain_delta_db, w.beamwidth_scale);
        },
        py::arg("active_elements"), py::arg("total_elements"));
    m.def("multibeam_split", &multibeam_split, py::arg("gain_dbi"), py::arg("num_beams"));
    m.def("orthogonal_sa_spacing", &orthogonal_sa_spacing, py::arg("link_distance_m"),
          py::arg("frequency_hz"), py::arg("num_sas"));
    m.def(
        "channel_correlation",
        [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
            return channel_correlation(a, b);
        },
        py::arg("h1"), py::arg("h2"));
    m.def(
        "gen_ensemble",
        [](const std::string& kind, int rows, int cols, double frequency_hz, std::uint64_t seed,
           std::uint64_t index) {
            ChannelEnsembleKind k;
            if (kind == "gaussian") k = ChannelEnsembleKind::GaussianIID;
            else if (kind == "thz_correlated") k = ChannelEnsembleKind::ThzCorrelated;
            else if (kind == "thz_orthogonal") k = ChannelEnsembleKind::ThzOrthogonal;
            else throw std::domain_error("unknown ensemble kind: " + kind);
            RngStream rng(seed, 0x656e73u, index);
            return gen_ensemble(k, rows, cols, CarrierSpec{frequency_hz, 0.0, 0.0}, rng).matrix;
        },
        py::arg("kind"), py::arg("rows") = 4, py::arg("cols") = 4,
        py::arg("frequency_hz") = 300e9, py::arg("seed") = 1, py::arg("index") = 0);

    // power allocation / rates
    m.def("allocate_power_fixed_fraction", &allocate_power_fixed_fraction, py::arg("budget_w"),
          py::arg("fraction"), py::arg("num_users"));
    m.def("allocate_power_ftpa", &allocate_power_ftpa, py::arg("budget_w"), py::arg("gains"),
          py::arg("alpha"));
    m.def("receive_power_dbm", &receive_power_dbm, py::arg("tx_power_w"), py::arg("distance_m"),
          py::arg("frequency_hz"), py::arg("gains_dbi") = 0.0);
    m.def(
        "fairness_factor",
        [](const std::vector<std::vector<double>>& rates) {
            const FairnessReport r = fairness_factor(rates);
            return std::make_pair(r.per_beam, r.overall);
        },
        py::arg("rates_per_beam"));

    // detection
    m.def(
        "detect",
        [](const std::string& detector, const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
           int order) {
            return detect(detector_from_name(detector), H, y, Constellation::qam(order));
        },
        py::arg("detector"), py::arg("H"), py::arg("y"), py::arg("order") = 4,
        "Hard-output MIMO detection; returns Gray labels per stream");
    m.def(
        "qam_points",
        [](int order) { return Constellation::qam(order).points; }, py::arg("order"));

    // experiments (JSON config text; empty string = defaults)
    m.def(
        "run_fairness_csv",
        [](const std::string& config_json) {
            return fairness_csv(run_fairness_experiment(config_from_optional_json(config_json)).rows);
        },
        py::arg("config_json") = std::string());
    m.def(
        "run_ber_csv",
        [](const std::string& config_json) {
            return ber_csv(run_ber_from_config(config_from_optional_json(config_json)));
        },
        py::arg("config_json") = std::string());
    m.def(
        "run_mulp_csv",
        [](const std::string& config_json) {
            return mulp_csv(run_mulp_from_config(config_from_optional_json(config_json)));
        },
        py::arg("config_json") = std::string());
    m.def(
        "power_example_csv",
        [](const std::string& config_json) {
            return power_example_csv(power_example(config_from_optional_json(config_json)));
        },
        py::arg("config_json") = std::string());
    m.def(
        "gain_map_csv",
        [](const std::string& config_json) {
            return gain_map_csv(gain_map(config_from_optional_json(config_json)));
        },
        py::arg("config_json") = std::string());
    m.def("default_config_json",
          [] { return config_to_json(SystemConfig{}); });

    m.attr("__version__") = THZNOMA_VERSION;
}
