#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <numbers>

#include "qbsg/adversary.hpp"
#include "qbsg/bounds.hpp"
#include "qbsg/experiment.hpp"
#include "qbsg/optics.hpp"
#include "qbsg/protocol.hpp"
#include "qbsg/stats.hpp"

namespace py = pybind11;

using namespace qbsg;

namespace {

/// Maps the CLI adversary names onto a strategy pair.
std::pair<adversary::Strategy, adversary::Strategy> strategies_from_name(
    const std::string& name, double phi, const std::vector<protocol::Bit>& target) {
    adversary::Strategy alice{adversary::Party::Alice, adversary::StrategyKind::Honest, target,
                              phi};
    adversary::Strategy bob{adversary::Party::Bob, adversary::StrategyKind::Honest, target, phi};
    if (name == "none") {
        // both honest
    } else if (name == "bob_early") {
        bob.kind = adversary::StrategyKind::EarlyMeasureBob;
    } else if (name == "alice_straddle") {
        alice.kind = adversary::StrategyKind::StraddleAlice;
    } else {
        throw std::invalid_argument("adversary must be one of none/bob_early/alice_straddle, got '" +
                                    name + "'");
    }
    return {alice, bob};
}

py::dict row_to_dict(const experiment::SweepRow& row) {
    py::dict d;
    d["param"] = row.param;
    d["value"] = row.value;
    d["alpha2"] = row.report.alpha2;
    d["kappa"] = row.report.kappa;
    d["eps_a"] = row.report.eps_a;
    d["eps_b"] = row.report.eps_b;
    d["eps_sum"] = row.report.eps_sum;
    d["delta_n"] = row.report.delta_n;
    d["classical_floor"] = row.report.classical_floor;
    d["advantage"] = row.report.advantage;
    d["mc_bias"] = row.mc_bias;
    d["mc_bias_err"] = row.mc_bias_err;
    d["mc_abort_freq"] = row.mc_abort_freq;
    d["status"] = row.status;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simulator and provable security bounds for two-party quantum "
              "bit-string generation over a lossy optical channel";

    // ---- optics ----------------------------------------------------------
    py::class_<optics::ChannelModel>(m, "ChannelModel")
        .def(py::init([](double alpha2, double a0t, double eta, double dark, double visibility,
                         double att_bob_to_alice, double att_alice, double n0) {
                 return optics::ChannelModel{alpha2, a0t,       eta,       dark,
                                             visibility, att_bob_to_alice, att_alice, n0};
             }),
             py::arg("alpha2") = 0.03, py::arg("a0t") = 0.3715352290971725,
             py::arg("eta") = 0.105, py::arg("dark") = 9e-4, py::arg("visibility") = 0.965,
             py::arg("att_bob_to_alice") = 1e-3, py::arg("att_alice") = 0.0,
             py::arg("n0") = 1e9)
        .def_readwrite("alpha2", &optics::ChannelModel::alpha2)
        .def_readwrite("a0t", &optics::ChannelModel::a0t)
        .def_readwrite("eta", &optics::ChannelModel::eta)
        .def_readwrite("dark", &optics::ChannelModel::dark)
        .def_readwrite("visibility", &optics::ChannelModel::visibility)
        .def_readwrite("att_bob_to_alice", &optics::ChannelModel::att_bob_to_alice)
        .def_readwrite("att_alice", &optics::ChannelModel::att_alice)
        .def_readwrite("n0", &optics::ChannelModel::n0)
        .def("eta_tot", &optics::ChannelModel::eta_tot)
        .def("site_attenuation", &optics::ChannelModel::site_attenuation)
        .def("validate", &optics::ChannelModel::validate);

    py::class_<optics::GaussianState>(m, "GaussianState")
        .def(py::init<>())
        .def_readwrite("mean", &optics::GaussianState::mean)
        .def_readwrite("cov_qq", &optics::GaussianState::cov_qq)
        .def_readwrite("cov_qp", &optics::GaussianState::cov_qp)
        .def_readwrite("cov_pp", &optics::GaussianState::cov_pp)
        .def_static("vacuum", &optics::GaussianState::vacuum)
        .def_static("coherent", &optics::GaussianState::coherent, py::arg("q"), py::arg("p"))
        .def_static("squeezed", &optics::GaussianState::squeezed, py::arg("r"),
                    py::arg("phi") = 0.0)
        .def("det_cov", &optics::GaussianState::det_cov)
        .def("min_cov_eigenvalue", &optics::GaussianState::min_cov_eigenvalue);

    m.def("overlap_angle", &optics::overlap_angle, py::arg("alpha2"));
    m.def("helstrom_success", &optics::helstrom_success, py::arg("theta"));
    m.def("honest_click_prob", &optics::honest_click_prob, py::arg("channel"));
    m.def("fidelity_floor_from_clicks", &optics::fidelity_floor_from_clicks,
          py::arg("click_rate"), py::arg("channel"));
    m.def(
        "no_click_prob_fock",
        [](const std::vector<std::complex<double>>& coeffs, const optics::ChannelModel& ch) {
            return optics::no_click_prob_fock(optics::FockExpansion(coeffs), ch);
        },
        py::arg("coeffs"), py::arg("channel"),
        "No-click probability of the verification detector for a signal with "
        "the given displaced-Fock coefficients");
    m.def("attenuate_gaussian", &optics::attenuate_gaussian, py::arg("state"), py::arg("a"),
          py::arg("n_chaotic"));
    m.def("p_function_positive", &optics::p_function_positive, py::arg("state"));

    // ---- protocol --------------------------------------------------------
    py::class_<protocol::ProtocolConfig>(m, "ProtocolConfig")
        .def(py::init([](std::uint64_t n, double kappa, const optics::ChannelModel& channel,
                         std::uint64_t seed) {
                 return protocol::ProtocolConfig{n, kappa, channel, seed};
             }),
             py::arg("n") = 10'000'000, py::arg("kappa") = 2e-3,
             py::arg("channel") = optics::ChannelModel{}, py::arg("seed") = 1)
        .def_readwrite("n", &protocol::ProtocolConfig::n)
        .def_readwrite("kappa", &protocol::ProtocolConfig::kappa)
        .def_readwrite("channel", &protocol::ProtocolConfig::channel)
        .def_readwrite("seed", &protocol::ProtocolConfig::seed)
        .def("validate", &protocol::ProtocolConfig::validate);

    m.def(
        "run_protocol",
        [](const protocol::ProtocolConfig& cfg, const std::string& adversary_name, double phi,
           const std::vector<protocol::Bit>& target, bool return_records) {
            auto [alice_spec, bob_spec] = strategies_from_name(adversary_name, phi, target);
            auto alice = adversary::make_alice(alice_spec, cfg.channel);
            auto bob = adversary::make_bob(bob_spec, cfg.channel);
            auto [outcome, records] = protocol::run_protocol(cfg, *alice, *bob);

            py::dict d;
            d["aborted"] = outcome.aborted();
            d["abort_reason"] = outcome.abort_reason;
            d["click_rate"] = outcome.click_rate;
            if (outcome.bits) {
                const std::vector<py::ssize_t> shape{
                    static_cast<py::ssize_t>(outcome.bits->size())};
                py::array_t<std::uint8_t> bits(shape);
                std::memcpy(bits.mutable_data(), outcome.bits->data(), outcome.bits->size());
                d["bits"] = bits;
            } else {
                d["bits"] = py::none();
            }
            if (return_records) {
                py::array_t<std::uint8_t> arr({static_cast<py::ssize_t>(records.size()),
                                               static_cast<py::ssize_t>(4)});
                auto view = arr.mutable_unchecked<2>();
                for (py::ssize_t i = 0; i < view.shape(0); ++i) {
                    const auto& r = records[static_cast<std::size_t>(i)];
                    view(i, 0) = r.a;
                    view(i, 1) = r.b;
                    view(i, 2) = r.k;
                    view(i, 3) = r.x;
                }
                d["records"] = arr;
            }
            return d;
        },
        py::arg("cfg"), py::arg("adversary") = "none",
        py::arg("phi") = std::numbers::pi / 2, py::arg("target") = std::vector<protocol::Bit>{},
        py::arg("return_records") = false,
        "Executes the protocol; returns aborted/click_rate/bits (and per-round "
        "records as an (n,4) uint8 array of a,b,k,x when requested)");

    // ---- adversary -------------------------------------------------------
    py::class_<adversary::BiasEstimate>(m, "BiasEstimate")
        .def_readonly("mean_bias", &adversary::BiasEstimate::mean_bias)
        .def_readonly("std_error", &adversary::BiasEstimate::std_error)
        .def_readonly("n_rounds", &adversary::BiasEstimate::n_rounds)
        .def_readonly("abort_freq", &adversary::BiasEstimate::abort_freq)
        .def_readonly("trials", &adversary::BiasEstimate::trials);

    m.def(
        "measure_bias",
        [](const protocol::ProtocolConfig& cfg, const std::string& adversary_name,
           std::uint64_t trials, double phi, const std::vector<protocol::Bit>& target) {
            auto [alice_spec, bob_spec] = strategies_from_name(adversary_name, phi, target);
            return adversary::measure_bias(cfg, alice_spec, bob_spec, trials);
        },
        py::arg("cfg"), py::arg("adversary") = "none", py::arg("trials") = 1,
        py::arg("phi") = std::numbers::pi / 2, py::arg("target") = std::vector<protocol::Bit>{},
        "Empirical bias toward the target pattern over `trials` executions");

    // ---- bounds ----------------------------------------------------------
    py::class_<bounds::SecurityReport>(m, "SecurityReport")
        .def_readonly("alpha2", &bounds::SecurityReport::alpha2)
        .def_readonly("kappa", &bounds::SecurityReport::kappa)
        .def_readonly("n", &bounds::SecurityReport::n)
        .def_readonly("channel", &bounds::SecurityReport::channel)
        .def_readonly("eps_a", &bounds::SecurityReport::eps_a)
        .def_readonly("eps_b", &bounds::SecurityReport::eps_b)
        .def_readonly("eps_sum", &bounds::SecurityReport::eps_sum)
        .def_readonly("delta_n", &bounds::SecurityReport::delta_n)
        .def_readonly("classical_floor", &bounds::SecurityReport::classical_floor)
        .def_readonly("advantage", &bounds::SecurityReport::advantage)
        .def("__repr__", [](const bounds::SecurityReport& r) {
            return "<SecurityReport eps_sum=" + std::to_string(r.eps_sum) +
                   " classical_floor=" + std::to_string(r.classical_floor) +
                   (r.advantage ? " advantage>" : ">");
        });

    m.def("epsilon_b_bound", &bounds::epsilon_b_bound, py::arg("alpha2"));
    m.def("cheat_function_F", &bounds::cheat_function_F, py::arg("x"), py::arg("alpha2"));
    m.def("epsilon_a_bound", &bounds::epsilon_a_bound, py::arg("kappa"), py::arg("channel"));
    m.def(
        "delta_n_bound",
        [](std::uint64_t n, double kappa, const optics::ChannelModel& ch) {
            return bounds::delta_n_bound(n, kappa, ch);
        },
        py::arg("n"), py::arg("kappa"), py::arg("channel"));
    m.def("classical_floor", &bounds::classical_floor, py::arg("delta_n"));
    m.def("default_kappa", &bounds::default_kappa, py::arg("channel"));
    m.def("build_report", &bounds::build_report, py::arg("cfg"));
    m.def("report_key_values", &bounds::to_key_values, py::arg("report"));

    // ---- stats -----------------------------------------------------------
    py::class_<stats::ConsistencyResult>(m, "ConsistencyResult")
        .def_readonly("passed", &stats::ConsistencyResult::passed)
        .def_readonly("p_mean", &stats::ConsistencyResult::p_mean)
        .def_readonly("p_variance", &stats::ConsistencyResult::p_variance)
        .def_readonly("alpha2_estimate", &stats::ConsistencyResult::alpha2_estimate)
        .def_readonly("sample_mean", &stats::ConsistencyResult::sample_mean)
        .def_readonly("sample_variance", &stats::ConsistencyResult::sample_variance);

    py::class_<stats::Interval>(m, "Interval")
        .def_readonly("lo", &stats::Interval::lo)
        .def_readonly("hi", &stats::Interval::hi)
        .def("width", &stats::Interval::width)
        .def("contains", &stats::Interval::contains, py::arg("v"));

    m.def(
        "gaussian_consistency_test",
        [](const std::vector<double>& readings, double noise_sigma, double expected_mean,
           double significance, double att_alice, double coupler) {
            return stats::gaussian_consistency_test({readings, noise_sigma}, expected_mean,
                                                    significance, {att_alice, coupler});
        },
        py::arg("readings"), py::arg("noise_sigma"), py::arg("expected_mean"),
        py::arg("significance") = 0.01, py::arg("att_alice") = 3e-8, py::arg("coupler") = 1.0,
        "Alice's mean/variance consistency test; returns p-values and the "
        "alpha2 estimate rescaled through the attenuation chain");
    m.def(
        "propagate_systematics",
        [](const bounds::SecurityReport& report, double rel_eta, double rel_alpha2) {
            return stats::propagate_systematics(report, {rel_eta, rel_alpha2});
        },
        py::arg("report"), py::arg("rel_eta") = 0.10, py::arg("rel_alpha2") = 0.10);

    // ---- experiment ------------------------------------------------------
    m.def(
        "run_config",
        [](const std::string& path) {
            const experiment::ExperimentSpec spec = experiment::load_config(path);
            py::list out;
            for (const experiment::SweepRow& row : experiment::run_experiment(spec)) {
                out.append(row_to_dict(row));
            }
            return out;
        },
        py::arg("path"),
        "Runs the experiment described by a config file; returns one dict per sweep row");
}
