// End-to-end acceptance checks for the simulator and bounds engine.  Each
// check prints one PASS/FAIL line; the process exits nonzero if any failed.
// The checks are self-contained (fixed seeds, pinned tolerances) so a clean
// build can be judged from this binary alone.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fock_oracle.hpp"
#include "qbsg/adversary.hpp"
#include "qbsg/bounds.hpp"
#include "qbsg/experiment.hpp"
#include "qbsg/optics.hpp"
#include "qbsg/protocol.hpp"
#include "qbsg/rng.hpp"

using namespace qbsg;

namespace {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Bounds at the headline operating point: kappa set exactly at the honest
//    click expectation, eps_a + eps_b must land in the published band.
CheckResult check_headline() {
    protocol::ProtocolConfig cfg;
    cfg.n = 1000000;
    cfg.channel.alpha2 = 0.03;
    cfg.kappa = optics::honest_click_prob(cfg.channel);
    const auto r = bounds::build_report(cfg);
    const bool pass = r.eps_sum >= 0.28 && r.eps_sum <= 0.36;
    return {pass, "eps_sum=" + fmt(r.eps_sum) + " in [0.28,0.36], eps_a=" + fmt(r.eps_a) +
                      ", eps_b=" + fmt(r.eps_b)};
}

// 2. Advantage window: a log sweep of the signal strength must contain points
//    whose total quantum bias beats the finite-n classical floor.
CheckResult check_advantage_window() {
    experiment::ExperimentSpec spec;
    spec.base.n = 300000000ull;  // floor correction 2*delta_n stays small
    spec.sweep = {true, "alpha2", 0.005, 0.2, 20, experiment::SweepScale::Log};
    const auto rows = experiment::run_experiment(spec);
    std::size_t advantage = 0;
    bool all_ok = rows.size() == 20;
    for (const auto& row : rows) {
        all_ok = all_ok && row.status == "ok";
        if (row.report.advantage && row.report.eps_sum < 0.5) ++advantage;
    }
    return {all_ok && advantage >= 1,
            "advantage at " + std::to_string(advantage) + "/20 sweep points (n=3e8)"};
}

// 3. The early-measurement receiver attack saturates its bias bound
//    sin(theta)/2 within Monte-Carlo error.
CheckResult check_receiver_saturation() {
    protocol::ProtocolConfig cfg;
    cfg.n = 1000000;
    cfg.kappa = 2e-3;
    cfg.seed = 20260825;
    adversary::Strategy alice{adversary::Party::Alice, adversary::StrategyKind::Honest, {},
                              std::numbers::pi / 2};
    adversary::Strategy bob{adversary::Party::Bob, adversary::StrategyKind::EarlyMeasureBob, {},
                            std::numbers::pi / 2};
    const auto est = adversary::measure_bias(cfg, alice, bob, 1);
    const double target = bounds::epsilon_b_bound(cfg.channel.alpha2);
    const double dev = std::fabs(est.mean_bias - target);
    const bool pass = est.std_error > 0.0 && dev <= 3.0 * est.std_error;
    return {pass, "bias=" + fmt(est.mean_bias) + " vs bound=" + fmt(target) + " (|dev|=" +
                      fmt(dev) + " <= 3*sigma=" + fmt(3.0 * est.std_error) + ")"};
}

// 4. The closed-form no-click probability agrees with a brute-force
//    beam-splitter simulation on a truncated Fock space (per-mode dim 33).
CheckResult check_detector_oracle() {
    optics::ChannelModel ch;
    RngStream rng = derive_stream(20260825, 0xF0C4, 0);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const std::size_t len = 1 + static_cast<std::size_t>(rng.next_double() * 6.0);
        std::vector<std::complex<double>> c(std::min<std::size_t>(len, 6));
        double norm2 = 0.0;
        for (auto& v : c) {
            v = {2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
            norm2 += std::norm(v);
        }
        for (auto& v : c) v /= std::sqrt(norm2);
        const double closed = optics::no_click_prob_fock(optics::FockExpansion(c), ch);
        const double brute = fock_oracle::no_click_two_mode(c, ch.eta_tot());
        worst = std::max(worst, std::fabs(closed - brute));
    }
    return {worst < 1e-6, "max |closed-form - simulation| = " + fmt(worst) + " over 20 draws"};
}

// 5. Strong attenuation with a trace of chaotic light classicalizes every
//    moderately squeezed state; the bare r=0.5 squeezed state is nonclassical.
CheckResult check_classicalization() {
    if (optics::p_function_positive(optics::GaussianState::squeezed(0.5))) {
        return {false, "squeezed vacuum r=0.5 wrongly classified as classical"};
    }
    RngStream rng = derive_stream(20260825, 0xA77E, 9);
    int classical = 0;
    for (int i = 0; i < 100; ++i) {
        const double r = 2.0 * rng.next_double();
        const double phi = std::numbers::pi * rng.next_double();
        optics::GaussianState g = optics::GaussianState::squeezed(r, phi);
        g.mean = {6.0 * rng.next_double() - 3.0, 6.0 * rng.next_double() - 3.0};
        if (optics::p_function_positive(optics::attenuate_gaussian(g, 1e-3, 1e-3))) ++classical;
    }
    return {classical == 100,
            std::to_string(classical) + "/100 random states classical after attenuation"};
}

// 6. Tiny executions (n = 3) give uniform 3-bit strings and abort no more
//    often than the analytic bound allows.
CheckResult check_small_n_uniformity() {
    optics::ChannelModel ch;
    protocol::ProtocolConfig cfg;
    cfg.n = 3;
    cfg.kappa = bounds::default_kappa(ch);
    std::array<std::uint64_t, 8> counts{};
    std::uint64_t kept = 0, aborted = 0;
    const std::uint64_t executions = 100000;
    for (std::uint64_t t = 0; t < executions; ++t) {
        cfg.seed = derive_stream(1, 0xACC6, t).next_u64();
        protocol::HonestAlice alice(ch);
        protocol::HonestBob bob(ch);
        std::array<protocol::Bit, 3> x{};
        const auto summary = protocol::run_protocol_visit(
            cfg, alice, bob,
            [&x](std::uint64_t i, const protocol::RoundRecord& rec) { x[i] = rec.x; });
        if (summary.aborted) {
            ++aborted;
            continue;
        }
        counts[(x[0] << 2) | (x[1] << 1) | x[2]]++;
        ++kept;
    }
    const double expect = static_cast<double>(kept) / 8.0;
    double stat = 0.0;
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - expect;
        stat += d * d / expect;
    }
    const boost::math::chi_squared_distribution<double> dist(7.0);
    const double p = 1.0 - boost::math::cdf(dist, stat);
    const double abort_freq = static_cast<double>(aborted) / static_cast<double>(executions);
    const double delta = bounds::delta_n_bound(cfg.n, cfg.kappa, ch);
    const bool pass = p > 0.01 && abort_freq <= delta;
    return {pass, "uniformity p=" + fmt(p) + " (>0.01), abort_freq=" + fmt(abort_freq) +
                      " <= delta_n=" + fmt(delta)};
}

// 7. Honest click rate over one long execution matches the analytic value.
CheckResult check_honest_click_rate() {
    optics::ChannelModel ch;
    protocol::ProtocolConfig cfg;
    cfg.n = 1000000;
    cfg.kappa = 2e-3;
    cfg.seed = 7;
    protocol::HonestAlice alice(ch);
    protocol::HonestBob bob(ch);
    const auto summary = protocol::run_protocol_visit(
        cfg, alice, bob, [](std::uint64_t, const protocol::RoundRecord&) {});
    const double p_h = optics::honest_click_prob(ch);
    const double sigma = std::sqrt(p_h * (1.0 - p_h) / static_cast<double>(cfg.n));
    const double dev = std::fabs(summary.click_rate - p_h);
    return {dev <= 3.0 * sigma, "click_rate=" + fmt(summary.click_rate) + " vs p_h=" + fmt(p_h) +
                                    " (|dev|=" + fmt(dev) + " <= 3*sigma=" + fmt(3.0 * sigma) + ")"};
}

// 8. A sender who straddles the codewords clicks at ~3.3e-3 per round and is
//    caught by the kappa = 2e-3 threshold in essentially every execution.
CheckResult check_straddle_abort() {
    protocol::ProtocolConfig cfg;
    cfg.n = 1000000;
    cfg.kappa = 2e-3;
    cfg.seed = 42;
    adversary::Strategy alice{adversary::Party::Alice, adversary::StrategyKind::StraddleAlice, {},
                              std::numbers::pi / 2};
    adversary::Strategy bob{adversary::Party::Bob, adversary::StrategyKind::Honest, {},
                            std::numbers::pi / 2};
    const auto est = adversary::measure_bias(cfg, alice, bob, 100);
    const int aborts = static_cast<int>(std::lround(est.abort_freq * 100.0));
    return {aborts >= 99, "aborted " + std::to_string(aborts) + "/100 runs"};
}

// 9. Identical experiment description and seed produce byte-identical CSVs.
CheckResult check_determinism() {
    experiment::ExperimentSpec spec;
    spec.base.n = 20000;
    spec.base.seed = 42;
    spec.monte_carlo = true;
    spec.trials = 2;
    spec.bob.kind = adversary::StrategyKind::EarlyMeasureBob;
    spec.sweep = {true, "alpha2", 0.01, 0.05, 5, experiment::SweepScale::Linear};

    const std::string pa = "acceptance_run_a.csv";
    const std::string pb = "acceptance_run_b.csv";
    const std::string pc = "acceptance_run_c.csv";
    experiment::emit_csv(experiment::run_experiment(spec), pa);
    experiment::emit_csv(experiment::run_experiment(spec), pb);
    experiment::emit_csv(experiment::parse_csv(pa), pc);
    const std::string a = read_all(pa), b = read_all(pb), c = read_all(pc);
    std::remove(pa.c_str());
    std::remove(pb.c_str());
    std::remove(pc.c_str());
    if (a.empty()) return {false, "no CSV output produced"};
    if (a != b) return {false, "re-run produced different bytes"};
    if (a != c) return {false, "parse + re-emit produced different bytes"};
    return {true, "re-run and parse/re-emit both byte-identical (" +
                      std::to_string(a.size()) + " bytes)"};
}

struct NamedCheck {
    const char* name;
    double time_budget;  // seconds; 0 = no stated budget
    std::function<CheckResult()> fn;
};

}  // namespace

int main() {
    const std::vector<NamedCheck> checks = {
        {"headline operating point", 1.0, check_headline},
        {"advantage window sweep", 5.0, check_advantage_window},
        {"receiver-attack bias saturation", 60.0, check_receiver_saturation},
        {"detector model vs brute-force simulation", 0.0, check_detector_oracle},
        {"classicalization under strong attenuation", 0.0, check_classicalization},
        {"small-n output uniformity and abort bound", 0.0, check_small_n_uniformity},
        {"honest click rate", 0.0, check_honest_click_rate},
        {"straddling sender triggers abort", 0.0, check_straddle_abort},
        {"deterministic CSV emission", 0.0, check_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult result;
        try {
            result = checks[i].fn();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = result.pass;
        std::string detail = result.detail;
        if (checks[i].time_budget > 0.0 && seconds >= checks[i].time_budget) {
            pass = false;
            detail += " [exceeded " + fmt(checks[i].time_budget) + " s budget]";
        }
        if (!pass) ++failures;
        std::printf("[%s] %zu. %s — %s (%.2f s)\n", pass ? "PASS" : "FAIL", i + 1,
                    checks[i].name, detail.c_str(), seconds);
    }
    if (failures > 0) {
        std::printf("%d of %zu acceptance checks failed\n", failures, checks.size());
        return 1;
    }
    std::printf("all %zu acceptance checks passed\n", checks.size());
    return 0;
}
