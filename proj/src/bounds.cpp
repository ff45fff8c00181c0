#include "qbsg/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qbsg/format.hpp"

namespace qbsg::bounds {

namespace {

/// sin^2(theta) = 1 - e^{-4 alpha2}, evaluated without cancellation.
double sin2_theta(double alpha2) { return -std::expm1(-4.0 * alpha2); }

}  // namespace

double epsilon_b_bound(double alpha2) {
    if (!(alpha2 >= 0.0)) {
        throw std::domain_error("epsilon_b_bound: alpha2 must be >= 0");
    }
    return 0.5 * std::sqrt(sin2_theta(alpha2));
}

double cheat_function_F(double x, double alpha2) {
    if (!(x >= 0.0)) throw std::domain_error("cheat_function_F: x must be >= 0");
    if (!(alpha2 >= 0.0)) throw std::domain_error("cheat_function_F: alpha2 must be >= 0");
    if (alpha2 == 0.0) return 0.5;  // sin(theta) = 0: the bound is vacuous
    const double s2 = sin2_theta(alpha2);
    const double f = std::sqrt(x) / (std::sqrt(2.0) * s2) + x / s2;
    return std::min(0.5, f);
}

double epsilon_a_bound(double kappa, const optics::ChannelModel& ch) {
    if (kappa < ch.dark) {
        throw std::invalid_argument(
            "epsilon_a_bound: abort threshold below dark-count floor (kappa = " +
            std::to_string(kappa) + ", dark = " + std::to_string(ch.dark) + ")");
    }
    return cheat_function_F((kappa - ch.dark) / ch.eta_tot(), ch.alpha2);
}

double delta_n_bound(std::uint64_t n, double kappa, const optics::ChannelModel& ch,
                     std::string* warning) {
    const double p_h = optics::honest_click_prob(ch);
    if (kappa <= p_h) {
        if (warning) {
            std::ostringstream msg;
            msg << "delta_n_bound: kappa = " << kappa
                << " does not exceed the honest click expectation " << p_h
                << "; the abort bound is vacuous (1)";
            *warning = msg.str();
        }
        return 1.0;
    }
    const double gap = kappa - p_h;
    return std::exp(-2.0 * static_cast<double>(n) * gap * gap);
}

double delta_n_bound(const protocol::ProtocolConfig& cfg, std::string* warning) {
    return delta_n_bound(cfg.n, cfg.kappa, cfg.channel, warning);
}

double classical_floor(double delta_n) {
    if (!(delta_n >= 0.0 && delta_n <= 1.0)) {
        throw std::domain_error("classical_floor: delta_n must lie in [0,1]");
    }
    return std::max(0.0, 0.5 - 2.0 * delta_n);
}

double default_kappa(const optics::ChannelModel& ch) {
    const double p_h = optics::honest_click_prob(ch);
    const double eps_b = epsilon_b_bound(ch.alpha2);
    if (ch.alpha2 <= 0.0 || eps_b >= 0.5) {
        // No threshold can keep the total bias under 1/2; fall back to a
        // threshold that at least keeps honest runs alive.
        return std::min(2.0 * p_h, 0.5);
    }
    // Largest useful threshold: where eps_b + F((kappa - dark)/eta_tot)
    // crosses 1/2.  The bracket [dark, 1] always contains it because
    // F(0) = 0 and F clamps at 1/2.
    const auto excess = [&](double kappa) {
        return eps_b + cheat_function_F((kappa - ch.dark) / ch.eta_tot(), ch.alpha2) - 0.5;
    };
    double lo = ch.dark, hi = 1.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-18 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double kappa_hi = 0.5 * (lo + hi);
    return std::sqrt(p_h * kappa_hi);
}

SecurityReport build_report(const protocol::ProtocolConfig& cfg) {
    cfg.validate();
    SecurityReport r;
    r.alpha2 = cfg.channel.alpha2;
    r.kappa = cfg.kappa;
    r.n = cfg.n;
    r.channel = cfg.channel;
    r.eps_b = std::min(0.5, epsilon_b_bound(r.alpha2));
    r.eps_a = std::min(0.5, epsilon_a_bound(r.kappa, cfg.channel));
    r.eps_sum = r.eps_a + r.eps_b;
    r.delta_n = delta_n_bound(cfg);
    r.classical_floor = classical_floor(r.delta_n);
    r.advantage = r.eps_sum < r.classical_floor;
    return r;
}

std::string to_key_values(const SecurityReport& r) {
    std::string out;
    out += "alpha2=" + format_g6(r.alpha2) + "\n";
    out += "kappa=" + format_g6(r.kappa) + "\n";
    out += "n=" + std::to_string(r.n) + "\n";
    out += "a0t=" + format_g6(r.channel.a0t) + "\n";
    out += "eta=" + format_g6(r.channel.eta) + "\n";
    out += "dark=" + format_g6(r.channel.dark) + "\n";
    out += "visibility=" + format_g6(r.channel.visibility) + "\n";
    out += "eps_a=" + format_g6(r.eps_a) + "\n";
    out += "eps_b=" + format_g6(r.eps_b) + "\n";
    out += "eps_sum=" + format_g6(r.eps_sum) + "\n";
    out += "delta_n=" + format_g6(r.delta_n) + "\n";
    out += "classical_floor=" + format_g6(r.classical_floor) + "\n";
    out += "advantage=" + format_bool(r.advantage) + "\n";
    return out;
}

std::string csv_header() {
    return "alpha2,kappa,eps_a,eps_b,eps_sum,delta_n,classical_floor,advantage";
}

std::string to_csv_row(const SecurityReport& r) {
    std::string out;
    out += format_g6(r.alpha2) + ",";
    out += format_g6(r.kappa) + ",";
    out += format_g6(r.eps_a) + ",";
    out += format_g6(r.eps_b) + ",";
    out += format_g6(r.eps_sum) + ",";
    out += format_g6(r.delta_n) + ",";
    out += format_g6(r.classical_floor) + ",";
    out += format_bool(r.advantage);
    return out;
}

}  // namespace qbsg::bounds
