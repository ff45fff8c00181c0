#include "qbsg/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qbsg::optics {

namespace {

void check_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string("ChannelModel.") + name +
                                    " must lie in [0,1], got " + std::to_string(v));
    }
}

}  // namespace

double CoherentState::overlap_magnitude(const CoherentState& other) const {
    return std::exp(-0.5 * std::norm(amplitude - other.amplitude));
}

double ChannelModel::nominal_amplitude() const { return std::sqrt(alpha2); }

double ChannelModel::visibility_residual() const {
    return (1.0 - visibility) * alpha2 / 2.0;
}

double ChannelModel::site_attenuation() const {
    if (att_alice > 0.0) return att_alice;
    return alpha2 / (att_bob_to_alice * n0);
}

void ChannelModel::validate() const {
    if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) {
        throw std::invalid_argument("ChannelModel.alpha2 must be >= 0, got " +
                                    std::to_string(alpha2));
    }
    check_fraction(a0t, "a0t");
    check_fraction(eta, "eta");
    check_fraction(dark, "dark");
    check_fraction(visibility, "visibility");
    check_fraction(att_bob_to_alice, "att_bob_to_alice");
    if (att_alice != 0.0) check_fraction(att_alice, "att_alice");
    if (!(n0 > 0.0)) {
        throw std::invalid_argument("ChannelModel.n0 must be > 0, got " +
                                    std::to_string(n0));
    }
    if (!(eta_tot() > 0.0)) {
        throw std::invalid_argument("ChannelModel: a0t * eta must be > 0");
    }
}

FockExpansion::FockExpansion(std::vector<std::complex<double>> coeffs)
    : coeffs_(std::move(coeffs)) {
    double norm = 0.0;
    for (const auto& c : coeffs_) norm += std::norm(c);
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw std::invalid_argument(
            "FockExpansion: coefficients are not normalized (sum |c_n|^2 = " +
            std::to_string(norm) + ")");
    }
}

double FockExpansion::fidelity() const {
    return coeffs_.empty() ? 0.0 : std::norm(coeffs_.front());
}

GaussianState GaussianState::squeezed(double r, double phi) {
    const double lo = 0.5 * std::exp(-2.0 * r);
    const double hi = 0.5 * std::exp(2.0 * r);
    const double c = std::cos(phi), s = std::sin(phi);
    GaussianState g;
    g.cov_qq = lo * c * c + hi * s * s;
    g.cov_pp = lo * s * s + hi * c * c;
    g.cov_qp = (lo - hi) * c * s;
    return g;
}

double GaussianState::min_cov_eigenvalue() const {
    const double tr = cov_qq + cov_pp;
    const double disc = std::sqrt((cov_qq - cov_pp) * (cov_qq - cov_pp) +
                                  4.0 * cov_qp * cov_qp);
    return 0.5 * (tr - disc);
}

void GaussianState::validate() const {
    if (!(min_cov_eigenvalue() > 0.0)) {
        throw std::invalid_argument("GaussianState: covariance must be positive definite");
    }
    // det >= 1/4 is the uncertainty relation in the vacuum = I/2 convention.
    // Pure squeezed states sit exactly on the boundary, so allow round-off.
    if (det_cov() < 0.25 * (1.0 - 1e-9)) {
        throw std::invalid_argument(
            "GaussianState: covariance violates the uncertainty bound det >= 1/4");
    }
}

double overlap_angle(double alpha2) {
    if (!(alpha2 >= 0.0)) {
        throw std::domain_error("overlap_angle: alpha2 must be >= 0, got " +
                                std::to_string(alpha2));
    }
    return std::acos(std::exp(-2.0 * alpha2));
}

double helstrom_success(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12)) {
        throw std::domain_error("helstrom_success: theta must lie in [0, pi/2]");
    }
    return 0.5 * (1.0 + std::sin(theta));
}

double click_prob_for_residual(double residual_photons, const ChannelModel& ch) {
    return 1.0 - (1.0 - ch.dark) * std::exp(-ch.eta_tot() * residual_photons);
}

double honest_click_prob(const ChannelModel& ch) {
    return click_prob_for_residual(ch.visibility_residual(), ch);
}

double round_click_prob(const CoherentState& sent, int revealed_bit,
                        const ChannelModel& ch) {
    const double target = (revealed_bit == 0 ? 1.0 : -1.0) * ch.nominal_amplitude();
    const double mismatch = std::norm(sent.amplitude - std::complex<double>(target, 0.0));
    return click_prob_for_residual(mismatch + ch.visibility_residual(), ch);
}

double no_click_prob_fock(const FockExpansion& expansion, const ChannelModel& ch) {
    const double survive = 1.0 - ch.eta_tot();
    double p = 0.0;
    double weight = 1.0;  // (1 - eta_tot)^n, built up incrementally
    for (const auto& c : expansion.coeffs()) {
        p += std::norm(c) * weight;
        weight *= survive;
    }
    return p;
}

double fidelity_floor_from_clicks(double click_rate, const ChannelModel& ch) {
    if (!(click_rate >= 0.0 && click_rate <= 1.0)) {
        throw std::domain_error("fidelity_floor_from_clicks: click_rate must lie in [0,1]");
    }
    const double f = 1.0 - (click_rate - ch.dark) / ch.eta_tot();
    return std::min(1.0, std::max(0.0, f));
}

GaussianState attenuate_gaussian(const GaussianState& g, double a, double n_chaotic) {
    if (!(a > 0.0 && a <= 1.0)) {
        throw std::domain_error("attenuate_gaussian: transmission must lie in (0,1], got " +
                                std::to_string(a));
    }
    if (!(n_chaotic >= 0.0)) {
        throw std::domain_error("attenuate_gaussian: n_chaotic must be >= 0, got " +
                                std::to_string(n_chaotic));
    }
    const double added = (1.0 - a) / 2.0 + n_chaotic;
    GaussianState out;
    out.mean = {std::sqrt(a) * g.mean[0], std::sqrt(a) * g.mean[1]};
    out.cov_qq = a * g.cov_qq + added;
    out.cov_pp = a * g.cov_pp + added;
    out.cov_qp = a * g.cov_qp;
    return out;
}

bool p_function_positive(const GaussianState& g) {
    g.validate();
    // cov - I/2 must be positive semidefinite; shift the smaller eigenvalue.
    return g.min_cov_eigenvalue() - 0.5 >= -1e-12;
}

}  // namespace qbsg::optics
