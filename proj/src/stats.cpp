#include "qbsg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "qbsg/format.hpp"

namespace qbsg::stats {

ConsistencyResult gaussian_consistency_test(const IntensitySample& s, double expected_mean,
                                            double significance,
                                            const IntensityCalibration& calib) {
    const std::size_t n = s.readings.size();
    if (n < 100) {
        throw std::invalid_argument(
            "gaussian_consistency_test: inconclusive with fewer than 100 readings (got " +
            std::to_string(n) + ")");
    }
    if (!(significance > 0.0 && significance <= 0.1)) {
        throw std::invalid_argument(
            "gaussian_consistency_test: significance must lie in (0, 0.1]");
    }
    if (!(s.noise_sigma > 0.0)) {
        throw std::invalid_argument("gaussian_consistency_test: noise_sigma must be > 0");
    }
    if (!(calib.coupler > 0.0 && calib.coupler <= 1.0)) {
        throw std::invalid_argument(
            "gaussian_consistency_test: calibration coupler must lie in (0, 1]");
    }

    double sum = 0.0;
    for (double r : s.readings) sum += r;
    const double mean = sum / static_cast<double>(n);

    double ss = 0.0;
    for (double r : s.readings) ss += (r - mean) * (r - mean);
    const double var = ss / static_cast<double>(n - 1);

    ConsistencyResult res;
    res.sample_mean = mean;
    res.sample_variance = var;

    // (a) z-test of the mean against expected_mean with known noise_sigma.
    const double z =
        (mean - expected_mean) / (s.noise_sigma / std::sqrt(static_cast<double>(n)));
    const boost::math::normal_distribution<double> unit_normal;
    res.p_mean = 2.0 * boost::math::cdf(unit_normal, -std::abs(z));

    // (b) two-sided chi-square test of the variance against noise_sigma^2.
    const double stat = static_cast<double>(n - 1) * var / (s.noise_sigma * s.noise_sigma);
    const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(n - 1));
    const double lower_tail = boost::math::cdf(chi2, stat);
    res.p_variance = 2.0 * std::min(lower_tail, 1.0 - lower_tail);

    res.passed = res.p_mean > significance && res.p_variance > significance;
    res.alpha2_estimate = calib.att_alice * mean / calib.coupler;
    return res;
}

Interval propagate_systematics(const bounds::SecurityReport& report,
                               const CalibrationError& err) {
    if (!(err.rel_eta >= 0.0) || !(err.rel_alpha2 >= 0.0)) {
        throw std::invalid_argument("propagate_systematics: relative errors must be >= 0");
    }

    const auto eps_sum_at = [&](double eta, double alpha2) {
        optics::ChannelModel ch = report.channel;
        ch.eta = std::min(1.0, eta);
        ch.alpha2 = std::max(0.0, alpha2);
        const double eps_b = std::min(0.5, bounds::epsilon_b_bound(ch.alpha2));
        const double eps_a = std::min(0.5, bounds::epsilon_a_bound(report.kappa, ch));
        return eps_a + eps_b;
    };

    // Envelope over the four corners plus the nominal point; eps_sum has an
    // interior minimum in alpha2, so the corners alone could exclude it.
    Interval iv{report.eps_sum, report.eps_sum};
    const double eta = report.channel.eta;
    const double alpha2 = report.channel.alpha2;
    for (const double se : {-1.0, 1.0}) {
        for (const double sa : {-1.0, 1.0}) {
            const double v =
                eps_sum_at(eta * (1.0 + se * err.rel_eta), alpha2 * (1.0 + sa * err.rel_alpha2));
            iv.lo = std::min(iv.lo, v);
            iv.hi = std::max(iv.hi, v);
        }
    }
    return iv;
}

IntensitySample load_intensity_csv(const std::string& path, double noise_sigma) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open intensity file: " + path);
    IntensitySample s;
    s.noise_sigma = noise_sigma;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw std::runtime_error("malformed intensity line in " + path + ": " + line);
        }
        first = false;
        s.readings.push_back(v);
    }
    return s;
}

void write_intensity_csv(const std::string& path, const std::vector<double>& readings) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open intensity file for writing: " + path);
    out << "intensity\n";
    for (double r : readings) out << format_g6(r) << '\n';
    if (!out) throw std::runtime_error("error while writing intensity file: " + path);
}

}  // namespace qbsg::stats
