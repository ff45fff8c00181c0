#pragma once

#include <string>
#include <vector>

#include "qbsg/bounds.hpp"
#include "qbsg/optics.hpp"

namespace qbsg::stats {

/// Alice's classical intensity record: one reading per round (photon-number
/// scale; the nominal mean is the arriving pulse energy att_bob_to_alice*n0
/// times the monitor coupler fraction) and the calibrated instrumental
/// standard deviation of a single reading.
struct IntensitySample {
    std::vector<double> readings;
    double noise_sigma = 0.0;
};

/// Known attenuation chain used to rescale the measured mean into an alpha2
/// estimate: alpha2 = att_alice * (mean / coupler).  `coupler` is the
/// fraction of the arriving pulse routed to the monitor detector (1 when the
/// monitor sees the full pulse).
struct IntensityCalibration {
    double att_alice = 3e-8;
    double coupler = 1.0;

    static IntensityCalibration for_channel(const optics::ChannelModel& ch,
                                            double coupler = 1.0) {
        return {ch.site_attenuation(), coupler};
    }
};

struct ConsistencyResult {
    bool passed = false;
    double p_mean = 0.0;       // two-sided z-test p-value for the mean
    double p_variance = 0.0;   // two-sided chi-square p-value for the variance
    double alpha2_estimate = 0.0;  // meaningful when passed
    double sample_mean = 0.0;
    double sample_variance = 0.0;
};

/// Alice's defense against intensity manipulation: checks that the readings
/// are consistent with the expected Gaussian (z-test on the mean with known
/// noise_sigma, two-sided chi-square test on the variance).  Passes iff both
/// p-values exceed `significance`; a failing sample means Alice must abort.
/// Throws std::invalid_argument for fewer than 100 readings (test would be
/// inconclusive), significance outside (0, 0.1], or noise_sigma <= 0.
ConsistencyResult gaussian_consistency_test(const IntensitySample& s, double expected_mean,
                                            double significance,
                                            const IntensityCalibration& calib);

/// Relative systematic uncertainties on the detector efficiency and on the
/// mean photon number, as fractions (0.10 = 10%).
struct CalibrationError {
    double rel_eta = 0.10;
    double rel_alpha2 = 0.10;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Systematic-error envelope on eps_sum: re-evaluates the bounds at the four
/// corners eta*(1 +/- rel_eta) x alpha2*(1 +/- rel_alpha2) (kappa and all
/// other parameters held fixed) and returns the min/max envelope including
/// the nominal point.  Re-evaluation, not linearization: the Alice bound has
/// a square-root cusp that derivatives misrepresent.
Interval propagate_systematics(const bounds::SecurityReport& report,
                               const CalibrationError& err);

/// One reading per line under an optional header; companion format of the
/// round transcript.
IntensitySample load_intensity_csv(const std::string& path, double noise_sigma);
void write_intensity_csv(const std::string& path, const std::vector<double>& readings);

}  // namespace qbsg::stats
