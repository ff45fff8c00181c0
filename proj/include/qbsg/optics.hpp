#pragma once

#include <array>
#include <complex>
#include <vector>

namespace qbsg::optics {

/// Single optical mode in a coherent state with complex field amplitude;
/// the mean photon number is |amplitude|^2.
struct CoherentState {
    std::complex<double> amplitude{0.0, 0.0};

    double mean_photon_number() const { return std::norm(amplitude); }

    /// |<this|other>| = exp(-|a-b|^2 / 2); self-overlap is 1.
    double overlap_magnitude(const CoherentState& other) const;
};

/// All apparatus parameters of the fiber channel and Bob's detector.
///
/// a0t is the combined path transmission (linear, not dB), eta the detector
/// efficiency, dark the dark-click probability per detection gate, and
/// visibility the interferometric cancellation quality.  att_bob_to_alice,
/// att_alice and n0 describe the strong-pulse leg: Bob launches n0 photons,
/// att_bob_to_alice of them reach Alice's monitor, and Alice's own attenuator
/// att_alice brings the returned signal down to alpha2 mean photons.
struct ChannelModel {
    double alpha2 = 0.03;
    double a0t = 0.3715352290971725;  // 4.3 dB path loss, 10^(-0.43)
    double eta = 0.105;
    double dark = 9e-4;
    double visibility = 0.965;
    double att_bob_to_alice = 1e-3;
    double att_alice = 0.0;  // 0 means "derive from alpha2 = A * A' * n0"
    double n0 = 1e9;

    /// Effective detection efficiency seen by a photon leaving Alice.
    double eta_tot() const { return a0t * eta; }

    /// Field amplitude of the honest signal states (+/- this value).
    double nominal_amplitude() const;

    /// Mean residual photon number at the dark port caused by imperfect
    /// interference, (1 - V) * alpha2 / 2.  This apparatus leak is present
    /// in every verification gate regardless of what Alice sent.
    double visibility_residual() const;

    /// Alice's attenuator setting; the stored value, or the one implied by
    /// alpha2 = att_bob_to_alice * att_alice * n0 when left at zero.
    double site_attenuation() const;

    /// Throws std::invalid_argument naming the offending field if any
    /// fraction leaves [0,1], alpha2 < 0, n0 <= 0, or eta_tot() == 0.
    void validate() const;
};

/// Alice's signal expanded over displaced Fock states relative to the honest
/// coherent state: coefficient c_n multiplies the n-photon displaced state.
/// Normalization sum |c_n|^2 = 1 is enforced at construction (tolerance 1e-9).
class FockExpansion {
  public:
    static constexpr double kNormTolerance = 1e-9;

    explicit FockExpansion(std::vector<std::complex<double>> coeffs);

    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

    /// Fidelity toward the honest state, |c_0|^2.
    double fidelity() const;

  private:
    std::vector<std::complex<double>> coeffs_;
};

/// Gaussian state of one mode: quadrature means (q, p) and symmetric
/// covariance matrix [[qq, qp], [qp, pp]].  Vacuum covariance is I/2.
struct GaussianState {
    std::array<double, 2> mean{0.0, 0.0};
    double cov_qq = 0.5;
    double cov_qp = 0.0;
    double cov_pp = 0.5;

    static GaussianState vacuum() { return {}; }
    static GaussianState coherent(double q, double p) { return {{q, p}, 0.5, 0.0, 0.5}; }

    /// Squeezed vacuum with variances e^{-2r}/2 and e^{+2r}/2 along axes
    /// rotated by phi.
    static GaussianState squeezed(double r, double phi = 0.0);

    double det_cov() const { return cov_qq * cov_pp - cov_qp * cov_qp; }

    /// Smaller eigenvalue of the covariance matrix.
    double min_cov_eigenvalue() const;

    /// Throws std::invalid_argument if the covariance is not positive
    /// definite or violates the uncertainty bound det >= 1/4 (small
    /// tolerance for round-off).
    void validate() const;
};

/// Angle theta between the two honest signal states: cos(theta) =
/// |<alpha|-alpha>| = exp(-2 * alpha2).  Throws std::domain_error for
/// negative alpha2.
double overlap_angle(double alpha2);

/// Success probability (1 + sin(theta)) / 2 of the optimal discrimination
/// measurement between two pure states separated by angle theta in [0, pi/2].
/// Throws std::domain_error outside that range.
double helstrom_success(double theta);

/// Click probability of one verification gate given the mean residual photon
/// number m reaching the dark port: 1 - (1 - dark) * exp(-eta_tot * m).
/// Dark counts and photon clicks are combined as independent events.
double click_prob_for_residual(double residual_photons, const ChannelModel& ch);

/// Click probability of an honest round: only the visibility leak
/// (1 - V) * alpha2 / 2 reaches the dark port.
double honest_click_prob(const ChannelModel& ch);

/// Click probability when the state `sent` is verified against the honest
/// hypothesis (-1)^revealed_bit * alpha: the displacement leaves
/// |sent - target|^2 mean photons, plus the visibility leak.
double round_click_prob(const CoherentState& sent, int revealed_bit,
                        const ChannelModel& ch);

/// Probability that the verification detector stays silent for a signal with
/// the given displaced-Fock expansion: sum_n |c_n|^2 (1 - eta_tot)^n.
/// Dark counts are not included (detector physics only).
double no_click_prob_fock(const FockExpansion& expansion, const ChannelModel& ch);

/// Lower bound on the fidelity of Alice's states implied by an observed
/// click rate: max(0, 1 - (click_rate - dark) / eta_tot), clamped to [0,1].
double fidelity_floor_from_clicks(double click_rate, const ChannelModel& ch);

/// Loss channel with transmission a in (0,1] followed by n_chaotic mean
/// thermal photons: mean -> sqrt(a) * mean,
/// cov -> a * cov + ((1 - a)/2) * I + n_chaotic * I.
/// Throws std::domain_error for a outside (0,1] or n_chaotic < 0.
GaussianState attenuate_gaussian(const GaussianState& g, double a, double n_chaotic);

/// True iff the state is a mixture of coherent states, i.e. cov - I/2 is
/// positive semidefinite (eigenvalue tolerance 1e-12).  A coherent state
/// (delta-function mixture) counts as positive.
bool p_function_positive(const GaussianState& g);

}  // namespace qbsg::optics
