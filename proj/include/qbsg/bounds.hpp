#pragma once

#include <cstdint>
#include <string>

#include "qbsg/optics.hpp"
#include "qbsg/protocol.hpp"

namespace qbsg::bounds {

/// All provable security quantities at one operating point, with the inputs
/// echoed so downstream consumers (error propagation, CSV emission) need no
/// side channel.  eps_a / eps_b are clamped to [0, 1/2]; advantage is the
/// strict comparison eps_sum < classical_floor.
struct SecurityReport {
    // inputs
    double alpha2 = 0.0;
    double kappa = 0.0;
    std::uint64_t n = 0;
    optics::ChannelModel channel;
    // bounds
    double eps_a = 0.0;
    double eps_b = 0.0;
    double eps_sum = 0.0;
    double delta_n = 0.0;
    double classical_floor = 0.0;
    bool advantage = false;
};

/// Bound sin(theta)/2 on dishonest Bob's average bias, theta from
/// overlap_angle(alpha2).
double epsilon_b_bound(double alpha2);

/// Bias bound F(x) = sqrt(x) / (sqrt(2) sin^2 theta) + x / sin^2 theta for a
/// dishonest Alice whose states fail verification with excess rate x,
/// clamped to <= 1/2 for reporting.  alpha2 = 0 makes the bound vacuous
/// (sin theta = 0): F returns 1/2, i.e. no security.  Throws
/// std::domain_error for x < 0 or alpha2 < 0.
double cheat_function_F(double x, double alpha2);

/// Bound on dishonest Alice's average bias at abort threshold kappa:
/// F((kappa - dark) / (a0t * eta)).  Throws std::invalid_argument when
/// kappa < dark (abort threshold below dark-count floor).
double epsilon_a_bound(double kappa, const optics::ChannelModel& ch);

/// Hoeffding bound exp(-2 n (kappa - p_h)^2) on the probability that an
/// honest execution aborts, p_h = honest_click_prob.  When kappa <= p_h the
/// protocol is not correct at this threshold: returns 1 and, if `warning`
/// is non-null, stores a description.
double delta_n_bound(std::uint64_t n, double kappa, const optics::ChannelModel& ch,
                     std::string* warning = nullptr);
double delta_n_bound(const protocol::ProtocolConfig& cfg, std::string* warning = nullptr);

/// Best classical bound on eps_a + eps_b for abort probability delta_n:
/// 1/2 - 2 * delta_n, floored at 0.  Throws std::domain_error outside [0,1].
double classical_floor(double delta_n);

/// Default abort threshold: the geometric mean of the honest click
/// expectation p_h and the threshold at which the quantum advantage is lost
/// (where eps_b + F((kappa - dark)/(a0t eta)) reaches 1/2, ignoring the
/// finite-n correction).  Falls back to min(2 p_h, 1/2) when no such
/// crossing exists (alpha2 so large that eps_b alone is >= 1/2).
double default_kappa(const optics::ChannelModel& ch);

/// Assembles every bound for the given operating point.
SecurityReport build_report(const protocol::ProtocolConfig& cfg);

/// Flat `key=value` lines, one per field, 6 significant digits.
std::string to_key_values(const SecurityReport& r);

/// CSV serialization: fixed columns
/// alpha2,kappa,eps_a,eps_b,eps_sum,delta_n,classical_floor,advantage.
std::string csv_header();
std::string to_csv_row(const SecurityReport& r);

}  // namespace qbsg::bounds
