#pragma once

#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "qbsg/optics.hpp"
#include "qbsg/protocol.hpp"
#include "qbsg/rng.hpp"

namespace qbsg::adversary {

enum class Party { Alice, Bob };

enum class StrategyKind { Honest, EarlyMeasureBob, StraddleAlice };

/// Declarative strategy selection for one party.  `target` is the bit
/// pattern the dishonest party tries to force (cycled over rounds; empty
/// means all zeros); `phi` parametrizes the straddle state's phase angle.
struct Strategy {
    Party party = Party::Alice;
    StrategyKind kind = StrategyKind::Honest;
    std::vector<protocol::Bit> target;
    double phi = std::numbers::pi / 2;

    bool honest() const { return kind == StrategyKind::Honest; }

    /// Target bit for a given round (pattern cycled, default 0).
    protocol::Bit target_bit(std::uint64_t round) const {
        if (target.empty()) return 0;
        return target[round % target.size()];
    }
};

/// Empirical bias achieved by a strategy pair: mean of P(x_i = c_i) - 1/2
/// over all rounds of non-aborted executions, with its Monte-Carlo standard
/// error.  Aborted executions produce no bits and are tallied separately.
struct BiasEstimate {
    double mean_bias = 0.0;
    double std_error = 0.0;
    std::uint64_t n_rounds = 0;
    double abort_freq = 0.0;
    std::uint64_t trials = 0;
};

/// Outcome of Bob's optimal immediate discrimination of the round's state:
/// with probability helstrom_success(theta) the guess equals `true_bit`.
/// The returned b = guess XOR target_bit makes x = target_bit exactly when
/// the guess was right.  The physical measurement is simulated at the
/// success-probability level; `true_bit` is the simulation's ground truth.
protocol::Bit early_measure_bob(double theta, protocol::Bit true_bit,
                                protocol::Bit target_bit, RngStream& rng);

/// Alice's straddle cheat for one round, resolved analytically: she sent
/// alpha * e^{i phi} (equal fidelity e^{-2 alpha2} to both honest states at
/// phi = pi/2), waits for b, and reveals a = b XOR target_bit so that
/// x = target_bit.  click_prob is the verification click probability of the
/// round given that reveal.
struct StraddleOutcome {
    protocol::Bit reveal = 0;
    double click_prob = 0.0;
};
StraddleOutcome straddle_alice(const optics::ChannelModel& ch, protocol::Bit bob_bit,
                               protocol::Bit target_bit, double phi = std::numbers::pi / 2);

/// Instantiates the protocol state machine for Alice described by `s`.
/// Throws std::invalid_argument if the kind does not apply to Alice.
std::unique_ptr<protocol::AliceStrategy> make_alice(const Strategy& s,
                                                    const optics::ChannelModel& ch);

/// Instantiates the protocol state machine for Bob described by `s`.
/// Throws std::invalid_argument if the kind does not apply to Bob.
std::unique_ptr<protocol::BobStrategy> make_bob(const Strategy& s,
                                                const optics::ChannelModel& ch);

/// Runs `trials` independent executions of cfg (trial t uses master seed
/// derived from cfg.seed and t) and estimates the bias toward the target
/// pattern.  At most one party may be dishonest; both dishonest is outside
/// the security model and throws std::invalid_argument.
BiasEstimate measure_bias(const protocol::ProtocolConfig& cfg, const Strategy& alice,
                          const Strategy& bob, std::uint64_t trials);

}  // namespace qbsg::adversary
