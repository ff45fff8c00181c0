#include "qbsg/adversary.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qbsg::adversary {

namespace {

constexpr std::uint64_t kLaneTrial = 0x7121A1ull;

/// Bob who measures each state the moment it arrives instead of storing it.
/// The discrimination is simulated at the success-probability level; the
/// symbolic state carries Alice's encoding as the sign of its amplitude,
/// which serves as the ground truth the optimal measurement is scored
/// against.  He never reports a click: aborting cannot help him.
class EarlyMeasureBob final : public protocol::BobStrategy {
  public:
    EarlyMeasureBob(const optics::ChannelModel& ch, Strategy spec)
        : theta_(optics::overlap_angle(ch.alpha2)), spec_(std::move(spec)) {}

  protected:
    protocol::Bit do_respond(std::uint64_t round, const optics::CoherentState& state,
                             RngStream& rng) override {
        const protocol::Bit true_bit = state.amplitude.real() < 0.0 ? 1 : 0;
        return early_measure_bob(theta_, true_bit, spec_.target_bit(round), rng);
    }

    protocol::Bit do_verify(std::uint64_t /*round*/, protocol::Bit /*revealed*/,
                            const optics::CoherentState& /*state*/,
                            RngStream& /*rng*/) override {
        return 0;
    }

  private:
    double theta_;
    Strategy spec_;
};

/// Alice who sends the phase-straddling state alpha * e^{i phi} and commits
/// to nothing until she has seen b.  The elevated click probability of her
/// rounds is what the verification test is meant to catch.
class StraddleAlice final : public protocol::AliceStrategy {
  public:
    StraddleAlice(const optics::ChannelModel& ch, Strategy spec)
        : state_{std::polar(ch.nominal_amplitude(), spec.phi)}, spec_(std::move(spec)) {}

  protected:
    optics::CoherentState do_prepare(std::uint64_t /*round*/, RngStream& /*rng*/) override {
        return state_;
    }

    protocol::Bit do_reveal(std::uint64_t round, protocol::Bit bob_bit,
                            RngStream& /*rng*/) override {
        return bob_bit ^ spec_.target_bit(round);
    }

  private:
    optics::CoherentState state_;
    Strategy spec_;
};

}  // namespace

protocol::Bit early_measure_bob(double theta, protocol::Bit true_bit,
                                protocol::Bit target_bit, RngStream& rng) {
    const bool correct = rng.bernoulli(optics::helstrom_success(theta));
    const protocol::Bit guess = correct ? true_bit : protocol::Bit(true_bit ^ 1u);
    return guess ^ target_bit;
}

StraddleOutcome straddle_alice(const optics::ChannelModel& ch, protocol::Bit bob_bit,
                               protocol::Bit target_bit, double phi) {
    StraddleOutcome out;
    out.reveal = bob_bit ^ target_bit;
    const optics::CoherentState sent{std::polar(ch.nominal_amplitude(), phi)};
    out.click_prob = optics::round_click_prob(sent, out.reveal, ch);
    return out;
}

std::unique_ptr<protocol::AliceStrategy> make_alice(const Strategy& s,
                                                    const optics::ChannelModel& ch) {
    if (s.party != Party::Alice) {
        throw std::invalid_argument("make_alice: strategy is declared for Bob");
    }
    switch (s.kind) {
        case StrategyKind::Honest:
            return std::make_unique<protocol::HonestAlice>(ch);
        case StrategyKind::StraddleAlice:
            return std::make_unique<StraddleAlice>(ch, s);
        case StrategyKind::EarlyMeasureBob:
            break;
    }
    throw std::invalid_argument("make_alice: EarlyMeasureBob is a Bob strategy");
}

std::unique_ptr<protocol::BobStrategy> make_bob(const Strategy& s,
                                                const optics::ChannelModel& ch) {
    if (s.party != Party::Bob) {
        throw std::invalid_argument("make_bob: strategy is declared for Alice");
    }
    switch (s.kind) {
        case StrategyKind::Honest:
            return std::make_unique<protocol::HonestBob>(ch);
        case StrategyKind::EarlyMeasureBob:
            return std::make_unique<EarlyMeasureBob>(ch, s);
        case StrategyKind::StraddleAlice:
            break;
    }
    throw std::invalid_argument("make_bob: StraddleAlice is an Alice strategy");
}

BiasEstimate measure_bias(const protocol::ProtocolConfig& cfg, const Strategy& alice,
                          const Strategy& bob, std::uint64_t trials) {
    if (!alice.honest() && !bob.honest()) {
        throw std::invalid_argument(
            "measure_bias: both parties dishonest is outside the security model");
    }
    if (trials == 0) throw std::invalid_argument("measure_bias: trials must be >= 1");
    cfg.validate();

    // Score against the dishonest party's pattern; with two honest parties
    // any explicitly configured pattern still defines the scored target.
    const Strategy* scored = &alice;
    if (!bob.honest() || (alice.target.empty() && !bob.target.empty())) scored = &bob;

    std::uint64_t matches = 0;
    std::uint64_t counted_rounds = 0;
    std::uint64_t aborts = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        protocol::ProtocolConfig trial_cfg = cfg;
        trial_cfg.seed = derive_stream(cfg.seed, kLaneTrial, t).next_u64();
        auto a = make_alice(alice, cfg.channel);
        auto b = make_bob(bob, cfg.channel);

        std::uint64_t trial_matches = 0;
        const protocol::RunSummary summary = protocol::run_protocol_visit(
            trial_cfg, *a, *b,
            [&](std::uint64_t round, const protocol::RoundRecord& rec) {
                trial_matches += rec.x == scored->target_bit(round);
            });
        if (summary.aborted) {
            ++aborts;
        } else {
            matches += trial_matches;
            counted_rounds += summary.n;
        }
    }

    BiasEstimate est;
    est.trials = trials;
    est.abort_freq = static_cast<double>(aborts) / static_cast<double>(trials);
    est.n_rounds = counted_rounds;
    if (counted_rounds > 0) {
        const double p = static_cast<double>(matches) / static_cast<double>(counted_rounds);
        est.mean_bias = p - 0.5;
        est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(counted_rounds));
    }
    return est;
}

}  // namespace qbsg::adversary
