#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbsg/optics.hpp"
#include "qbsg/rng.hpp"

namespace qbsg::protocol {

using Bit = std::uint8_t;

/// Full description of one protocol execution: n rounds, abort threshold
/// kappa (strict: Bob aborts only when the click rate exceeds it), channel
/// parameters and the master RNG seed.
struct ProtocolConfig {
    std::uint64_t n = 10'000'000;
    double kappa = 2e-3;
    optics::ChannelModel channel;
    std::uint64_t seed = 1;

    /// Hard errors (kappa outside (0,1), n = 0, bad channel) throw
    /// std::invalid_argument.  Returns soft warnings, e.g. when kappa does
    /// not exceed the honest click expectation so honest runs would abort.
    std::vector<std::string> validate() const;
};

enum class MessageKind : std::uint8_t { StatePrepared, BobBit, AliceReveal, VerifyResult };

/// One entry of the message transcript.  `bit` carries the payload of
/// BobBit / AliceReveal / VerifyResult; `state` the payload of StatePrepared.
struct RoundMessage {
    MessageKind kind;
    std::uint64_t round_index;
    Bit bit = 0;
    optics::CoherentState state{};
};

/// Outcome of a single round: Alice's bit, Bob's bit, the verification click
/// and the output bit x = a XOR b.
struct RoundRecord {
    Bit a = 0;
    Bit b = 0;
    Bit k = 0;
    Bit x = 0;
};

/// Result of a full execution: the n output bits, or an abort with reason.
/// click_rate is the observed (1/n) sum of k_i either way.
struct Outcome {
    std::optional<std::vector<Bit>> bits;
    std::string abort_reason;
    double click_rate = 0.0;

    bool aborted() const { return !bits.has_value(); }
};

/// Thrown when a strategy's entry points are driven out of the fixed
/// prepare -> respond -> reveal -> verify order.  This is a test hook for
/// the engine's ordering guarantee, not something an adversary can trigger.
class protocol_fault : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Alice's side of one round as a two-phase state machine: prepare() emits
/// the signal state, reveal() discloses her bit once Bob's bit is committed.
/// The non-virtual wrappers enforce the phase order and round pairing.
class AliceStrategy {
  public:
    virtual ~AliceStrategy() = default;

    optics::CoherentState prepare(std::uint64_t round, RngStream& rng);
    Bit reveal(std::uint64_t round, Bit bob_bit, RngStream& rng);

  protected:
    virtual optics::CoherentState do_prepare(std::uint64_t round, RngStream& rng) = 0;
    virtual Bit do_reveal(std::uint64_t round, Bit bob_bit, RngStream& rng) = 0;

  private:
    bool prepared_ = false;
    std::uint64_t pending_round_ = 0;
};

/// Bob's side of one round: respond() commits his bit after receiving the
/// state, verify() produces the click bit k once Alice has revealed.
class BobStrategy {
  public:
    virtual ~BobStrategy() = default;

    Bit respond(std::uint64_t round, const optics::CoherentState& state, RngStream& rng);
    Bit verify(std::uint64_t round, Bit revealed, const optics::CoherentState& state,
               RngStream& rng);

  protected:
    virtual Bit do_respond(std::uint64_t round, const optics::CoherentState& state,
                           RngStream& rng) = 0;
    virtual Bit do_verify(std::uint64_t round, Bit revealed,
                          const optics::CoherentState& state, RngStream& rng) = 0;

  private:
    bool responded_ = false;
    std::uint64_t pending_round_ = 0;
};

/// Honest Alice: fresh fair coin each round, sends (-1)^a * alpha, reveals
/// the same bit she encoded.
class HonestAlice : public AliceStrategy {
  public:
    explicit HonestAlice(const optics::ChannelModel& ch) : amplitude_(ch.nominal_amplitude()) {}

  protected:
    optics::CoherentState do_prepare(std::uint64_t round, RngStream& rng) override;
    Bit do_reveal(std::uint64_t round, Bit bob_bit, RngStream& rng) override;

  private:
    double amplitude_;
    Bit bit_ = 0;
};

/// Honest Bob: fresh fair coin for b, then verifies by displacing the
/// received state toward vacuum and sampling the detector click.
class HonestBob : public BobStrategy {
  public:
    explicit HonestBob(const optics::ChannelModel& ch);

  protected:
    Bit do_respond(std::uint64_t round, const optics::CoherentState& state,
                   RngStream& rng) override;
    Bit do_verify(std::uint64_t round, Bit revealed, const optics::CoherentState& state,
                  RngStream& rng) override;

  private:
    optics::ChannelModel channel_;
    double amplitude_;  // cached nominal amplitude
    double honest_p_;   // click probability of a perfectly matched round
    double memo_mismatch_ = -1.0;  // last nonzero mismatch seen
    double memo_p_ = 0.0;          // its click probability
};

/// Executes one round in the fixed message order StatePrepared -> BobBit ->
/// AliceReveal -> VerifyResult.  Party randomness comes from per-round
/// streams derived from (seed, lane, round), so any round can be replayed
/// alone.  When `transcript` is non-null the four messages are appended.
RoundRecord run_round(AliceStrategy& alice, BobStrategy& bob,
                      const optics::ChannelModel& ch, std::uint64_t round,
                      std::uint64_t seed, std::vector<RoundMessage>* transcript = nullptr);

/// Aggregate counters of a streaming execution (no per-round storage).
struct RunSummary {
    std::uint64_t n = 0;
    std::uint64_t clicks = 0;
    double click_rate = 0.0;
    bool aborted = false;
};

/// Runs all n rounds, invoking visit(round_index, record) for each; abort is
/// decided after the last round by the strict rule click_rate > kappa.
template <typename Visitor>
RunSummary run_protocol_visit(const ProtocolConfig& cfg, AliceStrategy& alice,
                              BobStrategy& bob, Visitor&& visit) {
    cfg.validate();
    RunSummary summary;
    summary.n = cfg.n;
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        const RoundRecord rec = run_round(alice, bob, cfg.channel, i, cfg.seed);
        summary.clicks += rec.k;
        visit(i, rec);
    }
    summary.click_rate = static_cast<double>(summary.clicks) / static_cast<double>(cfg.n);
    summary.aborted = summary.click_rate > cfg.kappa;
    return summary;
}

/// Runs the full protocol and materializes every round record.  The Outcome
/// carries the output string x_1..x_n, or the abort marker when the click
/// rate exceeded kappa.
std::pair<Outcome, std::vector<RoundRecord>> run_protocol(const ProtocolConfig& cfg,
                                                          AliceStrategy& alice,
                                                          BobStrategy& bob);

/// True iff the messages form whole rounds in the canonical order
/// StatePrepared -> BobBit -> AliceReveal -> VerifyResult, with matching
/// round indices inside each block.
bool transcript_ordered(const std::vector<RoundMessage>& messages);

/// Plain-text export, one `round,a,b,k,x` line per record under a header.
void write_transcript(const std::string& path, const std::vector<RoundRecord>& records);

/// Reads the format written by write_transcript (header optional).
std::vector<RoundRecord> read_transcript(const std::string& path);

}  // namespace qbsg::protocol
