#pragma once

// Dealer and participant logic for both protocol variants, with a full
// transcript of every gate, transmission, broadcast and measurement.
//
// The proposed variant shares the secret S and its digest H(S) through two
// polynomials, reconstructs by GHZ fan-out + per-participant phase + IQFT +
// measurement on every wire, and verifies by recomputing the digest of the
// reconstructed value. The song variant applies IQFT and measurement on the
// reconstructor's wire only, which is exactly the reconstruction flaw this
// engine exists to demonstrate.
//
// Participant indices are 1-based; actor 0 in the transcript is the dealer.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtss/errors.hpp"
#include "qtss/field.hpp"
#include "qtss/qsim.hpp"
#include "qtss/rng.hpp"
#include "qtss/sha1.hpp"

namespace qtss {

enum class Phase { distribution, secret_round, hash_round };

enum class EventKind {
    prepare,         // register creation: value = d, aux = wire count
    qft,             // wire
    iqft,            // wire
    cnot,            // wire = control, aux = target wire
    pauli,           // wire, value = applied phase s
    transmit,        // wire, aux = destination participant
    broadcast,       // value = announced outcome
    measure,         // wire, value = outcome, probability
    deliver_share,   // aux = x, value = y, note = "secret" or "hash[j]"
    deliver_digest,  // note = full digest hex (song distribution only)
};

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::distribution: return "distribution";
        case Phase::secret_round: return "secret-round";
        case Phase::hash_round: return "hash-round";
    }
    return "?";
}

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::prepare: return "prepare";
        case EventKind::qft: return "qft";
        case EventKind::iqft: return "iqft";
        case EventKind::cnot: return "cnot";
        case EventKind::pauli: return "pauli";
        case EventKind::transmit: return "transmit";
        case EventKind::broadcast: return "broadcast";
        case EventKind::measure: return "measure";
        case EventKind::deliver_share: return "deliver-share";
        case EventKind::deliver_digest: return "deliver-digest";
    }
    return "?";
}

struct TranscriptEvent {
    std::uint64_t seq = 0;
    Phase phase = Phase::distribution;
    EventKind kind = EventKind::prepare;
    std::uint32_t actor = 0;
    std::int32_t wire = -1;
    std::int64_t aux = -1;
    std::int64_t value = -1;
    double probability = -1.0;
    std::string note;
};

struct Transcript {
    std::vector<TranscriptEvent> events;

    TranscriptEvent& append(Phase phase, EventKind kind, std::uint32_t actor) {
        TranscriptEvent ev;
        ev.seq = events.size();
        ev.phase = phase;
        ev.kind = kind;
        ev.actor = actor;
        events.push_back(std::move(ev));
        return events.back();
    }
};

inline std::vector<TranscriptEvent> phase_slice(const Transcript& transcript, Phase phase) {
    std::vector<TranscriptEvent> out;
    for (const auto& ev : transcript.events)
        if (ev.phase == phase) out.push_back(ev);
    return out;
}

// One line per event: seq, phase, kind, actor, wire, value. The value column
// is composed per kind; ordering is stable for golden-file comparison.
inline std::string serialize_transcript(const Transcript& transcript) {
    std::string out;
    char buf[96];
    for (const auto& ev : transcript.events) {
        std::snprintf(buf, sizeof buf, "%llu\t%s\t%s\t%u\t%d\t",
                      static_cast<unsigned long long>(ev.seq), to_string(ev.phase),
                      to_string(ev.kind), ev.actor, ev.wire);
        out += buf;
        switch (ev.kind) {
            case EventKind::prepare:
                std::snprintf(buf, sizeof buf, "d=%lld wires=%lld",
                              static_cast<long long>(ev.value), static_cast<long long>(ev.aux));
                out += buf;
                break;
            case EventKind::qft:
            case EventKind::iqft:
                out += "-";
                break;
            case EventKind::cnot:
                std::snprintf(buf, sizeof buf, "target=%lld", static_cast<long long>(ev.aux));
                out += buf;
                break;
            case EventKind::pauli:
                std::snprintf(buf, sizeof buf, "s=%lld", static_cast<long long>(ev.value));
                out += buf;
                break;
            case EventKind::transmit:
                std::snprintf(buf, sizeof buf, "to=%lld", static_cast<long long>(ev.aux));
                out += buf;
                break;
            case EventKind::broadcast:
                std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(ev.value));
                out += buf;
                break;
            case EventKind::measure:
                std::snprintf(buf, sizeof buf, "outcome=%lld p=%.17g",
                              static_cast<long long>(ev.value), ev.probability);
                out += buf;
                break;
            case EventKind::deliver_share:
                out += ev.note;
                std::snprintf(buf, sizeof buf, " x=%lld y=%lld", static_cast<long long>(ev.aux),
                              static_cast<long long>(ev.value));
                out += buf;
                break;
            case EventKind::deliver_digest:
                out += "sha1=" + ev.note;
                break;
        }
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dealer-side types
// ---------------------------------------------------------------------------

struct DealerConfig {
    ProtocolParams params;
    std::uint32_t secret = 0;       // S, must be < d
    std::uint32_t hash_digits = 1;  // L; 1 = single-element digest mode
    std::uint64_t seed = 0;
};

struct ParticipantState {
    std::uint32_t index = 0;  // v in [1, n]
    Share secret_share;
    std::vector<Share> hash_shares;  // one per digest digit round
    std::optional<std::uint32_t> wire;
    std::optional<FieldElement> shadow_value;  // s_v, after step 4
    std::vector<FieldElement> hash_shadows;    // g_r, one per hash round
};

// What everyone may know: parameters, coordinates and the digest mode.
struct PublicRecord {
    ProtocolParams params;
    std::uint32_t hash_digits = 1;
};

struct DistributionResult {
    std::vector<ParticipantState> participants;
    PublicRecord public_record;
};

// ---------------------------------------------------------------------------
// Digest mapping
// ---------------------------------------------------------------------------

// d^count with an overflow guard.
inline std::uint64_t pow_u64_checked(std::uint64_t base, std::uint32_t exp, const char* what) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (r > (std::uint64_t(1) << 62) / base)
            throw std::invalid_argument(std::string(what) + ": d^L overflows");
        r *= base;
    }
    return r;
}

// Big-endian digest integer N: the L lowest base-d digits of N, most
// significant first. L = 1 reduces to N mod d.
inline std::vector<FieldElement> digest_to_field(std::span<const std::uint8_t> digest,
                                                 std::uint32_t d, std::uint32_t digit_count = 1) {
    if (digest.size() != 20)
        throw std::invalid_argument("digest_to_field: digest must be 20 bytes");
    if (d < 2) throw std::invalid_argument("digest_to_field: modulus must be >= 2");
    if (digit_count < 1) throw std::invalid_argument("digest_to_field: need >= 1 digit");
    const std::uint64_t m = pow_u64_checked(d, digit_count, "digest_to_field");
    std::uint64_t r = 0;
    for (std::uint8_t byte : digest)
        r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) << 8 | byte) % m);
    std::vector<FieldElement> digits;
    digits.reserve(digit_count);
    for (std::uint32_t i = digit_count; i-- > 0;) {
        std::uint64_t p = 1;
        for (std::uint32_t k = 0; k < i; ++k) p *= d;
        digits.emplace_back(r / p % d, d);
    }
    return digits;
}

// The secret's byte encoding for hashing: its ASCII decimal string.
inline Sha1Digest secret_digest(std::uint32_t secret_value) {
    return sha1(std::to_string(secret_value));
}

namespace detail {

inline void deliver_share_event(Transcript& transcript, std::uint32_t recipient,
                                const Share& share, const std::string& label) {
    auto& ev = transcript.append(Phase::distribution, EventKind::deliver_share, recipient);
    ev.aux = share.x.value();
    ev.value = share.y.value();
    ev.note = label;
}

inline std::vector<ParticipantState> share_out(const DealerConfig& config, bool with_hash,
                                               Transcript& transcript) {
    const auto& params = config.params;
    if (config.secret >= params.d)
        throw std::invalid_argument("DealerConfig: secret must be < d");
    if (config.hash_digits < 1)
        throw std::invalid_argument("DealerConfig: hash_digits must be >= 1");

    std::vector<ParticipantState> participants(params.n);
    for (std::uint32_t v = 1; v <= params.n; ++v) participants[v - 1].index = v;

    auto poly_rng = substream(config.seed, "secret-poly");
    const Polynomial p = sample_polynomial(params.element(config.secret), params, poly_rng);
    for (std::uint32_t v = 1; v <= params.n; ++v) {
        const FieldElement x = params.coordinate_of(v);
        participants[v - 1].secret_share = Share(x, p.evaluate(x), ShareLabel::secret);
        deliver_share_event(transcript, v, participants[v - 1].secret_share, "secret");
    }

    if (with_hash) {
        const auto digits =
            digest_to_field(secret_digest(config.secret), params.d, config.hash_digits);
        for (std::uint32_t j = 0; j < config.hash_digits; ++j) {
            auto hash_rng = substream(config.seed, "hash-poly", j);
            const Polynomial h = sample_polynomial(digits[j], params, hash_rng);
            const std::string label = "hash[" + std::to_string(j) + "]";
            for (std::uint32_t v = 1; v <= params.n; ++v) {
                const FieldElement x = params.coordinate_of(v);
                participants[v - 1].hash_shares.emplace_back(x, h.evaluate(x), ShareLabel::hash);
                deliver_share_event(transcript, v, participants[v - 1].hash_shares.back(), label);
            }
        }
    }
    return participants;
}

}  // namespace detail

// Proposed-variant distribution: n participants each receive (x_v, p(x_v))
// and, per digest digit, (x_v, h_j(x_v)). The dealer keeps nothing.
inline DistributionResult distribute(const DealerConfig& config, Transcript& transcript) {
    auto participants = detail::share_out(config, /*with_hash=*/true, transcript);
    return DistributionResult{std::move(participants),
                              PublicRecord{config.params, config.hash_digits}};
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

// A corrupt participant applies U_{0, s_v + delta} instead of U_{0, s_v}
// during the secret round.
struct TamperSpec {
    std::uint32_t participant = 0;
    std::uint32_t delta = 0;

    TamperSpec(std::uint32_t participant_, std::uint32_t delta_)
        : participant(participant_), delta(delta_) {
        if (delta == 0) throw std::invalid_argument("TamperSpec: delta must be nonzero");
    }
};

enum class Verdict { honest, corrupt_detected };

struct RunOutcome {
    FieldElement recovered_secret;              // p(0)'
    std::vector<FieldElement> recovered_hash;   // h_j(0)' per digit round
    std::vector<FieldElement> expected_hash;    // digest digits of p(0)'
    Verdict verdict = Verdict::honest;
    std::vector<MeasurementRecord> measurements;
};

struct RunResult {
    RunOutcome outcome;
    Transcript transcript;
};

namespace detail {

struct ActiveSet {
    std::vector<std::uint32_t> participants;  // ascending, reconstructor first wire
    std::uint32_t reconstructor = 0;
    std::vector<std::uint32_t> wire_owner;    // wire k -> participant index
    std::vector<FieldElement> coordinates;    // x of every active participant
};

inline ActiveSet resolve_active(const ProtocolParams& params,
                                std::span<const std::uint32_t> active,
                                std::optional<std::uint32_t> reconstructor_opt) {
    if (active.size() != params.t)
        throw std::invalid_argument("active set: need exactly t participants");
    ActiveSet set;
    set.participants.assign(active.begin(), active.end());
    std::sort(set.participants.begin(), set.participants.end());
    if (std::adjacent_find(set.participants.begin(), set.participants.end()) !=
        set.participants.end())
        throw std::invalid_argument("active set: duplicate participant");
    for (auto v : set.participants)
        if (v < 1 || v > params.n)
            throw std::invalid_argument("active set: participant index out of range");

    set.reconstructor = reconstructor_opt.value_or(set.participants.front());
    if (std::find(set.participants.begin(), set.participants.end(), set.reconstructor) ==
        set.participants.end())
        throw std::invalid_argument("reconstructor must belong to the active set");

    set.wire_owner.push_back(set.reconstructor);
    for (auto v : set.participants)
        if (v != set.reconstructor) set.wire_owner.push_back(v);
    for (auto v : set.participants) set.coordinates.push_back(params.coordinate_of(v));
    return set;
}

// Steps 1-7 for one shared value: GHZ fan-out from the reconstructor, one
// phase per participant, then per-wire IQFT + measurement + broadcast.
// Returns the broadcast sum; appends every event and measurement record.
inline FieldElement reconstruction_round(Phase phase, const ProtocolParams& params,
                                         const ActiveSet& set,
                                         std::span<const FieldElement> applied_phases,
                                         Transcript& transcript, SeededRng& rng,
                                         std::vector<MeasurementRecord>& records,
                                         bool measure_all, bool broadcast_results) {
    const std::uint32_t t = params.t;
    const std::uint32_t recon = set.reconstructor;

    auto& prep = transcript.append(phase, EventKind::prepare, recon);
    prep.value = params.d;
    prep.aux = t;
    QuditRegister reg = QuditRegister::zero_state(params.d, t);

    transcript.append(phase, EventKind::qft, recon).wire = 0;
    reg.apply_qft(0);

    for (std::uint32_t k = 1; k < t; ++k) {
        auto& ev = transcript.append(phase, EventKind::cnot, recon);
        ev.wire = 0;
        ev.aux = k;
        reg.apply_cnot(0, k);
    }
    for (std::uint32_t k = 1; k < t; ++k) {
        auto& ev = transcript.append(phase, EventKind::transmit, recon);
        ev.wire = static_cast<std::int32_t>(k);
        ev.aux = set.wire_owner[k];
    }

    for (std::uint32_t k = 0; k < t; ++k) {
        auto& ev = transcript.append(phase, EventKind::pauli, set.wire_owner[k]);
        ev.wire = static_cast<std::int32_t>(k);
        ev.value = applied_phases[k].value();
        reg.apply_phase_pauli(k, applied_phases[k].value());
    }

    FieldElement sum(0, params.d);
    const std::uint32_t measured_wires = measure_all ? t : 1;
    for (std::uint32_t k = 0; k < measured_wires; ++k) {
        transcript.append(phase, EventKind::iqft, set.wire_owner[k]).wire =
            static_cast<std::int32_t>(k);
        reg.apply_iqft(k);

        const MeasurementRecord rec = reg.measure_wire(k, rng);
        auto& mev = transcript.append(phase, EventKind::measure, set.wire_owner[k]);
        mev.wire = static_cast<std::int32_t>(k);
        mev.value = rec.outcome;
        mev.probability = rec.probability;
        records.push_back(rec);

        if (broadcast_results)
            transcript.append(phase, EventKind::broadcast, set.wire_owner[k]).value = rec.outcome;
        sum = sum + FieldElement(rec.outcome, params.d);
    }
    return sum;
}

}  // namespace detail

// Full proposed protocol: distribution, secret round, one hash round per
// digest digit, then the digest comparison. With honest participants the
// reconstructed value always equals S.
inline RunResult run_proposed(const DealerConfig& config, std::span<const std::uint32_t> active,
                              const std::optional<TamperSpec>& tamper = std::nullopt,
                              std::optional<std::uint32_t> reconstructor = std::nullopt) {
    const auto& params = config.params;
    RunResult result;
    Transcript& transcript = result.transcript;

    auto participants = detail::share_out(config, /*with_hash=*/true, transcript);
    const auto set = detail::resolve_active(params, active, reconstructor);
    if (tamper) {
        if (std::find(set.participants.begin(), set.participants.end(), tamper->participant) ==
            set.participants.end())
            throw std::invalid_argument("TamperSpec: participant not in active set");
        if (tamper->delta % params.d == 0)
            throw std::invalid_argument("TamperSpec: delta is 0 mod d, not a tamper");
    }

    auto rng = substream(config.seed, "measure");
    RunOutcome& outcome = result.outcome;

    // step 4: shadows; step 5 phases, shifted for the cheater
    std::vector<FieldElement> phases;
    for (std::uint32_t k = 0; k < params.t; ++k) {
        auto& ps = participants[set.wire_owner[k] - 1];
        ps.wire = k;
        ps.shadow_value = shadow(ps.secret_share, set.coordinates, ps.index).value;
        FieldElement applied = *ps.shadow_value;
        if (tamper && tamper->participant == ps.index)
            applied = applied + FieldElement(tamper->delta, params.d);
        phases.push_back(applied);
    }
    outcome.recovered_secret =
        detail::reconstruction_round(Phase::secret_round, params, set, phases, transcript, rng,
                                     outcome.measurements, /*measure_all=*/true,
                                     /*broadcast_results=*/true);

    // step 8: fresh rounds for the digest digits, honest phases
    for (std::uint32_t j = 0; j < config.hash_digits; ++j) {
        std::vector<FieldElement> hash_phases;
        for (std::uint32_t k = 0; k < params.t; ++k) {
            auto& ps = participants[set.wire_owner[k] - 1];
            const FieldElement g = shadow(ps.hash_shares[j], set.coordinates, ps.index).value;
            ps.hash_shadows.push_back(g);
            hash_phases.push_back(g);
        }
        outcome.recovered_hash.push_back(
            detail::reconstruction_round(Phase::hash_round, params, set, hash_phases, transcript,
                                         rng, outcome.measurements, true, true));
    }

    outcome.expected_hash =
        digest_to_field(secret_digest(outcome.recovered_secret.value()), params.d,
                        config.hash_digits);
    outcome.verdict = (outcome.expected_hash == outcome.recovered_hash)
                          ? Verdict::honest
                          : Verdict::corrupt_detected;
    return result;
}

// Song variant: identical through step 5, but only the reconstructor applies
// IQFT and measures, and the dealer hands the digest itself to the
// reconstructor during distribution. For t >= 2 the reported value is
// uniform noise; the digest check then flags honest runs as corrupt.
inline RunResult run_song(const DealerConfig& config, std::span<const std::uint32_t> active,
                          std::optional<std::uint32_t> reconstructor = std::nullopt) {
    const auto& params = config.params;
    RunResult result;
    Transcript& transcript = result.transcript;

    auto participants = detail::share_out(config, /*with_hash=*/false, transcript);
    const auto set = detail::resolve_active(params, active, reconstructor);

    const Sha1Digest digest = secret_digest(config.secret);
    auto& dev = transcript.append(Phase::distribution, EventKind::deliver_digest,
                                  set.reconstructor);
    dev.note = to_hex(digest);

    auto rng = substream(config.seed, "measure");
    RunOutcome& outcome = result.outcome;

    std::vector<FieldElement> phases;
    for (std::uint32_t k = 0; k < params.t; ++k) {
        auto& ps = participants[set.wire_owner[k] - 1];
        ps.wire = k;
        ps.shadow_value = shadow(ps.secret_share, set.coordinates, ps.index).value;
        phases.push_back(*ps.shadow_value);
    }
    outcome.recovered_secret =
        detail::reconstruction_round(Phase::secret_round, params, set, phases, transcript, rng,
                                     outcome.measurements, /*measure_all=*/false,
                                     /*broadcast_results=*/false);

    outcome.recovered_hash = digest_to_field(digest, params.d, config.hash_digits);
    outcome.expected_hash =
        digest_to_field(secret_digest(outcome.recovered_secret.value()), params.d,
                        config.hash_digits);
    outcome.verdict = (outcome.expected_hash == outcome.recovered_hash)
                          ? Verdict::honest
                          : Verdict::corrupt_detected;
    return result;
}

// ---------------------------------------------------------------------------
// Resource accounting
// ---------------------------------------------------------------------------

struct ResourceCount {
    std::uint64_t qft = 0;
    std::uint64_t iqft = 0;
    std::uint64_t unitary = 0;  // phase Pauli applications
    std::uint64_t cnot = 0;
    std::uint64_t sum_op = 0;   // always 0: no SUM-variant rounds here
    std::uint64_t measure = 0;
    std::uint64_t message_particles = 0;
    std::uint64_t decoy_particles = 0;  // always 0: no decoy checks

    bool operator==(const ResourceCount&) const = default;
};

// Exact counts by replaying the event stream. Gate events must follow a
// prepare and address wires inside the prepared register.
inline ResourceCount tally_resources(std::span<const TranscriptEvent> events) {
    ResourceCount count;
    std::int64_t wires = -1;
    auto check_wire = [&](const TranscriptEvent& ev) {
        if (wires < 0) throw invariant_error("tally_resources: gate before prepare");
        if (ev.wire < 0 || ev.wire >= wires)
            throw invariant_error("tally_resources: wire outside prepared register");
    };
    for (const auto& ev : events) {
        switch (ev.kind) {
            case EventKind::prepare:
                if (ev.aux < 1 || ev.value < 2)
                    throw invariant_error("tally_resources: malformed prepare");
                wires = ev.aux;
                break;
            case EventKind::qft: check_wire(ev); ++count.qft; break;
            case EventKind::iqft: check_wire(ev); ++count.iqft; break;
            case EventKind::cnot:
                check_wire(ev);
                if (ev.aux < 0 || ev.aux >= wires)
                    throw invariant_error("tally_resources: cnot target outside register");
                ++count.cnot;
                break;
            case EventKind::pauli: check_wire(ev); ++count.unitary; break;
            case EventKind::transmit: check_wire(ev); ++count.message_particles; break;
            case EventKind::measure: check_wire(ev); ++count.measure; break;
            case EventKind::broadcast:
            case EventKind::deliver_share:
            case EventKind::deliver_digest:
                break;
        }
    }
    return count;
}

inline ResourceCount tally_resources(const Transcript& transcript, Phase phase) {
    const auto slice = phase_slice(transcript, phase);
    return tally_resources(slice);
}

// Replays the gate events against a fresh simulator and checks every
// recorded measurement probability. Throws invariant_error on divergence.
inline void verify_transcript_replay(const Transcript& transcript) {
    std::optional<QuditRegister> reg;
    for (const auto& ev : transcript.events) {
        switch (ev.kind) {
            case EventKind::prepare:
                reg = QuditRegister::zero_state(static_cast<std::uint32_t>(ev.value),
                                                static_cast<std::uint32_t>(ev.aux));
                break;
            case EventKind::qft:
                if (!reg) throw invariant_error("replay: gate before prepare");
                reg->apply_qft(static_cast<std::uint32_t>(ev.wire));
                break;
            case EventKind::iqft:
                if (!reg) throw invariant_error("replay: gate before prepare");
                reg->apply_iqft(static_cast<std::uint32_t>(ev.wire));
                break;
            case EventKind::cnot:
                if (!reg) throw invariant_error("replay: gate before prepare");
                reg->apply_cnot(static_cast<std::uint32_t>(ev.wire),
                                static_cast<std::uint32_t>(ev.aux));
                break;
            case EventKind::pauli:
                if (!reg) throw invariant_error("replay: gate before prepare");
                reg->apply_phase_pauli(static_cast<std::uint32_t>(ev.wire),
                                       static_cast<std::uint32_t>(ev.value));
                break;
            case EventKind::measure: {
                if (!reg) throw invariant_error("replay: measurement before prepare");
                const auto wire = static_cast<std::uint32_t>(ev.wire);
                const auto marginal = reg->wire_marginal(wire);
                double total = 0.0;
                for (double p : marginal) total += p;
                const double prob = marginal[static_cast<std::uint32_t>(ev.value)] / total;
                if (std::abs(prob - ev.probability) > kAmplitudeTolerance)
                    throw invariant_error("replay: measurement probability mismatch");
                reg->collapse_wire(wire, static_cast<std::uint32_t>(ev.value));
                break;
            }
            case EventKind::transmit:
            case EventKind::broadcast:
            case EventKind::deliver_share:
            case EventKind::deliver_digest:
                break;
        }
    }
}

}  // namespace qtss
