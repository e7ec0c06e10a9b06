#include <catch2/catch.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "qtss/protocol.hpp"
#include "qtss/stats.hpp"

using namespace qtss;

namespace {

const std::uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13};

std::vector<Share> active_shares(const DealerConfig& cfg, std::span<const std::uint32_t> active) {
    Transcript scratch;
    const auto dist = distribute(cfg, scratch);
    std::vector<Share> shares;
    for (auto v : active) shares.push_back(dist.participants[v - 1].secret_share);
    return shares;
}

std::size_t count_kind(const Transcript& t, EventKind kind) {
    return std::count_if(t.events.begin(), t.events.end(),
                         [&](const TranscriptEvent& ev) { return ev.kind == kind; });
}

}  // namespace

TEST_CASE("digest_to_field mapping") {
    const Sha1Digest zero{};
    for (std::uint32_t d : kPrimes) CHECK(digest_to_field(zero, d)[0].value() == 0);

    // frozen from the reference oracle: sha1("2") = da4b9237...10b0
    const auto h2 = sha1("2");
    CHECK(digest_to_field(h2, 3)[0].value() == 0);
    CHECK(digest_to_field(h2, 7)[0].value() == 2);

    const auto d7l4 = digest_to_field(h2, 7, 4);
    const std::uint32_t expect_d7l4[] = {4, 0, 0, 2};
    REQUIRE(d7l4.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(d7l4[i].value() == expect_d7l4[i]);

    const auto d5l8 = digest_to_field(h2, 5, 8);
    const std::uint32_t expect_d5l8[] = {2, 4, 1, 4, 4, 3, 3, 1};
    REQUIRE(d5l8.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(d5l8[i].value() == expect_d5l8[i]);

    // single-element mode is the lowest digit
    CHECK(digest_to_field(h2, 7, 1)[0].value() == d7l4.back().value());

    std::vector<std::uint8_t> short_digest(19, 0);
    CHECK_THROWS_AS(digest_to_field(short_digest, 7), std::invalid_argument);
    CHECK_THROWS_AS(digest_to_field(h2, 13, 20), std::invalid_argument);  // 13^20 overflows
}

TEST_CASE("multi-digit digest comparison catches every single tamper at d=7 L=4") {
    // exhaustive sweep over all ordered pairs of distinct secrets
    for (std::uint32_t a = 0; a < 7; ++a)
        for (std::uint32_t b = 0; b < 7; ++b) {
            if (a == b) continue;
            CHECK(digest_to_field(secret_digest(a), 7, 4) !=
                  digest_to_field(secret_digest(b), 7, 4));
        }
}

TEST_CASE("distribute gives consistent shares to all participants") {
    const DealerConfig cfg{ProtocolParams(5, 2, 4), 2, 1, 31};
    Transcript transcript;
    const auto dist = distribute(cfg, transcript);
    REQUIRE(dist.participants.size() == 4);

    for (std::uint32_t v = 1; v <= 4; ++v) {
        const auto& ps = dist.participants[v - 1];
        CHECK(ps.index == v);
        CHECK(ps.secret_share.x == cfg.params.coordinate_of(v));
        REQUIRE(ps.hash_shares.size() == 1);
        CHECK(ps.hash_shares[0].x == cfg.params.coordinate_of(v));
        CHECK(ps.secret_share.label == ShareLabel::secret);
        CHECK(ps.hash_shares[0].label == ShareLabel::hash);
    }

    // every pair of secret shares interpolates to S
    for (std::uint32_t a = 1; a <= 4; ++a)
        for (std::uint32_t b = a + 1; b <= 4; ++b) {
            const std::vector<Share> pair{dist.participants[a - 1].secret_share,
                                          dist.participants[b - 1].secret_share};
            CHECK(interpolate_at_zero(pair, 2).value() == 2);
        }

    // every pair of hash shares interpolates to the digest value
    const FieldElement expected_digit = digest_to_field(secret_digest(2), 5)[0];
    for (std::uint32_t a = 1; a <= 4; ++a)
        for (std::uint32_t b = a + 1; b <= 4; ++b) {
            const std::vector<Share> pair{dist.participants[a - 1].hash_shares[0],
                                          dist.participants[b - 1].hash_shares[0]};
            CHECK(interpolate_at_zero(pair, 2) == expected_digit);
        }

    // n * (1 + L) share deliveries, nothing else
    CHECK(count_kind(transcript, EventKind::deliver_share) == 8);
    CHECK(count_kind(transcript, EventKind::deliver_digest) == 0);
    CHECK(transcript.events.size() == 8);
}

TEST_CASE("t=1 distribution hands the secret itself to every participant") {
    const DealerConfig cfg{ProtocolParams(7, 1, 3), 4, 1, 5};
    Transcript transcript;
    const auto dist = distribute(cfg, transcript);
    for (const auto& ps : dist.participants) CHECK(ps.secret_share.y.value() == 4);
}

TEST_CASE("distribute rejects a secret outside the field") {
    const DealerConfig cfg{ProtocolParams(5, 2, 3), 5, 1, 1};
    Transcript transcript;
    CHECK_THROWS_AS(distribute(cfg, transcript), std::invalid_argument);
}

TEST_CASE("proposed run recovers the secret for every seed") {
    const std::vector<std::uint32_t> active{1, 2};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DealerConfig cfg{ProtocolParams(3, 2, 2), 2, 1, seed};
        const auto rr = run_proposed(cfg, active);
        CHECK(rr.outcome.recovered_secret.value() == 2);
        CHECK(rr.outcome.verdict == Verdict::honest);
    }
}

TEST_CASE("t=1 run is a single-wire teleport of the share") {
    const std::vector<std::uint32_t> active{1};
    const DealerConfig cfg{ProtocolParams(5, 1, 1), 4, 1, 11};
    const auto rr = run_proposed(cfg, active);
    CHECK(rr.outcome.recovered_secret.value() == 4);
    const auto rc = tally_resources(rr.transcript, Phase::secret_round);
    CHECK(rc.qft == 1);
    CHECK(rc.cnot == 0);
    CHECK(rc.unitary == 1);
    CHECK(rc.iqft == 1);
    CHECK(rc.measure == 1);
    CHECK(rc.message_particles == 0);
}

TEST_CASE("random configs agree with the classical interpolation oracle") {
    SeededRng rng(0xBEEF);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t d = kPrimes[rng.uniform_below(6)];
        const std::uint32_t n = 1 + rng.uniform_below(std::min<std::uint32_t>(6, d - 1));
        const std::uint32_t t = 1 + rng.uniform_below(std::min<std::uint32_t>(4, n));
        const std::uint32_t secret = rng.uniform_below(d);

        std::vector<std::uint32_t> pool(n);
        std::iota(pool.begin(), pool.end(), 1u);
        for (std::uint32_t i = 0; i < t; ++i)
            std::swap(pool[i], pool[i + rng.uniform_below(n - i)]);
        std::vector<std::uint32_t> active(pool.begin(), pool.begin() + t);
        std::sort(active.begin(), active.end());

        const DealerConfig cfg{ProtocolParams(d, t, n), secret, 1, rng.next_u64()};
        const auto rr = run_proposed(cfg, active);
        CHECK(rr.outcome.recovered_secret.value() == secret);
        CHECK(rr.outcome.verdict == Verdict::honest);

        // measurement-sum equals Lagrange interpolation over the active shares
        const auto shares = active_shares(cfg, active);
        CHECK(rr.outcome.recovered_secret == interpolate_at_zero(shares, t));
    }
}

TEST_CASE("song outcome is uniform noise for t >= 2") {
    const std::vector<std::uint32_t> active{1, 2};
    std::vector<std::uint64_t> counts(3, 0);
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
        const DealerConfig cfg{ProtocolParams(3, 2, 2), 2, 1, seed};
        const auto rr = run_song(cfg, active);
        ++counts[rr.outcome.recovered_secret.value()];
    }
    CHECK(chi_square_uniform_pass(counts));
}

TEST_CASE("song degenerates to a correct protocol at t = 1") {
    const std::vector<std::uint32_t> active{1};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DealerConfig cfg{ProtocolParams(5, 1, 2), 3, 1, seed};
        const auto rr = run_song(cfg, active);
        CHECK(rr.outcome.recovered_secret.value() == 3);
        CHECK(rr.outcome.verdict == Verdict::honest);
    }
}

TEST_CASE("song transcript delivers the digest; proposed never does") {
    const std::vector<std::uint32_t> active{1, 2};
    const DealerConfig cfg{ProtocolParams(3, 2, 2), 2, 1, 1};

    const auto song = run_song(cfg, active);
    CHECK(count_kind(song.transcript, EventKind::deliver_digest) == 1);
    const auto& ev = *std::find_if(song.transcript.events.begin(), song.transcript.events.end(),
                                   [](const auto& e) { return e.kind == EventKind::deliver_digest; });
    CHECK(ev.actor == 1);  // the reconstructor
    CHECK(ev.note == to_hex(secret_digest(2)));

    const auto proposed = run_proposed(cfg, active);
    CHECK(count_kind(proposed.transcript, EventKind::deliver_digest) == 0);
}

TEST_CASE("active-set and reconstructor validation") {
    const DealerConfig cfg{ProtocolParams(7, 2, 4), 2, 1, 1};
    const std::vector<std::uint32_t> too_few{1};
    const std::vector<std::uint32_t> dup{2, 2};
    const std::vector<std::uint32_t> out{1, 9};
    const std::vector<std::uint32_t> ok{2, 4};
    CHECK_THROWS_AS(run_proposed(cfg, too_few), std::invalid_argument);
    CHECK_THROWS_AS(run_proposed(cfg, dup), std::invalid_argument);
    CHECK_THROWS_AS(run_proposed(cfg, out), std::invalid_argument);
    CHECK_THROWS_AS(run_proposed(cfg, ok, std::nullopt, 1u), std::invalid_argument);
    CHECK_NOTHROW(run_proposed(cfg, ok, std::nullopt, 4u));

    // adversary must sit in the active set
    CHECK_THROWS_AS(run_proposed(cfg, ok, TamperSpec(3, 1)), std::invalid_argument);
}

TEST_CASE("reconstructor override moves wire 0") {
    const DealerConfig cfg{ProtocolParams(7, 2, 4), 2, 1, 9};
    const std::vector<std::uint32_t> active{2, 4};
    const auto rr = run_proposed(cfg, active, std::nullopt, 4u);
    CHECK(rr.outcome.recovered_secret.value() == 2);
    const auto& events = rr.transcript.events;
    const auto prep = std::find_if(events.begin(), events.end(),
                                   [](const auto& e) { return e.kind == EventKind::prepare; });
    REQUIRE(prep != events.end());
    CHECK(prep->actor == 4);
    const auto tx = std::find_if(events.begin(), events.end(),
                                 [](const auto& e) { return e.kind == EventKind::transmit; });
    REQUIRE(tx != events.end());
    CHECK(tx->aux == 2);  // the other active participant receives the particle
}

TEST_CASE("tamper shifts the reconstruction by exactly delta") {
    const std::vector<std::uint32_t> active{1, 2};
    for (std::uint32_t delta = 1; delta < 7; ++delta) {
        const DealerConfig cfg{ProtocolParams(7, 2, 2), 3, 1, 17};
        const auto rr = run_proposed(cfg, active, TamperSpec(2, delta));
        CHECK(rr.outcome.recovered_secret.value() == (3 + delta) % 7);
    }
}

TEST_CASE("tamper validation") {
    CHECK_THROWS_AS(TamperSpec(1, 0), std::invalid_argument);  // delta = 0 is not a tamper
    const std::vector<std::uint32_t> active{1, 2};
    const DealerConfig cfg{ProtocolParams(5, 2, 2), 2, 1, 1};
    CHECK_THROWS_AS(run_proposed(cfg, active, TamperSpec(2, 5)), std::invalid_argument);  // = d
    CHECK_THROWS_AS(run_proposed(cfg, active, TamperSpec(2, 10)), std::invalid_argument);
}

TEST_CASE("pre-verified tamper instance d=5 S=2 delta=1 is detected") {
    // sha1 residues mod 5: H("2") = 1, H("3") = 4 (reference oracle)
    const std::vector<std::uint32_t> active{1, 2};
    const DealerConfig cfg{ProtocolParams(5, 2, 4), 2, 1, 23};
    const auto rr = run_proposed(cfg, active, TamperSpec(2, 1));
    CHECK(rr.outcome.recovered_secret.value() == 3);
    CHECK(rr.outcome.recovered_hash[0].value() == 1);
    CHECK(rr.outcome.expected_hash[0].value() == 4);
    CHECK(rr.outcome.verdict == Verdict::corrupt_detected);
}

TEST_CASE("d=3 single-element mode cannot see any tamper") {
    // all of sha1("0"), sha1("1"), sha1("2") are 0 mod 3, so the single-digit
    // check is blind at d=3; the multi-digit mode exists for exactly this
    const std::vector<std::uint32_t> active{1, 2};
    const DealerConfig cfg{ProtocolParams(3, 2, 2), 2, 1, 41};
    const auto single = run_proposed(cfg, active, TamperSpec(2, 1));
    CHECK(single.outcome.recovered_secret.value() == 0);
    CHECK(single.outcome.verdict == Verdict::honest);  // the documented miss

    const DealerConfig multi{ProtocolParams(3, 2, 2), 2, 8, 41};
    const auto caught = run_proposed(multi, active, TamperSpec(2, 1));
    CHECK(caught.outcome.recovered_secret.value() == 0);
    CHECK(caught.outcome.verdict == Verdict::corrupt_detected);
}

TEST_CASE("multi-digit mode L=8 detects 100 random tampers") {
    SeededRng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t d = kPrimes[rng.uniform_below(6)];
        const std::uint32_t n = std::min<std::uint32_t>(4, d - 1);
        const std::uint32_t t = std::min<std::uint32_t>(2, n);
        std::vector<std::uint32_t> active(t);
        std::iota(active.begin(), active.end(), 1u);

        const std::uint32_t secret = rng.uniform_below(d);
        const std::uint32_t delta = 1 + rng.uniform_below(d - 1);
        const std::uint32_t cheater = active[rng.uniform_below(t)];
        const DealerConfig cfg{ProtocolParams(d, t, n), secret, 8, rng.next_u64()};
        const auto rr = run_proposed(cfg, active, TamperSpec(cheater, delta));
        CHECK(rr.outcome.recovered_secret.value() == (secret + delta) % d);
        CHECK(rr.outcome.verdict == Verdict::corrupt_detected);
    }
}

TEST_CASE("t-1 shares pin nothing: guessed completions sweep every secret") {
    SeededRng rng(5150);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t d = kPrimes[1 + rng.uniform_below(5)];  // need t >= 2, so d >= 3
        const std::uint32_t t = 2 + rng.uniform_below(std::min<std::uint32_t>(3, d - 2));
        const ProtocolParams params(d, t, std::min<std::uint32_t>(6, d - 1));
        auto poly_rng = substream(rng.next_u64(), "poly");
        const Polynomial poly =
            sample_polynomial(params.element(rng.uniform_below(d)), params, poly_rng);

        std::vector<Share> shares;
        for (std::uint32_t v = 1; v < t; ++v) {
            const FieldElement x = params.coordinate_of(v);
            shares.emplace_back(x, poly.evaluate(x));
        }
        const FieldElement xt = params.coordinate_of(t);

        std::set<std::uint32_t> seen;
        for (std::uint32_t guess = 0; guess < d; ++guess) {
            auto completed = shares;
            completed.emplace_back(xt, FieldElement(guess, d));
            seen.insert(interpolate_at_zero(completed, t).value());
        }
        CHECK(seen.size() == d);  // bijection: every candidate secret appears
    }
}

TEST_CASE("resource tallies per round") {
    const std::vector<std::uint32_t> active{1, 2};
    const DealerConfig cfg{ProtocolParams(5, 2, 3), 1, 1, 3};

    const auto prop = run_proposed(cfg, active);
    const auto prc = tally_resources(prop.transcript, Phase::secret_round);
    CHECK(prc == ResourceCount{1, 2, 2, 1, 0, 2, 1, 0});
    const auto hrc = tally_resources(prop.transcript, Phase::hash_round);
    CHECK(hrc == ResourceCount{1, 2, 2, 1, 0, 2, 1, 0});

    const auto song = run_song(cfg, active);
    const auto src = tally_resources(song.transcript, Phase::secret_round);
    CHECK(src == ResourceCount{1, 1, 2, 1, 0, 1, 1, 0});

    // the distribution slice has no quantum operations
    const auto drc = tally_resources(prop.transcript, Phase::distribution);
    CHECK(drc == ResourceCount{});

    // a gate with no preceding prepare is malformed
    Transcript bad;
    bad.append(Phase::secret_round, EventKind::qft, 1).wire = 0;
    CHECK_THROWS_AS(tally_resources(bad.events), invariant_error);
}

TEST_CASE("transcript replay reproduces the recorded probabilities") {
    const std::vector<std::uint32_t> active{1, 3};
    const DealerConfig cfg{ProtocolParams(7, 2, 4), 5, 2, 99};
    const auto prop = run_proposed(cfg, active, TamperSpec(3, 2));
    CHECK_NOTHROW(verify_transcript_replay(prop.transcript));

    const auto song = run_song(cfg, active);
    CHECK_NOTHROW(verify_transcript_replay(song.transcript));

    // corrupt one recorded probability and the replay must notice
    auto broken = prop.transcript;
    for (auto& ev : broken.events)
        if (ev.kind == EventKind::measure) {
            ev.probability += 0.25;
            break;
        }
    CHECK_THROWS_AS(verify_transcript_replay(broken), invariant_error);
}

TEST_CASE("golden transcript for the worked example") {
    const DealerConfig cfg{ProtocolParams(3, 2, 2), 2, 1, 7};
    const std::vector<std::uint32_t> active{1, 2};
    const auto rr = run_proposed(cfg, active);
    CHECK(rr.outcome.recovered_secret.value() == 2);
    CHECK(serialize_transcript(rr.transcript) ==
          "0\tdistribution\tdeliver-share\t1\t-1\tsecret x=1 y=1\n"
          "1\tdistribution\tdeliver-share\t2\t-1\tsecret x=2 y=0\n"
          "2\tdistribution\tdeliver-share\t1\t-1\thash[0] x=1 y=0\n"
          "3\tdistribution\tdeliver-share\t2\t-1\thash[0] x=2 y=0\n"
          "4\tsecret-round\tprepare\t1\t-1\td=3 wires=2\n"
          "5\tsecret-round\tqft\t1\t0\t-\n"
          "6\tsecret-round\tcnot\t1\t0\ttarget=1\n"
          "7\tsecret-round\ttransmit\t1\t1\tto=2\n"
          "8\tsecret-round\tpauli\t1\t0\ts=2\n"
          "9\tsecret-round\tpauli\t2\t1\ts=0\n"
          "10\tsecret-round\tiqft\t1\t0\t-\n"
          "11\tsecret-round\tmeasure\t1\t0\toutcome=0 p=0.33333333333333331\n"
          "12\tsecret-round\tbroadcast\t1\t-1\t0\n"
          "13\tsecret-round\tiqft\t2\t1\t-\n"
          "14\tsecret-round\tmeasure\t2\t1\toutcome=2 p=1\n"
          "15\tsecret-round\tbroadcast\t2\t-1\t2\n"
          "16\thash-round\tprepare\t1\t-1\td=3 wires=2\n"
          "17\thash-round\tqft\t1\t0\t-\n"
          "18\thash-round\tcnot\t1\t0\ttarget=1\n"
          "19\thash-round\ttransmit\t1\t1\tto=2\n"
          "20\thash-round\tpauli\t1\t0\ts=0\n"
          "21\thash-round\tpauli\t2\t1\ts=0\n"
          "22\thash-round\tiqft\t1\t0\t-\n"
          "23\thash-round\tmeasure\t1\t0\toutcome=0 p=0.33333333333333337\n"
          "24\thash-round\tbroadcast\t1\t-1\t0\n"
          "25\thash-round\tiqft\t2\t1\t-\n"
          "26\thash-round\tmeasure\t2\t1\toutcome=0 p=1\n"
          "27\thash-round\tbroadcast\t2\t-1\t0\n");
}

TEST_CASE("event order follows the protocol steps") {
    const DealerConfig cfg{ProtocolParams(5, 3, 4), 1, 1, 6};
    const std::vector<std::uint32_t> active{1, 2, 4};
    const auto rr = run_proposed(cfg, active);
    const auto round = phase_slice(rr.transcript, Phase::secret_round);

    std::vector<EventKind> kinds;
    for (const auto& ev : round) kinds.push_back(ev.kind);
    const std::vector<EventKind> expect{
        EventKind::prepare, EventKind::qft,     EventKind::cnot,      EventKind::cnot,
        EventKind::transmit, EventKind::transmit, EventKind::pauli,   EventKind::pauli,
        EventKind::pauli,   EventKind::iqft,    EventKind::measure,   EventKind::broadcast,
        EventKind::iqft,    EventKind::measure, EventKind::broadcast, EventKind::iqft,
        EventKind::measure, EventKind::broadcast};
    CHECK(kinds == expect);

    // transmissions target the non-reconstructor active participants in order
    CHECK(round[4].aux == 2);
    CHECK(round[5].aux == 4);
}
