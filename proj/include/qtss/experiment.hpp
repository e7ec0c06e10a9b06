#pragma once

// Experiment drivers behind the CLI: validated run configuration, seeded
// trial fan-out, and the three report builders (run, flaw-demo, tally).
// Every report is produced in both human text and structured record form;
// identical config + seed yields byte-identical structured output.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qtss/field.hpp"
#include "qtss/protocol.hpp"
#include "qtss/qsim.hpp"
#include "qtss/report.hpp"
#include "qtss/rng.hpp"
#include "qtss/runner.hpp"
#include "qtss/stats.hpp"

namespace qtss {

inline constexpr std::uint64_t kDefaultMaxAmplitudes = std::uint64_t(1) << 22;

struct RunConfig {
    std::string subcommand = "run";  // run | flaw-demo | tally
    std::uint32_t d = 3;
    std::uint32_t t = 2;
    std::uint32_t n = 2;
    std::uint32_t secret = 2;
    std::uint64_t seed = 1;
    std::uint32_t trials = 1;
    std::string protocol = "proposed";  // proposed | song
    std::vector<std::uint32_t> active;  // empty -> lowest t indices
    std::optional<TamperSpec> tamper;
    std::uint32_t hash_digits = 1;
    std::string format = "text";  // text | structured
    std::uint64_t max_amplitudes = kDefaultMaxAmplitudes;
};

struct ValidatedConfig {
    RunConfig raw;
    ProtocolParams params;
    std::vector<std::uint32_t> active;
};

// All configuration checking happens here, before any state allocation.
inline ValidatedConfig validate_config(const RunConfig& c) {
    if (c.subcommand != "run" && c.subcommand != "flaw-demo" && c.subcommand != "tally")
        throw std::invalid_argument("unknown subcommand: " + c.subcommand);
    if (c.protocol != "proposed" && c.protocol != "song")
        throw std::invalid_argument("protocol must be 'proposed' or 'song'");
    if (c.format != "text" && c.format != "structured")
        throw std::invalid_argument("format must be 'text' or 'structured'");
    if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");

    ProtocolParams params(c.d, c.t, c.n);

    // state-size guard, checked before any register is allocated
    unsigned __int128 amplitudes = 1;
    for (std::uint32_t i = 0; i < c.t; ++i) amplitudes *= c.d;
    if (amplitudes > c.max_amplitudes) {
        char msg[160];
        if (amplitudes <= static_cast<unsigned __int128>(UINT64_MAX))
            std::snprintf(msg, sizeof msg,
                          "state size d^t = %llu amplitudes exceeds max-amplitudes %llu",
                          static_cast<unsigned long long>(amplitudes),
                          static_cast<unsigned long long>(c.max_amplitudes));
        else
            std::snprintf(msg, sizeof msg,
                          "state size d^t exceeds 2^64 amplitudes (max-amplitudes %llu)",
                          static_cast<unsigned long long>(c.max_amplitudes));
        throw std::invalid_argument(msg);
    }

    if (c.secret >= c.d) throw std::invalid_argument("secret must be < d");
    pow_u64_checked(c.d, c.hash_digits, "hash-digits");  // throws if d^L overflows

    std::vector<std::uint32_t> active = c.active;
    if (active.empty()) {
        active.resize(c.t);
        std::iota(active.begin(), active.end(), 1u);
    }
    std::sort(active.begin(), active.end());
    if (active.size() != c.t) throw std::invalid_argument("active set must contain exactly t indices");
    if (std::adjacent_find(active.begin(), active.end()) != active.end())
        throw std::invalid_argument("active set has duplicate indices");
    for (auto v : active)
        if (v < 1 || v > c.n) throw std::invalid_argument("active index out of [1, n]");

    if (c.tamper) {
        if (std::find(active.begin(), active.end(), c.tamper->participant) == active.end())
            throw std::invalid_argument("tamper participant is not in the active set");
        if (c.tamper->delta % c.d == 0)
            throw std::invalid_argument("tamper delta is 0 mod d, not a tamper");
    }
    if (c.subcommand == "flaw-demo" && c.t < 2)
        throw std::invalid_argument("flaw-demo requires t >= 2 (single-wire reconstruction is exact)");

    return ValidatedConfig{c, std::move(params), std::move(active)};
}

struct TrialResult {
    std::uint32_t index = 0;
    RunOutcome outcome;
    Transcript transcript;
};

// `trials` independent protocol executions; trial i reseeds itself from
// (master seed, "trial", i) so fan-out order cannot matter.
inline std::vector<TrialResult> run_trials(const ValidatedConfig& vc) {
    return parallel_map_indexed(vc.raw.trials, [&](std::size_t i) {
        DealerConfig dc{vc.params, vc.raw.secret, vc.raw.hash_digits,
                        derive_seed(vc.raw.seed, "trial", i)};
        RunResult rr = vc.raw.protocol == "song" ? run_song(dc, vc.active)
                                                 : run_proposed(dc, vc.active, vc.raw.tamper);
        return TrialResult{static_cast<std::uint32_t>(i), std::move(rr.outcome),
                           std::move(rr.transcript)};
    });
}

struct ReportOutput {
    std::vector<Record> records;
    std::string text;
};

namespace detail {

inline std::string join_u32(std::span<const std::uint32_t> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s.push_back(',');
        s += std::to_string(xs[i]);
    }
    return s;
}

inline std::string join_elements(std::span<const FieldElement> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s.push_back(',');
        s += std::to_string(xs[i].value());
    }
    return s;
}

inline const char* verdict_str(Verdict v) {
    return v == Verdict::honest ? "honest" : "corrupt-detected";
}

inline Record schema_record() {
    return Record{"schema", {{"version", "1"}, {"generator", "qtss"}}};
}

inline Record config_record(const ValidatedConfig& vc) {
    const auto& c = vc.raw;
    Record rec{"config", {}};
    rec.add("subcommand", c.subcommand)
        .add("protocol", c.protocol)
        .add("d", std::uint64_t(c.d))
        .add("t", std::uint64_t(c.t))
        .add("n", std::uint64_t(c.n))
        .add("secret", std::uint64_t(c.secret))
        .add("seed", std::uint64_t(c.seed))
        .add("trials", std::uint64_t(c.trials))
        .add("hash-digits", std::uint64_t(c.hash_digits))
        .add("active", join_u32(vc.active))
        .add("tamper", c.tamper ? std::to_string(c.tamper->participant) + ":" +
                                      std::to_string(c.tamper->delta)
                                : std::string("-"))
        .add("max-amplitudes", std::uint64_t(c.max_amplitudes));
    return rec;
}

inline Record tally_record(const ResourceCount& rc, std::string kind_hint,
                           std::vector<std::pair<std::string, std::string>> head) {
    Record rec{std::move(kind_hint), std::move(head)};
    rec.add("qft", rc.qft)
        .add("iqft", rc.iqft)
        .add("unitary", rc.unitary)
        .add("cnot", rc.cnot)
        .add("sum", rc.sum_op)
        .add("measure", rc.measure)
        .add("message", rc.message_particles)
        .add("decoy", rc.decoy_particles);
    return rec;
}

inline std::string tally_text_row(const char* label, const ResourceCount& rc) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%-24s qft=%llu cnot=%llu unitary=%llu iqft=%llu measure=%llu message=%llu "
                  "sum=%llu decoy=%llu\n",
                  label, (unsigned long long)rc.qft, (unsigned long long)rc.cnot,
                  (unsigned long long)rc.unitary, (unsigned long long)rc.iqft,
                  (unsigned long long)rc.measure, (unsigned long long)rc.message_particles,
                  (unsigned long long)rc.sum_op, (unsigned long long)rc.decoy_particles);
    return buf;
}

}  // namespace detail

// --------------------------------------------------------------------------
// run
// --------------------------------------------------------------------------

inline ReportOutput run_report(const ValidatedConfig& vc) {
    const auto trials = run_trials(vc);
    const auto& c = vc.raw;

    std::uint64_t correct = 0, honest = 0;
    for (const auto& tr : trials) {
        if (tr.outcome.recovered_secret.value() == c.secret) ++correct;
        if (tr.outcome.verdict == Verdict::honest) ++honest;
    }
    const double rate = double(correct) / double(trials.size());

    ReportOutput out;
    out.records.push_back(detail::schema_record());
    out.records.push_back(detail::config_record(vc));

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "run protocol=%s d=%u t=%u n=%u secret=%u seed=%llu trials=%u hash-digits=%u "
                  "active=%s tamper=%s\n",
                  c.protocol.c_str(), c.d, c.t, c.n, c.secret, (unsigned long long)c.seed,
                  c.trials, c.hash_digits, detail::join_u32(vc.active).c_str(),
                  (c.tamper ? (std::to_string(c.tamper->participant) + ":" +
                               std::to_string(c.tamper->delta))
                            : std::string("-"))
                      .c_str());
    out.text += buf;

    for (const auto& tr : trials) {
        Record rec{"trial", {}};
        rec.add("index", std::uint64_t(tr.index))
            .add("recovered", std::uint64_t(tr.outcome.recovered_secret.value()))
            .add("hash-recovered", detail::join_elements(tr.outcome.recovered_hash))
            .add("hash-expected", detail::join_elements(tr.outcome.expected_hash))
            .add("verdict", detail::verdict_str(tr.outcome.verdict));
        out.records.push_back(std::move(rec));

        std::snprintf(buf, sizeof buf, "trial %4u: recovered=%u hash=%s expected=%s verdict=%s\n",
                      tr.index, tr.outcome.recovered_secret.value(),
                      detail::join_elements(tr.outcome.recovered_hash).c_str(),
                      detail::join_elements(tr.outcome.expected_hash).c_str(),
                      detail::verdict_str(tr.outcome.verdict));
        out.text += buf;
    }

    // every measurement, from the transcripts so the phase tag is exact
    for (const auto& tr : trials) {
        for (const auto& ev : tr.transcript.events) {
            if (ev.kind != EventKind::measure) continue;
            Record rec{"measurement", {}};
            rec.add("trial", std::uint64_t(tr.index))
                .add("phase", to_string(ev.phase))
                .add("actor", std::uint64_t(ev.actor))
                .add("wire", std::int64_t(ev.wire))
                .add("outcome", std::int64_t(ev.value))
                .add("probability", format_double(ev.probability));
            out.records.push_back(std::move(rec));
        }
    }

    const ResourceCount secret_rc = tally_resources(trials[0].transcript, Phase::secret_round);
    out.records.push_back(detail::tally_record(secret_rc, "tally", {{"phase", "secret-round"}}));
    out.text += detail::tally_text_row("resources secret-round:", secret_rc);
    if (c.protocol == "proposed") {
        const ResourceCount hash_rc = tally_resources(trials[0].transcript, Phase::hash_round);
        out.records.push_back(detail::tally_record(hash_rc, "tally", {{"phase", "hash-round"}}));
        out.text += detail::tally_text_row("resources hash-round:", hash_rc);
    }

    Record summary{"summary", {}};
    summary.add("trials", std::uint64_t(trials.size()))
        .add("correct", correct)
        .add("rate", format_double(rate))
        .add("honest", honest)
        .add("corrupt-detected", std::uint64_t(trials.size()) - honest);
    out.records.push_back(std::move(summary));

    std::snprintf(buf, sizeof buf, "summary: correct=%llu/%llu rate=%.4f honest=%llu corrupt-detected=%llu\n",
                  (unsigned long long)correct, (unsigned long long)trials.size(), rate,
                  (unsigned long long)honest, (unsigned long long)(trials.size() - honest));
    out.text += buf;
    return out;
}

// --------------------------------------------------------------------------
// flaw-demo
// --------------------------------------------------------------------------

// Runs the song variant `trials` times, histograms its step-6 outcome,
// tests uniformity at significance 0.01 and prints the exact analytic
// marginal next to the proposed variant executed on identical shares.
inline ReportOutput flaw_demo_report(const ValidatedConfig& vc) {
    const auto& c = vc.raw;
    const std::uint32_t d = c.d;

    struct PairedTrial {
        std::uint32_t song_outcome = 0;
        std::uint32_t proposed_outcome = 0;
    };
    const auto paired = parallel_map_indexed(c.trials, [&](std::size_t i) {
        DealerConfig dc{vc.params, c.secret, c.hash_digits, derive_seed(c.seed, "trial", i)};
        // identical seed -> identical dealer polynomials in both variants
        const auto song = run_song(dc, vc.active);
        const auto proposed = run_proposed(dc, vc.active);
        return PairedTrial{song.outcome.recovered_secret.value(),
                           proposed.outcome.recovered_secret.value()};
    });

    std::vector<std::uint64_t> histogram(d, 0);
    std::uint64_t proposed_correct = 0;
    for (const auto& pt : paired) {
        ++histogram[pt.song_outcome];
        if (pt.proposed_outcome == c.secret) ++proposed_correct;
    }
    const std::vector<double> expected(d, double(c.trials) / d);
    const double stat = chi_square_statistic(histogram, expected);
    const double critical = chi_square_critical_001(d - 1);
    const bool uniform = stat < critical;

    // exact marginal of the song step-6 wire, from the distribution oracle
    DealerConfig dc0{vc.params, c.secret, c.hash_digits, derive_seed(c.seed, "trial", 0)};
    Transcript scratch;
    const auto dist = distribute(dc0, scratch);
    std::vector<FieldElement> coords;
    for (auto v : vc.active) coords.push_back(vc.params.coordinate_of(v));
    QuditRegister reg = QuditRegister::zero_state(d, c.t);
    reg.apply_qft(0);
    for (std::uint32_t k = 1; k < c.t; ++k) reg.apply_cnot(0, k);
    for (std::uint32_t k = 0; k < c.t; ++k) {
        const auto& ps = dist.participants[vc.active[k] - 1];
        reg.apply_phase_pauli(k, shadow(ps.secret_share, coords, ps.index).value.value());
    }
    reg.apply_iqft(0);
    const auto marginal = reg.wire_marginal(0);

    ReportOutput out;
    out.records.push_back(detail::schema_record());
    out.records.push_back(detail::config_record(vc));

    char buf[256];
    std::snprintf(buf, sizeof buf, "flaw-demo d=%u t=%u n=%u secret=%u seed=%llu trials=%u\n", c.d,
                  c.t, c.n, c.secret, (unsigned long long)c.seed, c.trials);
    out.text += buf;
    out.text += "song step-6 outcome histogram:\n";
    for (std::uint32_t u = 0; u < d; ++u) {
        Record rec{"histogram", {}};
        rec.add("outcome", std::uint64_t(u))
            .add("count", histogram[u])
            .add("frequency", format_double(double(histogram[u]) / c.trials));
        out.records.push_back(std::move(rec));
        std::snprintf(buf, sizeof buf, "  outcome %u: %6llu  (%.5f)\n", u,
                      (unsigned long long)histogram[u], double(histogram[u]) / c.trials);
        out.text += buf;
    }

    Record chirec{"chisq", {}};
    chirec.add("statistic", format_double(stat))
        .add("dof", std::uint64_t(d - 1))
        .add("critical", format_double(critical))
        .add("uniform", uniform ? "yes" : "no");
    out.records.push_back(std::move(chirec));
    std::snprintf(buf, sizeof buf,
                  "chi-square statistic=%.4f dof=%u critical(0.01)=%.4f -> uniform: %s\n", stat,
                  d - 1, critical, uniform ? "yes" : "no");
    out.text += buf;

    out.text += "analytic step-6 marginal:";
    for (std::uint32_t u = 0; u < d; ++u) {
        Record rec{"analytic", {}};
        rec.add("outcome", std::uint64_t(u)).add("probability", format_double(marginal[u]));
        out.records.push_back(std::move(rec));
        std::snprintf(buf, sizeof buf, " %.9f", marginal[u]);
        out.text += buf;
    }
    out.text += "\n";

    Record prec{"proposed", {}};
    prec.add("trials", std::uint64_t(c.trials)).add("correct", proposed_correct);
    out.records.push_back(std::move(prec));
    std::snprintf(buf, sizeof buf,
                  "proposed variant on identical shares: %llu/%u correct reconstructions\n",
                  (unsigned long long)proposed_correct, c.trials);
    out.text += buf;
    return out;
}

// --------------------------------------------------------------------------
// tally
// --------------------------------------------------------------------------

// Table-1 formulas for one reconstruction round (fields the table defines).
inline ResourceCount table1_song(std::uint32_t t) {
    ResourceCount rc;
    rc.qft = 1;
    rc.iqft = 1;
    rc.unitary = t;
    rc.measure = 1;
    rc.message_particles = t - 1;
    return rc;
}

inline ResourceCount table1_proposed(std::uint32_t t) {
    ResourceCount rc;
    rc.qft = 1;
    rc.iqft = t - 1;
    rc.unitary = t;
    rc.measure = t - 1;
    rc.message_particles = t - 1;
    return rc;
}

inline ReportOutput tally_report(const ValidatedConfig& vc) {
    const auto& c = vc.raw;
    DealerConfig dc{vc.params, c.secret, c.hash_digits, derive_seed(c.seed, "trial", 0)};
    const auto song = run_song(dc, vc.active);
    const auto proposed = run_proposed(dc, vc.active);

    const ResourceCount song_measured = tally_resources(song.transcript, Phase::secret_round);
    const ResourceCount prop_measured = tally_resources(proposed.transcript, Phase::secret_round);
    const ResourceCount song_table = table1_song(c.t);
    const ResourceCount prop_table = table1_proposed(c.t);

    ReportOutput out;
    out.records.push_back(detail::schema_record());
    out.records.push_back(detail::config_record(vc));
    out.records.push_back(detail::tally_record(song_measured, "tally",
                                               {{"variant", "song"}, {"source", "measured"}}));
    {
        Record rec{"tally", {{"variant", "song"}, {"source", "table1"}}};
        rec.add("qft", song_table.qft)
            .add("iqft", song_table.iqft)
            .add("unitary", song_table.unitary)
            .add("measure", song_table.measure)
            .add("message", song_table.message_particles);
        out.records.push_back(std::move(rec));
    }
    out.records.push_back(detail::tally_record(prop_measured, "tally",
                                               {{"variant", "proposed"}, {"source", "measured"}}));
    {
        Record rec{"tally", {{"variant", "proposed"}, {"source", "table1"}}};
        rec.add("qft", prop_table.qft)
            .add("iqft", prop_table.iqft)
            .add("unitary", prop_table.unitary)
            .add("measure", prop_table.measure)
            .add("message", prop_table.message_particles);
        out.records.push_back(std::move(rec));
    }
    Record note{"note", {}};
    note.add("divergence", "proposed-iqft-measure").add("measured", "t").add("table1", "t-1");
    out.records.push_back(std::move(note));

    char buf[200];
    std::snprintf(buf, sizeof buf, "tally d=%u t=%u n=%u (counts per reconstruction round)\n", c.d,
                  c.t, c.n);
    out.text += buf;
    out.text += detail::tally_text_row("song (measured):", song_measured);
    out.text += detail::tally_text_row("song (table 1):", song_table);
    out.text += detail::tally_text_row("proposed (measured):", prop_measured);
    out.text += detail::tally_text_row("proposed (table 1):", prop_table);
    out.text +=
        "note: steps 6-7 have all t participants apply IQFT and measure, so the transcript\n"
        "counts iqft=t and measure=t for the proposed variant; the published table lists (t-1)\n"
        "for both. Counts above are taken from the transcript, not the table.\n";
    return out;
}

inline ReportOutput build_report(const ValidatedConfig& vc) {
    if (vc.raw.subcommand == "run") return run_report(vc);
    if (vc.raw.subcommand == "flaw-demo") return flaw_demo_report(vc);
    return tally_report(vc);
}

}  // namespace qtss
