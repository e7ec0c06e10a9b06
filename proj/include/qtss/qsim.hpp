#pragma once

// Dense state-vector simulation of a register of d-level qudits with the
// gate set the protocol needs: single-wire QFT/IQFT, d-level CNOT (the SUM
// gate |a,b> -> |a, a+b mod d>), the diagonal phase operator
// U_{0,s} = sum_u w^{su}|u><u|, and computational-basis measurement.
//
// Conventions:
//   - wire 0 is the most significant base-d digit of the amplitude index;
//   - gates mutate the register in place and preserve the norm to 1e-9;
//   - a register belongs to one thread at a time, independent registers
//     (separate trials) run fully in parallel.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtss/errors.hpp"
#include "qtss/rng.hpp"

namespace qtss {

using Amplitude = std::complex<double>;

inline constexpr double kAmplitudeTolerance = 1e-9;
inline constexpr double kPruneThreshold = 1e-12;

struct MeasurementRecord {
    std::uint32_t wire = 0;
    std::uint32_t outcome = 0;
    double probability = 0.0;  // marginal probability at sample time
};

class QuditRegister {
public:
    static QuditRegister zero_state(std::uint32_t d, std::uint32_t wires) {
        return basis_state(d, std::vector<std::uint32_t>(wires, 0));
    }

    static QuditRegister basis_state(std::uint32_t d, std::span<const std::uint32_t> digits) {
        QuditRegister reg(d, static_cast<std::uint32_t>(digits.size()));
        std::size_t idx = 0;
        for (auto digit : digits) {
            if (digit >= d) throw std::out_of_range("basis_state: digit >= d");
            idx = idx * d + digit;
        }
        reg.amps_[idx] = Amplitude(1.0, 0.0);
        return reg;
    }

    // Arbitrary amplitude vector of length d^wires. Used by tests and by
    // transcript replay; normalization is the caller's business.
    static QuditRegister from_amplitudes(std::uint32_t d, std::uint32_t wires,
                                         std::vector<Amplitude> amps) {
        QuditRegister reg(d, wires);
        if (amps.size() != reg.amps_.size())
            throw std::invalid_argument("from_amplitudes: length != d^wires");
        reg.amps_ = std::move(amps);
        return reg;
    }

    std::uint32_t level_count() const { return d_; }
    std::uint32_t wire_count() const { return wires_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }

    Amplitude amplitude_at(std::span<const std::uint32_t> digits) const {
        if (digits.size() != wires_) throw std::invalid_argument("amplitude_at: wrong digit count");
        std::size_t idx = 0;
        for (auto digit : digits) {
            if (digit >= d_) throw std::out_of_range("amplitude_at: digit >= d");
            idx = idx * d_ + digit;
        }
        return amps_[idx];
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    std::uint32_t digit_of(std::size_t index, std::uint32_t wire) const {
        return static_cast<std::uint32_t>(index / stride_of(wire) % d_);
    }

    // |alpha> -> (1/sqrt d) sum_beta w^{alpha beta} |beta> on one wire.
    void apply_qft(std::uint32_t wire) { apply_fourier(wire, +1); }

    // |beta> -> (1/sqrt d) sum_alpha w^{-beta alpha} |alpha> on one wire.
    void apply_iqft(std::uint32_t wire) { apply_fourier(wire, -1); }

    // SUM gate: |a>|b> -> |a>|a+b mod d>.
    void apply_cnot(std::uint32_t control, std::uint32_t target) {
        check_wire(control);
        check_wire(target);
        if (control == target) throw std::invalid_argument("apply_cnot: control == target");
        const std::size_t tstride = stride_of(target);
        std::vector<Amplitude> cycle(d_);
        for (std::size_t base = 0; base < amps_.size(); ++base) {
            if (digit_of(base, target) != 0) continue;
            const std::uint32_t a = digit_of(base, control);
            if (a == 0) continue;
            for (std::uint32_t b = 0; b < d_; ++b) cycle[b] = amps_[base + b * tstride];
            for (std::uint32_t b = 0; b < d_; ++b)
                amps_[base + ((b + a) % d_) * tstride] = cycle[b];
        }
    }

    // U_{0,s}: basis digit u on the wire picks up the phase w^{s u}.
    void apply_phase_pauli(std::uint32_t wire, std::uint32_t s) {
        check_wire(wire);
        if (s >= d_) throw std::out_of_range("apply_phase_pauli: s >= d");
        if (s == 0) return;
        const auto omega = omega_table();
        for (std::size_t i = 0; i < amps_.size(); ++i)
            amps_[i] *= omega[std::size_t(s) * digit_of(i, wire) % d_];
    }

    // Marginal distribution of one wire's digit.
    std::vector<double> wire_marginal(std::uint32_t wire) const {
        check_wire(wire);
        std::vector<double> p(d_, 0.0);
        for (std::size_t i = 0; i < amps_.size(); ++i) p[digit_of(i, wire)] += std::norm(amps_[i]);
        return p;
    }

    // Sample the wire's digit by inverse CDF over the marginal with one
    // 64-bit uniform draw, then collapse and renormalize.
    MeasurementRecord measure_wire(std::uint32_t wire, SeededRng& rng) {
        check_wire(wire);
        auto p = wire_marginal(wire);
        double total = 0.0;
        for (double v : p) total += v;
        if (total < kPruneThreshold)
            throw invariant_error("measure_wire: register norm is numerically zero");
        const double r = rng.uniform_unit() * total;
        double cum = 0.0;
        std::uint32_t outcome = d_ - 1;
        for (std::uint32_t u = 0; u < d_; ++u) {
            cum += p[u];
            if (r < cum) {
                outcome = u;
                break;
            }
        }
        collapse_wire(wire, outcome);
        return MeasurementRecord{wire, outcome, p[outcome] / total};
    }

    // Project one wire onto a digit and renormalize.
    void collapse_wire(std::uint32_t wire, std::uint32_t outcome) {
        check_wire(wire);
        if (outcome >= d_) throw std::out_of_range("collapse_wire: outcome >= d");
        double kept = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (digit_of(i, wire) == outcome)
                kept += std::norm(amps_[i]);
            else
                amps_[i] = Amplitude(0.0, 0.0);
        }
        if (kept < kPruneThreshold)
            throw invariant_error("collapse_wire: zero-probability outcome");
        const double scale = 1.0 / std::sqrt(kept);
        for (auto& a : amps_) a *= scale;
    }

private:
    QuditRegister(std::uint32_t d, std::uint32_t wires) : d_(d), wires_(wires) {
        if (d < 2) throw std::invalid_argument("QuditRegister: d must be >= 2");
        if (wires < 1) throw std::invalid_argument("QuditRegister: need >= 1 wire");
        std::size_t dim = 1;
        for (std::uint32_t i = 0; i < wires; ++i) {
            if (dim > std::size_t(1) << 60) throw std::invalid_argument("QuditRegister: d^wires overflow");
            dim *= d;
        }
        amps_.assign(dim, Amplitude(0.0, 0.0));
    }

    void check_wire(std::uint32_t wire) const {
        if (wire >= wires_) throw std::out_of_range("wire index out of range");
    }

    std::size_t stride_of(std::uint32_t wire) const {
        std::size_t s = 1;
        for (std::uint32_t i = wire + 1; i < wires_; ++i) s *= d_;
        return s;
    }

    std::vector<Amplitude> omega_table() const {
        std::vector<Amplitude> omega(d_);
        for (std::uint32_t k = 0; k < d_; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / d_;
            omega[k] = Amplitude(std::cos(angle), std::sin(angle));
        }
        return omega;
    }

    void apply_fourier(std::uint32_t wire, int sign) {
        check_wire(wire);
        const auto omega = omega_table();
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
        const std::size_t stride = stride_of(wire);
        const std::size_t block = stride * d_;
        std::vector<Amplitude> in(d_);
        for (std::size_t base = 0; base < amps_.size(); base += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                const std::size_t at = base + inner;
                for (std::uint32_t u = 0; u < d_; ++u) in[u] = amps_[at + u * stride];
                for (std::uint32_t out = 0; out < d_; ++out) {
                    Amplitude acc(0.0, 0.0);
                    for (std::uint32_t u = 0; u < d_; ++u) {
                        std::size_t k = std::size_t(u) * out % d_;
                        const Amplitude w = sign > 0 ? omega[k] : std::conj(omega[k]);
                        acc += w * in[u];
                    }
                    amps_[at + out * stride] = acc * scale;
                }
            }
        }
    }

    std::uint32_t d_;
    std::uint32_t wires_;
    std::vector<Amplitude> amps_;
};

inline std::vector<std::uint32_t> digits_of_index(std::size_t index, std::uint32_t d,
                                                  std::uint32_t wires) {
    std::vector<std::uint32_t> digits(wires);
    for (std::uint32_t w = wires; w-- > 0;) {
        digits[w] = static_cast<std::uint32_t>(index % d);
        index /= d;
    }
    return digits;
}

// Exact |amplitude|^2 per basis tuple, entries below 1e-12 pruned.
inline std::map<std::vector<std::uint32_t>, double> outcome_distribution(
    const QuditRegister& reg) {
    std::map<std::vector<std::uint32_t>, double> dist;
    const auto amps = reg.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p < kPruneThreshold) continue;
        dist.emplace(digits_of_index(i, reg.level_count(), reg.wire_count()), p);
    }
    return dist;
}

// Text dump: one line per surviving amplitude, base-d digits (wire 0 first)
// followed by the real and imaginary parts, ordered by index.
inline std::string dump_state(const QuditRegister& reg) {
    std::string out;
    const auto amps = reg.amplitudes();
    char buf[64];
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) < kPruneThreshold) continue;
        const auto digits = digits_of_index(i, reg.level_count(), reg.wire_count());
        for (std::size_t k = 0; k < digits.size(); ++k) {
            if (k) out.push_back(' ');
            out += std::to_string(digits[k]);
        }
        std::snprintf(buf, sizeof buf, " %.17g %.17g", amps[i].real(), amps[i].imag());
        out += buf;
        out.push_back('\n');
    }
    return out;
}

}  // namespace qtss
