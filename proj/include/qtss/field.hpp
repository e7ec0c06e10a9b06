#pragma once

// Prime-field arithmetic over Z_d, share polynomials and Lagrange shadows.
// Everything here is an immutable value type; operations are pure, so field
// data can be shared freely across concurrent trial runners.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtss/rng.hpp"

namespace qtss {

inline bool is_prime(std::uint64_t m) {
    if (m < 2) return false;
    for (std::uint64_t f = 2; f * f <= m; ++f)
        if (m % f == 0) return false;
    return true;
}

// An element of Z_d. Carries its modulus; mixed-modulus arithmetic throws.
class FieldElement {
public:
    FieldElement() = default;  // unset element, modulus 0; any arithmetic throws

    FieldElement(std::uint64_t value, std::uint32_t modulus) : modulus_(modulus) {
        if (modulus < 2) throw std::invalid_argument("FieldElement: modulus must be >= 2");
        value_ = static_cast<std::uint32_t>(value % modulus);
    }

    std::uint32_t value() const { return value_; }
    std::uint32_t modulus() const { return modulus_; }

    FieldElement operator+(FieldElement o) const {
        check_same(o);
        return FieldElement((std::uint64_t(value_) + o.value_) % modulus_, modulus_);
    }
    FieldElement operator-(FieldElement o) const {
        check_same(o);
        return FieldElement((std::uint64_t(value_) + modulus_ - o.value_) % modulus_, modulus_);
    }
    FieldElement operator*(FieldElement o) const {
        check_same(o);
        return FieldElement(std::uint64_t(value_) * o.value_ % modulus_, modulus_);
    }
    FieldElement operator-() const {
        require_set();
        return FieldElement(std::uint64_t(modulus_) - value_, modulus_);
    }

    bool operator==(const FieldElement&) const = default;

private:
    void require_set() const {
        if (modulus_ == 0) throw std::invalid_argument("FieldElement: unset element");
    }
    void check_same(const FieldElement& o) const {
        require_set();
        if (modulus_ != o.modulus_)
            throw std::invalid_argument("FieldElement: modulus mismatch");
    }

    std::uint32_t value_ = 0;
    std::uint32_t modulus_ = 0;
};

// Multiplicative inverse by extended Euclid. Zero has none.
inline FieldElement mod_inverse(FieldElement a) {
    if (a.modulus() == 0) throw std::invalid_argument("mod_inverse: unset element");
    if (a.value() == 0) throw std::invalid_argument("mod_inverse: zero has no inverse");
    std::int64_t r0 = a.modulus(), r1 = a.value();
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        s0 -= q * s1;
        std::swap(s0, s1);
    }
    // r0 == gcd == 1 because the modulus is prime
    const std::int64_t inv = ((s0 % a.modulus()) + a.modulus()) % a.modulus();
    return FieldElement(static_cast<std::uint64_t>(inv), a.modulus());
}

// Protocol-wide parameters: field order d (prime), threshold t, participant
// count n and the participants' public x-coordinates.
struct ProtocolParams {
    std::uint32_t d = 0;
    std::uint32_t t = 0;
    std::uint32_t n = 0;
    std::vector<std::uint32_t> xs;  // xs[i] is the coordinate of participant i+1

    ProtocolParams(std::uint32_t d_, std::uint32_t t_, std::uint32_t n_)
        : ProtocolParams(d_, t_, n_, default_coordinates(n_)) {}

    ProtocolParams(std::uint32_t d_, std::uint32_t t_, std::uint32_t n_,
                   std::vector<std::uint32_t> xs_)
        : d(d_), t(t_), n(n_), xs(std::move(xs_)) {
        if (!is_prime(d)) throw std::invalid_argument("ProtocolParams: d must be prime");
        if (t < 1 || t > n) throw std::invalid_argument("ProtocolParams: need 1 <= t <= n");
        if (n > d - 1)
            throw std::invalid_argument("ProtocolParams: need n <= d-1 distinct nonzero coordinates");
        if (xs.size() != n) throw std::invalid_argument("ProtocolParams: coordinate count != n");
        for (auto x : xs)
            if (x == 0 || x >= d)
                throw std::invalid_argument("ProtocolParams: coordinates must lie in [1, d-1]");
        auto sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("ProtocolParams: duplicate coordinate");
    }

    FieldElement element(std::uint64_t v) const { return FieldElement(v, d); }

    // participant indices are 1-based throughout the protocol layer
    FieldElement coordinate_of(std::uint32_t participant) const {
        if (participant < 1 || participant > n)
            throw std::out_of_range("ProtocolParams: participant index out of range");
        return FieldElement(xs[participant - 1], d);
    }

    static std::vector<std::uint32_t> default_coordinates(std::uint32_t n_) {
        std::vector<std::uint32_t> v(n_);
        std::iota(v.begin(), v.end(), 1u);
        return v;
    }
};

// Share-generating polynomial c_0 + c_1 x + ... + c_{t-1} x^{t-1}; c_0 is the
// shared value. Length is exactly t (trailing zeros permitted).
class Polynomial {
public:
    explicit Polynomial(std::vector<FieldElement> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("Polynomial: needs >= 1 coefficient");
        for (const auto& c : coeffs_)
            if (c.modulus() != coeffs_[0].modulus())
                throw std::invalid_argument("Polynomial: mixed moduli");
    }

    // Horner evaluation mod d.
    FieldElement evaluate(FieldElement x) const {
        FieldElement acc = coeffs_.back();
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    const std::vector<FieldElement>& coefficients() const { return coeffs_; }
    FieldElement constant_term() const { return coeffs_.front(); }
    std::size_t length() const { return coeffs_.size(); }

private:
    std::vector<FieldElement> coeffs_;
};

// Degree-(t-1) polynomial with the given constant term and uniformly random
// higher coefficients. Deterministic under a fixed rng stream.
inline Polynomial sample_polynomial(FieldElement secret, const ProtocolParams& params,
                                    SeededRng& rng) {
    if (secret.modulus() != params.d)
        throw std::invalid_argument("sample_polynomial: secret modulus != d");
    std::vector<FieldElement> coeffs;
    coeffs.reserve(params.t);
    coeffs.push_back(secret);
    for (std::uint32_t i = 1; i < params.t; ++i)
        coeffs.push_back(FieldElement(rng.uniform_below(params.d), params.d));
    return Polynomial(std::move(coeffs));
}

enum class ShareLabel { secret, hash };

// A participant's point (x, y) on one of the two dealer polynomials.
struct Share {
    FieldElement x;
    FieldElement y;
    ShareLabel label = ShareLabel::secret;

    Share() = default;
    Share(FieldElement x_, FieldElement y_, ShareLabel label_ = ShareLabel::secret)
        : x(x_), y(y_), label(label_) {
        if (x.value() == 0) throw std::invalid_argument("Share: x must be nonzero");
    }
};

// A share scaled by its Lagrange-at-zero weight; shadows of an active set
// sum to the shared value mod d.
struct Shadow {
    std::uint32_t owner = 0;  // participant index v
    FieldElement value;       // s_v
};

namespace detail {
inline void check_active_set(std::span<const FieldElement> active_x) {
    for (std::size_t i = 0; i < active_x.size(); ++i) {
        if (active_x[i].value() == 0)
            throw std::invalid_argument("active set: zero coordinate");
        for (std::size_t j = i + 1; j < active_x.size(); ++j)
            if (active_x[i] == active_x[j])
                throw std::invalid_argument("active set: duplicate coordinate (degenerate)");
    }
}
}  // namespace detail

// Lagrange basis weight at x = 0: prod_{j != v} x_j * (x_j - x_v)^-1.
inline FieldElement lagrange_weight_at_zero(FieldElement xv,
                                            std::span<const FieldElement> active_x) {
    detail::check_active_set(active_x);
    FieldElement w(1, xv.modulus());
    bool found = false;
    for (const auto& xj : active_x) {
        if (xj == xv) {
            found = true;
            continue;
        }
        w = w * xj * mod_inverse(xj - xv);
    }
    if (!found) throw std::invalid_argument("lagrange_weight_at_zero: xv not in active set");
    return w;
}

// s_v = y_v * prod_{j != v} x_j (x_j - x_v)^-1 mod d. The empty product at
// t = 1 makes the shadow the share value itself.
inline Shadow shadow(const Share& share, std::span<const FieldElement> active_x,
                     std::uint32_t owner = 0) {
    return Shadow{owner, share.y * lagrange_weight_at_zero(share.x, active_x)};
}

// f(0) by Lagrange interpolation over the first `threshold` shares.
inline FieldElement interpolate_at_zero(std::span<const Share> shares, std::size_t threshold) {
    if (threshold == 0) throw std::invalid_argument("interpolate_at_zero: threshold must be >= 1");
    if (shares.size() < threshold)
        throw std::invalid_argument("interpolate_at_zero: insufficient shares");
    std::vector<FieldElement> xs;
    xs.reserve(threshold);
    for (std::size_t i = 0; i < threshold; ++i) xs.push_back(shares[i].x);
    detail::check_active_set(xs);
    FieldElement acc(0, xs[0].modulus());
    for (std::size_t v = 0; v < threshold; ++v)
        acc = acc + shares[v].y * lagrange_weight_at_zero(xs[v], xs);
    return acc;
}

}  // namespace qtss
