#pragma once

// Chi-square goodness-of-fit helpers for the sampling tests and the
// flaw demonstration.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qtss {

inline double chi_square_statistic(std::span<const std::uint64_t> observed,
                                   std::span<const double> expected_counts) {
    if (observed.size() != expected_counts.size() || observed.empty())
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_counts[i];
        if (e <= 0.0) throw std::invalid_argument("chi_square_statistic: nonpositive expected count");
        const double diff = static_cast<double>(observed[i]) - e;
        stat += diff * diff / e;
    }
    return stat;
}

// Upper critical value at significance 0.01. Published table through dof 30,
// Wilson-Hilferty approximation beyond.
inline double chi_square_critical_001(unsigned dof) {
    static const double table[] = {
        6.6348966010, 9.2103403720, 11.3448667301, 13.2767041359, 15.0862724694,
        16.8118938297, 18.4753069066, 20.0902350297, 21.6659943334, 23.2092511589,
        24.7249703113, 26.2169673055, 27.6882496104, 29.1412377406, 30.5779141668,
        31.9999269088, 33.4086636050, 34.8053057347, 36.1908691292, 37.5662347866,
        38.9321726835, 40.2893604375, 41.6383981188, 42.9798201393, 44.3141048962,
        45.6416826662, 46.9629421247, 48.2782357703, 49.5878844728, 50.8922268246};
    if (dof == 0) throw std::invalid_argument("chi_square_critical_001: dof must be positive");
    if (dof <= 30) return table[dof - 1];
    const double z = 2.3263478740408408;  // standard normal 0.99 quantile
    const double c = 2.0 / (9.0 * dof);
    const double base = 1.0 - c + z * std::sqrt(c);
    return dof * base * base * base;
}

// Test observed counts against the uniform distribution at significance 0.01.
inline bool chi_square_uniform_pass(std::span<const std::uint64_t> observed) {
    if (observed.size() < 2) throw std::invalid_argument("chi_square_uniform_pass: need >= 2 bins");
    std::uint64_t total = 0;
    for (auto c : observed) total += c;
    std::vector<double> expected(observed.size(),
                                 static_cast<double>(total) / static_cast<double>(observed.size()));
    return chi_square_statistic(observed, expected) <
           chi_square_critical_001(static_cast<unsigned>(observed.size() - 1));
}

}  // namespace qtss
