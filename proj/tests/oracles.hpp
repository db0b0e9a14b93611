// Reference values written independently of the library: tabulated closed
// forms transcribed by hand, and brute-force recomputations.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace oracle {

// Table of the 16 norms as printed: assessment in the GC, BC, GD, BD cases.
inline const std::array<const char*, 16> kNormTable = {
    "GGGG", "GGGB", "GGBG", "GGBB", "GBGG", "GBGB", "GBBG", "GBBB",
    "BGGG", "BGGB", "BGBG", "BGBB", "BBGG", "BBGB", "BBBG", "BBBB",
};

// Closed-form component means. j > 0 is +j, j < 0 is -|j|.
inline double table_mean(int id, double e2, int j) {
    const double x = 1.0 - 2.0 * e2;
    const int k = std::abs(j);
    const double pos = std::pow(x, k + 1);
    const double alt = std::pow(-x, k + 1);
    const bool plus = j > 0;
    switch (id) {
        case 1: return 1.0 - e2;
        case 2: return plus ? 1.0 - e2 : (1.0 + pos) / 2.0;
        case 3: return plus ? 1.0 - e2 : (1.0 - alt) / 2.0;
        case 4: return plus ? 1.0 - e2 : e2;
        case 5: return plus ? (1.0 + pos) / 2.0 : 1.0 - e2;
        case 6:
        case 7:
        case 10:
        case 11: return 0.5;
        case 8: return plus ? (1.0 - pos) / 2.0 : e2;
        case 9: return plus ? (1.0 - alt) / 2.0 : 1.0 - e2;
        case 12: return plus ? (1.0 + alt) / 2.0 : e2;
        case 13: return plus ? e2 : 1.0 - e2;
        case 14: return plus ? e2 : (1.0 - pos) / 2.0;
        case 15: return plus ? e2 : (1.0 + alt) / 2.0;
        case 16: return e2;
        default: return std::nan("");
    }
}

// Closed-form component variances for a population of n observers.
inline double table_variance(int id, double e2, int j, double n) {
    const double x = 1.0 - 2.0 * e2;
    const int k = std::abs(j);
    const double constant = e2 * (1.0 - e2) / n;
    const double growing = (1.0 - std::pow(x, 2 * (k + 1))) / (4.0 * n);
    const bool plus = j > 0;
    switch (id) {
        case 1:
        case 4:
        case 13:
        case 16: return constant;
        case 2:
        case 3:
        case 14:
        case 15: return plus ? constant : growing;
        case 5:
        case 8:
        case 9:
        case 12: return plus ? growing : constant;
        case 6:
        case 7:
        case 10:
        case 11: return 1.0 / (4.0 * n);
        default: return std::nan("");
    }
}

// Public-assessment solutions against an ALLB mutant, as tabulated.
inline double table_public_ww(int id, double e1, double e2) {
    switch (id) {
        case 1: return 1 - e2;
        case 2: return (e1 + e2 - 2 * e1 * e2) / (e1 + 2 * e2 - 2 * e1 * e2);
        case 3: return (1 - e2) / (1 + e1 - 2 * e1 * e2);
        case 4: return 0.5;
        case 5: return (1 - e1 - e2 + 2 * e1 * e2) / (1 - e1 + 2 * e1 * e2);
        case 6: return 0.5;
        case 7: return 1 - e1 - e2 + 2 * e1 * e2;
        case 8: return e2 / (e1 + 2 * e2 - 2 * e1 * e2);
        case 9: return (1 - e2) / (2 - e1 - 2 * e2 + 2 * e1 * e2);
        case 10: return e1 + e2 - 2 * e1 * e2;
        case 11: return 0.5;
        case 12: return (e1 + e2 - 2 * e1 * e2) / (1 + e1 - 2 * e1 * e2);
        case 13: return 0.5;
        case 14: return e2 / (1 - e1 + 2 * e1 * e2);
        case 15: return (1 - e1 - e2 + 2 * e1 * e2) / (2 - e1 - 2 * e2 + 2 * e1 * e2);
        case 16: return e2;
        default: return std::nan("");
    }
}

inline double table_public_mw(int id, double e1, double e2) {
    const double e22 = e2 * e2;
    const double e23 = e22 * e2;
    const double sj = 2 * e1 + 3 * e2 - 2 * e1 * e1 - 12 * e1 * e2 - 6 * e22 + 12 * e1 * e1 * e2 + 24 * e1 * e22 +
                      4 * e23 - 24 * e1 * e1 * e22 - 16 * e1 * e23 + 16 * e1 * e1 * e23;
    switch (id) {
        case 1: return 1 - e2;
        case 2:
            return (e1 + e2 - 2 * e1 * e2 + e22 - 2 * e1 * e22 - 2 * e23 + 4 * e1 * e23) / (e1 + 2 * e2 - 2 * e1 * e2);
        case 3:
            return (1 - e2) * (2 * e1 + 3 * e2 - 6 * e1 * e2 - 2 * e22 + 4 * e1 * e22) / (1 + e1 - 2 * e1 * e2);
        case 4: return e1 + 2 * e2 - 4 * e1 * e2 - 2 * e22 + 4 * e1 * e22;
        case 5:
            return (1 - e1 - e2 + 2 * e1 * e2 - e22 + 2 * e1 * e22 + 2 * e23 - 4 * e1 * e23) / (1 - e1 + 2 * e1 * e2);
        case 6: return 0.5;
        case 7: return sj;
        case 8: return e2 * (2 * e1 + 3 * e2 - 6 * e1 * e2 - 2 * e22 + 4 * e1 * e22) / (e1 + 2 * e2 - 2 * e1 * e2);
        case 9:
            return (1 - e2) * (2 - 2 * e1 - 3 * e2 + 6 * e1 * e2 + 2 * e22 - 4 * e1 * e22) /
                   (2 - e1 - 2 * e2 + 2 * e1 * e2);
        case 10: return sj;
        case 11: return 0.5;
        case 12:
            return (e1 + 2 * e2 - 4 * e1 * e2 - 3 * e22 + 6 * e1 * e22 + 2 * e23 - 4 * e1 * e23) / (1 + e1 - 2 * e1 * e2);
        case 13: return 1 - e1 - 2 * e2 + 4 * e1 * e2 + 2 * e22 - 4 * e1 * e22;
        case 14: return e2 * (2 - 2 * e1 - 3 * e2 + 6 * e1 * e2 + 2 * e22 - 4 * e1 * e22) / (1 - e1 + 2 * e1 * e2);
        case 15:
            return (1 - e1 - 2 * e2 + 4 * e1 * e2 + 3 * e22 - 6 * e1 * e22 - 2 * e23 + 4 * e1 * e23) /
                   (2 - e1 - 2 * e2 + 2 * e1 * e2);
        case 16: return e2;
        default: return std::nan("");
    }
}

inline char table_public_relation(int id) {
    static const char rel[] = "=<>>>=>><<=<<<>=";
    return rel[id - 1];
}

// Power iteration of the label chain truncated at jmax: the stationary
// distribution of "recipient label -> donor's next label", with the donor
// cooperating with probability coop(label). Index k in [0, 2 jmax):
// k < jmax is +(k+1), otherwise -(k-jmax+1).
template <class Coop>
std::vector<double> stationary_labels(int jmax, Coop coop, int iterations) {
    const auto n = static_cast<std::size_t>(2 * jmax);
    std::vector<double> q(n, 1.0 / static_cast<double>(n));
    const auto label = [&](std::size_t k) {
        return k < static_cast<std::size_t>(jmax) ? static_cast<int>(k) + 1 : -(static_cast<int>(k) - jmax + 1);
    };
    const auto index = [&](int j) {
        return j > 0 ? static_cast<std::size_t>(j - 1) : static_cast<std::size_t>(jmax - j - 1);
    };
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> next(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const int j = label(k);
            const double c = coop(j);
            // cooperation: +j -> +(j+1), negative -> +1; defection mirrors it.
            const int after_c = j > 0 ? std::min(j + 1, jmax) : 1;
            const int after_d = j < 0 ? std::max(j - 1, -jmax) : -1;
            next[index(after_c)] += q[k] * c;
            next[index(after_d)] += q[k] * (1.0 - c);
        }
        q = next;
    }
    return q;
}

}  // namespace oracle
