// Truncated component masses of the equilibrium mixture and the a-priori
// truncation-error bounds that turn averages over them into intervals.
#pragma once

#include <string_view>

#include "irep/equilibrium.hpp"

namespace irep {

enum class MassRole { Wild, Mutant };

std::string_view to_string(MassRole role) noexcept;

/// Unnormalized masses Q(j), |j| <= jmax, with Q(+1) = 1 for wild-types.
/// Entries beyond jmax are implicitly zero.
struct TruncatedMasses {
    MassRole role = MassRole::Wild;
    LabeledSeries raw;

    [[nodiscard]] int jmax() const noexcept { return raw.jmax(); }
    [[nodiscard]] double total() const;
    [[nodiscard]] double normalized(int j) const { return raw.at(j) / total(); }
    [[nodiscard]] LabeledSeries normalized() const;
};

/// Sandwich estimate. Invariant: lower <= estimate <= upper.
struct BoundedValue {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    static BoundedValue exact(double v) noexcept { return {v, v, v}; }
    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

/// Tail bounds from truncating the label chains at jmax, kept as natural
/// logarithms because the prefactors underflow long before jmax = 1e4.
struct TruncationBounds {
    double log_per_term = 0.0;   // ln[(1/e2)(1-e2)^jmax]
    double log_component = 0.0;  // ln of the largest per-component mass error
    double log_total = 0.0;      // ln[k/e2^2 (1-e2)^jmax], k = 3 wild, 5 mutant

    [[nodiscard]] double per_term() const;
    [[nodiscard]] double component() const;
    [[nodiscard]] double total() const;
    [[nodiscard]] double log10_total() const;
};

TruncationBounds truncation_bounds(double e2, int jmax, MassRole role);

/// Wild-type masses from the wild norm's means of its own population:
///   Q(+1) = 1,  Q(+j) = h(mean(+(j-1))) Q(+(j-1)),
///   Q(-1) = sum_j (1 - h(mean(+j))) Q(+j),  Q(-j) = (1 - h(mean(-(j-1)))) Q(-(j-1)).
TruncatedMasses wild_masses(const MeanSequence& wild_means, double e1);

/// Mutant masses. A mutant donor acts on its own (mutant-norm) view of a
/// wild recipient, so the action probabilities use `mutant_means` while the
/// recipient distribution is the raw wild result.
TruncatedMasses mutant_masses(const TruncatedMasses& wild, const MeanSequence& mutant_means, double e1);

/// Masses at a finite mutant fraction. Recipients are wild-types with
/// probability 1 - delta, so the recipient labels follow the wild recursion
/// driven by the mixed cooperation probability (1-delta) h(mean_W) +
/// delta h(mean_M); each role's donors then act on that distribution with
/// their own norm's view. delta = 0 reproduces wild_masses/mutant_masses up
/// to normalization. The truncation bounds above are not claimed here.
struct FiniteDeltaMasses {
    TruncatedMasses recipients;
    TruncatedMasses wild;
    TruncatedMasses mutant;
};

FiniteDeltaMasses finite_delta_masses(const MeanSequence& wild_means, const MeanSequence& mutant_means,
                                      double delta, double e1);

/// sum Q(j) mean(j) / sum Q(j) with rigorous bounds for the truncated tails.
/// The interval is additionally clipped to [e2, 1 - e2], which contains every
/// component mean.
BoundedValue average_goodness(const TruncatedMasses& masses, const MeanSequence& means);

/// Bounds on one normalized mass q(j).
BoundedValue normalized_mass(const TruncatedMasses& masses, double e2, int j);

/// Sum of a positive sequence with Neumaier compensation.
double compensated_sum(const std::vector<double>& v);

}  // namespace irep
