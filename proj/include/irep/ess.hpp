// Payoffs of rare mutants, pairwise invasion, invasibility matrices and
// ESS regions, all in the rare-mutant limit.
#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "irep/masses.hpp"

namespace irep {

/// Average goodness of wild-types (W) and mutants (M) in the eyes of
/// wild-type and mutant observers: ww = wild in wild eyes, wm = wild in
/// mutant eyes, mw = mutant in wild eyes, mm = mutant in mutant eyes.
struct GoodnessQuadruple {
    BoundedValue ww;
    BoundedValue wm;
    BoundedValue mw;
    BoundedValue mm;
};

struct PayoffParams {
    double b = 3.0;
    double c = 1.0;

    static PayoffParams from_ratio(double b_over_c);
    /// Throws InputError unless b > c > 0.
    void validate() const;
    [[nodiscard]] double ratio() const noexcept { return b / c; }
};

struct Payoffs {
    BoundedValue wild;
    BoundedValue mutant;
};

enum class InvasionOutcome { Invades, Resists, Neutral };

/// 'I', 'R' or 'N'.
char to_char(InvasionOutcome o) noexcept;

/// Set of b/c > 1 on which the mutant invades.
struct InvasionRegion {
    enum class Kind { None, All, Above, Below, Neutral };

    Kind kind = Kind::None;
    /// Critical b/c for Above/Below (point estimate and interval).
    BoundedValue threshold{};

    [[nodiscard]] bool invades_at(double b_over_c) const noexcept;
    /// "none", "all", "neutral", "b/c>2.31...", "b/c<1.27...".
    [[nodiscard]] std::string describe() const;
};

/// Absolute tolerance under which a payoff difference whose rigorous
/// interval straddles zero is reported as neutral.
inline constexpr double kNeutralTolerance = 1e-9;

/// Sign of an interval-valued quantity: +1/-1 when the interval (widened by
/// a rounding margin) excludes zero, 0 when the estimate is within
/// kNeutralTolerance of zero, otherwise the sign of the estimate.
int interval_sign(const BoundedValue& v) noexcept;

/// Equilibrium quantities for one (e2, e1, jmax) cell: the 16 mean
/// sequences and the 16 wild-type mass vectors, from which any quadruple is
/// one mutant-mass pass away. Immutable after construction.
class InvasionAnalyzer {
public:
    InvasionAnalyzer(double e2, double e1, int jmax = kDefaultJmax);

    [[nodiscard]] double e2() const noexcept { return e2_; }
    [[nodiscard]] double e1() const noexcept { return e1_; }
    [[nodiscard]] int jmax() const noexcept { return jmax_; }

    [[nodiscard]] const MeanSequence& means(SocialNorm n) const;
    [[nodiscard]] const TruncatedMasses& wild(SocialNorm n) const;
    [[nodiscard]] TruncatedMasses mutant(SocialNorm wild_norm, SocialNorm mutant_norm) const;

    [[nodiscard]] GoodnessQuadruple quadruple(SocialNorm wild_norm, SocialNorm mutant_norm) const;
    [[nodiscard]] InvasionRegion region(SocialNorm wild_norm, SocialNorm mutant_norm) const;
    [[nodiscard]] BoundedValue cooperation_rate(SocialNorm wild_norm) const;

private:
    double e2_;
    double e1_;
    int jmax_;
    std::vector<MeanSequence> means_;
    std::vector<TruncatedMasses> wild_;
};

GoodnessQuadruple pair_goodness(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1,
                                int jmax = kDefaultJmax);

/// uW = (b - c) pWW, uM = b pMW - c pWM, with interval endpoints propagated.
/// Only b, c > 0 is required here; b = c is a valid degenerate game.
Payoffs payoffs(const GoodnessQuadruple& q, const PayoffParams& params);

/// Outcome of the mutant at fixed b/c: Invades iff uM > uW.
InvasionOutcome invasion_outcome(const GoodnessQuadruple& q, const PayoffParams& params);

/// Classifies b A > c B with A = pMW - pWW and B = pWM - pWW over b/c > 1.
InvasionRegion invasion_region(const GoodnessQuadruple& q);
InvasionRegion invasion_region(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1,
                               int jmax = kDefaultJmax);

/// cells[W-1][M-1] is the outcome of M invading W.
struct InvasibilityMatrix {
    double e2 = 0.0;
    double b_over_c = 0.0;
    std::array<std::array<InvasionOutcome, kNormCount>, kNormCount> cells{};

    [[nodiscard]] InvasionOutcome at(SocialNorm wild_norm, SocialNorm mutant_norm) const noexcept {
        return cells[static_cast<std::size_t>(wild_norm.id() - 1)][static_cast<std::size_t>(mutant_norm.id() - 1)];
    }
    /// Strict ESS: no Invades and no off-diagonal Neutral in the row.
    [[nodiscard]] bool is_ess(SocialNorm wild_norm) const noexcept;
};

InvasibilityMatrix invasibility_matrix(const InvasionAnalyzer& analyzer, double b_over_c);
InvasibilityMatrix invasibility_matrix(double e2, double b_over_c, double e1, int jmax = kDefaultJmax);

std::vector<SocialNorm> ess_set(const InvasionAnalyzer& analyzer, double b_over_c);
std::vector<SocialNorm> ess_set(double e2, double b_over_c, double e1, int jmax = kDefaultJmax);

/// b/c interval (lower, upper) on which a norm is a strict ESS at one e2,
/// together with the mutants that bind each end. `empty` when some mutant
/// invades at every b/c or is neutral. lower is 1 with no binding mutant
/// when nothing invades from below; upper is +inf likewise.
struct EssBounds {
    double e2 = 0.0;
    bool empty = false;
    double lower = 1.0;
    double upper = std::numeric_limits<double>::infinity();
    std::optional<SocialNorm> binding_lower;
    std::optional<SocialNorm> binding_upper;
    /// A mutant that invades for every b/c (or is neutral), when `empty`.
    std::optional<SocialNorm> blocking;

    [[nodiscard]] bool contains(double b_over_c) const noexcept {
        return !empty && lower < b_over_c && b_over_c < upper;
    }
};

EssBounds ess_bounds(const InvasionAnalyzer& analyzer, SocialNorm wild_norm);

struct EssRegion {
    SocialNorm norm{1};
    std::vector<double> e2_grid;
    std::vector<double> b_over_c_grid;
    /// flags[i][k] for e2_grid[i], b_over_c_grid[k], from the matrix rows.
    std::vector<std::vector<bool>> flags;
    /// One entry per e2 grid point, from the analytic thresholds.
    std::vector<EssBounds> bounds;
};

/// `workers` > 1 distributes e2 rows over threads; results are merged in
/// grid order.
EssRegion ess_region(SocialNorm wild_norm, const std::vector<double>& e2_grid,
                     const std::vector<double>& b_over_c_grid, double e1, int jmax = kDefaultJmax,
                     int workers = 1);

/// Fraction of donations that are cooperative in a monomorphic population:
/// sum_j q(j) h(mean(j)).
BoundedValue cooperation_rate(SocialNorm wild_norm, double e2, double e1, int jmax = kDefaultJmax);

/// Largest change in any quadruple estimate when jmax is doubled; an
/// empirical proxy for the truncation error next to the a-priori bound.
double jmax_doubling_delta(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1, int jmax);

void check_grid(const std::vector<double>& grid, const char* name);

}  // namespace irep
