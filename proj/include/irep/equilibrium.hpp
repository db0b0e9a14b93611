// Component means and variances of the equilibrium goodness mixture.
//
// Components carry a nonzero label j. A donor lands in component +(j+1)
// after cooperating with a recipient in +j, in +1 after cooperating with any
// recipient in a negative component, and symmetrically for defection and
// negative labels. Labels are shared by all observer norms, so the
// two-dimensional component of a (W, M) pair is (mean_W(j), mean_M(j)).
#pragma once

#include <cstddef>
#include <vector>

#include "irep/norm.hpp"

namespace irep {

inline constexpr int kDefaultJmax = 10000;

/// Values indexed by labels 1..jmax and -1..-jmax.
class LabeledSeries {
public:
    LabeledSeries() = default;
    explicit LabeledSeries(int jmax);

    [[nodiscard]] int jmax() const noexcept { return static_cast<int>(plus_.size()); }
    /// Throws std::out_of_range when j == 0 or |j| > jmax.
    [[nodiscard]] double at(int j) const;
    double& at(int j);

    [[nodiscard]] const std::vector<double>& plus() const noexcept { return plus_; }
    [[nodiscard]] const std::vector<double>& minus() const noexcept { return minus_; }
    std::vector<double>& plus() noexcept { return plus_; }
    std::vector<double>& minus() noexcept { return minus_; }

private:
    std::vector<double> plus_;   // plus_[k] is label +(k+1)
    std::vector<double> minus_;  // minus_[k] is label -(k+1)
};

void check_jmax(int jmax);

struct MeanSequence {
    SocialNorm norm{1};
    double e2 = 0.0;
    LabeledSeries values;

    [[nodiscard]] int jmax() const noexcept { return values.jmax(); }
    [[nodiscard]] double at(int j) const { return values.at(j); }
};

/// Variances at per-observer scale (s^2 = e2(1-e2) units). The finite-
/// population variance of a component is per_observer(j) / effective_observers.
struct VarianceSequence {
    SocialNorm norm{1};
    double e2 = 0.0;
    double effective_observers = 1.0;
    LabeledSeries values;

    [[nodiscard]] int jmax() const noexcept { return values.jmax(); }
    [[nodiscard]] double per_observer(int j) const { return values.at(j); }
    [[nodiscard]] double at(int j) const { return values.at(j) / effective_observers; }
};

/// Means built by applying the C-map and D-map along the label chains.
MeanSequence mean_sequence(SocialNorm norm, double e2, int jmax);

/// Direct evaluation of the tabulated closed forms (S06, S10 and S11 share
/// the S07 solution).
double closed_form_mean(SocialNorm norm, double e2, int j);

VarianceSequence variance_sequence(SocialNorm norm, double e2, double effective_observers, int jmax);

/// True iff applying both maps to every mean (except the boundary labels
/// +-jmax, whose images leave the truncated set) lands within tol of some
/// mean in the sequence.
bool verify_set_consistency(const MeanSequence& means, const AffineMapPair& maps, double tol);

/// Largest violation of the labeling equations
///   mean(+1) = C(mean(-k)),  mean(+(k+1)) = C(mean(+k)),
///   mean(-1) = D(mean(+k)),  mean(-(k+1)) = D(mean(-k))
/// over all labels inside the truncation.
double labeling_residual(const MeanSequence& means, const AffineMapPair& maps);

}  // namespace irep
