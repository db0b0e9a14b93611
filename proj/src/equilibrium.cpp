#include "irep/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace irep {

LabeledSeries::LabeledSeries(int jmax) {
    check_jmax(jmax);
    plus_.assign(static_cast<std::size_t>(jmax), 0.0);
    minus_.assign(static_cast<std::size_t>(jmax), 0.0);
}

double LabeledSeries::at(int j) const {
    if (j == 0 || std::abs(j) > jmax()) {
        throw std::out_of_range("label " + std::to_string(j) + " outside +-" + std::to_string(jmax()));
    }
    return j > 0 ? plus_[static_cast<std::size_t>(j - 1)] : minus_[static_cast<std::size_t>(-j - 1)];
}

double& LabeledSeries::at(int j) {
    if (j == 0 || std::abs(j) > jmax()) {
        throw std::out_of_range("label " + std::to_string(j) + " outside +-" + std::to_string(jmax()));
    }
    return j > 0 ? plus_[static_cast<std::size_t>(j - 1)] : minus_[static_cast<std::size_t>(-j - 1)];
}

void check_jmax(int jmax) {
    if (jmax < 1) throw InputError("jmax must be >= 1, got " + std::to_string(jmax));
}

namespace {

// Fills `chain[0] = first` and `chain[k] = map(chain[k-1])`.
template <class Map>
void iterate_chain(std::vector<double>& chain, double first, Map map) {
    if (chain.empty()) return;
    chain[0] = first;
    for (std::size_t k = 1; k < chain.size(); ++k) chain[k] = map(chain[k - 1]);
}

}  // namespace

MeanSequence mean_sequence(SocialNorm norm, double e2, int jmax) {
    check_assessment_error(e2);
    MeanSequence out{norm, e2, LabeledSeries(jmax)};
    const AffineMapPair maps = reputation_maps(norm, e2);
    auto& plus = out.values.plus();
    auto& minus = out.values.minus();

    switch (classify_maps(maps)) {
        case MapClass::NeitherConstant: {
            // Both maps share the fixed point 1/2, the only position the
            // chains can occupy consistently. Dividing intercept by
            // (1 - slope) would land a few ulps away from it.
            std::fill(plus.begin(), plus.end(), 0.5);
            std::fill(minus.begin(), minus.end(), 0.5);
            break;
        }
        case MapClass::BothConstant:
            std::fill(plus.begin(), plus.end(), maps.c.intercept);
            std::fill(minus.begin(), minus.end(), maps.d.intercept);
            break;
        case MapClass::OnlyCConstant:
            std::fill(plus.begin(), plus.end(), maps.c.intercept);
            iterate_chain(minus, maps.d(maps.c.intercept), maps.d);
            break;
        case MapClass::OnlyDConstant:
            std::fill(minus.begin(), minus.end(), maps.d.intercept);
            iterate_chain(plus, maps.c(maps.d.intercept), maps.c);
            break;
    }
    return out;
}

double closed_form_mean(SocialNorm norm, double e2, int j) {
    if (j == 0) throw InputError("label 0 does not exist");
    check_assessment_error(e2);
    const int n = std::abs(j);
    const double x = 1.0 - 2.0 * e2;
    const double pos = std::pow(x, n + 1);        // (1-2e2)^(j+1)
    const double alt = std::pow(-x, n + 1);       // {-(1-2e2)}^(j+1)
    const double hi = 1.0 - e2;
    const double lo = e2;
    const bool up = j > 0;

    switch (norm.id()) {
        case 1: return hi;
        case 2: return up ? hi : (1.0 + pos) / 2.0;
        case 3: return up ? hi : (1.0 - alt) / 2.0;
        case 4: return up ? hi : lo;
        case 5: return up ? (1.0 + pos) / 2.0 : hi;
        case 6:
        case 7:
        case 10:
        case 11: return 0.5;
        case 8: return up ? (1.0 - pos) / 2.0 : lo;
        case 9: return up ? (1.0 - alt) / 2.0 : hi;
        case 12: return up ? (1.0 + alt) / 2.0 : lo;
        case 13: return up ? lo : hi;
        case 14: return up ? lo : (1.0 - pos) / 2.0;
        case 15: return up ? lo : (1.0 + alt) / 2.0;
        case 16: return lo;
        default: break;
    }
    throw InputError("unknown norm id " + std::to_string(norm.id()));
}

VarianceSequence variance_sequence(SocialNorm norm, double e2, double effective_observers, int jmax) {
    check_assessment_error(e2);
    if (!(effective_observers > 0.0)) {
        throw InputError("effective observer count must be positive");
    }
    VarianceSequence out{norm, e2, effective_observers, LabeledSeries(jmax)};
    const AffineMapPair maps = reputation_maps(norm, e2);
    const double s2 = e2 * (1.0 - e2);
    const double c2 = maps.c.slope * maps.c.slope;
    const double d2 = maps.d.slope * maps.d.slope;
    auto& plus = out.values.plus();
    auto& minus = out.values.minus();

    switch (classify_maps(maps)) {
        case MapClass::NeitherConstant: {
            // |slope| is 1-2e2 for both maps; every component sits at the
            // fixed point of v -> s2 + slope^2 v, which is exactly 1/4.
            std::fill(plus.begin(), plus.end(), 0.25);
            std::fill(minus.begin(), minus.end(), 0.25);
            break;
        }
        case MapClass::BothConstant:
            std::fill(plus.begin(), plus.end(), s2);
            std::fill(minus.begin(), minus.end(), s2);
            break;
        case MapClass::OnlyCConstant:
            std::fill(plus.begin(), plus.end(), s2);
            iterate_chain(minus, s2 + d2 * s2, [&](double v) { return s2 + d2 * v; });
            break;
        case MapClass::OnlyDConstant:
            std::fill(minus.begin(), minus.end(), s2);
            iterate_chain(plus, s2 + c2 * s2, [&](double v) { return s2 + c2 * v; });
            break;
    }
    return out;
}

bool verify_set_consistency(const MeanSequence& means, const AffineMapPair& maps, double tol) {
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    const auto& plus = means.values.plus();
    const auto& minus = means.values.minus();
    std::vector<double> sorted;
    sorted.reserve(plus.size() + minus.size());
    sorted.insert(sorted.end(), plus.begin(), plus.end());
    sorted.insert(sorted.end(), minus.begin(), minus.end());
    std::sort(sorted.begin(), sorted.end());

    const auto contains = [&](double v) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), v - tol);
        return it != sorted.end() && *it <= v + tol;
    };

    const std::size_t last = plus.size() - 1;
    for (std::size_t k = 0; k < plus.size(); ++k) {
        // C extends the positive chain and D the negative one; at the
        // boundary those images fall outside the truncated set.
        if (k != last && !contains(maps.c(plus[k]))) return false;
        if (!contains(maps.d(plus[k]))) return false;
        if (!contains(maps.c(minus[k]))) return false;
        if (k != last && !contains(maps.d(minus[k]))) return false;
    }
    return true;
}

double labeling_residual(const MeanSequence& means, const AffineMapPair& maps) {
    const auto& plus = means.values.plus();
    const auto& minus = means.values.minus();
    double worst = 0.0;
    const auto note = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    for (std::size_t k = 0; k < plus.size(); ++k) {
        note(plus[0], maps.c(minus[k]));
        note(minus[0], maps.d(plus[k]));
        if (k + 1 < plus.size()) {
            note(plus[k + 1], maps.c(plus[k]));
            note(minus[k + 1], maps.d(minus[k]));
        }
    }
    return worst;
}

}  // namespace irep
