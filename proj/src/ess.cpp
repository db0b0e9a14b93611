#include "irep/ess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "irep/parallel.hpp"

namespace irep {

namespace {

constexpr double kRoundingMargin = 1e-14;

std::size_t index_of(SocialNorm n) { return static_cast<std::size_t>(n.id() - 1); }

BoundedValue minus(const BoundedValue& a, const BoundedValue& b) {
    return {a.estimate - b.estimate, a.lower - b.upper, a.upper - b.lower};
}

// r * mw - wm - (r - 1) * ww, each quadruple entry used once so the interval
// is as tight as the inputs allow. The estimate is formed from differences
// to keep exact ties exact.
BoundedValue scaled_payoff_difference(const GoodnessQuadruple& q, double r) {
    const double a = q.mw.estimate - q.ww.estimate;
    const double b = q.wm.estimate - q.ww.estimate;
    BoundedValue d;
    d.estimate = r * a - b;
    d.lower = r * q.mw.lower - q.wm.upper - (r - 1.0) * q.ww.upper;
    d.upper = r * q.mw.upper - q.wm.lower - (r - 1.0) * q.ww.lower;
    d.lower = std::min(d.lower, d.estimate);
    d.upper = std::max(d.upper, d.estimate);
    return d;
}

struct QuadrupleRow {
    std::array<GoodnessQuadruple, kNormCount> q{};
};

QuadrupleRow row_quadruples(const InvasionAnalyzer& analyzer, SocialNorm wild_norm) {
    QuadrupleRow row;
    for (SocialNorm m : all_norms()) {
        if (m == wild_norm) continue;
        row.q[index_of(m)] = analyzer.quadruple(wild_norm, m);
    }
    return row;
}

bool row_is_ess(const QuadrupleRow& row, SocialNorm wild_norm, const PayoffParams& params) {
    for (SocialNorm m : all_norms()) {
        if (m == wild_norm) continue;
        if (invasion_outcome(row.q[index_of(m)], params) != InvasionOutcome::Resists) return false;
    }
    return true;
}

}  // namespace

void check_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw InputError(std::string(name) + " grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw InputError(std::string(name) + " grid is not sorted");
}

PayoffParams PayoffParams::from_ratio(double b_over_c) {
    PayoffParams p{b_over_c, 1.0};
    p.validate();
    return p;
}

void PayoffParams::validate() const {
    if (!(c > 0.0)) throw InputError("cost c must be positive");
    if (!(b > c)) throw InputError("benefit must exceed cost (b/c > 1)");
}

char to_char(InvasionOutcome o) noexcept {
    switch (o) {
        case InvasionOutcome::Invades: return 'I';
        case InvasionOutcome::Resists: return 'R';
        case InvasionOutcome::Neutral: return 'N';
    }
    return '?';
}

bool InvasionRegion::invades_at(double r) const noexcept {
    switch (kind) {
        case Kind::None: return false;
        case Kind::All: return true;
        case Kind::Neutral: return false;
        case Kind::Above: return r > threshold.estimate;
        case Kind::Below: return r < threshold.estimate;
    }
    return false;
}

std::string InvasionRegion::describe() const {
    char buf[64];
    switch (kind) {
        case Kind::None: return "none";
        case Kind::All: return "all";
        case Kind::Neutral: return "neutral";
        case Kind::Above: std::snprintf(buf, sizeof buf, "b/c>%.17g", threshold.estimate); return buf;
        case Kind::Below: std::snprintf(buf, sizeof buf, "b/c<%.17g", threshold.estimate); return buf;
    }
    return "?";
}

int interval_sign(const BoundedValue& v) noexcept {
    if (v.lower > kRoundingMargin) return 1;
    if (v.upper < -kRoundingMargin) return -1;
    if (std::abs(v.estimate) <= kNeutralTolerance) return 0;
    return v.estimate > 0.0 ? 1 : -1;
}

InvasionAnalyzer::InvasionAnalyzer(double e2, double e1, int jmax) : e2_(e2), e1_(e1), jmax_(jmax) {
    check_assessment_error(e2);
    check_action_error(e1);
    check_jmax(jmax);
    means_.reserve(kNormCount);
    wild_.reserve(kNormCount);
    for (SocialNorm n : all_norms()) {
        means_.push_back(mean_sequence(n, e2, jmax));
        wild_.push_back(wild_masses(means_.back(), e1));
    }
}

const MeanSequence& InvasionAnalyzer::means(SocialNorm n) const { return means_[index_of(n)]; }

const TruncatedMasses& InvasionAnalyzer::wild(SocialNorm n) const { return wild_[index_of(n)]; }

TruncatedMasses InvasionAnalyzer::mutant(SocialNorm wild_norm, SocialNorm mutant_norm) const {
    return mutant_masses(wild(wild_norm), means(mutant_norm), e1_);
}

GoodnessQuadruple InvasionAnalyzer::quadruple(SocialNorm wild_norm, SocialNorm mutant_norm) const {
    const TruncatedMasses& w = wild(wild_norm);
    const TruncatedMasses m = mutant(wild_norm, mutant_norm);
    const MeanSequence& mu_w = means(wild_norm);
    const MeanSequence& mu_m = means(mutant_norm);
    return {average_goodness(w, mu_w), average_goodness(w, mu_m), average_goodness(m, mu_w),
            average_goodness(m, mu_m)};
}

InvasionRegion InvasionAnalyzer::region(SocialNorm wild_norm, SocialNorm mutant_norm) const {
    if (wild_norm == mutant_norm) return {InvasionRegion::Kind::Neutral, {}};
    return invasion_region(quadruple(wild_norm, mutant_norm));
}

BoundedValue InvasionAnalyzer::cooperation_rate(SocialNorm wild_norm) const {
    MeanSequence coop = means(wild_norm);
    for (double& v : coop.values.plus()) v = action_prob_unchecked(v, e1_);
    for (double& v : coop.values.minus()) v = action_prob_unchecked(v, e1_);
    return average_goodness(wild(wild_norm), coop);
}

GoodnessQuadruple pair_goodness(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1, int jmax) {
    check_action_error(e1);
    const MeanSequence mu_w = mean_sequence(wild_norm, e2, jmax);
    const MeanSequence mu_m = mean_sequence(mutant_norm, e2, jmax);
    const TruncatedMasses w = wild_masses(mu_w, e1);
    const TruncatedMasses m = mutant_masses(w, mu_m, e1);
    return {average_goodness(w, mu_w), average_goodness(w, mu_m), average_goodness(m, mu_w),
            average_goodness(m, mu_m)};
}

Payoffs payoffs(const GoodnessQuadruple& q, const PayoffParams& params) {
    if (!(params.b > 0.0 && params.c > 0.0 && std::isfinite(params.b) && std::isfinite(params.c))) {
        throw InputError("payoffs need positive finite b and c");
    }
    const double b = params.b;
    const double c = params.c;
    Payoffs out;
    out.wild = {(b - c) * q.ww.estimate, (b - c) * q.ww.lower, (b - c) * q.ww.upper};
    out.mutant = {b * q.mw.estimate - c * q.wm.estimate, b * q.mw.lower - c * q.wm.upper,
                  b * q.mw.upper - c * q.wm.lower};
    return out;
}

InvasionOutcome invasion_outcome(const GoodnessQuadruple& q, const PayoffParams& params) {
    params.validate();
    // (uM - uW) / c keeps the outcome a function of b/c alone.
    switch (interval_sign(scaled_payoff_difference(q, params.ratio()))) {
        case 1: return InvasionOutcome::Invades;
        case -1: return InvasionOutcome::Resists;
        default: return InvasionOutcome::Neutral;
    }
}

InvasionRegion invasion_region(const GoodnessQuadruple& q) {
    using Kind = InvasionRegion::Kind;
    // Invasion iff r A > B with r = b/c > 1.
    const BoundedValue a = minus(q.mw, q.ww);
    const BoundedValue b = minus(q.wm, q.ww);
    const int sa = interval_sign(a);
    const int sb = interval_sign(b);

    if (sa == 0) {
        if (sb < 0) return {Kind::All, {}};
        if (sb > 0) return {Kind::None, {}};
        return {Kind::Neutral, {}};
    }

    BoundedValue theta;
    theta.estimate = b.estimate / a.estimate;
    if (a.lower > 0.0 || a.upper < 0.0) {
        const double c1 = b.lower / a.lower;
        const double c2 = b.lower / a.upper;
        const double c3 = b.upper / a.lower;
        const double c4 = b.upper / a.upper;
        theta.lower = std::min({c1, c2, c3, c4, theta.estimate});
        theta.upper = std::max({c1, c2, c3, c4, theta.estimate});
    } else {
        theta.lower = -std::numeric_limits<double>::infinity();
        theta.upper = std::numeric_limits<double>::infinity();
    }

    if (sa > 0) {
        if (theta.estimate <= 1.0) return {Kind::All, theta};
        return {Kind::Above, theta};
    }
    if (theta.estimate <= 1.0) return {Kind::None, theta};
    return {Kind::Below, theta};
}

InvasionRegion invasion_region(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1, int jmax) {
    if (wild_norm == mutant_norm) return {InvasionRegion::Kind::Neutral, {}};
    return invasion_region(pair_goodness(wild_norm, mutant_norm, e2, e1, jmax));
}

bool InvasibilityMatrix::is_ess(SocialNorm wild_norm) const noexcept {
    for (SocialNorm m : all_norms()) {
        if (m == wild_norm) continue;
        if (at(wild_norm, m) != InvasionOutcome::Resists) return false;
    }
    return true;
}

InvasibilityMatrix invasibility_matrix(const InvasionAnalyzer& analyzer, double b_over_c) {
    const PayoffParams params = PayoffParams::from_ratio(b_over_c);
    InvasibilityMatrix out;
    out.e2 = analyzer.e2();
    out.b_over_c = b_over_c;
    for (SocialNorm w : all_norms()) {
        for (SocialNorm m : all_norms()) {
            out.cells[index_of(w)][index_of(m)] =
                w == m ? InvasionOutcome::Neutral : invasion_outcome(analyzer.quadruple(w, m), params);
        }
    }
    return out;
}

InvasibilityMatrix invasibility_matrix(double e2, double b_over_c, double e1, int jmax) {
    PayoffParams::from_ratio(b_over_c);
    return invasibility_matrix(InvasionAnalyzer(e2, e1, jmax), b_over_c);
}

std::vector<SocialNorm> ess_set(const InvasionAnalyzer& analyzer, double b_over_c) {
    const PayoffParams params = PayoffParams::from_ratio(b_over_c);
    std::vector<SocialNorm> out;
    for (SocialNorm w : all_norms()) {
        if (row_is_ess(row_quadruples(analyzer, w), w, params)) out.push_back(w);
    }
    return out;
}

std::vector<SocialNorm> ess_set(double e2, double b_over_c, double e1, int jmax) {
    PayoffParams::from_ratio(b_over_c);
    return ess_set(InvasionAnalyzer(e2, e1, jmax), b_over_c);
}

EssBounds ess_bounds(const InvasionAnalyzer& analyzer, SocialNorm wild_norm) {
    using Kind = InvasionRegion::Kind;
    EssBounds out;
    out.e2 = analyzer.e2();
    for (SocialNorm m : all_norms()) {
        if (m == wild_norm) continue;
        const InvasionRegion r = analyzer.region(wild_norm, m);
        switch (r.kind) {
            case Kind::None: break;
            case Kind::All:
            case Kind::Neutral:
                out.empty = true;
                if (!out.blocking) out.blocking = m;
                break;
            case Kind::Above:
                if (r.threshold.estimate < out.upper) {
                    out.upper = r.threshold.estimate;
                    out.binding_upper = m;
                }
                break;
            case Kind::Below:
                if (r.threshold.estimate > out.lower) {
                    out.lower = r.threshold.estimate;
                    out.binding_lower = m;
                }
                break;
        }
    }
    if (out.lower >= out.upper) out.empty = true;
    return out;
}

EssRegion ess_region(SocialNorm wild_norm, const std::vector<double>& e2_grid,
                     const std::vector<double>& b_over_c_grid, double e1, int jmax, int workers) {
    check_grid(e2_grid, "e2");
    check_grid(b_over_c_grid, "b/c");
    for (double e2 : e2_grid) check_assessment_error(e2);
    std::vector<PayoffParams> params;
    params.reserve(b_over_c_grid.size());
    for (double r : b_over_c_grid) params.push_back(PayoffParams::from_ratio(r));

    EssRegion out;
    out.norm = wild_norm;
    out.e2_grid = e2_grid;
    out.b_over_c_grid = b_over_c_grid;
    out.flags.assign(e2_grid.size(), std::vector<bool>(b_over_c_grid.size(), false));
    out.bounds.resize(e2_grid.size());

    parallel_for(e2_grid.size(), workers, [&](std::size_t i) {
        const InvasionAnalyzer analyzer(e2_grid[i], e1, jmax);
        const QuadrupleRow row = row_quadruples(analyzer, wild_norm);
        std::vector<bool> flags(b_over_c_grid.size());
        for (std::size_t k = 0; k < params.size(); ++k) flags[k] = row_is_ess(row, wild_norm, params[k]);
        out.flags[i] = std::move(flags);
        out.bounds[i] = ess_bounds(analyzer, wild_norm);
    });
    return out;
}

BoundedValue cooperation_rate(SocialNorm wild_norm, double e2, double e1, int jmax) {
    check_action_error(e1);
    const MeanSequence mu = mean_sequence(wild_norm, e2, jmax);
    const TruncatedMasses w = wild_masses(mu, e1);
    MeanSequence coop = mu;
    for (double& v : coop.values.plus()) v = action_prob_unchecked(v, e1);
    for (double& v : coop.values.minus()) v = action_prob_unchecked(v, e1);
    return average_goodness(w, coop);
}

double jmax_doubling_delta(SocialNorm wild_norm, SocialNorm mutant_norm, double e2, double e1, int jmax) {
    const GoodnessQuadruple a = pair_goodness(wild_norm, mutant_norm, e2, e1, jmax);
    const GoodnessQuadruple b = pair_goodness(wild_norm, mutant_norm, e2, e1, 2 * jmax);
    return std::max({std::abs(a.ww.estimate - b.ww.estimate), std::abs(a.wm.estimate - b.wm.estimate),
                     std::abs(a.mw.estimate - b.mw.estimate), std::abs(a.mm.estimate - b.mm.estimate)});
}

}  // namespace irep
