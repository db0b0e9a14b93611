#include "irep/public_reputation.hpp"

#include <cassert>
#include <cmath>

namespace irep {

double public_wild_goodness(SocialNorm wild_norm, double e1, double e2) {
    check_action_error(e1);
    check_assessment_error(e2);
    const AssessmentVector a = assessment_vector(wild_norm, e2);
    const double num = (1.0 - e1) * a.bd + e1 * a.bc;
    const double den = 1.0 - ((1.0 - e1) * (a.gc - a.bd) + e1 * (a.gd - a.bc));
    // The bracket is a difference of two probabilities in [e2, 1-e2], so the
    // denominator is at least 2 e2.
    assert(den >= 2.0 * e2 - 1e-15);
    return num / den;
}

double public_allb_mutant_goodness(SocialNorm wild_norm, double e1, double e2) {
    const double p_ww = public_wild_goodness(wild_norm, e1, e2);
    const AssessmentVector a = assessment_vector(wild_norm, e2);
    const double coop = action_prob_unchecked(e2, e1);
    return p_ww * (coop * a.gc + (1.0 - coop) * a.gd) + (1.0 - p_ww) * (coop * a.bc + (1.0 - coop) * a.bd);
}

double public_balance_residual(SocialNorm wild_norm, double e1, double e2, double p_ww) {
    const AssessmentVector a = assessment_vector(wild_norm, e2);
    const double rhs =
        p_ww * ((1.0 - e1) * a.gc + e1 * a.gd) + (1.0 - p_ww) * (e1 * a.bc + (1.0 - e1) * a.bd);
    return p_ww - rhs;
}

PublicGoodness public_goodness(SocialNorm wild_norm, SocialNorm mutant_norm, double e1, double e2) {
    if (mutant_norm != norms::ALLB) {
        throw UnsupportedCase("public assessment is only solved for an ALLB mutant, got " + mutant_norm.label());
    }
    PublicGoodness g;
    g.ww = public_wild_goodness(wild_norm, e1, e2);
    g.mw = public_allb_mutant_goodness(wild_norm, e1, e2);
    g.wm = e2;
    g.mm = e2;
    return g;
}

char public_relation(double p_ww, double p_mw) noexcept {
    if (std::abs(p_ww - p_mw) <= 1e-12) return '=';
    return p_ww < p_mw ? '<' : '>';
}

InvasionOutcome public_allb_invasion(SocialNorm wild_norm, double e1, double e2, double b_over_c) {
    const PublicGoodness g = public_goodness(wild_norm, norms::ALLB, e1, e2);
    const GoodnessQuadruple q{BoundedValue::exact(g.ww), BoundedValue::exact(g.wm), BoundedValue::exact(g.mw),
                              BoundedValue::exact(g.mm)};
    return invasion_outcome(q, PayoffParams::from_ratio(b_over_c));
}

}  // namespace irep
