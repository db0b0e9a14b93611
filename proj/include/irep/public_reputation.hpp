// Equilibrium reputations when each norm shares one public opinion per
// individual, for an ALLB mutant entering a wild-type population.
#pragma once

#include "irep/ess.hpp"

namespace irep {

/// Raised for mutant norms other than ALLB, which the balance equations do
/// not cover.
class UnsupportedCase : public InputError {
public:
    using InputError::InputError;
};

struct PublicGoodness {
    double ww = 0.0;
    double mw = 0.0;
    double wm = 0.0;
    double mm = 0.0;
};

/// Fixed point of p = p[(1-e1)aGC + e1 aGD] + (1-p)[e1 aBC + (1-e1)aBD].
double public_wild_goodness(SocialNorm wild_norm, double e1, double e2);

/// Goodness of an ALLB donor in wild eyes; the donor cooperates with
/// probability h(e2) whatever the recipient's public standing.
double public_allb_mutant_goodness(SocialNorm wild_norm, double e1, double e2);

/// Left-hand side minus right-hand side of the wild balance equation.
double public_balance_residual(SocialNorm wild_norm, double e1, double e2, double p_ww);

/// Throws UnsupportedCase unless mutant_norm is ALLB.
PublicGoodness public_goodness(SocialNorm wild_norm, SocialNorm mutant_norm, double e1, double e2);

/// '=', '<' or '>' comparing pWW with pMW (ties within 1e-12).
char public_relation(double p_ww, double p_mw) noexcept;

InvasionOutcome public_allb_invasion(SocialNorm wild_norm, double e1, double e2, double b_over_c);

}  // namespace irep
