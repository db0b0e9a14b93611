#include "irep/masses.hpp"

#include <algorithm>
#include <cmath>

namespace irep {

std::string_view to_string(MassRole role) noexcept {
    return role == MassRole::Wild ? "wild" : "mutant";
}

double compensated_sum(const std::vector<double>& v) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double TruncatedMasses::total() const {
    return compensated_sum(raw.plus()) + compensated_sum(raw.minus());
}

LabeledSeries TruncatedMasses::normalized() const {
    LabeledSeries out = raw;
    const double t = total();
    for (double& q : out.plus()) q /= t;
    for (double& q : out.minus()) q /= t;
    return out;
}

double TruncationBounds::per_term() const { return std::exp(log_per_term); }
double TruncationBounds::component() const { return std::exp(log_component); }
double TruncationBounds::total() const { return std::exp(log_total); }
double TruncationBounds::log10_total() const { return log_total / std::log(10.0); }

TruncationBounds truncation_bounds(double e2, int jmax, MassRole role) {
    check_assessment_error(e2);
    check_jmax(jmax);
    const double log_tail = static_cast<double>(jmax) * std::log1p(-e2);
    const double log_e2 = std::log(e2);
    TruncationBounds b;
    b.log_per_term = log_tail - log_e2;
    if (role == MassRole::Wild) {
        b.log_component = b.log_per_term;
        b.log_total = std::log(3.0) - 2.0 * log_e2 + log_tail;
    } else {
        // The mutant +1 mass collects tails from both wild branches.
        b.log_component = std::log(2.0) - 2.0 * log_e2 + log_tail;
        b.log_total = std::log(5.0) - 2.0 * log_e2 + log_tail;
    }
    return b;
}

namespace {

// Stationary label chain of recipients when a donor facing label j
// cooperates with probability coop_plus[j-1] or coop_minus[j-1].
TruncatedMasses chain_masses(const std::vector<double>& coop_plus, const std::vector<double>& coop_minus) {
    const auto n = coop_plus.size();
    TruncatedMasses out{MassRole::Wild, LabeledSeries(static_cast<int>(n))};
    auto& q_plus = out.raw.plus();
    auto& q_minus = out.raw.minus();

    q_plus[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) q_plus[k] = coop_plus[k - 1] * q_plus[k - 1];
    std::vector<double> inflow(n);
    for (std::size_t k = 0; k < n; ++k) inflow[k] = (1.0 - coop_plus[k]) * q_plus[k];
    q_minus[0] = compensated_sum(inflow);
    for (std::size_t k = 1; k < n; ++k) q_minus[k] = (1.0 - coop_minus[k - 1]) * q_minus[k - 1];
    return out;
}

std::vector<double> coop_probs(const std::vector<double>& means, double e1) {
    std::vector<double> out(means.size());
    for (std::size_t k = 0; k < means.size(); ++k) out[k] = action_prob_unchecked(means[k], e1);
    return out;
}

}  // namespace

TruncatedMasses wild_masses(const MeanSequence& wild_means, double e1) {
    check_action_error(e1);
    return chain_masses(coop_probs(wild_means.values.plus(), e1), coop_probs(wild_means.values.minus(), e1));
}

FiniteDeltaMasses finite_delta_masses(const MeanSequence& wild_means, const MeanSequence& mutant_means,
                                      double delta, double e1) {
    check_action_error(e1);
    if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("mutant fraction must lie in [0, 1]");
    if (wild_means.jmax() != mutant_means.jmax()) throw InputError("jmax mismatch between mean sequences");
    auto plus = coop_probs(wild_means.values.plus(), e1);
    auto minus = coop_probs(wild_means.values.minus(), e1);
    const auto m_plus = coop_probs(mutant_means.values.plus(), e1);
    const auto m_minus = coop_probs(mutant_means.values.minus(), e1);
    for (std::size_t k = 0; k < plus.size(); ++k) {
        plus[k] = (1.0 - delta) * plus[k] + delta * m_plus[k];
        minus[k] = (1.0 - delta) * minus[k] + delta * m_minus[k];
    }
    FiniteDeltaMasses out;
    out.recipients = chain_masses(plus, minus);
    out.wild = mutant_masses(out.recipients, wild_means, e1);
    out.wild.role = MassRole::Wild;
    out.mutant = mutant_masses(out.recipients, mutant_means, e1);
    return out;
}

TruncatedMasses mutant_masses(const TruncatedMasses& wild, const MeanSequence& mutant_means, double e1) {
    check_action_error(e1);
    if (wild.role != MassRole::Wild) throw InputError("mutant masses need wild-type masses as input");
    if (wild.jmax() != mutant_means.jmax()) throw InputError("jmax mismatch between masses and means");
    const int jmax = wild.jmax();
    TruncatedMasses out{MassRole::Mutant, LabeledSeries(jmax)};
    const auto& mu_plus = mutant_means.values.plus();
    const auto& mu_minus = mutant_means.values.minus();
    const auto& w_plus = wild.raw.plus();
    const auto& w_minus = wild.raw.minus();
    auto& q_plus = out.raw.plus();
    auto& q_minus = out.raw.minus();
    const auto n = static_cast<std::size_t>(jmax);

    std::vector<double> coop(n);
    std::vector<double> defect(n);
    for (std::size_t k = 0; k < n; ++k) {
        coop[k] = action_prob_unchecked(mu_minus[k], e1) * w_minus[k];
        defect[k] = (1.0 - action_prob_unchecked(mu_plus[k], e1)) * w_plus[k];
    }
    q_plus[0] = compensated_sum(coop);
    q_minus[0] = compensated_sum(defect);
    for (std::size_t k = 1; k < n; ++k) {
        q_plus[k] = action_prob_unchecked(mu_plus[k - 1], e1) * w_plus[k - 1];
        q_minus[k] = (1.0 - action_prob_unchecked(mu_minus[k - 1], e1)) * w_minus[k - 1];
    }
    return out;
}

BoundedValue average_goodness(const TruncatedMasses& masses, const MeanSequence& means) {
    if (masses.jmax() != means.jmax()) throw InputError("jmax mismatch between masses and means");
    const auto n = static_cast<std::size_t>(masses.jmax());
    std::vector<double> plus(n), minus(n);
    for (std::size_t k = 0; k < n; ++k) {
        plus[k] = masses.raw.plus()[k] * means.values.plus()[k];
        minus[k] = masses.raw.minus()[k] * means.values.minus()[k];
    }
    // Same summation order as total(), so a constant mean of 1/2 averages to
    // exactly 1/2.
    const double num = compensated_sum(plus) + compensated_sum(minus);
    const double den = masses.total();
    const double tail = truncation_bounds(means.e2, masses.jmax(), masses.role).total();

    const double e2 = means.e2;
    const double estimate = std::clamp(num / den, e2, 1.0 - e2);
    BoundedValue out;
    out.estimate = estimate;
    out.lower = std::max(num / (den + tail), e2);
    out.upper = std::min((num + tail) / den, 1.0 - e2);
    // Rounding can leave the estimate a few ulps outside a collapsed interval.
    out.lower = std::min(out.lower, estimate);
    out.upper = std::max(out.upper, estimate);
    return out;
}

BoundedValue normalized_mass(const TruncatedMasses& masses, double e2, int j) {
    const TruncationBounds b = truncation_bounds(e2, masses.jmax(), masses.role);
    const double q = masses.raw.at(j);
    const double den = masses.total();
    BoundedValue out;
    out.estimate = q / den;
    out.lower = std::min(q / (den + b.total()), out.estimate);
    out.upper = std::max((q + b.component()) / den, out.estimate);
    return out;
}

}  // namespace irep
