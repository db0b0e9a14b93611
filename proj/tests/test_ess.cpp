#include "doctest.h"

#include <random>

#include "irep/ess.hpp"

using namespace irep;

namespace {

const InvasionAnalyzer& analyzer01() {
    static const InvasionAnalyzer a(0.1, 0.0, 10000);
    return a;
}

BoundedValue exact(double v) { return BoundedValue::exact(v); }

}  // namespace

TEST_CASE("pair goodness special cases") {
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        const GoodnessQuadruple q = an.quadruple(w, norms::ALLB);
        CHECK(q.wm.estimate == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(q.mm.estimate == doctest::Approx(0.1).epsilon(1e-15));
        const GoodnessQuadruple self = an.quadruple(w, w);
        CHECK(self.ww.estimate == doctest::Approx(self.mw.estimate).epsilon(1e-12));
        CHECK(self.wm.estimate == doctest::Approx(self.mm.estimate).epsilon(1e-12));
        CHECK(an.quadruple(norms::SJ, w).ww.estimate == 0.5);
    }
    const GoodnessQuadruple direct = pair_goodness(norms::SS, norms::SC, 0.1, 0.0, 10000);
    const GoodnessQuadruple via = an.quadruple(norms::SS, norms::SC);
    CHECK(direct.mw.estimate == via.mw.estimate);
    CHECK(direct.wm.estimate == via.wm.estimate);
}

TEST_CASE("quadruple values stay in [e2, 1-e2]") {
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        for (SocialNorm m : all_norms()) {
            const GoodnessQuadruple q = an.quadruple(w, m);
            for (const BoundedValue* v : {&q.ww, &q.wm, &q.mw, &q.mm}) {
                CHECK(v->lower >= 0.1 - 1e-15);
                CHECK(v->upper <= 0.9 + 1e-15);
                CHECK(v->lower <= v->estimate);
                CHECK(v->estimate <= v->upper);
            }
        }
    }
}

TEST_CASE("payoffs") {
    const GoodnessQuadruple q{exact(0.8), exact(0.8), exact(0.3), exact(0.5)};
    const Payoffs p = payoffs(q, PayoffParams{3.0, 1.0});
    CHECK(p.wild.estimate == doctest::Approx(1.6));
    CHECK(p.mutant.estimate == doctest::Approx(0.1));
    CHECK(payoffs(q, PayoffParams{2.0, 2.0}).wild.estimate == 0.0);
    const GoodnessQuadruple same{exact(0.6), exact(0.6), exact(0.6), exact(0.6)};
    const Payoffs s = payoffs(same, PayoffParams{5.0, 2.0});
    CHECK(s.wild.estimate == doctest::Approx(s.mutant.estimate));
    CHECK(invasion_outcome(same, PayoffParams{5.0, 2.0}) == InvasionOutcome::Neutral);
    CHECK_THROWS_AS(PayoffParams::from_ratio(1.0), InputError);
    CHECK_THROWS_AS((PayoffParams{1.0, 2.0}.validate()), InputError);
    CHECK_THROWS_AS(invasion_outcome(q, PayoffParams{1.0, 1.0}), InputError);
}

TEST_CASE("interval sign") {
    CHECK(interval_sign({1e-3, 1e-4, 2e-3}) == 1);
    CHECK(interval_sign({-1e-3, -2e-3, -1e-4}) == -1);
    CHECK(interval_sign({0.0, -1e-12, 1e-12}) == 0);
    CHECK(interval_sign({1e-6, -1e-5, 1e-5}) == 1);
    CHECK(to_char(InvasionOutcome::Invades) == 'I');
    CHECK(to_char(InvasionOutcome::Resists) == 'R');
    CHECK(to_char(InvasionOutcome::Neutral) == 'N');
}

TEST_CASE("invasion regions from the figures") {
    const auto& an = analyzer01();
    const InvasionRegion ss_sc = an.region(norms::SS, norms::SC);
    CHECK(ss_sc.kind == InvasionRegion::Kind::Below);
    CHECK(ss_sc.threshold.estimate > 1.1);
    CHECK(ss_sc.threshold.estimate < 3.0);
    CHECK(ss_sc.threshold.lower <= ss_sc.threshold.estimate);
    CHECK(ss_sc.threshold.estimate <= ss_sc.threshold.upper);
    for (SocialNorm m : all_norms()) {
        if (m == norms::ALLB) continue;
        CHECK(an.region(norms::ALLB, m).kind == InvasionRegion::Kind::None);
    }
    CHECK(an.region(norms::ALLB, norms::ALLB).kind == InvasionRegion::Kind::Neutral);
    CHECK(an.region(norms::SJ, norms::ALLB).kind == InvasionRegion::Kind::All);
    CHECK(an.region(norms::SS, norms::ALLG).kind == InvasionRegion::Kind::Above);
    CHECK(ss_sc.describe().rfind("b/c<", 0) == 0);
}

TEST_CASE("regions agree with pointwise outcomes") {
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        for (SocialNorm m : all_norms()) {
            const GoodnessQuadruple q = an.quadruple(w, m);
            const InvasionRegion r = invasion_region(q);
            for (double bc : {1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 100.0}) {
                if ((r.kind == InvasionRegion::Kind::Above || r.kind == InvasionRegion::Kind::Below) &&
                    std::abs(bc - r.threshold.estimate) < 1e-6) {
                    continue;
                }
                const InvasionOutcome o = invasion_outcome(q, PayoffParams::from_ratio(bc));
                if (r.kind == InvasionRegion::Kind::Neutral) {
                    CHECK(o == InvasionOutcome::Neutral);
                } else {
                    CHECK_MESSAGE((o == InvasionOutcome::Invades) == r.invades_at(bc),
                                  w.label() << ' ' << m.label() << " b/c=" << bc);
                }
            }
        }
    }
}

TEST_CASE("invasibility matrix structure") {
    const auto& an = analyzer01();
    const SocialNorm degenerate[] = {SocialNorm(6), SocialNorm(7), SocialNorm(10), SocialNorm(11)};
    for (double bc : {1.1, 3.0, 20.0}) {
        const InvasibilityMatrix m = invasibility_matrix(an, bc);
        for (SocialNorm w : all_norms()) CHECK(m.at(w, w) == InvasionOutcome::Neutral);
        for (SocialNorm a : degenerate) {
            for (SocialNorm b : degenerate) CHECK(m.at(a, b) == InvasionOutcome::Neutral);
            // Swapping one member of the quadruple for another changes nothing.
            for (SocialNorm x : all_norms()) {
                if (x == a || x.id() == 6 || x.id() == 7 || x.id() == 10 || x.id() == 11) continue;
                CHECK(m.at(a, x) == m.at(degenerate[0], x));
                CHECK(m.at(x, a) == m.at(x, degenerate[0]));
            }
        }
        for (SocialNorm x : all_norms()) CHECK(m.at(norms::ALLB, x) != InvasionOutcome::Invades);
    }
}

TEST_CASE("matrix anchors and ESS sets") {
    const auto& an = analyzer01();
    const InvasibilityMatrix m3 = invasibility_matrix(an, 3.0);
    for (SocialNorm x : all_norms()) CHECK(m3.at(norms::SS, x) != InvasionOutcome::Invades);
    CHECK(m3.at(norms::SJ, norms::ALLB) == InvasionOutcome::Invades);
    CHECK(m3.at(norms::SJ, norms::SH) == InvasionOutcome::Invades);
    CHECK(invasibility_matrix(an, 1.1).at(norms::SS, norms::SC) == InvasionOutcome::Invades);
    CHECK(invasibility_matrix(an, 20.0).at(norms::SS, norms::ALLG) == InvasionOutcome::Invades);

    const auto ess3 = ess_set(an, 3.0);
    CHECK(std::find(ess3.begin(), ess3.end(), norms::SS) != ess3.end());
    CHECK(std::find(ess3.begin(), ess3.end(), norms::ALLB) != ess3.end());
    const auto ess20 = ess_set(an, 20.0);
    CHECK(std::find(ess20.begin(), ess20.end(), norms::SS) == ess20.end());
    CHECK(ess_set(0.1, 3.0, 0.0, 2000) == ess3);
}

TEST_CASE("scale invariance") {
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        for (SocialNorm m : all_norms()) {
            const GoodnessQuadruple q = an.quadruple(w, m);
            for (double k : {0.01, 1.0, 7.5, 1000.0}) {
                CHECK(invasion_outcome(q, PayoffParams{3.0 * k, 1.0 * k}) ==
                      invasion_outcome(q, PayoffParams{3.0, 1.0}));
            }
        }
    }
}

TEST_CASE("wild payoff increases with b/c") {
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        const GoodnessQuadruple q = an.quadruple(w, norms::ALLB);
        double prev = -1.0;
        for (double bc : {1.1, 1.5, 2.0, 4.0, 8.0}) {
            const double u = payoffs(q, PayoffParams::from_ratio(bc)).wild.estimate;
            CHECK(u > prev);
            prev = u;
        }
    }
}

TEST_CASE("ESS bounds and regions") {
    const auto& an = analyzer01();
    const EssBounds ss = ess_bounds(an, norms::SS);
    CHECK_FALSE(ss.empty);
    REQUIRE(ss.binding_lower.has_value());
    REQUIRE(ss.binding_upper.has_value());
    CHECK(*ss.binding_lower == norms::SC);
    CHECK(*ss.binding_upper == norms::ALLG);
    CHECK(ss.lower > 1.1);
    CHECK(ss.lower < 3.0);
    CHECK(ss.upper > 3.0);
    CHECK(ss.upper < 20.0);
    CHECK(ss.contains(3.0));

    const EssBounds sh = ess_bounds(an, norms::SH);
    CHECK_FALSE(sh.empty);
    CHECK(*sh.binding_lower == norms::ALLB);
    CHECK(*sh.binding_upper == norms::SC);

    const EssBounds sj = ess_bounds(an, norms::SJ);
    CHECK(sj.empty);

    const EssBounds allb = ess_bounds(an, norms::ALLB);
    CHECK_FALSE(allb.empty);
    CHECK(allb.lower == 1.0);
    CHECK(std::isinf(allb.upper));
}

TEST_CASE("ESS region grids") {
    const std::vector<double> e2{0.02, 0.05, 0.1};
    const std::vector<double> bc{1.5, 2.0, 3.0, 5.0};
    const EssRegion r = ess_region(norms::SS, e2, bc, 0.0, 2000, 1);
    const EssRegion rp = ess_region(norms::SS, e2, bc, 0.0, 2000, 3);
    CHECK(r.flags == rp.flags);
    REQUIRE(r.bounds.size() == 3);
    for (std::size_t i = 0; i < e2.size(); ++i) {
        CHECK(r.bounds[i].lower == rp.bounds[i].lower);
        for (std::size_t k = 0; k < bc.size(); ++k) CHECK(r.flags[i][k] == r.bounds[i].contains(bc[k]));
    }
    // Narrower toward larger e2.
    CHECK(r.bounds[0].upper / r.bounds[0].lower > r.bounds[2].upper / r.bounds[2].lower);

    const EssRegion sj = ess_region(norms::SJ, e2, bc, 0.0, 2000, 1);
    for (const auto& row : sj.flags) {
        for (bool f : row) CHECK_FALSE(f);
    }
    CHECK_THROWS_AS(ess_region(norms::SS, {}, bc, 0.0, 100, 1), InputError);
    CHECK_THROWS_AS(ess_region(norms::SS, {0.2, 0.1}, bc, 0.0, 100, 1), InputError);
}

TEST_CASE("cooperation rates") {
    CHECK(cooperation_rate(norms::SJ, 0.1, 0.0).estimate == 0.5);
    CHECK(cooperation_rate(norms::SJ, 0.1, 0.2).estimate == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cooperation_rate(norms::ALLG, 0.1, 0.0).estimate == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(cooperation_rate(norms::ALLB, 0.1, 0.0).estimate == doctest::Approx(0.1).epsilon(1e-15));
    const auto& an = analyzer01();
    for (SocialNorm w : all_norms()) {
        CHECK(an.cooperation_rate(w).estimate == doctest::Approx(an.quadruple(w, w).ww.estimate).epsilon(1e-13));
    }
}

TEST_CASE("jmax doubling proxy") {
    CHECK(jmax_doubling_delta(norms::SS, norms::SC, 0.1, 0.0, 400) < 1e-15);
    CHECK(jmax_doubling_delta(norms::SS, norms::SC, 0.01, 0.0, 100) > 0.0);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(check_grid({}, "x"), InputError);
    CHECK_THROWS_AS(check_grid({2.0, 1.0}, "x"), InputError);
    CHECK_NOTHROW(check_grid({1.0, 1.0}, "x"));
    CHECK_NOTHROW(check_grid({1.0}, "x"));
}
