#include "doctest.h"

#include "irep/abm.hpp"

using namespace irep;

namespace {

SimConfig small(SocialNorm w, SocialNorm m, double delta) {
    SimConfig c;
    c.n = 200;
    c.delta = delta;
    c.wild_norm = w;
    c.mutant_norm = m;
    c.e2 = 0.1;
    c.seed = 99;
    c.burn_in_units = 5;
    c.sample_units = 10;
    return c;
}

}  // namespace

TEST_CASE("mutant counts") {
    SimConfig c;
    c.n = 5000;
    c.delta = 0.1;
    CHECK(c.mutant_count() == 500);
    c.delta = 0.0;
    CHECK(c.mutant_count() == 0);
    CHECK(Simulation(small(norms::SS, norms::ALLB, 0.0)).mutant_count() == 0);
    const Simulation s(small(norms::SS, norms::ALLB, 0.1));
    CHECK(s.mutant_count() == 20);
    CHECK(s.is_mutant(19));
    CHECK_FALSE(s.is_mutant(20));
}

TEST_CASE("config validation") {
    SimConfig c = small(norms::SS, norms::ALLB, 0.1);
    c.n = 1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small(norms::SS, norms::ALLB, 1.5);
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small(norms::SS, norms::ALLB, 0.1);
    c.e2 = 0.0;
    CHECK_NOTHROW(c.validate());
    c.e2 = 0.6;
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("runs are deterministic per seed and replicate") {
    const SimConfig c = small(norms::SS, norms::SH, 0.2);
    const auto a = run(c);
    const auto b = run(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].from_wild == b[i].from_wild);
    }
    SimConfig other = c;
    other.replicate = 1;
    CHECK(run(other)[0].from_wild != a[0].from_wild);
    CHECK(a.front().t == 6);
    CHECK(a.back().t == 15);
}

TEST_CASE("ALLG without errors keeps everybody good") {
    SimConfig c = small(norms::ALLG, norms::ALLG, 0.0);
    c.e2 = 0.0;
    Simulation s(c);
    const ImageMatrix before = s.image();
    for (int i = 0; i < 5; ++i) s.step_unit();
    CHECK(s.image() == before);
    CHECK(s.rounds() == 5u * 200u);
}

TEST_CASE("Scoring without errors cooperates forever") {
    SimConfig c = small(norms::SC, norms::SC, 0.0);
    c.e2 = 0.0;
    Simulation s(c);
    for (int i = 0; i < 400; ++i) CHECK(s.step_round().cooperated);
    const GoodnessBatch g = s.snapshot(1);
    for (double v : g.from_wild) CHECK(v == 1.0);
}

TEST_CASE("a round rewrites only the donor row") {
    SimConfig c = small(norms::SJ, norms::SS, 0.3);
    c.e2 = 0.2;
    Simulation s(c);
    s.step_unit();
    for (int k = 0; k < 200; ++k) {
        const ImageMatrix before = s.image();
        const RoundRecord r = s.step_round();
        CHECK(r.donor != r.recipient);
        for (int t = 0; t < 200; ++t) {
            if (t == r.donor) continue;
            for (int o = 0; o < 200; o += 7) CHECK(s.image().get(t, o) == before.get(t, o));
        }
    }
}

TEST_CASE("sampling") {
    SimConfig c = small(norms::SS, norms::ALLB, 0.0);
    c.sample_units = 0;
    CHECK(run(c).empty());
    CHECK_THROWS_AS(empirical_statistics({}), InputError);
    const auto batches = run(small(norms::SS, norms::ALLB, 0.0));
    CHECK(std::isnan(batches[0].from_mutant[0]));
    const EmpiricalStats st = empirical_statistics(run(small(norms::SS, norms::ALLB, 0.1)));
    double sum = 0.0;
    for (double m : st.wild_histogram.mass) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    sum = 0.0;
    for (double m : st.mutant_histogram.mass) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("batch means and pooling") {
    const MeanEstimate flat = batch_mean_estimate(std::vector<double>(100, 0.25));
    CHECK(flat.mean == 0.25);
    CHECK(flat.std_error == 0.0);
    const MeanEstimate p = pool({{1.0, 0.3, 10}, {3.0, 0.4, 10}});
    CHECK(p.mean == 2.0);
    CHECK(p.std_error == doctest::Approx(0.25));
}

TEST_CASE("monomorphic simulations agree with the analytic goodness") {
    const InvasionAnalyzer an(0.1, 0.0, 10000);
    for (SocialNorm w : {norms::ALLG, norms::SS, norms::SH, norms::ALLB}) {
        SimConfig c;
        c.n = 500;
        c.wild_norm = w;
        c.mutant_norm = w;
        c.e2 = 0.1;
        c.seed = 11;
        c.burn_in_units = 50;
        c.sample_units = 300;
        const EmpiricalStats st = empirical_statistics(run(c));
        const double expected = an.quadruple(w, w).ww.estimate;
        CHECK_MESSAGE(std::abs(st.ww.mean - expected) <= 3.0 * st.ww.std_error + 1e-12,
                      w.label() << ' ' << st.ww.mean << " vs " << expected << " se " << st.ww.std_error);
    }
}

TEST_CASE("Stern Judging is close to one half") {
    // Every observer also judges itself, which adds an O(1/N) bias.
    SimConfig c;
    c.n = 500;
    c.wild_norm = norms::SJ;
    c.mutant_norm = norms::SJ;
    c.seed = 5;
    c.burn_in_units = 20;
    c.sample_units = 200;
    const EmpiricalStats st = empirical_statistics(run(c));
    CHECK(std::abs(st.ww.mean - 0.5) < 0.005);
}

TEST_CASE("analytic histogram") {
    const InvasionAnalyzer an(0.1, 0.0, 200);
    const TruncatedMasses& m = an.wild(norms::SS);
    const VarianceSequence v = variance_sequence(norms::SS, 0.1, 1000.0, 200);
    const Histogram2D h = analytic_histogram(m.raw, an.means(norms::SS), v, an.means(norms::SS), v);
    double sum = 0.0;
    for (double x : h.mass) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const auto modes = histogram_modes(h, 3);
    REQUIRE_FALSE(modes.empty());
    CHECK(modes[0].x == doctest::Approx(0.89).epsilon(0.03));
}

TEST_CASE("empirical boundary edge cases") {
    SimConfig c;
    c.n = 100;
    c.seed = 3;
    c.delta = 0.1;
    c.burn_in_units = 5;
    c.sample_units = 20;
    const EmpiricalBoundary b = estimate_ess_boundary(norms::ALLB, 0.1, {3.0}, c, {norms::SS, norms::ALLG});
    CHECK(b.ess_flags.size() == 1);
    CHECK(b.pairs.size() == 2);
    CHECK(std::isinf(b.thresholds.upper));
}
