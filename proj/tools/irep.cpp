// irep: command-line front end for the reputation-structure solvers and the
// image-matrix simulator. Every subcommand writes files under --out (default
// $IREP_OUTPUT_DIR, else the working directory) and lists them on stdout.
//
// Exit codes: 0 success, 1 computation error, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "irep/abm.hpp"
#include "irep/io.hpp"
#include "irep/parallel.hpp"
#include "irep/public_reputation.hpp"

#ifndef IREP_VERSION
#define IREP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace irep;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// "a,b,c", "lo:hi:n" (linear) or "lo:hi:n:log".
std::vector<double> parse_grid(const std::string& spec, const char* name) {
    std::vector<double> out;
    const auto fail = [&] { throw UsageError(std::string("malformed ") + name + " grid '" + spec + "'"); };
    const auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != s.size() || !std::isfinite(v)) fail();
        return v;
    };
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3 && parts.size() != 4) fail();
        const bool log_scale = parts.size() == 4;
        if (log_scale && parts[3] != "log") fail();
        const double lo = num(parts[0]);
        const double hi = num(parts[1]);
        const double count = num(parts[2]);
        if (count < 1 || count != std::floor(count) || count > 1e6) fail();
        const int n = static_cast<int>(count);
        if (log_scale && !(lo > 0.0 && hi > 0.0)) fail();
        for (int i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            const double v = log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            out.push_back(std::strtod(buf, nullptr));
        }
    } else {
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ',');) {
            if (!p.empty()) out.push_back(num(p));
        }
    }
    if (out.empty()) throw UsageError(std::string(name) + " grid is empty");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) throw UsageError(std::string(name) + " grid must be strictly increasing");
    }
    return out;
}

std::vector<SocialNorm> parse_norm_list(const std::string& spec) {
    std::vector<SocialNorm> out;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) {
        if (!p.empty()) out.push_back(norm_from_spec(p));
    }
    return out;
}

// Options shared by every subcommand.
struct Common {
    std::string out;
    int jmax = kDefaultJmax;
    int workers = 1;
    bool cache = false;
    std::string config;
};

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw UsageError("output directory '" + dir + "' is not writable");
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        write_file_atomic(p, content);
        std::cout << "wrote " << p.string() << '\n';
    }

    [[nodiscard]] const fs::path& dir() const noexcept { return dir_; }

private:
    fs::path dir_;
};

void check_workers(int workers) {
    if (workers < 1) throw UsageError("--workers must be at least 1");
}

void check_ratio(double r) {
    if (!(r > 1.0) || !std::isfinite(r)) throw UsageError("b/c must be greater than 1, got " + tag(r));
}

std::optional<QuadrupleCache> make_cache(const Common& c, const Output& out) {
    if (!c.cache) return std::nullopt;
    return QuadrupleCache(out.dir() / "cache");
}

// ---------------------------------------------------------------- analytic

void do_equilibrium(Output& out, SocialNorm w, SocialNorm m, double e2, double e1, int jmax, double n, double delta) {
    check_jmax(jmax);
    ErrorRates{e1, e2}.validate();
    const MeanSequence mw = mean_sequence(w, e2, jmax);
    const MeanSequence mm = mean_sequence(m, e2, jmax);
    const double wild_observers = n * (1.0 - delta);
    const double mutant_observers = n * delta;
    const VarianceSequence vw = variance_sequence(w, e2, wild_observers > 0 ? wild_observers : 1.0, jmax);
    const VarianceSequence vm = variance_sequence(m, e2, mutant_observers > 0 ? mutant_observers : 1.0, jmax);
    const TruncatedMasses qw = wild_masses(mw, e1);
    const TruncatedMasses qm = mutant_masses(qw, mm, e1);

    const std::string stem = "equilibrium_" + w.label() + "_" + m.label();
    out.write(stem + "_mixture.csv", mixture_csv(qw, qm, mw, mm));
    out.write("means_" + w.label() + ".csv", means_csv(mw, vw));
    if (m != w) out.write("means_" + m.label() + ".csv", means_csv(mm, vm));
    out.write(stem + "_density_W.csv", histogram_csv(analytic_histogram(qw.raw, mw, vw, mm, vm)));
    out.write(stem + "_density_M.csv", histogram_csv(analytic_histogram(qm.raw, mw, vw, mm, vm)));

    // Largest components, for a quick look at the peak labels.
    for (const TruncatedMasses* q : {&qw, &qm}) {
        std::vector<std::pair<double, int>> ranked;
        for (int j = -q->jmax(); j <= q->jmax(); ++j) {
            if (j != 0) ranked.emplace_back(q->normalized(j), j);
        }
        std::partial_sort(ranked.begin(), ranked.begin() + std::min<std::ptrdiff_t>(5, ranked.size()), ranked.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        std::cout << to_string(q->role) << " top components:";
        for (std::size_t k = 0; k < std::min<std::size_t>(5, ranked.size()); ++k) {
            char buf[96];
            std::snprintf(buf, sizeof buf, " j=%+d q=%.4f (%.4f, %.4f)", ranked[k].second, ranked[k].first,
                          mw.at(ranked[k].second), mm.at(ranked[k].second));
            std::cout << buf;
        }
        std::cout << '\n';
    }
}

InvasibilityMatrix cached_matrix(const QuadrupleCache& cache, double e2, double r, double e1, int jmax) {
    InvasibilityMatrix m;
    m.e2 = e2;
    m.b_over_c = r;
    const PayoffParams params = PayoffParams::from_ratio(r);
    for (SocialNorm w : all_norms()) {
        for (SocialNorm x : all_norms()) {
            m.cells[static_cast<std::size_t>(w.id() - 1)][static_cast<std::size_t>(x.id() - 1)] =
                invasion_outcome(cache.get(w, x, e2, e1, jmax), params);
        }
    }
    return m;
}

void do_matrix(Output& out, const Common& c, double e2, const std::vector<double>& ratios, double e1) {
    check_jmax(c.jmax);
    ErrorRates{e1, e2}.validate();
    for (double r : ratios) check_ratio(r);
    const auto cache = make_cache(c, out);
    std::optional<InvasionAnalyzer> analyzer;
    if (!cache) analyzer.emplace(e2, e1, c.jmax);
    for (double r : ratios) {
        const InvasibilityMatrix m = cache ? cached_matrix(*cache, e2, r, e1, c.jmax) : invasibility_matrix(*analyzer, r);
        out.write("matrix_e2_" + tag(e2) + "_bc_" + tag(r) + ".csv", matrix_csv(m));
        std::cout << "ESS at b/c=" << tag(r) << ":";
        for (SocialNorm w : all_norms()) {
            if (m.is_ess(w)) std::cout << ' ' << w.label();
        }
        std::cout << '\n';
    }
}

std::string kind_name(InvasionRegion::Kind k) {
    switch (k) {
        case InvasionRegion::Kind::None: return "none";
        case InvasionRegion::Kind::All: return "all";
        case InvasionRegion::Kind::Above: return "above";
        case InvasionRegion::Kind::Below: return "below";
        case InvasionRegion::Kind::Neutral: return "neutral";
    }
    return "?";
}

json bounded_json(const BoundedValue& v) {
    return json{{"estimate", v.estimate}, {"lower", v.lower}, {"upper", v.upper}};
}

void do_invade(Output& out, const Common& c, SocialNorm w, SocialNorm m, double e2, double e1,
               const std::vector<double>& ratios) {
    check_jmax(c.jmax);
    ErrorRates{e1, e2}.validate();
    for (double r : ratios) check_ratio(r);
    const auto cache = make_cache(c, out);
    const GoodnessQuadruple q = cache ? cache->get(w, m, e2, e1, c.jmax) : pair_goodness(w, m, e2, e1, c.jmax);
    const InvasionRegion region = invasion_region(q);

    json j;
    j["wild"] = w.label();
    j["mutant"] = m.label();
    j["e2"] = e2;
    j["e1"] = e1;
    j["jmax"] = c.jmax;
    j["goodness"] = json{{"ww", bounded_json(q.ww)}, {"wm", bounded_json(q.wm)}, {"mw", bounded_json(q.mw)},
                         {"mm", bounded_json(q.mm)}};
    j["region"] = json{{"kind", kind_name(region.kind)}, {"threshold", bounded_json(region.threshold)}};
    json outcomes = json::array();
    for (double r : ratios) {
        outcomes.push_back(json{{"b_over_c", r}, {"outcome", std::string(1, to_char(invasion_outcome(q, PayoffParams::from_ratio(r))))}});
    }
    j["outcomes"] = outcomes;
    out.write("invade_" + w.label() + "_" + m.label() + "_e2_" + tag(e2) + ".json", j.dump(2) + "\n");
    std::cout << m.label() << " invades " << w.label() << ": " << region.describe() << '\n';
}

void do_ess_region(Output& out, const Common& c, SocialNorm w, const std::vector<double>& e2_grid,
                   const std::vector<double>& bc_grid, double e1) {
    check_jmax(c.jmax);
    for (double r : bc_grid) check_ratio(r);
    for (double e2 : e2_grid) ErrorRates{e1, e2}.validate();
    const EssRegion region = ess_region(w, e2_grid, bc_grid, e1, c.jmax, c.workers);
    out.write("region_" + w.label() + ".csv", region_csv(region));
    out.write("boundary_" + w.label() + ".csv", boundary_csv(region));
    out.write("region_" + w.label() + ".svg", region_svg(region));
}

void do_coop_rate(Output& out, const Common& c, const std::vector<SocialNorm>& norms_list,
                  const std::vector<double>& e2_grid, double e1) {
    check_jmax(c.jmax);
    std::ostringstream csv;
    csv << "norm,e2,rate,lower,upper\n";
    for (SocialNorm n : norms_list) {
        for (double e2 : e2_grid) {
            ErrorRates{e1, e2}.validate();
            const BoundedValue v = cooperation_rate(n, e2, e1, c.jmax);
            csv << n.label() << ',' << format_real(e2) << ',' << format_real(v.estimate) << ','
                << format_real(v.lower) << ',' << format_real(v.upper) << '\n';
        }
    }
    out.write("coop_rate.csv", csv.str());
}

void do_public(Output& out, double e1, double e2) {
    ErrorRates{e1, e2}.validate();
    out.write("public_e1_" + tag(e1) + "_e2_" + tag(e2) + ".csv", public_csv(e1, e2));
}

// --------------------------------------------------------------------- abm

struct AbmOptions {
    std::string mode = "mixture";
    int n = 1000;
    double delta = 0.1;
    std::string wild = "S09";
    std::string mutant = "S03";
    double e1 = 0.0;
    double e2 = 0.1;
    std::optional<std::uint64_t> seed;
    int replicates = 1;
    int burn_in = 50;
    int sample_units = 500;
    double bin_width = 0.02;
    int sample_stride = 0;
    std::string name = "abm";
    std::string e2_grid = "0.1";
    std::string bc_grid = "1.05:30:24:log";
    std::string mutants;
};

json abm_config_json(const AbmOptions& a, const Common& c) {
    json j;
    j["mode"] = a.mode;
    j["n"] = a.n;
    j["delta"] = a.delta;
    j["wild"] = a.wild;
    j["mutant"] = a.mutant;
    j["e1"] = a.e1;
    j["e2"] = a.e2;
    j["seed"] = *a.seed;
    j["replicates"] = a.replicates;
    j["burn-in"] = a.burn_in;
    j["sample-units"] = a.sample_units;
    j["bin-width"] = a.bin_width;
    j["sample-stride"] = a.sample_stride;
    j["name"] = a.name;
    if (a.mode == "boundary") {
        j["e2-grid"] = a.e2_grid;
        j["bc-grid"] = a.bc_grid;
        j["mutants"] = a.mutants;
    }
    j["jmax"] = c.jmax;
    j["workers"] = c.workers;
    return j;
}

SimConfig sim_config(const AbmOptions& a) {
    SimConfig cfg;
    cfg.n = a.n;
    cfg.delta = a.delta;
    cfg.wild_norm = norm_from_spec(a.wild);
    cfg.mutant_norm = norm_from_spec(a.mutant);
    cfg.e1 = a.e1;
    cfg.e2 = a.e2;
    cfg.seed = *a.seed;
    cfg.burn_in_units = a.burn_in;
    cfg.sample_units = a.sample_units;
    return cfg;
}

json estimate_json(const MeanEstimate& m) {
    return json{{"mean", m.mean}, {"std_error", m.std_error}, {"batches", m.count}};
}

void abm_mixture(Output& out, const Common& c, const AbmOptions& a, json& meta) {
    if (a.replicates < 1) throw UsageError("replicates must be at least 1");
    if (a.sample_units < 1) throw UsageError("sample-units must be at least 1 for summary statistics");
    if (a.sample_stride < 0) throw UsageError("sample-stride must be nonnegative");
    const SimConfig base = sim_config(a);
    base.validate();

    std::vector<EmpiricalStats> stats(static_cast<std::size_t>(a.replicates));
    std::vector<std::string> samples(static_cast<std::size_t>(a.replicates));
    parallel_for(stats.size(), c.workers, [&](std::size_t r) {
        SimConfig cfg = base;
        cfg.replicate = r;
        std::vector<GoodnessBatch> batches;
        std::string rows = a.sample_stride > 0 ? samples_csv_header() : std::string{};
        run(cfg, [&](const GoodnessBatch& b) {
            if (a.sample_stride > 0) rows += samples_csv_rows(b, a.sample_stride);
            batches.push_back(b);
        });
        stats[r] = empirical_statistics(batches, a.bin_width);
        samples[r] = std::move(rows);
    });

    std::vector<MeanEstimate> ww, wm, mw, mm;
    Histogram2D hw = stats[0].wild_histogram;
    Histogram2D hm = stats[0].mutant_histogram;
    for (std::size_t r = 0; r < stats.size(); ++r) {
        ww.push_back(stats[r].ww);
        wm.push_back(stats[r].wm);
        mw.push_back(stats[r].mw);
        mm.push_back(stats[r].mm);
        if (r == 0) continue;
        for (std::size_t k = 0; k < hw.mass.size(); ++k) {
            hw.mass[k] += stats[r].wild_histogram.mass[k];
            hm.mass[k] += stats[r].mutant_histogram.mass[k];
        }
    }
    for (std::size_t k = 0; k < hw.mass.size(); ++k) {
        hw.mass[k] /= static_cast<double>(stats.size());
        hm.mass[k] /= static_cast<double>(stats.size());
    }

    for (std::size_t r = 0; r < samples.size(); ++r) {
        if (a.sample_stride > 0) out.write(a.name + "_rep" + std::to_string(r) + "_samples.csv", samples[r]);
    }
    out.write(a.name + "_histogram_W.csv", histogram_csv(hw));
    if (base.mutant_count() > 0) out.write(a.name + "_histogram_M.csv", histogram_csv(hm));

    // Analytic references: the rare-mutant limit and the same label dynamics
    // at the simulated mutant fraction.
    const GoodnessQuadruple q = pair_goodness(base.wild_norm, base.mutant_norm, base.e2, base.e1, c.jmax);
    const MeanSequence mu_w = mean_sequence(base.wild_norm, base.e2, c.jmax);
    const MeanSequence mu_m = mean_sequence(base.mutant_norm, base.e2, c.jmax);
    const FiniteDeltaMasses fd = finite_delta_masses(mu_w, mu_m, base.delta, base.e1);
    std::ostringstream csv;
    csv << "quantity,empirical,std_error,analytic,analytic_finite_delta\n";
    struct Row {
        const char* label;
        MeanEstimate empirical;
        double analytic;
        double finite;
    };
    const Row rows[] = {
        {"pWW", pool(ww), q.ww.estimate, average_goodness(fd.wild, mu_w).estimate},
        {"pWM", pool(wm), q.wm.estimate, average_goodness(fd.wild, mu_m).estimate},
        {"pMW", pool(mw), q.mw.estimate, average_goodness(fd.mutant, mu_w).estimate},
        {"pMM", pool(mm), q.mm.estimate, average_goodness(fd.mutant, mu_m).estimate},
    };
    json summary;
    for (const Row& r : rows) {
        csv << r.label << ',' << format_real(r.empirical.mean) << ',' << format_real(r.empirical.std_error) << ','
            << format_real(r.analytic) << ',' << format_real(r.finite) << '\n';
        summary[r.label] = estimate_json(r.empirical);
    }
    out.write(a.name + "_summary.csv", csv.str());
    meta["summary"] = summary;
}

void abm_boundary(Output& out, const Common& c, const AbmOptions& a, json& meta) {
    const std::vector<double> e2_grid = parse_grid(a.e2_grid, "e2");
    const std::vector<double> bc_grid = parse_grid(a.bc_grid, "b/c");
    for (double r : bc_grid) check_ratio(r);
    const SocialNorm w = norm_from_spec(a.wild);
    const std::vector<SocialNorm> mutants = parse_norm_list(a.mutants);
    SimConfig base = sim_config(a);
    base.validate();

    std::ostringstream bcsv;
    bcsv << "e2,grid_lower,grid_upper,threshold_lower,threshold_upper,binding_mutant_lower,binding_mutant_upper,"
            "analytic_lower,analytic_upper\n";
    std::ostringstream fcsv;
    fcsv << "e2,b_over_c,ess_flag\n";
    const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("nan"); };
    const auto lbl = [](const std::optional<SocialNorm>& n) { return n ? n->label() : std::string("-"); };
    for (std::size_t i = 0; i < e2_grid.size(); ++i) {
        const double e2 = e2_grid[i];
        ErrorRates{a.e1, e2}.validate();
        SimConfig cfg = base;
        cfg.seed = base.seed + i;
        const EmpiricalBoundary eb = estimate_ess_boundary(w, e2, bc_grid, cfg, mutants, c.workers);
        const EssBounds an = ess_bounds(InvasionAnalyzer(e2, a.e1, c.jmax), w);
        const EssBounds& th = eb.thresholds;
        bcsv << format_real(e2) << ',' << opt(eb.grid_lower) << ',' << opt(eb.grid_upper) << ','
             << (th.empty ? "nan" : format_real(th.lower)) << ',' << (th.empty ? "nan" : format_real(th.upper)) << ','
             << lbl(th.binding_lower) << ',' << lbl(th.binding_upper) << ','
             << (an.empty ? "nan" : format_real(an.lower)) << ',' << (an.empty ? "nan" : format_real(an.upper))
             << '\n';
        for (std::size_t k = 0; k < bc_grid.size(); ++k) {
            fcsv << format_real(e2) << ',' << format_real(bc_grid[k]) << ',' << (eb.ess_flags[k] ? 1 : 0) << '\n';
        }
    }
    out.write(a.name + "_boundary.csv", bcsv.str());
    out.write(a.name + "_flags.csv", fcsv.str());
    meta["seeds_per_e2"] = "seed + index into e2-grid; replicate = mutant norm id";
}

void do_abm(Output& out, const Common& c, const AbmOptions& a) {
    if (!a.seed) throw UsageError("abm requires a seed (--seed or $.seed in the config)");
    if (a.mode != "mixture" && a.mode != "boundary") throw UsageError("$.mode must be 'mixture' or 'boundary'");
    json meta;
    meta["config"] = abm_config_json(a, c);
    meta["seed"] = *a.seed;
    meta["generator"] = kGeneratorName;
    meta["version"] = IREP_VERSION;
    if (a.mode == "mixture") {
        abm_mixture(out, c, a, meta);
    } else {
        abm_boundary(out, c, a, meta);
    }
    out.write(a.name + "_metadata.json", meta.dump(2) + "\n");
}

// --------------------------------------------------------------- reproduce

void reproduce(Output& out, const Common& c, const std::string& figure, std::optional<std::uint64_t> seed) {
    if (figure == "2B") {
        do_equilibrium(out, norm_from_spec("S09"), norm_from_spec("S03"), 0.1, 0.0, 100, 1000, 0.1);
        AbmOptions a;
        a.name = "fig2b_abm";
        a.seed = seed.value_or(2024);
        a.replicates = 3;
        do_abm(out, c, a);
    } else if (figure == "4A") {
        do_matrix(out, c, 0.1, {1.1, 3.0, 20.0}, 0.0);
    } else if (figure == "4B") {
        const auto e2 = parse_grid("0.01:0.3:30", "e2");
        const auto bc = parse_grid("1.05:30:40:log", "b/c");
        do_ess_region(out, c, norm_from_spec("S03"), e2, bc, 0.0);
        do_ess_region(out, c, norm_from_spec("S08"), e2, bc, 0.0);
    } else if (figure == "4C") {
        do_ess_region(out, c, norm_from_spec("S03"), parse_grid("0.05:0.25:5", "e2"),
                      parse_grid("1.05:30:40:log", "b/c"), 0.0);
        AbmOptions a;
        a.mode = "boundary";
        a.name = "fig4c_abm";
        a.wild = "S03";
        a.n = 2000;
        a.delta = 0.05;
        a.seed = seed.value_or(4303);
        a.sample_units = 200;
        a.e2_grid = "0.05:0.25:5";
        a.bc_grid = "1.05:30:24:log";
        do_abm(out, c, a);
    } else if (figure == "S1") {
        const double e2 = 0.1;
        const double n = 2000;
        std::ostringstream maps;
        maps << "norm,c_slope,c_intercept,d_slope,d_intercept,map_class\n";
        for (SocialNorm w : all_norms()) {
            const AffineMapPair mp = reputation_maps(w, e2);
            maps << w.label() << ',' << format_real(mp.c.slope) << ',' << format_real(mp.c.intercept) << ','
                 << format_real(mp.d.slope) << ',' << format_real(mp.d.intercept) << ',' << to_string(classify_maps(w))
                 << '\n';
        }
        out.write("figS1_maps.csv", maps.str());
        for (SocialNorm w : all_norms()) {
            const MeanSequence means = mean_sequence(w, e2, 100);
            const VarianceSequence var = variance_sequence(w, e2, n, 100);
            const TruncatedMasses q = wild_masses(means, 0.0);
            std::ostringstream csv;
            csv << "j,mass_normalized,mean,std_dev\n";
            for (int j = -100; j <= 100; ++j) {
                if (j == 0) continue;
                csv << j << ',' << format_real(q.normalized(j)) << ',' << format_real(means.at(j)) << ','
                    << format_real(std::sqrt(var.at(j))) << '\n';
            }
            out.write("figS1_" + w.label() + "_components.csv", csv.str());
        }
    } else if (figure == "S3") {
        // Shunning wild-types and ALLB mutants seen by Shunning observers.
        const double e2 = 0.1;
        const SocialNorm sh = norms::SH;
        const PublicGoodness pg = public_goodness(sh, norms::ALLB, 0.0, e2);
        std::ostringstream pub;
        pub << "population,goodness,frequency\n";
        pub << "W,0," << format_real(1.0 - pg.ww) << "\nW,1," << format_real(pg.ww) << '\n';
        pub << "M,0," << format_real(1.0 - pg.mw) << "\nM,1," << format_real(pg.mw) << '\n';
        out.write("figS3_public.csv", pub.str());
        const int jmax = 100;
        const MeanSequence mu = mean_sequence(sh, e2, jmax);
        const TruncatedMasses qw = wild_masses(mu, 0.0);
        const TruncatedMasses qm = mutant_masses(qw, mean_sequence(norms::ALLB, e2, jmax), 0.0);
        std::ostringstream priv;
        priv << "population,j,goodness,frequency\n";
        for (const auto& [label, q] : {std::pair<const char*, const TruncatedMasses*>{"W", &qw}, {"M", &qm}}) {
            for (int j = -jmax; j <= jmax; ++j) {
                if (j == 0) continue;
                priv << label << ',' << j << ',' << format_real(mu.at(j)) << ',' << format_real(q->normalized(j))
                     << '\n';
            }
        }
        out.write("figS3_private.csv", priv.str());
    } else if (figure == "S2") {
        check_jmax(c.jmax);
        const InvasionAnalyzer an(0.1, 0.0, c.jmax);
        std::ostringstream csv;
        csv << "W,M,kind,threshold,threshold_lower,threshold_upper\n";
        for (SocialNorm w : all_norms()) {
            for (SocialNorm m : all_norms()) {
                const InvasionRegion r = an.region(w, m);
                csv << w.label() << ',' << m.label() << ',' << kind_name(r.kind) << ',';
                if (r.kind == InvasionRegion::Kind::Above || r.kind == InvasionRegion::Kind::Below) {
                    csv << format_real(r.threshold.estimate) << ',' << format_real(r.threshold.lower) << ','
                        << format_real(r.threshold.upper) << '\n';
                } else {
                    csv << "nan,nan,nan\n";
                }
            }
        }
        out.write("figS2_regions.csv", csv.str());
    } else {
        throw UsageError("unknown figure '" + figure + "' (expected 2B, 4A, 4B, 4C, S1, S2 or S3)");
    }
}

// ------------------------------------------------------------ config files

std::string json_scalar(const nlohmann::json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_real(v.get<double>());
    throw UsageError(path + ": expected a string or number");
}

// Expands the JSON object in --config into option tokens placed right after
// the subcommand name, so that flags given on the command line (which come
// later and use the take-last policy) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    std::optional<std::string> file;
    for (std::size_t i = sub_pos; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
    }
    if (!file || sub_pos == args.size()) return args;

    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[sub_pos]);
    } catch (const CLI::OptionNotFound&) {
        return args;
    }

    std::ifstream in(*file);
    if (!in) throw UsageError("cannot read config file '" + *file + "'");
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file '" + *file + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("$: config must be a JSON object");

    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        const std::string path = "$." + key;
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name == "config") throw UsageError(path + ": nested config files are not supported");
        const CLI::Option* opt = sub->get_option_no_throw("--" + name);
        if (opt == nullptr) throw UsageError(path + ": unknown field for '" + args[sub_pos] + "'");
        if (value.is_boolean()) {
            if (opt->get_expected_min() != 0) throw UsageError(path + ": expected a value, not a boolean");
            if (value.get<bool>()) tokens.push_back("--" + name);
            continue;
        }
        if (value.is_null()) continue;
        std::string text;
        if (value.is_array()) {
            for (std::size_t k = 0; k < value.size(); ++k) {
                if (k) text += ',';
                text += json_scalar(value[k], path + "[" + std::to_string(k) + "]");
            }
        } else {
            text = json_scalar(value, path);
        }
        tokens.push_back("--" + name + "=" + text);
    }
    std::vector<std::string> merged(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1));
    merged.insert(merged.end(), tokens.begin(), tokens.end());
    merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1), args.end());
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Private-assessment reputation models: equilibria, invasion analysis and simulation", "irep"};
    app.set_version_flag("--version", IREP_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    const char* env_out = std::getenv("IREP_OUTPUT_DIR");
    Common common;
    common.out = env_out != nullptr && *env_out != '\0' ? env_out : ".";

    const auto add_common = [&](CLI::App* sub, bool with_cache) {
        sub->add_option("--out", common.out, "Output directory (default: $IREP_OUTPUT_DIR or .)");
        sub->add_option("--jmax", common.jmax, "Label truncation |j| <= jmax")->capture_default_str();
        sub->add_option("--workers", common.workers, "Worker threads")->capture_default_str();
        sub->add_option("--config", common.config, "JSON file of option values; flags override it");
        if (with_cache) sub->add_flag("--cache", common.cache, "Reuse goodness quadruples stored under <out>/cache");
    };

    std::string wild = "S09", mutant = "S03", norm = "S03", norm_list = "S03,S08";
    double e1 = 0.0, e2 = 0.1, n_pop = 1000, delta = 0.1;
    std::string bc = "3", e2_grid = "0.01:0.3:30", bc_grid = "1.05:30:40:log";

    auto* eq = app.add_subcommand("equilibrium", "Component means, variances and masses of a (W, M) pair");
    add_common(eq, false);
    eq->add_option("--wild,-w", wild, "Wild-type norm")->capture_default_str();
    eq->add_option("--mutant,-m", mutant, "Mutant norm")->capture_default_str();
    eq->add_option("--e2", e2, "Assessment error")->capture_default_str();
    eq->add_option("--e1", e1, "Action error")->capture_default_str();
    eq->add_option("--n", n_pop, "Population size for variances")->capture_default_str();
    eq->add_option("--delta", delta, "Mutant fraction for variances")->capture_default_str();

    auto* mx = app.add_subcommand("matrix", "16x16 invasibility matrix");
    add_common(mx, true);
    mx->add_option("--e2", e2, "Assessment error")->capture_default_str();
    mx->add_option("--e1", e1, "Action error")->capture_default_str();
    mx->add_option("--bc", bc, "b/c value or grid")->capture_default_str();

    auto* inv = app.add_subcommand("invade", "Invasion region of one mutant against one wild-type");
    add_common(inv, true);
    inv->add_option("--wild,-w", wild, "Wild-type norm")->capture_default_str();
    inv->add_option("--mutant,-m", mutant, "Mutant norm")->capture_default_str();
    inv->add_option("--e2", e2, "Assessment error")->capture_default_str();
    inv->add_option("--e1", e1, "Action error")->capture_default_str();
    inv->add_option("--bc", bc, "b/c values at which to report the outcome")->capture_default_str();

    auto* er = app.add_subcommand("ess-region", "ESS region of one norm over an (e2, b/c) grid");
    add_common(er, false);
    er->add_option("--norm", norm, "Norm")->capture_default_str();
    er->add_option("--e2-grid", e2_grid, "e2 grid: a,b,c or lo:hi:n[:log]")->capture_default_str();
    er->add_option("--bc-grid", bc_grid, "b/c grid: a,b,c or lo:hi:n[:log]")->capture_default_str();
    er->add_option("--e1", e1, "Action error")->capture_default_str();

    auto* cr = app.add_subcommand("coop-rate", "Cooperation rate of monomorphic populations");
    add_common(cr, false);
    cr->add_option("--norms", norm_list, "Comma-separated norms")->capture_default_str();
    cr->add_option("--e2-grid", e2_grid, "e2 grid")->capture_default_str();
    cr->add_option("--e1", e1, "Action error")->capture_default_str();

    auto* pb = app.add_subcommand("public", "Public-assessment goodness against ALLB for all norms");
    pb->add_option("--out", common.out, "Output directory (default: $IREP_OUTPUT_DIR or .)");
    pb->add_option("--config", common.config, "JSON file of option values; flags override it");
    pb->add_option("--e2", e2, "Assessment error")->capture_default_str();
    pb->add_option("--e1", e1, "Action error")->capture_default_str();

    AbmOptions abm;
    std::uint64_t abm_seed = 0;
    auto* ab = app.add_subcommand("abm", "Agent-based simulation of the image matrix");
    add_common(ab, false);
    ab->add_option("--mode", abm.mode, "mixture or boundary")->capture_default_str();
    ab->add_option("--n", abm.n, "Population size")->capture_default_str();
    ab->add_option("--delta", abm.delta, "Mutant fraction")->capture_default_str();
    ab->add_option("--wild,-w", abm.wild, "Wild-type norm")->capture_default_str();
    ab->add_option("--mutant,-m", abm.mutant, "Mutant norm (mixture mode)")->capture_default_str();
    ab->add_option("--e1", abm.e1, "Action error")->capture_default_str();
    ab->add_option("--e2", abm.e2, "Assessment error (mixture mode)")->capture_default_str();
    auto* seed_opt = ab->add_option("--seed", abm_seed, "Generator seed (required)");
    ab->add_option("--replicates", abm.replicates, "Independent replicates (mixture mode)")->capture_default_str();
    ab->add_option("--burn-in", abm.burn_in, "Unrecorded time units")->capture_default_str();
    ab->add_option("--sample-units", abm.sample_units, "Recorded time units")->capture_default_str();
    ab->add_option("--bin-width", abm.bin_width, "Histogram bin width")->capture_default_str();
    ab->add_option("--sample-stride", abm.sample_stride, "Write every k-th individual per unit; 0 disables")
        ->capture_default_str();
    ab->add_option("--name", abm.name, "Output file prefix")->capture_default_str();
    ab->add_option("--e2-grid", abm.e2_grid, "e2 grid (boundary mode)")->capture_default_str();
    ab->add_option("--bc-grid", abm.bc_grid, "b/c grid (boundary mode)")->capture_default_str();
    ab->add_option("--mutants", abm.mutants, "Candidate mutants (boundary mode; empty = all)");

    std::string figure;
    std::uint64_t repro_seed = 0;
    auto* rp = app.add_subcommand("reproduce", "Regenerate the data behind one figure or table");
    add_common(rp, true);
    rp->add_option("figure", figure, "2B, 4A, 4B, 4C, S1, S2 or S3")->required();
    auto* repro_seed_opt = rp->add_option("--seed", repro_seed, "Override the recipe seed");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        check_workers(common.workers);
        if (*pb) {
            Output out(common.out);
            do_public(out, e1, e2);
            return 0;
        }
        Output out(common.out);
        if (*eq) {
            do_equilibrium(out, norm_from_spec(wild), norm_from_spec(mutant), e2, e1, common.jmax, n_pop, delta);
        } else if (*mx) {
            do_matrix(out, common, e2, parse_grid(bc, "b/c"), e1);
        } else if (*inv) {
            do_invade(out, common, norm_from_spec(wild), norm_from_spec(mutant), e2, e1, parse_grid(bc, "b/c"));
        } else if (*er) {
            do_ess_region(out, common, norm_from_spec(norm), parse_grid(e2_grid, "e2"), parse_grid(bc_grid, "b/c"), e1);
        } else if (*cr) {
            do_coop_rate(out, common, parse_norm_list(norm_list), parse_grid(e2_grid, "e2"), e1);
        } else if (*ab) {
            if (seed_opt->count() > 0) abm.seed = abm_seed;
            do_abm(out, common, abm);
        } else if (*rp) {
            std::optional<std::uint64_t> s;
            if (repro_seed_opt->count() > 0) s = repro_seed;
            reproduce(out, common, figure, s);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
