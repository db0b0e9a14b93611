#include "irep/abm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "irep/parallel.hpp"

namespace irep {

const char* const kGeneratorName = "std::mt19937_64 seeded by std::seed_seq(seed_lo, seed_hi, rep_lo, rep_hi)";

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

__extension__ using u128 = unsigned __int128;

// Lemire's nearly divisionless bounded integer, fixed so that streams are
// identical across standard library implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
    u128 m = static_cast<u128>(rng()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
        const std::uint64_t threshold = (0 - range) % range;
        while (low < threshold) {
            m = static_cast<u128>(rng()) * range;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

// Uniform on (0, 1].
double unit_open_low(std::mt19937_64& rng) {
    return 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::uint64_t> make_mask(int n, int from, int to) {
    std::vector<std::uint64_t> mask(static_cast<std::size_t>((n + 63) / 64), 0);
    for (int i = from; i < to; ++i) mask[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63);
    return mask;
}

double mean_finite(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = from; i < to; ++i) {
        if (std::isfinite(v[i])) {
            sum += v[i];
            ++count;
        }
    }
    return count == 0 ? kNaN : sum / static_cast<double>(count);
}

int noisy_sign(const MeanEstimate& e) {
    if (std::abs(e.mean) <= 2.0 * e.std_error) return 0;
    return e.mean > 0.0 ? 1 : -1;
}

}  // namespace

int SimConfig::mutant_count() const { return static_cast<int>(std::llround(n * delta)); }

void SimConfig::validate() const {
    if (n < 2) throw InputError("population size N must be >= 2");
    if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("mutant fraction delta must lie in [0, 1]");
    ErrorRates{e1, e2}.validate_allow_zero_assessment_error();
    if (burn_in_units < 0 || sample_units < 0) throw InputError("burn-in and sample units must be nonnegative");
}

std::mt19937_64 make_generator(std::uint64_t seed, std::uint64_t replicate) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32)};
    return std::mt19937_64(seq);
}

ImageMatrix::ImageMatrix(int n, bool initial)
    : n_(n), words_(static_cast<std::size_t>((n + 63) / 64)), bits_(words_ * static_cast<std::size_t>(n), 0) {
    if (initial) {
        const std::vector<std::uint64_t> full = make_mask(n, 0, n);
        for (int t = 0; t < n; ++t) std::copy(full.begin(), full.end(), row(t));
    }
}

void ImageMatrix::set(int target, int observer, bool good) noexcept {
    std::uint64_t& w = row(target)[static_cast<std::size_t>(observer) >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (observer & 63);
    w = good ? (w | bit) : (w & ~bit);
}

int ImageMatrix::count(int target, const std::vector<std::uint64_t>& mask) const noexcept {
    const std::uint64_t* r = row(target);
    int c = 0;
    for (std::size_t k = 0; k < words_; ++k) c += std::popcount(r[k] & mask[k]);
    return c;
}

Simulation::Simulation(const SimConfig& config)
    : config_(config), rng_(make_generator(config.seed, config.replicate)) {
    config_.validate();
    mutants_ = config_.mutant_count();
    image_ = ImageMatrix(config_.n, true);
    mutant_mask_ = make_mask(config_.n, 0, mutants_);
    wild_mask_ = make_mask(config_.n, mutants_, config_.n);
    scratch_.assign(image_.words_per_row(), 0);
    for (int action = 0; action < 2; ++action) {
        const Pivot on_good = action == 1 ? Pivot::GC : Pivot::GD;
        const Pivot on_bad = action == 1 ? Pivot::BC : Pivot::BD;
        wild_rule_[action] = {config_.wild_norm.assigns_good(on_bad), config_.wild_norm.assigns_good(on_good)};
        mutant_rule_[action] = {config_.mutant_norm.assigns_good(on_bad), config_.mutant_norm.assigns_good(on_good)};
    }
    log_keep_ = config_.e2 > 0.0 ? std::log1p(-config_.e2) : 0.0;
}

void Simulation::apply_errors(std::uint64_t* row) {
    if (config_.e2 <= 0.0) return;
    // Gaps between flipped observers are geometric with success probability e2.
    const auto n = static_cast<std::int64_t>(config_.n);
    std::int64_t pos = -1;
    for (;;) {
        const double gap = std::floor(std::log(unit_open_low(rng_)) / log_keep_);
        if (gap >= static_cast<double>(n)) break;
        pos += static_cast<std::int64_t>(gap) + 1;
        if (pos >= n) break;
        row[static_cast<std::size_t>(pos) >> 6] ^= std::uint64_t{1} << (pos & 63);
    }
}

RoundRecord Simulation::step_round() {
    const auto n = static_cast<std::uint64_t>(config_.n);
    RoundRecord rec;
    rec.donor = static_cast<int>(bounded(rng_, n));
    rec.recipient = static_cast<int>(bounded(rng_, n - 1));
    if (rec.recipient >= rec.donor) ++rec.recipient;

    bool cooperate = image_.get(rec.recipient, rec.donor);
    if (config_.e1 > 0.0 && unit_open_low(rng_) <= config_.e1) cooperate = !cooperate;
    rec.cooperated = cooperate;

    const auto word_for = [](Rule r, std::uint64_t opinion) -> std::uint64_t {
        if (r.if_good && r.if_bad) return ~std::uint64_t{0};
        if (r.if_good) return opinion;
        if (r.if_bad) return ~opinion;
        return 0;
    };
    const Rule w = wild_rule_[cooperate ? 1 : 0];
    const Rule m = mutant_rule_[cooperate ? 1 : 0];
    const std::uint64_t* opinions = image_.row(rec.recipient);
    std::uint64_t* donor_row = image_.row(rec.donor);
    for (std::size_t k = 0; k < scratch_.size(); ++k) {
        donor_row[k] = (word_for(w, opinions[k]) & wild_mask_[k]) | (word_for(m, opinions[k]) & mutant_mask_[k]);
    }
    apply_errors(donor_row);
    ++rounds_;
    return rec;
}

void Simulation::step_unit() {
    for (int i = 0; i < config_.n; ++i) step_round();
}

GoodnessBatch Simulation::snapshot(int t) const {
    GoodnessBatch b;
    b.t = t;
    b.mutant_count = mutants_;
    const int n = config_.n;
    const int wild_count = n - mutants_;
    b.from_wild.resize(static_cast<std::size_t>(n));
    b.from_mutant.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        b.from_wild[static_cast<std::size_t>(i)] =
            wild_count > 0 ? static_cast<double>(image_.count(i, wild_mask_)) / wild_count : kNaN;
        b.from_mutant[static_cast<std::size_t>(i)] =
            mutants_ > 0 ? static_cast<double>(image_.count(i, mutant_mask_)) / mutants_ : kNaN;
    }
    return b;
}

void run(const SimConfig& config, const BatchSink& sink) {
    Simulation sim(config);
    for (int u = 0; u < config.burn_in_units; ++u) sim.step_unit();
    for (int u = 0; u < config.sample_units; ++u) {
        sim.step_unit();
        sink(sim.snapshot(config.burn_in_units + u + 1));
    }
}

std::vector<GoodnessBatch> run(const SimConfig& config) {
    std::vector<GoodnessBatch> out;
    run(config, [&](const GoodnessBatch& b) { out.push_back(b); });
    return out;
}

MeanEstimate batch_mean_estimate(const std::vector<double>& per_unit, std::size_t max_batches) {
    std::vector<double> finite;
    finite.reserve(per_unit.size());
    for (double v : per_unit) {
        if (std::isfinite(v)) finite.push_back(v);
    }
    MeanEstimate e;
    e.count = finite.size();
    if (finite.empty()) {
        e.mean = kNaN;
        e.std_error = kNaN;
        return e;
    }
    double sum = 0.0;
    for (double v : finite) sum += v;
    e.mean = sum / static_cast<double>(finite.size());

    const std::size_t k = std::min(std::max<std::size_t>(max_batches, 1), finite.size());
    if (k < 2) return e;
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) {
        means[i] = mean_finite(finite, i * finite.size() / k, (i + 1) * finite.size() / k);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(k);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    e.std_error = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
    return e;
}

MeanEstimate pool(const std::vector<MeanEstimate>& parts) {
    if (parts.empty()) throw InputError("nothing to pool");
    MeanEstimate out;
    double var = 0.0;
    for (const auto& p : parts) {
        out.mean += p.mean;
        var += p.std_error * p.std_error;
        out.count += p.count;
    }
    const auto k = static_cast<double>(parts.size());
    out.mean /= k;
    out.std_error = std::sqrt(var) / k;
    return out;
}

namespace {

Histogram2D make_histogram(double bin_width) {
    Histogram2D h;
    h.bin_width = bin_width;
    h.bins = static_cast<int>(std::ceil(1.0 / bin_width - 1e-9));
    h.mass.assign(static_cast<std::size_t>(h.bins * h.bins), 0.0);
    return h;
}

int bin_of(const Histogram2D& h, double v) {
    return std::clamp(static_cast<int>(std::floor(v / h.bin_width)), 0, h.bins - 1);
}

void normalize(Histogram2D& h) {
    double total = 0.0;
    for (double m : h.mass) total += m;
    if (total > 0.0) {
        for (double& m : h.mass) m /= total;
    }
}

}  // namespace

EmpiricalStats empirical_statistics(const std::vector<GoodnessBatch>& samples, double bin_width) {
    if (samples.empty()) throw InputError("no samples to summarize");
    if (!(bin_width > 0.0 && bin_width <= 1.0)) throw InputError("histogram bin width must lie in (0, 1]");
    EmpiricalStats s;
    s.batches = samples.size();
    s.wild_histogram = make_histogram(bin_width);
    s.mutant_histogram = make_histogram(bin_width);

    std::vector<double> ww, wm, mw, mm;
    for (const GoodnessBatch& b : samples) {
        const std::size_t n = b.from_wild.size();
        const auto m = static_cast<std::size_t>(b.mutant_count);
        ww.push_back(mean_finite(b.from_wild, m, n));
        wm.push_back(mean_finite(b.from_mutant, m, n));
        mw.push_back(mean_finite(b.from_wild, 0, m));
        mm.push_back(mean_finite(b.from_mutant, 0, m));
        for (std::size_t i = 0; i < n; ++i) {
            const double x = b.from_wild[i];
            const double y = b.from_mutant[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            Histogram2D& h = i < m ? s.mutant_histogram : s.wild_histogram;
            h.mass[static_cast<std::size_t>(bin_of(h, x) * h.bins + bin_of(h, y))] += 1.0;
        }
    }
    s.ww = batch_mean_estimate(ww);
    s.wm = batch_mean_estimate(wm);
    s.mw = batch_mean_estimate(mw);
    s.mm = batch_mean_estimate(mm);
    normalize(s.wild_histogram);
    normalize(s.mutant_histogram);
    return s;
}

namespace {

// Probability mass of N(mean, var) in each bin; the outer edges extend to
// +-infinity.
std::vector<double> bin_masses(double mean, double var, int bins, double width) {
    std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
    if (!(var > 0.0)) {
        out[static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(mean / width)), 0, bins - 1))] = 1.0;
        return out;
    }
    const double scale = 1.0 / std::sqrt(2.0 * var);
    double prev = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double cdf = k + 1 == bins ? 1.0 : 0.5 * std::erfc(-((k + 1) * width - mean) * scale);
        out[static_cast<std::size_t>(k)] = cdf - prev;
        prev = cdf;
    }
    return out;
}

}  // namespace

Histogram2D analytic_histogram(const LabeledSeries& weights, const MeanSequence& x_means,
                               const VarianceSequence& x_var, const MeanSequence& y_means,
                               const VarianceSequence& y_var, double bin_width) {
    if (!(bin_width > 0.0 && bin_width <= 1.0)) throw InputError("histogram bin width must lie in (0, 1]");
    Histogram2D h = make_histogram(bin_width);
    double total = 0.0;
    for (int j = -weights.jmax(); j <= weights.jmax(); ++j) {
        if (j != 0) total += weights.at(j);
    }
    for (int j = -weights.jmax(); j <= weights.jmax(); ++j) {
        if (j == 0) continue;
        const double w = weights.at(j) / total;
        if (w < 1e-15) continue;
        const auto px = bin_masses(x_means.at(j), x_var.at(j), h.bins, bin_width);
        const auto py = bin_masses(y_means.at(j), y_var.at(j), h.bins, bin_width);
        for (int x = 0; x < h.bins; ++x) {
            const double wx = w * px[static_cast<std::size_t>(x)];
            if (wx == 0.0) continue;
            for (int y = 0; y < h.bins; ++y) {
                h.mass[static_cast<std::size_t>(x * h.bins + y)] += wx * py[static_cast<std::size_t>(y)];
            }
        }
    }
    return h;
}

std::vector<Mode> histogram_modes(const Histogram2D& h, std::size_t count) {
    std::vector<Mode> modes;
    for (int x = 0; x < h.bins; ++x) {
        for (int y = 0; y < h.bins; ++y) {
            const double v = h.at(x, y);
            if (v <= 0.0) continue;
            bool peak = true;
            for (int dx = -1; dx <= 1 && peak; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= h.bins || ny >= h.bins) continue;
                    const double u = h.at(nx, ny);
                    // Ties go to the lexicographically first bin.
                    if (u > v || (u == v && (nx < x || (nx == x && ny < y)))) {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak) modes.push_back({h.center(x), h.center(y), v});
        }
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.mass > b.mass; });
    if (modes.size() > count) modes.resize(count);
    return modes;
}

namespace {

InvasionRegion empirical_region(const MeanEstimate& a, const MeanEstimate& b) {
    using Kind = InvasionRegion::Kind;
    const int sa = noisy_sign(a);
    const int sb = noisy_sign(b);
    if (sa == 0) {
        if (sb < 0) return {Kind::All, {}};
        if (sb > 0) return {Kind::None, {}};
        return {Kind::Neutral, {}};
    }
    BoundedValue theta;
    theta.estimate = b.mean / a.mean;
    const double lo_a = a.mean - 2.0 * a.std_error;
    const double hi_a = a.mean + 2.0 * a.std_error;
    const double lo_b = b.mean - 2.0 * b.std_error;
    const double hi_b = b.mean + 2.0 * b.std_error;
    theta.lower = std::min({lo_b / lo_a, lo_b / hi_a, hi_b / lo_a, hi_b / hi_a, theta.estimate});
    theta.upper = std::max({lo_b / lo_a, lo_b / hi_a, hi_b / lo_a, hi_b / hi_a, theta.estimate});
    if (sa > 0) return theta.estimate <= 1.0 ? InvasionRegion{Kind::All, theta} : InvasionRegion{Kind::Above, theta};
    return theta.estimate <= 1.0 ? InvasionRegion{Kind::None, theta} : InvasionRegion{Kind::Below, theta};
}

}  // namespace

EmpiricalBoundary estimate_ess_boundary(SocialNorm wild_norm, double e2, const std::vector<double>& b_over_c_grid,
                                        const SimConfig& config_template, const std::vector<SocialNorm>& mutants,
                                        int workers) {
    check_grid(b_over_c_grid, "b/c");
    for (double r : b_over_c_grid) PayoffParams::from_ratio(r);
    std::vector<SocialNorm> candidates = mutants;
    if (candidates.empty()) {
        for (SocialNorm m : all_norms()) {
            if (m != wild_norm) candidates.push_back(m);
        }
    }

    EmpiricalBoundary out;
    out.wild_norm = wild_norm;
    out.e2 = e2;
    out.b_over_c_grid = b_over_c_grid;
    out.pairs.resize(candidates.size());

    parallel_for(candidates.size(), workers, [&](std::size_t idx) {
        SimConfig cfg = config_template;
        cfg.wild_norm = wild_norm;
        cfg.mutant_norm = candidates[idx];
        cfg.e2 = e2;
        cfg.replicate = static_cast<std::uint64_t>(candidates[idx].id());
        if (cfg.mutant_count() < 1) throw InputError("boundary estimation needs at least one mutant (N * delta >= 0.5)");

        std::vector<double> ww, wm, mw;
        run(cfg, [&](const GoodnessBatch& b) {
            const std::size_t n = b.from_wild.size();
            const auto m = static_cast<std::size_t>(b.mutant_count);
            ww.push_back(mean_finite(b.from_wild, m, n));
            wm.push_back(mean_finite(b.from_mutant, m, n));
            mw.push_back(mean_finite(b.from_wild, 0, m));
        });

        EmpiricalPairResult res;
        res.mutant = candidates[idx];
        res.ww = batch_mean_estimate(ww);
        res.wm = batch_mean_estimate(wm);
        res.mw = batch_mean_estimate(mw);
        std::vector<double> a(ww.size()), b(ww.size());
        for (std::size_t k = 0; k < ww.size(); ++k) {
            a[k] = mw[k] - ww[k];
            b[k] = wm[k] - ww[k];
        }
        res.region = empirical_region(batch_mean_estimate(a), batch_mean_estimate(b));
        for (double r : b_over_c_grid) {
            std::vector<double> d(ww.size());
            for (std::size_t k = 0; k < ww.size(); ++k) d[k] = r * a[k] - b[k];
            res.advantage.push_back(batch_mean_estimate(d));
        }
        out.pairs[idx] = std::move(res);
    });

    out.ess_flags.assign(b_over_c_grid.size(), true);
    for (const auto& p : out.pairs) {
        for (std::size_t k = 0; k < b_over_c_grid.size(); ++k) {
            if (p.advantage[k].mean > 2.0 * p.advantage[k].std_error) out.ess_flags[k] = false;
        }
    }
    for (std::size_t k = 0; k < b_over_c_grid.size(); ++k) {
        if (!out.ess_flags[k]) continue;
        if (!out.grid_lower) out.grid_lower = b_over_c_grid[k];
        out.grid_upper = b_over_c_grid[k];
    }

    using Kind = InvasionRegion::Kind;
    EssBounds& th = out.thresholds;
    th.e2 = e2;
    for (const auto& p : out.pairs) {
        switch (p.region.kind) {
            case Kind::None:
            case Kind::Neutral: break;
            case Kind::All:
                th.empty = true;
                if (!th.blocking) th.blocking = p.mutant;
                break;
            case Kind::Above:
                if (p.region.threshold.estimate < th.upper) {
                    th.upper = p.region.threshold.estimate;
                    th.binding_upper = p.mutant;
                }
                break;
            case Kind::Below:
                if (p.region.threshold.estimate > th.lower) {
                    th.lower = p.region.threshold.estimate;
                    th.binding_lower = p.mutant;
                }
                break;
        }
    }
    if (th.lower >= th.upper) th.empty = true;
    return out;
}

}  // namespace irep
