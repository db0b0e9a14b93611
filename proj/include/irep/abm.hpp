// Agent-based simulation of the private image matrix.
//
// Each round picks a donor and a distinct recipient. The donor acts on its
// own opinion of the recipient (discriminator rule, action error e1), and
// every individual, donor and recipient included, re-assesses the donor
// from its own opinion of the recipient with an independent assessment
// error e2. One time unit is N rounds.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "irep/ess.hpp"

namespace irep {

struct SimConfig {
    int n = 1000;
    double delta = 0.0;
    SocialNorm wild_norm{3};
    SocialNorm mutant_norm{16};
    double e1 = 0.0;
    double e2 = 0.1;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    int burn_in_units = 50;
    int sample_units = 500;

    /// round(n * delta); the first mutant_count() individuals are mutants.
    [[nodiscard]] int mutant_count() const;
    /// Throws InputError on N < 2, delta outside [0, 1] or bad error rates
    /// (e2 == 0 is accepted here).
    void validate() const;
};

/// Name of the generator recorded in run metadata.
extern const char* const kGeneratorName;

/// Generator for (seed, replicate): mt19937_64 seeded through std::seed_seq
/// with the four 32-bit halves of seed and replicate.
std::mt19937_64 make_generator(std::uint64_t seed, std::uint64_t replicate);

/// N x N bit matrix stored target-major: row t holds every observer's
/// opinion of individual t, so a round rewrites one contiguous row.
class ImageMatrix {
public:
    ImageMatrix() = default;
    ImageMatrix(int n, bool initial);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] std::size_t words_per_row() const noexcept { return words_; }
    [[nodiscard]] bool get(int target, int observer) const noexcept {
        const std::uint64_t w = row(target)[static_cast<std::size_t>(observer) >> 6];
        return ((w >> (observer & 63)) & 1u) != 0;
    }
    void set(int target, int observer, bool good) noexcept;

    [[nodiscard]] const std::uint64_t* row(int target) const noexcept {
        return bits_.data() + static_cast<std::size_t>(target) * words_;
    }
    std::uint64_t* row(int target) noexcept { return bits_.data() + static_cast<std::size_t>(target) * words_; }

    /// Number of set bits of row `target` inside `mask` (words_per_row words).
    [[nodiscard]] int count(int target, const std::vector<std::uint64_t>& mask) const noexcept;

    friend bool operator==(const ImageMatrix&, const ImageMatrix&) = default;

private:
    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Per-individual goodness at one time unit. Goodness from mutant observers
/// is NaN when there are no mutants, and likewise for wild observers.
struct GoodnessBatch {
    int t = 0;
    int mutant_count = 0;
    std::vector<double> from_wild;
    std::vector<double> from_mutant;
};

/// What one round did, for tests and tracing.
struct RoundRecord {
    int donor = 0;
    int recipient = 0;
    bool cooperated = false;
};

class Simulation {
public:
    /// init_state: all-good image matrix, first round(N delta) individuals
    /// are mutants, generator seeded from (seed, replicate).
    explicit Simulation(const SimConfig& config);

    [[nodiscard]] const SimConfig& config() const noexcept { return config_; }
    [[nodiscard]] const ImageMatrix& image() const noexcept { return image_; }
    [[nodiscard]] bool is_mutant(int i) const noexcept { return i < mutants_; }
    [[nodiscard]] int mutant_count() const noexcept { return mutants_; }
    [[nodiscard]] std::uint64_t rounds() const noexcept { return rounds_; }

    RoundRecord step_round();
    void step_unit();
    [[nodiscard]] GoodnessBatch snapshot(int t) const;

private:
    // Per norm and action: new opinion as a function of the observer's
    // opinion of the recipient. Encoded as (value if recipient bad, value if
    // recipient good).
    struct Rule {
        bool if_bad;
        bool if_good;
    };

    void apply_errors(std::uint64_t* row);

    SimConfig config_;
    int mutants_ = 0;
    ImageMatrix image_;
    std::vector<std::uint64_t> wild_mask_;
    std::vector<std::uint64_t> mutant_mask_;
    std::vector<std::uint64_t> scratch_;
    Rule wild_rule_[2]{};
    Rule mutant_rule_[2]{};
    std::mt19937_64 rng_;
    double log_keep_ = 0.0;  // ln(1 - e2) for geometric skipping
    std::uint64_t rounds_ = 0;
};

using BatchSink = std::function<void(const GoodnessBatch&)>;

/// burn_in_units * N unrecorded rounds, then sample_units batches, one per
/// unit, stamped t = burn_in_units + 1, ..., burn_in_units + sample_units.
void run(const SimConfig& config, const BatchSink& sink);
std::vector<GoodnessBatch> run(const SimConfig& config);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

struct Histogram2D {
    double bin_width = 0.02;
    int bins = 0;
    /// mass[x * bins + y]; sums to 1 when nonempty.
    std::vector<double> mass;

    [[nodiscard]] double at(int x, int y) const { return mass[static_cast<std::size_t>(x * bins + y)]; }
    [[nodiscard]] double center(int bin) const noexcept { return (bin + 0.5) * bin_width; }
};

struct Mode {
    double x = 0.0;
    double y = 0.0;
    double mass = 0.0;
};

/// Bin masses of the mixture sum_j w(j) N(x_mean(j), x_var(j)) N(y_mean(j), y_var(j)),
/// the axes independent given the label. Tails beyond [0, 1] go to the edge
/// bins. `weights` need not be normalized.
Histogram2D analytic_histogram(const LabeledSeries& weights, const MeanSequence& x_means,
                               const VarianceSequence& x_var, const MeanSequence& y_means,
                               const VarianceSequence& y_var, double bin_width = 0.02);

/// Local maxima (8-neighbourhood) of the histogram, largest first.
std::vector<Mode> histogram_modes(const Histogram2D& h, std::size_t count);

struct EmpiricalStats {
    MeanEstimate ww;  // wild-types in wild eyes
    MeanEstimate wm;  // wild-types in mutant eyes
    MeanEstimate mw;  // mutants in wild eyes
    MeanEstimate mm;  // mutants in mutant eyes
    /// (from wild, from mutant) pairs of wild-type individuals.
    Histogram2D wild_histogram;
    /// Same for mutants.
    Histogram2D mutant_histogram;
    std::size_t batches = 0;
};

/// Means with batch-means standard errors (up to 20 contiguous batches of
/// time units, which absorbs the autocorrelation between units). Throws
/// InputError on empty input.
EmpiricalStats empirical_statistics(const std::vector<GoodnessBatch>& samples, double bin_width = 0.02);

/// Standard error of the mean of per-batch values.
MeanEstimate batch_mean_estimate(const std::vector<double>& per_unit, std::size_t max_batches = 20);

/// Combines independent replicate estimates: mean of means, sqrt(sum se^2)/k.
MeanEstimate pool(const std::vector<MeanEstimate>& parts);

struct EmpiricalPairResult {
    SocialNorm mutant{1};
    MeanEstimate ww;
    MeanEstimate wm;
    MeanEstimate mw;
    /// Critical b/c from the empirical means, classified like the analytic
    /// invasion region (sign tests at 2 standard errors).
    InvasionRegion region;
    /// Per b/c grid point: scaled payoff difference (uM - uW)/c and its
    /// standard error.
    std::vector<MeanEstimate> advantage;
};

struct EmpiricalBoundary {
    SocialNorm wild_norm{1};
    double e2 = 0.0;
    std::vector<double> b_over_c_grid;
    /// True where no mutant's advantage exceeds 2 standard errors.
    std::vector<bool> ess_flags;
    /// Grid-level interval: first and last flagged grid point.
    std::optional<double> grid_lower;
    std::optional<double> grid_upper;
    /// Thresholds from the empirical A/B ratios (max of Below, min of Above).
    EssBounds thresholds;
    std::vector<EmpiricalPairResult> pairs;
};

/// Runs one (W, M) simulation per candidate mutant from `config_template`
/// (its norms and e2 are overridden) and compares empirical payoffs over the
/// b/c grid. Empty `mutants` means all 15 others. Simulations of different
/// mutants run on up to `workers` threads with replicate index = mutant id.
EmpiricalBoundary estimate_ess_boundary(SocialNorm wild_norm, double e2, const std::vector<double>& b_over_c_grid,
                                        const SimConfig& config_template,
                                        const std::vector<SocialNorm>& mutants = {}, int workers = 1);

}  // namespace irep
