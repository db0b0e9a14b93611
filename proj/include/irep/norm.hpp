// Second-order social norms, error rates, the discriminator action rule and
// the affine reputation-update maps a norm induces.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace irep {

/// Raised for malformed user-facing input (bad norm strings, out-of-range
/// probabilities, empty grids, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Observer situation: (recipient reputation, donor action). The order is
/// GC, BC, GD, BD everywhere.
enum class Pivot : std::uint8_t { GC = 0, BC = 1, GD = 2, BD = 3 };

inline constexpr int kNormCount = 16;

/// One of the 16 second-order norms. Ids run 1..16 in lexicographic order
/// with G before B, so S01 = GGGG and S16 = BBBB.
class SocialNorm {
public:
    /// Throws InputError unless 1 <= id <= 16.
    explicit SocialNorm(int id);

    static SocialNorm from_string(std::string_view pivots);

    [[nodiscard]] int id() const noexcept { return id_; }
    [[nodiscard]] bool assigns_good(Pivot p) const noexcept;
    [[nodiscard]] std::array<bool, 4> pivots() const noexcept;

    /// "GBBG" form.
    [[nodiscard]] std::string str() const;
    /// "S07".
    [[nodiscard]] std::string label() const;
    /// "SJ", "SS", ... or empty for unnamed norms.
    [[nodiscard]] std::string_view alias() const noexcept;

    friend bool operator==(SocialNorm, SocialNorm) = default;
    friend auto operator<=>(SocialNorm, SocialNorm) = default;

private:
    int id_;
};

namespace norms {
inline const SocialNorm ALLG{1};
inline const SocialNorm SS{3};
inline const SocialNorm SC{4};
inline const SocialNorm SJ{7};
inline const SocialNorm SH{8};
inline const SocialNorm ALLB{16};
}  // namespace norms

/// Accepts an id ("7", "07", "S07"), a pivot string ("GBBG") or an alias
/// ("SJ", "ALLB"). Case-insensitive.
SocialNorm norm_from_spec(std::string_view spec);
SocialNorm norm_from_spec(int id);

/// All 16 norms in id order.
std::array<SocialNorm, kNormCount> all_norms();

/// Action error e1 in [0, 1/2), assessment error e2 in (0, 1/2).
/// The analytic modules require e2 > 0; the simulator also accepts e2 == 0
/// through `allow_zero_assessment_error`.
struct ErrorRates {
    double e1 = 0.0;
    double e2 = 0.1;

    /// Throws InputError when the rates fall outside the analytic ranges.
    void validate() const;
    void validate_allow_zero_assessment_error() const;
};

void check_assessment_error(double e2);
void check_action_error(double e1);

/// Cooperation probability of a discriminator donor toward a recipient of
/// goodness p: p(1-e1) + (1-p)e1.
double action_prob(double p, double e1);

/// Unchecked variant for hot loops.
constexpr double action_prob_unchecked(double p, double e1) noexcept {
    return p * (1.0 - e1) + (1.0 - p) * e1;
}

/// Probability that an observer assigns G in each pivot situation.
struct AssessmentVector {
    double gc = 0.0;
    double bc = 0.0;
    double gd = 0.0;
    double bd = 0.0;

    [[nodiscard]] double operator[](Pivot p) const noexcept;
};

AssessmentVector assessment_vector(SocialNorm norm, double e2);

struct AffineMap {
    double slope = 0.0;
    double intercept = 0.0;

    [[nodiscard]] constexpr double operator()(double p) const noexcept {
        return slope * p + intercept;
    }
    [[nodiscard]] bool is_constant() const noexcept { return slope == 0.0; }
    /// Fixed point intercept / (1 - slope); slope is never 1 for e2 > 0.
    [[nodiscard]] double fixed_point() const noexcept { return intercept / (1.0 - slope); }
};

/// Expected next goodness of a donor in one observer's eyes, as a function
/// of the recipient's goodness, after cooperation (c) or defection (d).
struct AffineMapPair {
    AffineMap c;
    AffineMap d;
};

AffineMapPair reputation_maps(SocialNorm norm, double e2);

enum class MapClass { BothConstant, OnlyCConstant, OnlyDConstant, NeitherConstant };

std::string_view to_string(MapClass c) noexcept;

/// Classification from the pivot structure alone (slope zero iff GC == BC,
/// resp. GD == BD), which is independent of e2.
MapClass classify_maps(SocialNorm norm);
MapClass classify_maps(const AffineMapPair& maps) noexcept;

}  // namespace irep
