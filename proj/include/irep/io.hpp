// File formats: CSV tables, the ESS heatmap SVG, run metadata and the
// on-disk quadruple cache.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "irep/abm.hpp"
#include "irep/public_reputation.hpp"

namespace irep {

/// 17 significant digits, '.' decimal point, "inf"/"-inf"/"nan".
std::string format_real(double v);

/// Writes through a temporary file in the same directory and renames it
/// into place, creating parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// FNV-1a, stable across platforms.
std::uint64_t fnv1a64(std::string_view data);

/// norm,j,mean,variance_per_observer
std::string means_csv(const MeanSequence& means, const VarianceSequence& variances);

/// role,j,mass_normalized,mean_in_W_eyes,mean_in_M_eyes for both roles.
std::string mixture_csv(const TruncatedMasses& wild, const TruncatedMasses& mutant, const MeanSequence& wild_means,
                        const MeanSequence& mutant_means);

/// Header row "W\M,S01,...,S16"; cells I/R/N.
std::string matrix_csv(const InvasibilityMatrix& m);

/// e2,b_over_c,ess_flag
std::string region_csv(const EssRegion& r);

/// e2,lower_bc,upper_bc,binding_mutant_lower,binding_mutant_upper
std::string boundary_csv(const EssRegion& r);

/// Rectangles-grid heatmap over (e2, b/c) with the boundary curves.
std::string region_svg(const EssRegion& r);

/// norm,e1,e2,pWW,pMW,relation_sign for all 16 norms.
std::string public_csv(double e1, double e2);

/// t,individual_id,role,goodness_from_W,goodness_from_M
std::string samples_csv_header();
std::string samples_csv_rows(const GoodnessBatch& b, int stride);

/// bin_x,bin_y,mass (bin centers, nonzero bins only).
std::string histogram_csv(const Histogram2D& h);

/// Disk cache of goodness quadruples keyed by a content hash of
/// (W, M, e2, e1, jmax). Values replay exactly (hex-float storage).
class QuadrupleCache {
public:
    explicit QuadrupleCache(std::filesystem::path dir);

    [[nodiscard]] static std::string key(SocialNorm w, SocialNorm m, double e2, double e1, int jmax);
    [[nodiscard]] std::optional<GoodnessQuadruple> load(const std::string& key) const;
    void store(const std::string& key, const GoodnessQuadruple& q) const;

    /// Loads or computes and stores.
    GoodnessQuadruple get(SocialNorm w, SocialNorm m, double e2, double e1, int jmax) const;

private:
    std::filesystem::path dir_;
};

}  // namespace irep
