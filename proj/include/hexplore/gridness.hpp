#pragma once

// Rate-map / autocorrelogram / gridness analysis chain. Missing bins are
// represented as NaN throughout; every operation is missing-aware.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hexplore/grid2d.hpp"
#include "hexplore/vec2.hpp"

namespace hexplore::gridness {

// Thrown when an annulus or offset has too little valid data to score.
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectorySample {
    Vec2 position;
    double dwell_seconds = 1.0;
};

struct ArenaBounds {
    Vec2 min;
    Vec2 max;
};

// Occupancy-normalized firing rate map. bins(i, j) holds mean activation per
// second in the bin (row i = y, col j = x) and is NaN exactly where
// visit_time(i, j) == 0.
struct RateMap {
    Grid2D<double> bins;
    Grid2D<double> visit_time;
    double bin_size = 1.0;
    Vec2 origin;  // world position of the (0, 0) bin corner
};

// Autocorrelation values indexed by integer offset; dimensions
// (2H-1) x (2W-1) with offset (0, 0) at (center_row, center_col).
struct Autocorrelogram {
    Grid2D<double> values;
    int center_row = 0;
    int center_col = 0;

    double at_offset(int dy, int dx) const { return values(center_row + dy, center_col + dx); }
};

// Ring bounds in bins; 0 < r_min < r_max.
struct AnnulusSpec {
    double r_min = 2.0;
    double r_max = 8.0;
};

struct GridnessReport {
    double g60 = 0.0;
    double g90 = 0.0;
    AnnulusSpec best_annulus_60;
    AnnulusSpec best_annulus_90;
    std::map<int, double> ring_correlations;  // angle (deg) -> C_theta on best_annulus_60
};

struct SacOptions {
    int min_overlap = 20;  // offsets with fewer valid bin pairs are missing
};

struct AnnulusSearch {
    int r_min_lo = 2;
    int r_min_hi = 6;
    int r_gap = 3;  // r_max ranges over [r_min + r_gap, half extent]
};

// Accumulates activations and dwell per bin: R = (sum of activations) /
// (sum of dwell seconds) on visited bins, NaN elsewhere. Samples falling
// outside the arena are ignored.
RateMap build_rate_map(std::span<const TrajectorySample> trajectory,
                       std::span<const double> activations,
                       const ArenaBounds& arena, double bin_size);

// Missing-aware Gaussian blur: each visited bin is replaced by the kernel-
// weighted mean of its visited neighbors, renormalized by the weights that
// actually participated. sigma_bins == 0 returns the input unchanged.
RateMap smooth_rate_map(const RateMap& m, double sigma_bins);

// Pearson correlation between the map and itself shifted by each offset,
// with means and standard deviations recomputed over the overlap of each
// shift. Offsets with fewer than min_overlap valid pairs, or zero variance,
// are missing.
Autocorrelogram spatial_autocorrelogram(const RateMap& m, const SacOptions& opts = {});

// C_theta: correlation between annulus pixels of the SAC and the SAC rotated
// by `angle_degrees`, sampled bilinearly. Shared mean over the annulus;
// denominator is the unrotated sum of squares. Throws InsufficientData if
// fewer than 8 pixels participate or the annulus has zero variance.
double ring_correlation(const Autocorrelogram& sac, const AnnulusSpec& annulus,
                        double angle_degrees);

// (C60 + C120)/2 - (C30 + C90 + C150)/3, clamped to [-2, 2].
double gridness_60(const Autocorrelogram& sac, const AnnulusSpec& annulus);

// C90 - (C45 + C135)/2, clamped to [-2, 2].
double gridness_90(const Autocorrelogram& sac, const AnnulusSpec& annulus);

// Maximizes g60 and g90 independently over the annulus search grid.
// Annuli that cannot be scored are skipped; throws InsufficientData when no
// annulus yields a score.
GridnessReport best_gridness(const Autocorrelogram& sac, const AnnulusSearch& search = {});

}  // namespace hexplore::gridness
