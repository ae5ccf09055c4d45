#include "hexplore/gridness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexplore::gridness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool missing(double v) { return std::isnan(v); }

// Bilinear sample of the SAC at fractional offset (dx, dy) from the center.
// Missing if any neighbor that carries weight is missing or out of bounds.
double sample_sac(const Autocorrelogram& sac, double dx, double dy) {
    const double col = sac.center_col + dx;
    const double row = sac.center_row + dy;
    const int c0 = static_cast<int>(std::floor(col));
    const int r0 = static_cast<int>(std::floor(row));
    const double fc = col - c0;
    const double fr = row - r0;
    const double w[4] = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
    const int rr[4] = {r0, r0, r0 + 1, r0 + 1};
    const int cc[4] = {c0, c0 + 1, c0, c0 + 1};
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (w[k] <= 1e-12) continue;
        if (!sac.values.in_bounds(rr[k], cc[k])) return kNaN;
        const double v = sac.values(rr[k], cc[k]);
        if (missing(v)) return kNaN;
        acc += w[k] * v;
    }
    return acc;
}

// Full rotated SAC image S_theta(d) = S(R_theta d), bilinear, NaN where the
// rotated sample is unavailable.
Grid2D<double> rotate_sac(const Autocorrelogram& sac, double angle_degrees) {
    const double a = angle_degrees * (kTwoPi / 360.0);
    const double c = std::cos(a);
    const double s = std::sin(a);
    Grid2D<double> out(sac.values.rows(), sac.values.cols(), kNaN);
    for (int r = 0; r < sac.values.rows(); ++r) {
        for (int col = 0; col < sac.values.cols(); ++col) {
            const double dy = r - sac.center_row;
            const double dx = col - sac.center_col;
            out(r, col) = sample_sac(sac, c * dx - s * dy, s * dx + c * dy);
        }
    }
    return out;
}

// C_theta over the annulus given a pre-rotated image. A pixel participates
// when both the SAC value and the rotated sample are present.
double ring_corr_impl(const Autocorrelogram& sac, const Grid2D<double>& rotated,
                      const AnnulusSpec& annulus) {
    if (!(annulus.r_min > 0.0) || !(annulus.r_max > annulus.r_min))
        throw std::invalid_argument("ring_correlation: need 0 < r_min < r_max");
    const double r2_lo = annulus.r_min * annulus.r_min;
    const double r2_hi = annulus.r_max * annulus.r_max;

    // First pass: shared annulus mean of the unrotated SAC.
    double sum = 0.0;
    int n = 0;
    for (int r = 0; r < sac.values.rows(); ++r) {
        for (int col = 0; col < sac.values.cols(); ++col) {
            const double dy = r - sac.center_row;
            const double dx = col - sac.center_col;
            const double d2 = dx * dx + dy * dy;
            if (d2 < r2_lo || d2 > r2_hi) continue;
            const double v = sac.values(r, col);
            const double vr = rotated(r, col);
            if (missing(v) || missing(vr)) continue;
            sum += v;
            ++n;
        }
    }
    if (n < 8) throw InsufficientData("ring_correlation: fewer than 8 valid annulus pixels");
    const double mean = sum / n;

    double num = 0.0, den = 0.0;
    for (int r = 0; r < sac.values.rows(); ++r) {
        for (int col = 0; col < sac.values.cols(); ++col) {
            const double dy = r - sac.center_row;
            const double dx = col - sac.center_col;
            const double d2 = dx * dx + dy * dy;
            if (d2 < r2_lo || d2 > r2_hi) continue;
            const double v = sac.values(r, col);
            const double vr = rotated(r, col);
            if (missing(v) || missing(vr)) continue;
            num += (v - mean) * (vr - mean);
            den += (v - mean) * (v - mean);
        }
    }
    if (den <= 1e-30) throw InsufficientData("ring_correlation: zero variance over annulus");
    return num / den;
}

double clamp_score(double g) { return std::clamp(g, -2.0, 2.0); }

double g60_from(const std::map<int, double>& c) {
    return clamp_score((c.at(60) + c.at(120)) / 2.0 - (c.at(30) + c.at(90) + c.at(150)) / 3.0);
}

double g90_from(const std::map<int, double>& c) {
    return clamp_score(c.at(90) - (c.at(45) + c.at(135)) / 2.0);
}

}  // namespace

RateMap build_rate_map(std::span<const TrajectorySample> trajectory,
                       std::span<const double> activations,
                       const ArenaBounds& arena, double bin_size) {
    if (trajectory.empty()) throw std::invalid_argument("build_rate_map: empty trajectory");
    if (trajectory.size() != activations.size())
        throw std::invalid_argument("build_rate_map: trajectory/activation length mismatch");
    if (!(bin_size > 0.0)) throw std::invalid_argument("build_rate_map: bin_size must be > 0");
    if (!(arena.max.x > arena.min.x) || !(arena.max.y > arena.min.y))
        throw std::invalid_argument("build_rate_map: degenerate arena");

    const int cols = std::max(1, static_cast<int>(std::ceil((arena.max.x - arena.min.x) / bin_size - 1e-9)));
    const int rows = std::max(1, static_cast<int>(std::ceil((arena.max.y - arena.min.y) / bin_size - 1e-9)));

    RateMap m;
    m.bin_size = bin_size;
    m.origin = arena.min;
    m.bins = Grid2D<double>(rows, cols, kNaN);
    m.visit_time = Grid2D<double>(rows, cols, 0.0);
    Grid2D<double> total(rows, cols, 0.0);

    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const Vec2 p = trajectory[t].position;
        int j = static_cast<int>(std::floor((p.x - arena.min.x) / bin_size));
        int i = static_cast<int>(std::floor((p.y - arena.min.y) / bin_size));
        if (p.x == arena.max.x) j = cols - 1;  // points on the far edge belong to the last bin
        if (p.y == arena.max.y) i = rows - 1;
        if (i < 0 || i >= rows || j < 0 || j >= cols) continue;
        total(i, j) += activations[t];
        m.visit_time(i, j) += trajectory[t].dwell_seconds;
    }
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (m.visit_time(i, j) > 0.0) m.bins(i, j) = total(i, j) / m.visit_time(i, j);
    return m;
}

RateMap smooth_rate_map(const RateMap& m, double sigma_bins) {
    if (sigma_bins < 0.0) throw std::invalid_argument("smooth_rate_map: sigma must be >= 0");
    if (sigma_bins == 0.0) return m;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma_bins));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            kernel[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)] =
                std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_bins * sigma_bins));

    RateMap out = m;
    const int rows = m.bins.rows(), cols = m.bins.cols();
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (missing(m.bins(i, j))) continue;
            double acc = 0.0, wsum = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int ii = i + dy, jj = j + dx;
                    if (ii < 0 || ii >= rows || jj < 0 || jj >= cols) continue;
                    const double v = m.bins(ii, jj);
                    if (missing(v)) continue;
                    const double w =
                        kernel[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
                    acc += w * v;
                    wsum += w;
                }
            }
            out.bins(i, j) = acc / wsum;  // wsum > 0: the bin itself participates
        }
    }
    return out;
}

Autocorrelogram spatial_autocorrelogram(const RateMap& m, const SacOptions& opts) {
    const int rows = m.bins.rows(), cols = m.bins.cols();
    int visited = 0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!missing(m.bins(i, j))) ++visited;
    if (visited < 2) throw std::invalid_argument("spatial_autocorrelogram: need >= 2 visited bins");

    Autocorrelogram sac;
    sac.center_row = rows - 1;
    sac.center_col = cols - 1;
    sac.values = Grid2D<double>(2 * rows - 1, 2 * cols - 1, kNaN);

    for (int dy = -(rows - 1); dy <= rows - 1; ++dy) {
        for (int dx = -(cols - 1); dx <= cols - 1; ++dx) {
            // Overlap of the map with its copy shifted by (dy, dx).
            const int i_lo = std::max(0, -dy), i_hi = std::min(rows, rows - dy);
            const int j_lo = std::max(0, -dx), j_hi = std::min(cols, cols - dx);
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            int n = 0;
            for (int i = i_lo; i < i_hi; ++i) {
                for (int j = j_lo; j < j_hi; ++j) {
                    const double a = m.bins(i, j);
                    const double b = m.bins(i + dy, j + dx);
                    if (missing(a) || missing(b)) continue;
                    sa += a; sb += b;
                    saa += a * a; sbb += b * b; sab += a * b;
                    ++n;
                }
            }
            if (n < opts.min_overlap) continue;
            const double ma = sa / n, mb = sb / n;
            const double va = saa - n * ma * ma;
            const double vb = sbb - n * mb * mb;
            if (va <= 1e-30 || vb <= 1e-30) continue;  // degenerate overlap stays missing
            const double cov = sab - n * ma * mb;
            sac.values(sac.center_row + dy, sac.center_col + dx) =
                std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
        }
    }
    return sac;
}

double ring_correlation(const Autocorrelogram& sac, const AnnulusSpec& annulus,
                        double angle_degrees) {
    return ring_corr_impl(sac, rotate_sac(sac, angle_degrees), annulus);
}

double gridness_60(const Autocorrelogram& sac, const AnnulusSpec& annulus) {
    std::map<int, double> c;
    for (int angle : {30, 60, 90, 120, 150})
        c[angle] = ring_correlation(sac, annulus, angle);
    return g60_from(c);
}

double gridness_90(const Autocorrelogram& sac, const AnnulusSpec& annulus) {
    std::map<int, double> c;
    for (int angle : {45, 90, 135})
        c[angle] = ring_correlation(sac, annulus, angle);
    return g90_from(c);
}

GridnessReport best_gridness(const Autocorrelogram& sac, const AnnulusSearch& search) {
    const int half_extent =
        std::min(sac.values.rows(), sac.values.cols()) / 2;

    // Rotations are shared across every candidate annulus.
    std::map<int, Grid2D<double>> rotated;
    for (int angle : {30, 45, 60, 90, 120, 135, 150}) rotated.emplace(angle, rotate_sac(sac, angle));

    GridnessReport report;
    bool found60 = false, found90 = false;
    double best60 = -std::numeric_limits<double>::infinity();
    double best90 = -std::numeric_limits<double>::infinity();

    for (int r_min = search.r_min_lo; r_min <= search.r_min_hi; ++r_min) {
        for (int r_max = r_min + search.r_gap; r_max <= half_extent; ++r_max) {
            const AnnulusSpec a{static_cast<double>(r_min), static_cast<double>(r_max)};
            std::map<int, double> c;
            for (int angle : {30, 45, 60, 90, 120, 135, 150}) {
                try {
                    c[angle] = ring_corr_impl(sac, rotated.at(angle), a);
                } catch (const InsufficientData&) {
                }
            }
            // The two scores need different angle sets; score whichever is complete.
            if (c.count(30) && c.count(60) && c.count(90) && c.count(120) && c.count(150)) {
                const double g60 = g60_from(c);
                if (!found60 || g60 > best60) {
                    best60 = g60;
                    report.best_annulus_60 = a;
                    report.ring_correlations = c;
                    found60 = true;
                }
            }
            if (c.count(45) && c.count(90) && c.count(135)) {
                const double g90 = g90_from(c);
                if (!found90 || g90 > best90) {
                    best90 = g90;
                    report.best_annulus_90 = a;
                    found90 = true;
                }
            }
        }
    }
    if (!found60 || !found90)
        throw InsufficientData("best_gridness: no annulus with enough valid data");
    report.g60 = best60;
    report.g90 = best90;
    return report;
}

}  // namespace hexplore::gridness
