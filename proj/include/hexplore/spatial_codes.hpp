#pragma once

// Spatial cell models and multi-frequency grid codes: Gaussian place cells,
// von Mises head-direction cells, the joint softmax pose observation model,
// hexagonal code synthesis with isotropy diagnostics, the temporal loss
// weight schedule, and a categorical KL evaluator.

#include <span>
#include <vector>

#include "hexplore/geometry.hpp"
#include "hexplore/vec2.hpp"

namespace hexplore::codes {

// N place cells with Gaussian receptive fields (centers mu_i, widths sigma_i).
struct PlaceCellEnsemble {
    std::vector<Vec2> centers;
    std::vector<double> widths;

    PlaceCellEnsemble() = default;
    PlaceCellEnsemble(std::vector<Vec2> centers_, std::vector<double> widths_);

    std::size_t size() const { return centers.size(); }

    // Centers on a uniform n x n grid over [0, extent]^2, shared width.
    static PlaceCellEnsemble uniform_grid(int n_per_side, double extent, double sigma);
};

// M head-direction cells with von Mises tuning (preferred phi_j, concentration kappa_j).
struct HeadDirectionEnsemble {
    std::vector<double> preferred;
    std::vector<double> concentration;

    HeadDirectionEnsemble() = default;
    HeadDirectionEnsemble(std::vector<double> preferred_, std::vector<double> concentration_);

    std::size_t size() const { return preferred.size(); }

    static HeadDirectionEnsemble uniform(int count, double kappa);
};

// K frequency vectors of equal magnitude. Throws if magnitudes differ by
// more than 1e-12.
struct GridCode {
    std::vector<geometry::FrequencyVector> components;

    GridCode() = default;
    explicit GridCode(std::vector<geometry::FrequencyVector> components_);

    std::size_t count() const { return components.size(); }
};

// Frame weights: w_0 = 2*w_init, w_t = w_init*decay^(t-1) for 1 <= t < 5,
// then 1.0.
struct TemporalWeightSchedule {
    double w_init = 5.0;
    double decay = 0.8;
    int horizon = 100;

    TemporalWeightSchedule() = default;
    TemporalWeightSchedule(double w_init_, double decay_, int horizon_);
};

struct IsotropyReport {
    double first_order_residual = 0.0;   // || sum u_j ||
    double second_order_residual = 0.0;  // max entry of | sum u_j u_j^T - lambda I |
    double lambda = 0.0;                 // K / 2
};

// Normalized Gaussian activations; sums to 1.
std::vector<double> place_activations(const PlaceCellEnsemble& e, Vec2 r);

// Normalized von Mises activations; sums to 1.
std::vector<double> hd_activations(const HeadDirectionEnsemble& e, double theta);

// Softmax over the concatenated log-potentials of all N + M cells:
// -|r - mu_i|^2 / (2 sigma_i^2) for place cells, kappa_j cos(theta - phi_j)
// for head-direction cells.
std::vector<double> pose_cell_distribution(const PlaceCellEnsemble& place,
                                           const HeadDirectionEnsemble& hd,
                                           const geometry::Pose& p);

// Three equal-magnitude frequency vectors at base_angle + {0, 120, 240} degrees.
GridCode make_hex_code(double magnitude, double base_angle = 0.0);

// First/second order isotropy residuals against lambda = K/2.
IsotropyReport isotropy_check(const GridCode& code);

// Superposed stripe activity A(r) = sum_j cos(q_j . r), in [-K, K].
double hex_activity(const GridCode& code, Vec2 r);

std::vector<double> temporal_weights(const TemporalWeightSchedule& s);

// sum p_i log(p_i / q_i). Inputs must be distributions (sum 1 within 1e-9)
// of equal length with q > 0 wherever p > 0.
double categorical_kl(std::span<const double> p, std::span<const double> q);

}  // namespace hexplore::codes
