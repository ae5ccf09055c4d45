#pragma once

// Information-bottleneck loss evaluators (closed-form diagonal-Gaussian KL
// against a standard normal prior, pixel-wise binary cross-entropy, and the
// beta-weighted assembly) plus a deterministic fixed-rate map codec with
// exact bit accounting. Everything works in nats; bits appear only at the
// Message layer.

#include <cstdint>
#include <vector>

#include "hexplore/grid2d.hpp"
#include "hexplore/rng.hpp"

namespace hexplore::ibcomm {

// Diagonal Gaussian q = N(mean, diag(variance)). Variances strictly positive.
struct GaussianLatent {
    std::vector<double> mean;
    std::vector<double> variance;

    GaussianLatent() = default;
    GaussianLatent(std::vector<double> mean_, std::vector<double> variance_);

    std::size_t dim() const { return mean.size(); }
};

// Dense occupancy probabilities in [0, 1].
struct OccupancyImage {
    Grid2D<double> values;

    OccupancyImage() = default;
    explicit OccupancyImage(Grid2D<double> values_);
};

struct CellCoord {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
};

// One transmitted map message. payload holds grid_side^2 * bits_per_cell
// logical bits, row major.
struct Message {
    std::vector<std::uint8_t> payload;  // one logical bit per entry, 0 or 1
    std::uint16_t grid_side = 0;
    std::uint8_t bits_per_cell = 1;
    CellCoord sender_position;
    std::uint32_t timestamp = 0;

    std::size_t payload_bits() const { return payload.size(); }
};

struct VibLossReport {
    double reconstruction = 0.0;  // nats
    double rate = 0.0;            // nats
    double beta = 1.0;
    double total = 0.0;           // reconstruction + beta * rate, exactly
};

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// 1/2 sum_k (mu_k^2 + sigma_k^2 - 1 - log sigma_k^2); zero iff the latent
// matches the standard normal prior.
double gaussian_kl(const GaussianLatent& latent);

// Sample-mean estimate of E_q[log q(z) - log p(z)] with its standard error.
// Deterministic for a fixed seed; samples must be >= 1000.
MonteCarloEstimate kl_monte_carlo(const GaussianLatent& latent, int samples, std::uint64_t seed);

// -sum [y log y_hat + (1-y) log(1-y_hat)] with y_hat clamped to
// [1e-7, 1 - 1e-7]. Images must have equal dimensions.
double reconstruction_bce(const OccupancyImage& target, const OccupancyImage& predicted);

VibLossReport vib_loss(const OccupancyImage& target, const OccupancyImage& predicted,
                       const GaussianLatent& latent, double beta);

// Block-majority downsample to the largest k x k grid with k^2 bits within
// the budget (1 bit per cell; k is also capped at the source side). A block
// becomes 1 when its mean exceeds 0.5.
Message encode_map(const OccupancyImage& belief, int budget_bits,
                   CellCoord sender_position = {}, std::uint32_t timestamp = 0);

// Nearest-neighbor upsample of the payload to target_side^2; values in {0, 1}.
OccupancyImage decode_map(const Message& msg, int target_side);

// Wire format: little-endian header {grid_side u16, bits_per_cell u8,
// sender_x u16, sender_y u16, timestamp u32} then payload bits packed row
// major, MSB first, zero-padded to a byte boundary.
std::vector<std::uint8_t> serialize_message(const Message& msg);
Message parse_message(const std::vector<std::uint8_t>& bytes);

}  // namespace hexplore::ibcomm
