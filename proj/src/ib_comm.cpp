#include "hexplore/ib_comm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexplore::ibcomm {

GaussianLatent::GaussianLatent(std::vector<double> mean_, std::vector<double> variance_)
    : mean(std::move(mean_)), variance(std::move(variance_)) {
    if (mean.empty() || mean.size() != variance.size())
        throw std::invalid_argument("GaussianLatent: mean/variance must be nonempty and equal length");
    for (double v : variance)
        if (!(v > 0.0)) throw std::invalid_argument("GaussianLatent: variance must be positive");
}

OccupancyImage::OccupancyImage(Grid2D<double> values_) : values(std::move(values_)) {
    for (double v : values.data())
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("OccupancyImage: values must lie in [0, 1]");
}

double gaussian_kl(const GaussianLatent& latent) {
    if (latent.mean.empty()) throw std::invalid_argument("gaussian_kl: empty latent");
    double kl = 0.0;
    for (std::size_t k = 0; k < latent.dim(); ++k) {
        const double mu = latent.mean[k];
        const double var = latent.variance[k];
        if (!(var > 0.0)) throw std::invalid_argument("gaussian_kl: variance must be positive");
        kl += mu * mu + var - 1.0 - std::log(var);
    }
    return 0.5 * kl;
}

MonteCarloEstimate kl_monte_carlo(const GaussianLatent& latent, int samples, std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("kl_monte_carlo: need at least 1000 samples");
    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        // log q(z) - log p(z) with z = mu + sigma * xi reduces to
        // sum_k [ 0.5 z_k^2 - 0.5 xi_k^2 - log sigma_k ].
        double value = 0.0;
        for (std::size_t k = 0; k < latent.dim(); ++k) {
            const double sigma = std::sqrt(latent.variance[k]);
            const double xi = rng.normal();
            const double z = latent.mean[k] + sigma * xi;
            value += 0.5 * z * z - 0.5 * xi * xi - std::log(sigma);
        }
        sum += value;
        sum_sq += value * value;
    }
    MonteCarloEstimate out;
    out.estimate = sum / samples;
    const double var = std::max(0.0, (sum_sq - sum * sum / samples) / (samples - 1));
    out.std_error = std::sqrt(var / samples);
    return out;
}

double reconstruction_bce(const OccupancyImage& target, const OccupancyImage& predicted) {
    if (target.values.rows() != predicted.values.rows() ||
        target.values.cols() != predicted.values.cols())
        throw std::invalid_argument("reconstruction_bce: shape mismatch");
    constexpr double kEps = 1e-7;
    double loss = 0.0;
    const auto& y = target.values.data();
    const auto& p = predicted.values.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double ph = std::clamp(p[i], kEps, 1.0 - kEps);
        loss -= y[i] * std::log(ph) + (1.0 - y[i]) * std::log(1.0 - ph);
    }
    return loss;
}

VibLossReport vib_loss(const OccupancyImage& target, const OccupancyImage& predicted,
                       const GaussianLatent& latent, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("vib_loss: beta must be > 0");
    VibLossReport report;
    report.reconstruction = reconstruction_bce(target, predicted);
    report.rate = gaussian_kl(latent);
    report.beta = beta;
    report.total = report.reconstruction + beta * report.rate;
    return report;
}

Message encode_map(const OccupancyImage& belief, int budget_bits,
                   CellCoord sender_position, std::uint32_t timestamp) {
    if (budget_bits < 1) throw std::invalid_argument("encode_map: budget must be >= 1 bit");
    const int side = belief.values.rows();
    if (side == 0 || side != belief.values.cols())
        throw std::invalid_argument("encode_map: belief must be square and nonempty");

    int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(budget_bits))));
    while (k * k > budget_bits) --k;  // guard against sqrt rounding
    k = std::max(1, std::min(k, side));

    Message msg;
    msg.grid_side = static_cast<std::uint16_t>(k);
    msg.bits_per_cell = 1;
    msg.sender_position = sender_position;
    msg.timestamp = timestamp;
    msg.payload.resize(static_cast<std::size_t>(k) * k);

    for (int bi = 0; bi < k; ++bi) {
        const int r0 = bi * side / k, r1 = (bi + 1) * side / k;
        for (int bj = 0; bj < k; ++bj) {
            const int c0 = bj * side / k, c1 = (bj + 1) * side / k;
            double sum = 0.0;
            int n = 0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) {
                    sum += belief.values(r, c);
                    ++n;
                }
            msg.payload[static_cast<std::size_t>(bi) * k + bj] = (n > 0 && sum / n > 0.5) ? 1 : 0;
        }
    }
    return msg;
}

OccupancyImage decode_map(const Message& msg, int target_side) {
    if (target_side < 1) throw std::invalid_argument("decode_map: target_side must be >= 1");
    const int k = msg.grid_side;
    if (k < 1 || msg.payload.size() != static_cast<std::size_t>(k) * k)
        throw std::invalid_argument("decode_map: malformed message");
    Grid2D<double> out(target_side, target_side, 0.0);
    for (int i = 0; i < target_side; ++i) {
        const int si = i * k / target_side;
        for (int j = 0; j < target_side; ++j) {
            const int sj = j * k / target_side;
            out(i, j) = msg.payload[static_cast<std::size_t>(si) * k + sj] ? 1.0 : 0.0;
        }
    }
    return OccupancyImage(std::move(out));
}

std::vector<std::uint8_t> serialize_message(const Message& msg) {
    std::vector<std::uint8_t> bytes;
    auto put_u16 = [&](std::uint16_t v) {
        bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    };
    put_u16(msg.grid_side);
    bytes.push_back(msg.bits_per_cell);
    put_u16(msg.sender_position.x);
    put_u16(msg.sender_position.y);
    put_u32(msg.timestamp);

    std::uint8_t acc = 0;
    int filled = 0;
    for (std::uint8_t bit : msg.payload) {
        acc = static_cast<std::uint8_t>((acc << 1) | (bit & 1));
        if (++filled == 8) {
            bytes.push_back(acc);
            acc = 0;
            filled = 0;
        }
    }
    if (filled > 0) bytes.push_back(static_cast<std::uint8_t>(acc << (8 - filled)));
    return bytes;
}

Message parse_message(const std::vector<std::uint8_t>& bytes) {
    constexpr std::size_t kHeader = 11;
    if (bytes.size() < kHeader) throw std::invalid_argument("parse_message: truncated header");
    auto get_u16 = [&](std::size_t at) {
        return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
    };
    Message msg;
    msg.grid_side = get_u16(0);
    msg.bits_per_cell = bytes[2];
    msg.sender_position.x = get_u16(3);
    msg.sender_position.y = get_u16(5);
    msg.timestamp = 0;
    for (int i = 3; i >= 0; --i) msg.timestamp = (msg.timestamp << 8) | bytes[7 + i];

    const std::size_t nbits =
        static_cast<std::size_t>(msg.grid_side) * msg.grid_side * msg.bits_per_cell;
    if (bytes.size() < kHeader + (nbits + 7) / 8)
        throw std::invalid_argument("parse_message: truncated payload");
    msg.payload.resize(nbits);
    for (std::size_t b = 0; b < nbits; ++b)
        msg.payload[b] = (bytes[kHeader + b / 8] >> (7 - b % 8)) & 1;
    return msg;
}

}  // namespace hexplore::ibcomm
