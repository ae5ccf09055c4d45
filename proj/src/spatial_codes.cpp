#include "hexplore/spatial_codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexplore::codes {

namespace {

// Stable softmax over log-potentials.
std::vector<double> softmax(std::vector<double> logits) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logits) hi = std::max(hi, v);
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v - hi);
        total += v;
    }
    for (double& v : logits) v /= total;
    return logits;
}

}  // namespace

PlaceCellEnsemble::PlaceCellEnsemble(std::vector<Vec2> centers_, std::vector<double> widths_)
    : centers(std::move(centers_)), widths(std::move(widths_)) {
    if (centers.empty() || centers.size() != widths.size())
        throw std::invalid_argument("PlaceCellEnsemble: centers/widths must be nonempty and equal length");
    for (double w : widths)
        if (!(w > 0.0)) throw std::invalid_argument("PlaceCellEnsemble: widths must be positive");
}

PlaceCellEnsemble PlaceCellEnsemble::uniform_grid(int n_per_side, double extent, double sigma) {
    if (n_per_side < 1) throw std::invalid_argument("uniform_grid: n_per_side must be >= 1");
    std::vector<Vec2> centers;
    centers.reserve(static_cast<std::size_t>(n_per_side) * n_per_side);
    const double pitch = extent / n_per_side;
    for (int i = 0; i < n_per_side; ++i)
        for (int j = 0; j < n_per_side; ++j)
            centers.push_back({(j + 0.5) * pitch, (i + 0.5) * pitch});
    return PlaceCellEnsemble(std::move(centers),
                             std::vector<double>(static_cast<std::size_t>(n_per_side) * n_per_side, sigma));
}

HeadDirectionEnsemble::HeadDirectionEnsemble(std::vector<double> preferred_,
                                             std::vector<double> concentration_)
    : preferred(std::move(preferred_)), concentration(std::move(concentration_)) {
    if (preferred.empty() || preferred.size() != concentration.size())
        throw std::invalid_argument("HeadDirectionEnsemble: lists must be nonempty and equal length");
    for (double k : concentration)
        if (k < 0.0) throw std::invalid_argument("HeadDirectionEnsemble: concentration must be >= 0");
}

HeadDirectionEnsemble HeadDirectionEnsemble::uniform(int count, double kappa) {
    if (count < 1) throw std::invalid_argument("HeadDirectionEnsemble::uniform: count must be >= 1");
    std::vector<double> pref(count);
    for (int j = 0; j < count; ++j) pref[j] = kTwoPi * j / count;
    return HeadDirectionEnsemble(std::move(pref), std::vector<double>(count, kappa));
}

GridCode::GridCode(std::vector<geometry::FrequencyVector> components_)
    : components(std::move(components_)) {
    if (components.empty()) throw std::invalid_argument("GridCode: needs at least one component");
    const double q0 = components.front().magnitude;
    for (const auto& c : components)
        if (std::fabs(c.magnitude - q0) > 1e-12)
            throw std::invalid_argument("GridCode: component magnitudes must be equal");
}

TemporalWeightSchedule::TemporalWeightSchedule(double w_init_, double decay_, int horizon_)
    : w_init(w_init_), decay(decay_), horizon(horizon_) {
    if (!(w_init > 0.0)) throw std::invalid_argument("TemporalWeightSchedule: w_init must be > 0");
    if (!(decay > 0.0 && decay < 1.0))
        throw std::invalid_argument("TemporalWeightSchedule: decay must be in (0, 1)");
    if (horizon < 1) throw std::invalid_argument("TemporalWeightSchedule: horizon must be >= 1");
}

std::vector<double> place_activations(const PlaceCellEnsemble& e, Vec2 r) {
    if (e.size() == 0) throw std::invalid_argument("place_activations: empty ensemble");
    std::vector<double> logits(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double d2 = (r - e.centers[i]).norm_sq();
        logits[i] = -d2 / (2.0 * e.widths[i] * e.widths[i]);
    }
    return softmax(std::move(logits));
}

std::vector<double> hd_activations(const HeadDirectionEnsemble& e, double theta) {
    if (e.size() == 0) throw std::invalid_argument("hd_activations: empty ensemble");
    std::vector<double> logits(e.size());
    for (std::size_t j = 0; j < e.size(); ++j)
        logits[j] = e.concentration[j] * std::cos(theta - e.preferred[j]);
    return softmax(std::move(logits));
}

std::vector<double> pose_cell_distribution(const PlaceCellEnsemble& place,
                                           const HeadDirectionEnsemble& hd,
                                           const geometry::Pose& p) {
    if (place.size() == 0 || hd.size() == 0)
        throw std::invalid_argument("pose_cell_distribution: empty ensemble");
    std::vector<double> logits;
    logits.reserve(place.size() + hd.size());
    for (std::size_t i = 0; i < place.size(); ++i) {
        const double d2 = (p.position - place.centers[i]).norm_sq();
        logits.push_back(-d2 / (2.0 * place.widths[i] * place.widths[i]));
    }
    for (std::size_t j = 0; j < hd.size(); ++j)
        logits.push_back(hd.concentration[j] * std::cos(p.heading - hd.preferred[j]));
    return softmax(std::move(logits));
}

GridCode make_hex_code(double magnitude, double base_angle) {
    if (!(magnitude > 0.0) || !std::isfinite(magnitude))
        throw std::invalid_argument("make_hex_code: magnitude must be positive");
    std::vector<geometry::FrequencyVector> comps;
    comps.reserve(3);
    for (int j = 0; j < 3; ++j)
        comps.push_back(geometry::FrequencyVector::from_angle(base_angle + j * (kTwoPi / 3.0), magnitude));
    return GridCode(std::move(comps));
}

IsotropyReport isotropy_check(const GridCode& code) {
    Vec2 first{0.0, 0.0};
    Mat2 second{0.0, 0.0, 0.0, 0.0};
    for (const auto& c : code.components) {
        const Vec2 u = c.direction;
        first += u;
        second.m00 += u.x * u.x;
        second.m01 += u.x * u.y;
        second.m10 += u.y * u.x;
        second.m11 += u.y * u.y;
    }
    IsotropyReport rep;
    rep.lambda = static_cast<double>(code.count()) / 2.0;
    rep.first_order_residual = first.norm();
    Mat2 target{rep.lambda, 0.0, 0.0, rep.lambda};
    rep.second_order_residual = (second - target).max_abs();
    return rep;
}

double hex_activity(const GridCode& code, Vec2 r) {
    double a = 0.0;
    for (const auto& c : code.components) a += std::cos(c.vec().dot(r));
    return a;
}

std::vector<double> temporal_weights(const TemporalWeightSchedule& s) {
    std::vector<double> w(static_cast<std::size_t>(s.horizon));
    for (int t = 0; t < s.horizon; ++t) {
        if (t == 0)
            w[t] = 2.0 * s.w_init;
        else if (t < 5)
            w[t] = s.w_init * std::pow(s.decay, t - 1);
        else
            w[t] = 1.0;
    }
    return w;
}

double categorical_kl(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("categorical_kl: length mismatch");
    if (p.empty()) throw std::invalid_argument("categorical_kl: empty distributions");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("categorical_kl: negative probability");
        sp += p[i];
        sq += q[i];
    }
    if (std::fabs(sp - 1.0) > 1e-9 || std::fabs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("categorical_kl: inputs must sum to 1");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] <= 0.0) throw std::invalid_argument("categorical_kl: q has zero mass where p > 0");
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(kl, 0.0);
}

}  // namespace hexplore::codes
