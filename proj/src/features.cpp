#include "barfi/features.hpp"

#include "barfi/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace barfi {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                             std::to_string(got));
    }
}

void require_bounds(const std::vector<Bounds>& bounds) {
    if (bounds.empty()) throw UsageError("featurizer needs at least one input dimension");
    for (const Bounds& b : bounds) {
        if (!(b.high > b.low)) throw UsageError("featurizer bounds must satisfy high > low");
    }
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

std::vector<double> normalize_state(std::span<const double> state, std::span<const Bounds> bounds) {
    require_dim(state.size(), bounds.size(), "normalize_state");
    std::vector<double> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double u = (state[i] - bounds[i].low) / (bounds[i].high - bounds[i].low);
        out[i] = std::clamp(u, 0.0, 1.0);
    }
    return out;
}

FourierBasis::FourierBasis(std::size_t order, std::vector<Bounds> bounds)
    : order_(order), bounds_(std::move(bounds)) {
    require_bounds(bounds_);
    const std::size_t d = bounds_.size();
    const std::size_t count = ipow(order_ + 1, d);
    coefficients_.resize(count * d);
    for (std::size_t row = 0; row < count; ++row) {
        std::size_t rem = row;
        for (std::size_t j = d; j-- > 0;) {
            coefficients_[row * d + j] = static_cast<double>(rem % (order_ + 1));
            rem /= order_ + 1;
        }
    }
}

std::vector<double> FourierBasis::features(std::span<const double> state) const {
    return features_normalized(normalize_state(state, bounds_));
}

std::vector<double> FourierBasis::features_normalized(std::span<const double> unit_state) const {
    const std::size_t d = input_dim();
    require_dim(unit_state.size(), d, "fourier_features");
    const std::size_t count = output_dim();
    std::vector<double> out(count);
    for (std::size_t row = 0; row < count; ++row) {
        double arg = 0.0;
        for (std::size_t j = 0; j < d; ++j) arg += coefficients_[row * d + j] * unit_state[j];
        out[row] = std::cos(std::numbers::pi * arg);
    }
    return out;
}

std::vector<double> fourier_features(const FourierBasis& basis, std::span<const double> state) {
    return basis.features(state);
}

TileCoder::TileCoder(std::size_t tilings, std::size_t tiles_per_dim, std::vector<Bounds> bounds)
    : tilings_(tilings), tiles_per_dim_(tiles_per_dim), bounds_(std::move(bounds)) {
    require_bounds(bounds_);
    if (tilings_ == 0 || tiles_per_dim_ == 0) throw UsageError("tile coder needs tilings >= 1 and tiles >= 1");
    tiles_per_tiling_ = ipow(tiles_per_dim_, bounds_.size());
}

std::vector<std::size_t> TileCoder::active_indices(std::span<const double> state) const {
    const std::vector<double> unit = normalize_state(state, bounds_);
    const double tiles = static_cast<double>(tiles_per_dim_);
    std::vector<std::size_t> out(tilings_);
    for (std::size_t k = 0; k < tilings_; ++k) {
        const double shift = static_cast<double>(k) / static_cast<double>(tilings_);  // in tile widths
        std::size_t flat = 0;
        for (double u : unit) {
            const double pos = std::floor(u * tiles + shift);
            const auto cell = static_cast<std::size_t>(std::clamp(pos, 0.0, tiles - 1.0));
            flat = flat * tiles_per_dim_ + cell;
        }
        out[k] = k * tiles_per_tiling_ + flat;
    }
    return out;
}

std::vector<double> TileCoder::features(std::span<const double> state) const {
    std::vector<double> out(output_dim(), 0.0);
    for (std::size_t idx : active_indices(state)) out[idx] = 1.0;
    return out;
}

std::vector<std::size_t> tile_features(const TileCoder& coder, std::span<const double> state) {
    return coder.active_indices(state);
}

std::vector<double> onehot(std::size_t n, std::size_t i) {
    if (i >= n) throw IndexError("onehot index " + std::to_string(i) + " out of range for size " + std::to_string(n));
    std::vector<double> out(n, 0.0);
    out[i] = 1.0;
    return out;
}

}  // namespace barfi
