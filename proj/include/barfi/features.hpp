#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace barfi {

struct Bounds {
    double low = 0.0;
    double high = 1.0;
};

/// Rescale each coordinate to [0, 1] by its bounds, clamping outside values.
std::vector<double> normalize_state(std::span<const double> state, std::span<const Bounds> bounds);

/// Full Fourier cosine basis: one feature cos(pi * c . s) for every
/// coefficient vector c in {0..order}^d, enumerated with the first
/// coordinate varying slowest. c = 0 comes first, so entry 0 is always 1.
class FourierBasis {
public:
    FourierBasis(std::size_t order, std::vector<Bounds> bounds);

    std::size_t order() const { return order_; }
    std::size_t input_dim() const { return bounds_.size(); }
    std::size_t output_dim() const { return coefficients_.size() / input_dim(); }

    std::vector<double> features(std::span<const double> state) const;
    /// Features for an already-normalized state (entries in [0, 1]).
    std::vector<double> features_normalized(std::span<const double> unit_state) const;

private:
    std::size_t order_;
    std::vector<Bounds> bounds_;
    std::vector<double> coefficients_;  // row-major, output_dim x input_dim
};

std::vector<double> fourier_features(const FourierBasis& basis, std::span<const double> state);

/// Grid tile coder with uniformly offset tilings. Tiling k is shifted by
/// k / (tilings * tiles_per_dim) of the unit range along every dimension.
class TileCoder {
public:
    TileCoder(std::size_t tilings, std::size_t tiles_per_dim, std::vector<Bounds> bounds);

    std::size_t tilings() const { return tilings_; }
    std::size_t tiles_per_dim() const { return tiles_per_dim_; }
    std::size_t input_dim() const { return bounds_.size(); }
    std::size_t tiles_per_tiling() const { return tiles_per_tiling_; }
    std::size_t output_dim() const { return tilings_ * tiles_per_tiling_; }

    /// One active index per tiling, in tiling order; tiling k's indices lie
    /// in [k * tiles_per_tiling, (k + 1) * tiles_per_tiling).
    std::vector<std::size_t> active_indices(std::span<const double> state) const;

    /// Binary feature vector with a 1 at every active index.
    std::vector<double> features(std::span<const double> state) const;

private:
    std::size_t tilings_;
    std::size_t tiles_per_dim_;
    std::vector<Bounds> bounds_;
    std::size_t tiles_per_tiling_;
};

std::vector<std::size_t> tile_features(const TileCoder& coder, std::span<const double> state);

std::vector<double> onehot(std::size_t n, std::size_t i);

}  // namespace barfi
