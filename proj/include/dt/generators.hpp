#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "dt/errors.hpp"
#include "dt/flight.hpp"
#include "dt/grid.hpp"

namespace dt {

// Precipitation below this rate is truncated to exact zero.
inline constexpr double kStormTruncateRate = 0.1;

namespace detail {

// mt19937_64 output mapped to [0,1); bit-reproducible across platforms,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do { v = rng(); } while (v >= limit);
    return v % n;
}

// In-place box blur along one axis, radius r, edge-clamped window.
inline void box_blur_axis(std::vector<double>& v, int width, int height, int r, bool along_rows) {
    if (r <= 0) return;
    std::vector<double> line;
    int outer = along_rows ? height : width;
    int inner = along_rows ? width : height;
    line.resize(inner);
    std::vector<double> prefix(inner + 1);
    for (int o = 0; o < outer; ++o) {
        for (int i = 0; i < inner; ++i)
            line[i] = along_rows ? v[std::size_t(o) * width + i] : v[std::size_t(i) * width + o];
        prefix[0] = 0.0;
        for (int i = 0; i < inner; ++i) prefix[i + 1] = prefix[i] + line[i];
        for (int i = 0; i < inner; ++i) {
            int lo = std::max(0, i - r);
            int hi = std::min(inner - 1, i + r);
            double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
            if (along_rows) v[std::size_t(o) * width + i] = mean;
            else v[std::size_t(i) * width + o] = mean;
        }
    }
}

}  // namespace detail

namespace detail {

// Unit-variance smoothed noise at one spatial scale.
inline std::vector<double> smoothed_noise(int width, int height, int radius,
                                          std::mt19937_64& rng) {
    std::vector<double> noise(std::size_t(width) * std::size_t(height));
    for (double& x : noise) x = uniform01(rng);
    for (int pass = 0; pass < 3; ++pass) {
        box_blur_axis(noise, width, height, radius, true);
        box_blur_axis(noise, width, height, radius, false);
    }
    double mean = 0.0;
    for (double x : noise) mean += x;
    mean /= double(noise.size());
    double var = 0.0;
    for (double x : noise) var += (x - mean) * (x - mean);
    double sd = std::sqrt(var / double(noise.size()));
    if (sd > 0.0)
        for (double& x : noise) x = (x - mean) / sd;
    return noise;
}

}  // namespace detail

// Spatially correlated binary cloud field. Two-scale smoothed noise (broad
// banks plus finer gaps that break up all but the deepest cores) is
// thresholded at the coverage quantile, so the cloudy count is exactly
// round(coverage * n).
inline EnvGrid gen_cloud_field(int width, int height, double coverage, int correlation_len,
                               std::uint64_t seed, double resolution_km = 1.0) {
    if (!(coverage >= 0.0 && coverage <= 1.0)) throw ParamError("coverage must lie in [0,1]");
    if (correlation_len < 0) throw ParamError("correlation length must be non-negative");
    EnvGrid g = make_grid(width, height, resolution_km, GridKind::CloudMask);
    std::mt19937_64 rng(seed);
    std::vector<double> noise = detail::smoothed_noise(width, height, correlation_len, rng);
    std::vector<double> gaps =
        detail::smoothed_noise(width, height, std::max(1, correlation_len / 5), rng);
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] += 0.75 * gaps[i];
    std::size_t n = g.cell_count();
    std::size_t k = std::size_t(std::llround(coverage * double(n)));
    if (k == 0) return g;
    if (k >= n) {
        std::fill(g.values.begin(), g.values.end(), 1.0);
        return g;
    }
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    auto higher = [&](std::uint32_t a, std::uint32_t b) {
        if (noise[a] != noise[b]) return noise[a] > noise[b];
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + k, idx.end(), higher);
    for (std::size_t i = 0; i < k; ++i) g.values[idx[i]] = 1.0;
    return g;
}

// Sparse storm field: n_cells Gaussian rain cells, each peaking at peak_rate,
// summed and clamped to peak_rate; rates below the truncation cutoff are zero.
inline EnvGrid gen_storm_field(int width, int height, int n_cells, double peak_rate,
                               int cluster_radius, std::uint64_t seed,
                               double resolution_km = 10.0) {
    if (n_cells < 0) throw ParamError("storm cell count must be non-negative");
    if (peak_rate <= 0.0) throw ParamError("peak rate must be positive");
    if (cluster_radius < 1) throw ParamError("cluster radius must be >= 1");
    EnvGrid g = make_grid(width, height, resolution_km, GridKind::Precip);
    std::mt19937_64 rng(seed);
    double sigma = cluster_radius / 2.0;
    // Beyond this distance a bump falls under the truncation cutoff anyway.
    int cut = int(std::ceil(sigma * std::sqrt(2.0 * std::log(peak_rate / (0.5 * kStormTruncateRate))))) + 1;
    for (int i = 0; i < n_cells; ++i) {
        int cx = int(detail::uniform_below(rng, std::uint64_t(width)));
        int cy = int(detail::uniform_below(rng, std::uint64_t(height)));
        for (int r = std::max(0, cy - cut); r <= std::min(height - 1, cy + cut); ++r) {
            for (int c = std::max(0, cx - cut); c <= std::min(width - 1, cx + cut); ++c) {
                double d2 = double(c - cx) * (c - cx) + double(r - cy) * (r - cy);
                g.at(c, r) += peak_rate * std::exp(-d2 / (2.0 * sigma * sigma));
            }
        }
    }
    for (double& v : g.values) {
        v = std::min(v, peak_rate);
        if (v < kStormTruncateRate) v = 0.0;
    }
    return g;
}

// Sparse population hotspots. The first city peaks at exactly max_density;
// the rest are scaled down by a skewed random factor.
inline EnvGrid gen_population_field(int width, int height, int n_cities, double max_density,
                                    std::uint64_t seed, double resolution_km = 1.0) {
    if (n_cities < 0) throw ParamError("city count must be non-negative");
    if (max_density <= 0.0) throw ParamError("max density must be positive");
    EnvGrid g = make_grid(width, height, resolution_km, GridKind::Population);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_cities; ++i) {
        int cx = int(detail::uniform_below(rng, std::uint64_t(width)));
        int cy = int(detail::uniform_below(rng, std::uint64_t(height)));
        double sigma = 2.0 + 4.0 * detail::uniform01(rng);
        double u = detail::uniform01(rng);
        double amp = (i == 0) ? max_density : max_density * (0.05 + 0.95 * u * u * u);
        int cut = int(std::ceil(sigma * 4.0)) + 1;
        for (int r = std::max(0, cy - cut); r <= std::min(height - 1, cy + cut); ++r) {
            for (int c = std::max(0, cx - cut); c <= std::min(width - 1, cx + cut); ++c) {
                double d2 = double(c - cx) * (c - cx) + double(r - cy) * (r - cy);
                g.at(c, r) += amp * std::exp(-d2 / (2.0 * sigma * sigma));
            }
        }
    }
    for (double& v : g.values) v = std::min(v, max_density);
    return g;
}

// Axis-aligned target squares with random side lengths, centers uniform over
// the along-track extent the flight covers; squares are clipped at borders.
inline EnvGrid gen_random_targets(const FlightPath& flight, int width, int height,
                                  double resolution_km, int n_targets, double min_side_km,
                                  double max_side_km, std::uint64_t seed) {
    if (n_targets < 0) throw ParamError("target count must be non-negative");
    if (min_side_km <= 0.0 || max_side_km < min_side_km)
        throw ParamError("target side bounds must satisfy 0 < min <= max");
    EnvGrid g = make_grid(width, height, resolution_km, GridKind::TargetMask);
    std::mt19937_64 rng(seed);
    int extent_cols = std::min<long long>(
        width, (long long)std::ceil(flight.n_cycles * flight.km_per_cycle() / resolution_km));
    extent_cols = std::max(extent_cols, 1);
    for (int i = 0; i < n_targets; ++i) {
        int cx = int(detail::uniform_below(rng, std::uint64_t(extent_cols)));
        int cy = int(detail::uniform_below(rng, std::uint64_t(height)));
        double side_km = min_side_km + (max_side_km - min_side_km) * detail::uniform01(rng);
        int side = std::max(1, int(std::llround(side_km / resolution_km)));
        int c0 = cx - side / 2;
        int r0 = cy - side / 2;
        for (int r = std::max(0, r0); r <= std::min(height - 1, r0 + side - 1); ++r)
            for (int c = std::max(0, c0); c <= std::min(width - 1, c0 + side - 1); ++c)
                g.at(c, r) = 1.0;
    }
    return g;
}

struct DegradeConfig {
    int coarsening = 1;
    double target_accuracy = 1.0;        // per-cell agreement for binary grids
    double advect_cells_per_cycle = 0.0; // staleness drift, in truth cells per cycle
    int cadence_cycles = 0;              // 0 or n_frames==1 means a single frame at cycle 0
    int latency_cycles = 0;
    int n_frames = 1;
    // Optional asymmetric flip pair for binary grids; when unset both
    // directions flip with probability 1 - target_accuracy.
    std::optional<double> flip_one_to_zero;
    std::optional<double> flip_zero_to_one;
    double noise_mae = 0.19;             // Laplace scale for continuous grids, truth units
};

// Degrade a truth grid into a coarse, stale, noisy overlay. The reference for
// the accuracy invariant is the shifted truth: shift by
// advect_cells_per_cycle * latency_cycles (applied at truth resolution),
// block-downsample by the coarsening factor (majority for binary grids, ties
// to cloudy; mean for continuous), then corrupt per frame.
inline GeoOverlay degrade_to_overlay(const EnvGrid& truth, const DegradeConfig& cfg,
                                     std::uint64_t seed) {
    truth.validate();
    if (cfg.coarsening < 1) throw ParamError("coarsening must be >= 1");
    if (!(cfg.target_accuracy > 0.5 && cfg.target_accuracy <= 1.0))
        throw ParamError("target accuracy must lie in (0.5, 1]");
    if (cfg.n_frames < 1) throw ParamError("overlay needs at least one frame");
    if (cfg.n_frames > 1 && cfg.cadence_cycles < 1)
        throw ParamError("multi-frame overlay needs a positive cadence");
    if (cfg.latency_cycles < 0) throw ParamError("latency must be non-negative");
    if (cfg.noise_mae < 0.0) throw ParamError("noise MAE must be non-negative");
    double p10 = cfg.flip_one_to_zero.value_or(1.0 - cfg.target_accuracy);
    double p01 = cfg.flip_zero_to_one.value_or(1.0 - cfg.target_accuracy);
    if (p10 < 0.0 || p10 >= 0.5 || p01 < 0.0 || p01 >= 0.5)
        throw ParamError("flip probabilities must lie in [0, 0.5)");

    int shift = int(std::llround(cfg.advect_cells_per_cycle * cfg.latency_cycles));
    bool binary = is_binary_kind(truth.kind);
    int ow = (truth.width + cfg.coarsening - 1) / cfg.coarsening;
    int oh = (truth.height + cfg.coarsening - 1) / cfg.coarsening;

    // Shifted truth at overlay resolution, shared by every frame.
    EnvGrid base = make_grid(ow, oh, truth.resolution_km * cfg.coarsening, truth.kind);
    for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
            int c0 = c * cfg.coarsening, c1 = std::min(truth.width, c0 + cfg.coarsening);
            int r0 = r * cfg.coarsening, r1 = std::min(truth.height, r0 + cfg.coarsening);
            double sum = 0.0;
            int n = 0;
            for (int rr = r0; rr < r1; ++rr) {
                for (int cc = c0; cc < c1; ++cc) {
                    int src = std::clamp(cc - shift, 0, truth.width - 1);
                    sum += truth.at(src, rr);
                    ++n;
                }
            }
            base.at(c, r) = binary ? double(sum * 2.0 >= n) : sum / n;
        }
    }

    GeoOverlay ov;
    ov.coarsening = cfg.coarsening;
    ov.cadence_cycles = cfg.n_frames > 1 ? cfg.cadence_cycles : 0;
    ov.latency_cycles = cfg.latency_cycles;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < cfg.n_frames; ++i) {
        GeoFrame f;
        f.valid_at_cycle = i * cfg.cadence_cycles;
        f.grid = base;
        for (double& v : f.grid.values) {
            if (binary) {
                double u = detail::uniform01(rng);
                if (v == 1.0 && u < p10) v = 0.0;
                else if (v == 0.0 && u < p01) v = 1.0;
            } else if (cfg.noise_mae > 0.0) {
                double u = detail::uniform01(rng) - 0.5;
                double mag = -cfg.noise_mae * std::log(std::max(1e-300, 1.0 - 2.0 * std::abs(u)));
                v = std::max(0.0, v + (u < 0 ? -mag : mag));
            }
        }
        ov.frames.push_back(std::move(f));
    }
    return ov;
}

}  // namespace dt
