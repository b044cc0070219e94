#pragma once

#include <vector>

#include "synthrm/math.hpp"

namespace synthrm {

// Point-biserial correlation between a binary mask and a continuous signal,
// restricted to valid pixels; population standard deviation.
// Throws std::domain_error when either group is empty or the signal is
// constant.
double point_biserial(const Image<uint8_t>& mask, const Image<float>& signal,
                      const Image<uint8_t>& valid);

struct SampleStats {
    double mean_db = 0, max_db = 0, std_db = 0; // population sigma, finite pixels only
    size_t finite_pixels = 0;
};

struct Histogram {
    double bin_lo = -160.0, bin_hi = 0.0, bin_width = 1.0;
    std::vector<size_t> counts;

    int bin_of(double v) const;
    void add(double v);
};

// 1D Gaussian mixture fit (deterministic EM) and its BIC score.
struct MixtureFit {
    std::vector<double> weight, mean, stddev;
    double log_likelihood = 0;
    double bic = 0;
};
MixtureFit fit_gaussian_mixture(const std::vector<double>& samples, int components);

struct GainStats {
    std::vector<SampleStats> per_sample;
    Histogram mean_hist, max_hist, std_hist;
    size_t skipped_empty = 0; // maps with no finite pixel
    double bic_one = 0, bic_two = 0; // mixture comparison on the P_max sample
    bool bimodal() const { return bic_two < bic_one; }
};

GainStats gain_statistics(const std::vector<Image<float>>& path_gain_maps);

SampleStats sample_stats(const Image<float>& map); // throws if no finite pixel

struct ImageMetrics {
    double nmse, mae, psnr, ssim;
};

// NMSE / MAE / PSNR (capped at 99 dB) / SSIM (11x11 Gaussian, sigma 1.5,
// k1 = 0.01, k2 = 0.03).
ImageMetrics image_metrics(const Image<float>& pred, const Image<float>& gt, double data_range);

} // namespace synthrm
