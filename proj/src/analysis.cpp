#include "synthrm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace synthrm {

double point_biserial(const Image<uint8_t>& mask, const Image<float>& signal,
                      const Image<uint8_t>& valid) {
    if (!mask.same_shape(signal) || !mask.same_shape(valid))
        throw std::invalid_argument("point_biserial: dimension mismatch");

    double sum1 = 0, sum0 = 0, sum = 0, sum_sq = 0;
    size_t n1 = 0, n0 = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
        if (!valid.data[i]) continue;
        double s = signal.data[i];
        sum += s;
        sum_sq += s * s;
        if (mask.data[i]) { sum1 += s; ++n1; }
        else { sum0 += s; ++n0; }
    }
    const size_t n = n1 + n0;
    if (n1 == 0 || n0 == 0)
        throw std::domain_error("point_biserial: degenerate mask (one group empty)");
    const double mu = sum / n;
    const double var = sum_sq / n - mu * mu;
    if (var <= 0)
        throw std::domain_error("point_biserial: constant signal");
    const double mu1 = sum1 / n1, mu0 = sum0 / n0;
    return (mu1 - mu0) / std::sqrt(var) * std::sqrt((double)n1 * (double)n0 / ((double)n * n));
}

int Histogram::bin_of(double v) const {
    int b = (int)std::floor((v - bin_lo) / bin_width);
    return std::clamp(b, 0, (int)((bin_hi - bin_lo) / bin_width) - 1);
}

void Histogram::add(double v) {
    if (counts.empty()) counts.assign((size_t)((bin_hi - bin_lo) / bin_width), 0);
    counts[bin_of(v)]++;
}

SampleStats sample_stats(const Image<float>& map) {
    double sum = 0, sum_sq = 0, mx = -std::numeric_limits<double>::infinity();
    size_t n = 0;
    for (float v : map.data) {
        if (!std::isfinite(v)) continue;
        sum += v;
        sum_sq += double(v) * v;
        mx = std::max(mx, (double)v);
        ++n;
    }
    if (n == 0) throw std::domain_error("sample_stats: no finite pixel");
    SampleStats s;
    s.finite_pixels = n;
    s.mean_db = sum / n;
    s.max_db = mx;
    s.std_db = std::sqrt(std::max(0.0, sum_sq / n - s.mean_db * s.mean_db));
    return s;
}

MixtureFit fit_gaussian_mixture(const std::vector<double>& samples, int components) {
    const size_t n = samples.size();
    if (n < (size_t)components)
        throw std::invalid_argument("fit_gaussian_mixture: too few samples");
    if (components != 1 && components != 2)
        throw std::invalid_argument("fit_gaussian_mixture: 1 or 2 components only");

    MixtureFit fit;
    if (components == 1) {
        double mu = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
        double var = 0;
        for (double s : samples) var += (s - mu) * (s - mu);
        var = std::max(var / n, 1e-12);
        fit.weight = {1.0};
        fit.mean = {mu};
        fit.stddev = {std::sqrt(var)};
        fit.log_likelihood = -0.5 * n * (std::log(2 * kPi * var) + 1.0);
        fit.bic = -2 * fit.log_likelihood + 2 * std::log((double)n);
        return fit;
    }

    // Deterministic init: split at the median.
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double split = sorted[n / 2];
    double mu[2] = {0, 0}, var[2] = {1, 1}, w[2] = {0.5, 0.5};
    {
        double s0 = 0, s1 = 0, q0 = 0, q1 = 0;
        size_t c0 = 0, c1 = 0;
        for (double s : samples) {
            if (s < split) { s0 += s; q0 += s * s; ++c0; }
            else { s1 += s; q1 += s * s; ++c1; }
        }
        if (c0 == 0 || c1 == 0) { c0 = n / 2; c1 = n - c0; } // all equal: EM degenerates below
        mu[0] = c0 ? s0 / c0 : sorted.front();
        mu[1] = c1 ? s1 / c1 : sorted.back();
        var[0] = std::max(c0 ? q0 / c0 - mu[0] * mu[0] : 1.0, 1e-6);
        var[1] = std::max(c1 ? q1 / c1 - mu[1] * mu[1] : 1.0, 1e-6);
        w[0] = (double)c0 / n;
        w[1] = (double)c1 / n;
    }

    std::vector<double> resp(n);
    double ll = 0;
    for (int iter = 0; iter < 200; ++iter) {
        ll = 0;
        double sw0 = 0, sm0 = 0, sv0 = 0, sw1 = 0, sm1 = 0, sv1 = 0;
        for (size_t i = 0; i < n; ++i) {
            double x = samples[i];
            double p0 = w[0] / std::sqrt(2 * kPi * var[0]) *
                        std::exp(-(x - mu[0]) * (x - mu[0]) / (2 * var[0]));
            double p1 = w[1] / std::sqrt(2 * kPi * var[1]) *
                        std::exp(-(x - mu[1]) * (x - mu[1]) / (2 * var[1]));
            double tot = p0 + p1;
            if (tot < 1e-300) tot = 1e-300;
            ll += std::log(tot);
            double r = p0 / tot;
            resp[i] = r;
            sw0 += r; sm0 += r * x; sv0 += r * x * x;
            sw1 += 1 - r; sm1 += (1 - r) * x; sv1 += (1 - r) * x * x;
        }
        if (sw0 < 1e-9 || sw1 < 1e-9) break;
        mu[0] = sm0 / sw0;
        mu[1] = sm1 / sw1;
        var[0] = std::max(sv0 / sw0 - mu[0] * mu[0], 1e-6);
        var[1] = std::max(sv1 / sw1 - mu[1] * mu[1], 1e-6);
        w[0] = sw0 / n;
        w[1] = sw1 / n;
    }
    fit.weight = {w[0], w[1]};
    fit.mean = {mu[0], mu[1]};
    fit.stddev = {std::sqrt(var[0]), std::sqrt(var[1])};
    fit.log_likelihood = ll;
    fit.bic = -2 * ll + 5 * std::log((double)n);
    return fit;
}

GainStats gain_statistics(const std::vector<Image<float>>& path_gain_maps) {
    if (path_gain_maps.empty())
        throw std::invalid_argument("gain_statistics: need at least one map");
    GainStats out;
    std::vector<double> max_samples;
    for (const auto& map : path_gain_maps) {
        try {
            SampleStats s = sample_stats(map);
            out.mean_hist.add(s.mean_db);
            out.max_hist.add(s.max_db);
            out.std_hist.add(s.std_db);
            max_samples.push_back(s.max_db);
            out.per_sample.push_back(s);
        } catch (const std::domain_error&) {
            ++out.skipped_empty;
        }
    }
    if (out.per_sample.empty())
        throw std::invalid_argument("gain_statistics: every map was empty");
    if (max_samples.size() >= 2) {
        out.bic_one = fit_gaussian_mixture(max_samples, 1).bic;
        out.bic_two = fit_gaussian_mixture(max_samples, 2).bic;
    }
    return out;
}

namespace {

std::vector<double> gaussian_kernel_11() {
    std::vector<double> k(11);
    double sum = 0;
    for (int i = 0; i < 11; ++i) {
        double x = i - 5;
        k[i] = std::exp(-x * x / (2 * 1.5 * 1.5));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable Gaussian filter restricted to the region where the full window fits.
Image<double> gauss_filter(const Image<double>& img) {
    const auto k = gaussian_kernel_11();
    Image<double> tmp(img.width, img.height, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 5; x < img.width - 5; ++x) {
            double s = 0;
            for (int i = 0; i < 11; ++i) s += k[i] * img.at(x + i - 5, y);
            tmp.at(x, y) = s;
        }
    Image<double> out(img.width, img.height, 0.0);
    for (int y = 5; y < img.height - 5; ++y)
        for (int x = 5; x < img.width - 5; ++x) {
            double s = 0;
            for (int i = 0; i < 11; ++i) s += k[i] * tmp.at(x, y + i - 5);
            out.at(x, y) = s;
        }
    return out;
}

} // namespace

ImageMetrics image_metrics(const Image<float>& pred, const Image<float>& gt, double data_range) {
    if (!pred.same_shape(gt)) throw std::invalid_argument("image_metrics: dimension mismatch");
    if (data_range <= 0) throw std::invalid_argument("image_metrics: data_range must be > 0");
    const size_t n = pred.size();
    if (n == 0) throw std::invalid_argument("image_metrics: empty images");

    double se = 0, ae = 0, gt_sq = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = (double)pred.data[i] - gt.data[i];
        se += d * d;
        ae += std::abs(d);
        gt_sq += double(gt.data[i]) * gt.data[i];
    }
    if (gt_sq <= 0) throw std::domain_error("image_metrics: NMSE undefined for all-zero gt");

    ImageMetrics m;
    m.nmse = se / gt_sq;
    m.mae = ae / n;
    double mse = se / n;
    m.psnr = mse < 1e-12 ? 99.0 : db20(data_range) - db10(mse);
    m.psnr = std::min(m.psnr, 99.0);

    // SSIM over the fully-covered interior (needs an 11x11 window).
    if (pred.width < 11 || pred.height < 11) {
        m.ssim = std::numeric_limits<double>::quiet_NaN();
        return m;
    }
    Image<double> a(pred.width, pred.height), b(pred.width, pred.height);
    Image<double> aa(pred.width, pred.height), bb(pred.width, pred.height), ab(pred.width, pred.height);
    for (size_t i = 0; i < n; ++i) {
        a.data[i] = pred.data[i];
        b.data[i] = gt.data[i];
        aa.data[i] = a.data[i] * a.data[i];
        bb.data[i] = b.data[i] * b.data[i];
        ab.data[i] = a.data[i] * b.data[i];
    }
    Image<double> mu_a = gauss_filter(a), mu_b = gauss_filter(b);
    Image<double> s_aa = gauss_filter(aa), s_bb = gauss_filter(bb), s_ab = gauss_filter(ab);
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    double ssim_sum = 0;
    size_t count = 0;
    for (int y = 5; y < pred.height - 5; ++y)
        for (int x = 5; x < pred.width - 5; ++x) {
            double ma = mu_a.at(x, y), mb = mu_b.at(x, y);
            double va = s_aa.at(x, y) - ma * ma;
            double vb = s_bb.at(x, y) - mb * mb;
            double cov = s_ab.at(x, y) - ma * mb;
            double v = ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ssim_sum += v;
            ++count;
        }
    m.ssim = ssim_sum / count;
    return m;
}

} // namespace synthrm
