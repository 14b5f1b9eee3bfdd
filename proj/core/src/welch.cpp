#include "pondera/constants.hpp"
#include "pondera/validate.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>

namespace pondera {

namespace {
// FFTW planning is not thread-safe
std::mutex fftw_mutex;
} // namespace

WelchResult welch_psd(std::span<const double> series, double dt,
                      std::size_t segment_length, double overlap) {
    if (segment_length == 0 || segment_length > series.size())
        throw ParameterError("segment_length must be in [1, series length]");
    if (overlap < 0.0 || overlap >= 1.0)
        throw ParameterError("overlap must lie in [0, 1)");
    if (dt <= 0.0) throw ParameterError("dt must be positive");

    const std::size_t n = segment_length;
    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(n * (1.0 - overlap)));
    const std::size_t n_seg = (series.size() - n) / hop + 1;
    const std::size_t n_bins = n / 2 + 1;

    std::vector<double> window(n);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * phys::pi * i / n));  // Hann
        wsum2 += window[i] * window[i];
    }

    std::vector<double> buf(n);
    std::vector<fftw_complex> out(n_bins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(), out.data(),
                                    FFTW_ESTIMATE);
    }

    std::vector<double> mean(n_bins, 0.0), m2(n_bins, 0.0);
    const double norm = 2.0 * dt / wsum2;  // one-sided
    for (std::size_t k = 0; k < n_seg; ++k) {
        const double* seg = series.data() + k * hop;
        for (std::size_t i = 0; i < n; ++i) buf[i] = seg[i] * window[i];
        fftw_execute(plan);
        for (std::size_t j = 0; j < n_bins; ++j) {
            double p = norm * (out[j][0] * out[j][0] + out[j][1] * out[j][1]);
            if (j == 0 || (j == n_bins - 1 && n % 2 == 0)) p *= 0.5;  // DC, Nyquist
            // Welford update across segments
            const double d = p - mean[j];
            mean[j] += d / static_cast<double>(k + 1);
            m2[j] += d * (p - mean[j]);
        }
    }
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }

    WelchResult res;
    res.n_segments = static_cast<int>(n_seg);
    res.few_segments = n_seg < 8;
    res.freq_hz.resize(n_bins);
    res.psd = std::move(mean);
    res.stderr_psd.resize(n_bins);
    for (std::size_t j = 0; j < n_bins; ++j) {
        res.freq_hz[j] = static_cast<double>(j) / (static_cast<double>(n) * dt);
        res.stderr_psd[j] =
            n_seg > 1 ? std::sqrt(m2[j] / (static_cast<double>(n_seg) - 1.0) /
                                  static_cast<double>(n_seg))
                      : 0.0;
    }
    return res;
}

} // namespace pondera
