#include "lfsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lfsim {

int label_of(double phi_true, const BearingClassifierModel& m) {
    if (phi_true < -m.psi_max || phi_true >= m.psi_max) return out_of_fov_label(m);
    const double w = class_width(m);
    int k = static_cast<int>(std::floor((phi_true + m.psi_max) / w));
    k = std::clamp(k, 0, m.n_classes_in_fov - 1);
    return k;
}

double class_center(int label, const BearingClassifierModel& m) {
    if (label < 0 || label >= m.n_classes_in_fov) {
        throw OutOfFovLabel("class_center: label has no angle");
    }
    return -m.psi_max + (static_cast<double>(label) + 0.5) * class_width(m);
}

BearingMeasurement measure_bearing(double phi_true, const BearingClassifierModel& m, Rng& rng) {
    BearingMeasurement out;
    out.label = label_of(phi_true, m);
    if (out.label == out_of_fov_label(m)) return out;

    if (m.misclass_rate > 0.0 && m.misclass_spread > 0 && rng.uniform01() < m.misclass_rate) {
        // Nonzero shift in [-spread, spread], clamped to in-FOV labels.
        int shift = rng.uniform_int(1, m.misclass_spread);
        if (rng.uniform01() < 0.5) shift = -shift;
        out.label = std::clamp(out.label + shift, 0, m.n_classes_in_fov - 1);
    }
    out.phi_hat = class_center(out.label, m);
    return out;
}

std::optional<double> sigma_clipped_mean(std::span<const double> values, double k, int max_iter) {
    std::vector<double> keep(values.begin(), values.end());
    for (int iter = 0; iter < max_iter && !keep.empty(); ++iter) {
        const std::size_t n = keep.size();
        double sum = 0.0;
        for (double x : keep) sum += x;
        const double mean = sum / static_cast<double>(n);

        double ss = 0.0;
        for (double x : keep) ss += (x - mean) * (x - mean);
        const double std_dev = std::sqrt(ss / static_cast<double>(n));

        std::vector<double> sorted = keep;
        std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
        double median = sorted[n / 2];
        if (n % 2 == 0) {
            std::nth_element(sorted.begin(), sorted.begin() + n / 2 - 1, sorted.end());
            median = 0.5 * (median + sorted[n / 2 - 1]);
        }

        std::vector<double> next;
        next.reserve(n);
        for (double x : keep) {
            if (std::abs(x - median) <= k * std_dev) next.push_back(x);
        }
        if (next.size() == n) break;
        keep.swap(next);
    }
    if (keep.empty()) return std::nullopt;
    double sum = 0.0;
    for (double x : keep) sum += x;
    return sum / static_cast<double>(keep.size());
}

double measure_depth(double L_true, const DepthEstimatorModel& m, Rng& rng) {
    std::vector<double> patch(static_cast<std::size_t>(m.patch_size));
    for (double& px : patch) px = L_true + rng.normal(0.0, m.noise_sigma);

    // Background contamination: the first n_out pixels become far returns.
    const int n_out =
        static_cast<int>(std::lround(m.outlier_rate * static_cast<double>(m.patch_size)));
    for (int i = 0; i < n_out && i < m.patch_size; ++i) {
        patch[static_cast<std::size_t>(i)] =
            L_true + rng.uniform(m.outlier_offset_min, m.outlier_offset_max);
    }

    const std::optional<double> mean = sigma_clipped_mean(patch, m.sigma_clip_k);
    if (!mean) throw AllClipped("measure_depth: sigma clipping removed every pixel");
    return *mean;
}

}  // namespace lfsim
