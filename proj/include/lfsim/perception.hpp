#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "lfsim/errors.hpp"
#include "lfsim/rng.hpp"

namespace lfsim {

/// Signal-level model of the bearing classifier: the FOV (-psi_max, psi_max)
/// is split into n_classes_in_fov equal half-open intervals, each reported by
/// its center, plus one extra label for "leader not visible". A seeded
/// misclassification channel perturbs the label index.
struct BearingClassifierModel {
    int n_classes_in_fov = 20;
    double psi_max = 0.5236;     // radians
    double misclass_rate = 0.0;   // probability in [0, 1)
    int misclass_spread = 0;      // max label perturbation, in classes
    std::uint64_t rng_seed = 0;
};

inline double class_width(const BearingClassifierModel& m) {
    return 2.0 * m.psi_max / static_cast<double>(m.n_classes_in_fov);
}

inline int out_of_fov_label(const BearingClassifierModel& m) { return m.n_classes_in_fov; }

// Label of the half-open interval [-psi_max + k w, -psi_max + (k+1) w)
// containing phi_true, or the out-of-FOV label when phi_true < -psi_max or
// phi_true >= psi_max.
int label_of(double phi_true, const BearingClassifierModel& m);

// Center of an in-FOV class; throws OutOfFovLabel for the not-visible label.
double class_center(int label, const BearingClassifierModel& m);

struct BearingMeasurement {
    int label = 0;
    std::optional<double> phi_hat;  // empty when the leader is out of view
};

// Quantizes, then with probability misclass_rate shifts the label by a
// nonzero integer in [-spread, spread] clamped to valid in-FOV labels.
BearingMeasurement measure_bearing(double phi_true, const BearingClassifierModel& m, Rng& rng);

/// Synthetic depth-patch model of the double-bounding-box distance estimator:
/// patch_size pixels at L_true plus Gaussian noise, a fraction of them
/// replaced by background pixels offset into [outlier_offset_min, _max],
/// robust-averaged by iterative sigma clipping.
struct DepthEstimatorModel {
    int patch_size = 64;          // >= 4
    double noise_sigma = 0.0;     // meters
    double outlier_rate = 0.0;    // probability
    double outlier_offset_min = 2.0;  // meters
    double outlier_offset_max = 6.0;  // meters
    double sigma_clip_k = 2.0;
    std::uint64_t rng_seed = 0;
};

// Iterative sigma clip: keep samples with |x - median| <= k * std (std about
// the mean) until fixed point or max_iter passes; returns the survivor mean,
// or empty when everything was discarded.
std::optional<double> sigma_clipped_mean(std::span<const double> values, double k,
                                         int max_iter = 10);

// Throws AllClipped when the clip discards the whole patch.
double measure_depth(double L_true, const DepthEstimatorModel& m, Rng& rng);

/// First-order exponential smoother y = K_f x + (1 - K_f) y_prev, seeded by
/// the first sample.
class TemporalFilter {
public:
    explicit TemporalFilter(double K_f) : K_f_(K_f) {}

    double step(double raw) {
        if (!state_) {
            state_ = raw;
        } else {
            state_ = K_f_ * raw + (1.0 - K_f_) * *state_;
        }
        return *state_;
    }

    std::optional<double> state() const { return state_; }
    double gain() const { return K_f_; }
    void reset() { state_.reset(); }

private:
    double K_f_;
    std::optional<double> state_;
};

// One row of the per-pair estimate stream. Raw fields are empty while the
// leader is out of view; filtered fields then hold their previous value.
struct EstimateSample {
    double t = 0.0;
    std::optional<double> phi_raw;
    std::optional<double> L_raw;
    std::optional<double> phi_filtered;
    std::optional<double> L_filtered;
    bool visible = false;
};

}  // namespace lfsim
