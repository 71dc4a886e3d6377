#pragma once

// Scenario configuration: every physical and pipeline parameter in one
// struct, with JSON (de)serialization, validation, and a stable digest.
//
// Angles are stored in radians internally; the JSON schema uses explicit
// units in field names (prf_hz, crab_angle_deg, ...).

#include <cstdint>
#include <optional>
#include <string>

#include "gmtd/common.hpp"

namespace gmtd {

enum class Hypothesis { H0, H1 };

enum class CovarianceMode { Exact, Sample };

struct GridSize {
    int n_angle = 64;
    int n_doppler = 64;

    friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct RadarScenarioConfig {
    // Array and waveform.
    int num_elements = 18;  // N
    int num_pulses = 18;    // M
    double carrier_freq_hz = 450e6;
    double prf_hz = 300.0;
    // Element spacing in meters; unset means half a wavelength.
    std::optional<double> element_spacing_m;
    double platform_speed_mps = 50.0;
    // Angles are stored in degrees exactly as configured (bit-exact JSON
    // round-trip); use the *_rad() accessors for math.
    double crab_angle_deg = 0.0;  // velocity/array misalignment

    // Powers (noise_power is the linear per-element-pulse noise floor; CNR is
    // the total clutter power relative to it, SNR the target power).
    double cnr_db = 40.0;
    double snr_db = 0.0;
    double noise_power = 1.0;

    // Target (used under H1 only).
    double target_doppler_hz = -50.0;
    double target_spatial_freq = 0.0;  // cycles/element

    // Clutter patch model. Azimuth support defaults to the full circle
    // (sampled half-open); a narrower span models a directive antenna
    // footprint and is sampled with both endpoints included. The taper is a
    // cosine-squared roll-off applied over that many degrees at each support
    // edge. amplitude_jitter multiplies each patch power by an i.i.d.
    // unit-mean exponential draw per scene realization (seeded).
    int num_clutter_patches = 361;
    double backlobe_gain_db = 0.0;  // attenuation for patches with cos(az) < 0
    double azimuth_start_deg = 0.0;
    double azimuth_end_deg = 360.0;
    double edge_taper_deg = 0.0;
    bool amplitude_jitter = false;

    // Covariance source for the detection pipeline.
    CovarianceMode covariance_mode = CovarianceMode::Exact;
    int num_snapshots = 648;  // sample mode only; ~2 NM for stable estimates

    // Spectral map grid: uniform half-open axes over [-0.5, 0.5)
    // cycles/element and [-prf/2, prf/2) Hz.
    GridSize grid;

    // Denoise threshold: T = mean + k_sigma * std over the lowest 50% of map
    // values.
    double k_sigma = 3.0;

    // Region extraction.
    int min_region_area = 3;
    int edge_guard_cols = 2;

    // Classifier / Monte Carlo training.
    bool pooled_covariance = false;
    double train_exclusion_hz = 10.0;  // keep-out band around ridge crossings
    double train_h1_fraction = 0.5;

    std::uint64_t rng_seed = 1;

    friend bool operator==(const RadarScenarioConfig&, const RadarScenarioConfig&) = default;

    double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }
    double element_spacing() const {
        return element_spacing_m ? *element_spacing_m : 0.5 * wavelength_m();
    }
    double crab_angle_rad() const { return crab_angle_deg * kPi / 180.0; }
    int space_time_dim() const { return num_elements * num_pulses; }
};

// Throws validation_error on any out-of-range field.
void validate(const RadarScenarioConfig& cfg);

// JSON round-trip. load_config validates; save returns the canonical
// serialized form (stable key order, shortest float representation).
RadarScenarioConfig config_from_json_text(const std::string& text);
RadarScenarioConfig load_config(const std::string& path);
std::string config_to_json_text(const RadarScenarioConfig& cfg);
void save_config(const RadarScenarioConfig& cfg, const std::string& path);

// FNV-1a-64 digest of the canonical serialized config, as "0x..." hex.
std::string config_digest(const RadarScenarioConfig& cfg);

// The reference scenario shipped in configs/crabbed_scene.json: 18x18
// space-time aperture, 45 degree crab, CNR 40 dB, SNR 0 dB target at -50 Hz,
// clutter main-beam footprint over azimuth [80, 142] degrees.
RadarScenarioConfig crabbed_scene_config();

}  // namespace gmtd
