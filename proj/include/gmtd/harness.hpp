#pragma once

// Pipeline orchestration: single-scene detection, Monte Carlo training set
// generation, and evaluation sweeps.
//
// Per-trial determinism: every trial derives its own scene seed (and, under
// H1, a target-Doppler draw) from the run seed via tagged streams, so results
// are independent of execution order and reproducible byte-for-byte.
// Detection reports exclude wall-clock timing; timings are written to a
// separate file so reports stay byte-identical across repeated runs.

#include <cstdint>
#include <string>
#include <vector>

#include "gmtd/classifier.hpp"
#include "gmtd/rng.hpp"
#include "gmtd/scene.hpp"

namespace gmtd {

struct StageTimings {
    double covariance_ms = 0.0;
    double spectrum_ms = 0.0;
    double denoise_ms = 0.0;
    double regions_ms = 0.0;
    double features_ms = 0.0;
    double total_ms = 0.0;
};

// One synthesized scene pushed through covariance -> mv_spectrum -> denoise
// -> label_regions -> discard_edge_regions -> trace/chain/features.
struct SceneResult {
    AngleDopplerMap raw;
    DenoisedMap denoised;
    std::vector<Region> regions;  // survivors after the edge discard
    std::vector<Contour> contours;
    std::vector<double> perimeters;
    std::vector<FeatureVector> features;
    int discarded_regions = 0;
    int target_region_index = -1;  // region containing the injected target cell; -1 if none/H0
    StageTimings timings;
};

SceneResult run_scene(const RadarScenarioConfig& cfg, Hypothesis hyp);

// Ridge Doppler values (Hz) where the clutter ridge crosses the given
// spatial frequency within the configured azimuth support.
std::vector<double> ridge_crossings_hz(const RadarScenarioConfig& cfg, double spatial_freq);

// Training target Doppler draw: uniform over +-[30, 120] Hz minus
// +-cfg.train_exclusion_hz around every ridge crossing of the target's angle
// column; a single uniform variate is mapped through the allowed intervals.
double draw_target_doppler(const RadarScenarioConfig& cfg, Rng& rng);

struct TrainingSet {
    std::vector<LabeledFeature> rows;
    int trials_run = 0;
    int h1_trials = 0;
    int skipped_trials = 0;  // trials with zero surviving regions
    int missed_targets = 0;  // H1 trials whose target cell fell in no region
};

// trials Monte Carlo scenes, H1/H0 interleaved per cfg.train_h1_fraction.
// Under H1 the region containing the grid cell nearest the injected target
// is labeled target; every other surviving region is labeled clutter.
TrainingSet generate_training_set(const RadarScenarioConfig& cfg, int trials, std::uint64_t seed);

struct ReportRow {
    int region_id = 0;
    int area = 0;
    double perimeter = 0.0;
    double cr = 0.0;
    double eb = 0.0;
    double d0 = 0.0;
    double d1 = 0.0;
    std::string label;  // "target" or "clutter"
};

struct DetectionReport {
    std::string config_digest;
    double threshold = 0.0;
    int support_count = 0;
    int discarded_regions = 0;
    std::vector<ReportRow> regions;
    StageTimings timings;  // written to timing.json, not report.json
};

// Full single-scene detection under H1 with the configured target. Writes
// report.json, timing.json, features.csv, regions.jsonl and raw/denoised map
// exports (CSV + 16-bit PGM) into out_dir.
DetectionReport run_detect(const RadarScenarioConfig& cfg, const ClassifierModel& model,
                           const std::string& out_dir);
DetectionReport run_detect(const std::string& config_path, const std::string& model_path,
                           const std::string& out_dir);

// generate_training_set + fit + save_model; prints a short summary to
// stdout.
ClassifierModel run_train(const RadarScenarioConfig& cfg, int trials, std::uint64_t seed,
                          const std::string& out_model_path);

struct EvalSummary {
    int trials = 0;
    int skipped_trials = 0;
    int target_correct = 0;
    int target_total = 0;
    int clutter_correct = 0;
    int clutter_total = 0;
    FeatureVector mean_target;   // mean features over true-target rows
    FeatureVector mean_clutter;  // mean features over true-clutter rows
    double target_accuracy() const {
        return target_total ? static_cast<double>(target_correct) / target_total : 0.0;
    }
    double clutter_accuracy() const {
        return clutter_total ? static_cast<double>(clutter_correct) / clutter_total : 0.0;
    }
};

// Fresh seeded trials (streams disjoint from training even for an equal
// seed); per-region classification scored against the injection ground
// truth.
EvalSummary run_eval(const RadarScenarioConfig& cfg, const ClassifierModel& model, int trials,
                     std::uint64_t seed);

std::string report_to_json_text(const DetectionReport& report);
std::string eval_to_json_text(const EvalSummary& summary);

}  // namespace gmtd
