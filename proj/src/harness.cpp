#include "gmtd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "gmtd/format.hpp"

namespace gmtd {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

int nearest_axis_index(const Eigen::VectorXd& axis, double x) {
    int best = 0;
    double best_d = std::abs(axis[0] - x);
    for (int i = 1; i < axis.size(); ++i) {
        const double d = std::abs(axis[i] - x);
        if (d < best_d) {  // strict: ties keep the lower index
            best_d = d;
            best = i;
        }
    }
    return best;
}

struct Interval {
    double lo;
    double hi;
};

// Remove [c-e, c+e] bands from a set of disjoint sorted intervals.
std::vector<Interval> subtract_band(const std::vector<Interval>& in, double lo, double hi) {
    std::vector<Interval> out;
    for (const auto& iv : in) {
        if (hi <= iv.lo || lo >= iv.hi) {
            out.push_back(iv);
            continue;
        }
        if (lo > iv.lo) out.push_back({iv.lo, lo});
        if (hi < iv.hi) out.push_back({hi, iv.hi});
    }
    return out;
}

}  // namespace

std::vector<double> ridge_crossings_hz(const RadarScenarioConfig& cfg, double spatial_freq) {
    const double lambda = cfg.wavelength_m();
    const double d = cfg.element_spacing();
    const double x = spatial_freq * lambda / d;  // cos(azimuth)
    std::vector<double> out;
    if (std::abs(x) > 1.0) return out;
    const double chi = cfg.crab_angle_rad();
    const double phi1 = std::acos(x);
    const double candidates[2] = {phi1, 2.0 * kPi - phi1};
    const double az0 = cfg.azimuth_start_deg;
    const double az1 = cfg.azimuth_end_deg;
    for (int i = 0; i < (candidates[0] == candidates[1] ? 1 : 2); ++i) {
        const double deg = candidates[i] * 180.0 / kPi;
        const bool inside = (az1 - az0 >= 360.0 - 1e-9) || (deg >= az0 && deg <= az1);
        if (!inside) continue;
        out.push_back((2.0 * cfg.platform_speed_mps / lambda) * std::cos(candidates[i] - chi));
    }
    return out;
}

double draw_target_doppler(const RadarScenarioConfig& cfg, Rng& rng) {
    // Training band: |f| in [30, 120] Hz, clipped to the unambiguous range.
    const double half_prf = 0.5 * cfg.prf_hz;
    std::vector<Interval> allowed;
    const double lo_mag = 30.0;
    const double hi_mag = std::min(120.0, half_prf);
    if (hi_mag > lo_mag) {
        allowed.push_back({-hi_mag, -lo_mag});
        allowed.push_back({lo_mag, hi_mag});
    }
    for (double c : ridge_crossings_hz(cfg, cfg.target_spatial_freq))
        allowed = subtract_band(allowed, c - cfg.train_exclusion_hz, c + cfg.train_exclusion_hz);

    double total = 0.0;
    for (const auto& iv : allowed) total += iv.hi - iv.lo;
    if (total <= 0.0)
        throw validation_error("draw_target_doppler: exclusion bands leave no allowed Doppler");
    double u = rng.uniform() * total;
    for (const auto& iv : allowed) {
        const double len = iv.hi - iv.lo;
        if (u < len) return iv.lo + u;
        u -= len;
    }
    return allowed.back().hi;  // u == total (measure-zero edge)
}

SceneResult run_scene(const RadarScenarioConfig& cfg, Hypothesis hyp) {
    validate(cfg);
    SceneResult res;
    const auto t_start = clock_type::now();

    auto t0 = clock_type::now();
    const Eigen::MatrixXcd K = effective_covariance(cfg, hyp);
    res.timings.covariance_ms = ms_since(t0);

    t0 = clock_type::now();
    res.raw = mv_spectrum(K, map_grid(cfg));
    res.timings.spectrum_ms = ms_since(t0);

    t0 = clock_type::now();
    res.denoised = denoise(res.raw, cfg.k_sigma);
    res.timings.denoise_ms = ms_since(t0);

    t0 = clock_type::now();
    const auto all_regions = label_regions(res.denoised, 8, cfg.min_region_area);
    res.regions = discard_edge_regions(all_regions, cfg.grid.n_angle, cfg.edge_guard_cols);
    res.discarded_regions = static_cast<int>(all_regions.size() - res.regions.size());
    res.timings.regions_ms = ms_since(t0);

    t0 = clock_type::now();
    res.contours.reserve(res.regions.size());
    res.perimeters.reserve(res.regions.size());
    res.features.reserve(res.regions.size());
    for (const auto& reg : res.regions) {
        Contour contour = trace_boundary(reg);
        const ChainCode chain = chain_code(contour);
        FeatureVector f;
        f.cr = circularity(reg, contour);
        f.eb = bending_energy(curvature(chain));
        res.perimeters.push_back(perimeter(contour));
        res.features.push_back(f);
        res.contours.push_back(std::move(contour));
    }
    res.timings.features_ms = ms_since(t0);

    if (hyp == Hypothesis::H1) {
        const Point cell{nearest_axis_index(res.raw.doppler_axis, cfg.target_doppler_hz),
                         nearest_axis_index(res.raw.angle_axis, cfg.target_spatial_freq)};
        for (std::size_t i = 0; i < res.regions.size(); ++i) {
            if (res.regions[i].contains(cell)) {
                res.target_region_index = static_cast<int>(i);
                break;
            }
        }
    }
    res.timings.total_ms = ms_since(t_start);
    return res;
}

namespace {

struct TrialPlan {
    RadarScenarioConfig cfg;
    Hypothesis hyp;
};

TrialPlan plan_trial(const RadarScenarioConfig& base, std::uint64_t seed, int index,
                     std::uint64_t trial_tag, std::uint64_t target_tag) {
    TrialPlan plan{base, Hypothesis::H0};
    const double fr = base.train_h1_fraction;
    const bool h1 = std::floor((index + 1) * fr) > std::floor(index * fr);
    plan.hyp = h1 ? Hypothesis::H1 : Hypothesis::H0;
    plan.cfg.rng_seed = derive_seed(seed, trial_tag, static_cast<std::uint64_t>(index));
    if (h1) {
        Rng rng(derive_seed(seed, target_tag, static_cast<std::uint64_t>(index)));
        plan.cfg.target_doppler_hz = draw_target_doppler(base, rng);
    }
    return plan;
}

}  // namespace

TrainingSet generate_training_set(const RadarScenarioConfig& cfg, int trials,
                                  std::uint64_t seed) {
    if (trials < 2) throw validation_error("generate_training_set: trials must be >= 2");
    validate(cfg);
    TrainingSet ts;
    for (int t = 0; t < trials; ++t) {
        const TrialPlan plan =
            plan_trial(cfg, seed, t, stream::kTrainTrial, stream::kTrainTarget);
        const SceneResult res = run_scene(plan.cfg, plan.hyp);
        ++ts.trials_run;
        if (plan.hyp == Hypothesis::H1) ++ts.h1_trials;
        if (res.regions.empty()) {
            ++ts.skipped_trials;
            continue;
        }
        if (plan.hyp == Hypothesis::H1 && res.target_region_index < 0) ++ts.missed_targets;
        for (std::size_t i = 0; i < res.regions.size(); ++i) {
            LabeledFeature row;
            row.f = res.features[i];
            row.label = (static_cast<int>(i) == res.target_region_index) ? 1 : 0;
            ts.rows.push_back(row);
        }
    }
    return ts;
}

DetectionReport run_detect(const RadarScenarioConfig& cfg, const ClassifierModel& model,
                           const std::string& out_dir) {
    const SceneResult res = run_scene(cfg, Hypothesis::H1);

    DetectionReport report;
    report.config_digest = config_digest(cfg);
    report.threshold = res.denoised.threshold;
    report.support_count = res.denoised.support_count;
    report.discarded_regions = res.discarded_regions;
    report.timings = res.timings;

    std::vector<FeatureRow> feat_rows;
    for (std::size_t i = 0; i < res.regions.size(); ++i) {
        const Decision dec = classify(res.features[i], model);
        ReportRow row;
        row.region_id = res.regions[i].id;
        row.area = res.regions[i].area();
        row.perimeter = res.perimeters[i];
        row.cr = res.features[i].cr;
        row.eb = res.features[i].eb;
        row.d0 = dec.d0;
        row.d1 = dec.d1;
        row.label = dec.label == 1 ? "target" : "clutter";
        report.regions.push_back(row);
        feat_rows.push_back({row.region_id, row.area, row.perimeter, res.features[i], row.label});
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir + ": " + ec.message());
    const fs::path dir(out_dir);

    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw io_error("cannot write report.json");
        out << report_to_json_text(report);
    }
    {
        nlohmann::ordered_json j;
        j["covariance_ms"] = report.timings.covariance_ms;
        j["spectrum_ms"] = report.timings.spectrum_ms;
        j["denoise_ms"] = report.timings.denoise_ms;
        j["regions_ms"] = report.timings.regions_ms;
        j["features_ms"] = report.timings.features_ms;
        j["total_ms"] = report.timings.total_ms;
        std::ofstream out(dir / "timing.json", std::ios::binary);
        if (!out) throw io_error("cannot write timing.json");
        out << j.dump(2) << '\n';
    }
    write_features_csv(feat_rows, (dir / "features.csv").string());
    write_regions_jsonl(res.regions, res.contours, (dir / "regions.jsonl").string());
    write_map_csv(res.raw, (dir / "map_raw.csv").string());
    write_map_pgm16(res.raw, (dir / "map_raw.pgm").string());
    write_map_csv(res.denoised.map, (dir / "map_denoised.csv").string());
    write_map_pgm16(res.denoised.map, (dir / "map_denoised.pgm").string());
    return report;
}

DetectionReport run_detect(const std::string& config_path, const std::string& model_path,
                           const std::string& out_dir) {
    const RadarScenarioConfig cfg = load_config(config_path);
    const ClassifierModel model = load_model(model_path);
    return run_detect(cfg, model, out_dir);
}

ClassifierModel run_train(const RadarScenarioConfig& cfg, int trials, std::uint64_t seed,
                          const std::string& out_model_path) {
    const TrainingSet ts = generate_training_set(cfg, trials, seed);
    ClassifierModel model = fit(ts.rows, cfg.pooled_covariance);
    model.config_digest = config_digest(cfg);
    save_model(model, out_model_path);

    std::cout << "trained on " << ts.rows.size() << " region samples from " << ts.trials_run
              << " trials (" << ts.h1_trials << " H1, " << ts.skipped_trials << " empty, "
              << ts.missed_targets << " missed targets)\n";
    std::cout << "clutter: n=" << model.count0 << " mean=(" << model.m0[0] << ", " << model.m0[1]
              << ") cov=[[" << model.C0(0, 0) << ", " << model.C0(0, 1) << "], [" << model.C0(1, 0)
              << ", " << model.C0(1, 1) << "]] eps=" << model.epsilon0 << "\n";
    std::cout << "target : n=" << model.count1 << " mean=(" << model.m1[0] << ", " << model.m1[1]
              << ") cov=[[" << model.C1(0, 0) << ", " << model.C1(0, 1) << "], [" << model.C1(1, 0)
              << ", " << model.C1(1, 1) << "]] eps=" << model.epsilon1 << "\n";
    std::cout << "model written to " << out_model_path << "\n";
    return model;
}

EvalSummary run_eval(const RadarScenarioConfig& cfg, const ClassifierModel& model, int trials,
                     std::uint64_t seed) {
    if (trials < 1) throw validation_error("run_eval: trials must be >= 1");
    validate(cfg);
    EvalSummary sum;
    sum.trials = trials;
    double cr_t = 0.0, eb_t = 0.0, cr_c = 0.0, eb_c = 0.0;
    for (int t = 0; t < trials; ++t) {
        const TrialPlan plan = plan_trial(cfg, seed, t, stream::kEvalTrial, stream::kEvalTarget);
        const SceneResult res = run_scene(plan.cfg, plan.hyp);
        if (res.regions.empty()) {
            ++sum.skipped_trials;
            continue;
        }
        for (std::size_t i = 0; i < res.regions.size(); ++i) {
            const bool truth_target = static_cast<int>(i) == res.target_region_index;
            const Decision dec = classify(res.features[i], model);
            if (truth_target) {
                ++sum.target_total;
                if (dec.label == 1) ++sum.target_correct;
                cr_t += res.features[i].cr;
                eb_t += res.features[i].eb;
            } else {
                ++sum.clutter_total;
                if (dec.label == 0) ++sum.clutter_correct;
                cr_c += res.features[i].cr;
                eb_c += res.features[i].eb;
            }
        }
    }
    if (sum.target_total > 0) {
        sum.mean_target.cr = cr_t / sum.target_total;
        sum.mean_target.eb = eb_t / sum.target_total;
    }
    if (sum.clutter_total > 0) {
        sum.mean_clutter.cr = cr_c / sum.clutter_total;
        sum.mean_clutter.eb = eb_c / sum.clutter_total;
    }
    return sum;
}

std::string report_to_json_text(const DetectionReport& report) {
    nlohmann::ordered_json j;
    j["config_digest"] = report.config_digest;
    j["threshold"] = report.threshold;
    j["support_count"] = report.support_count;
    j["discarded_regions"] = report.discarded_regions;
    auto& regions = j["regions"] = nlohmann::ordered_json::array();
    for (const auto& r : report.regions) {
        nlohmann::ordered_json row;
        row["id"] = r.region_id;
        row["area"] = r.area;
        row["perimeter"] = r.perimeter;
        row["cr"] = r.cr;
        row["eb"] = r.eb;
        row["d0"] = r.d0;
        row["d1"] = r.d1;
        row["label"] = r.label;
        regions.push_back(row);
    }
    return j.dump(2) + "\n";
}

std::string eval_to_json_text(const EvalSummary& s) {
    nlohmann::ordered_json j;
    j["trials"] = s.trials;
    j["skipped_trials"] = s.skipped_trials;
    j["per_class_accuracy"] = {{"target", s.target_accuracy()},
                               {"clutter", s.clutter_accuracy()}};
    j["confusion"] = {
        {"target", {{"correct", s.target_correct}, {"total", s.target_total}}},
        {"clutter", {{"correct", s.clutter_correct}, {"total", s.clutter_total}}}};
    j["mean_features"] = {{"target", {s.mean_target.cr, s.mean_target.eb}},
                          {"clutter", {s.mean_clutter.cr, s.mean_clutter.eb}}};
    return j.dump(2) + "\n";
}

}  // namespace gmtd
