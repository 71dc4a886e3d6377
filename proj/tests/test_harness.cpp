#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmtd/harness.hpp"

using namespace gmtd;

namespace {

// A scaled-down variant of the reference scenario that keeps harness tests
// fast (NM = 36). k_sigma is retuned because the reference value is matched
// to the 18x18 noise-floor statistics.
RadarScenarioConfig small_config() {
    RadarScenarioConfig cfg = crabbed_scene_config();
    cfg.num_elements = 6;
    cfg.num_pulses = 6;
    cfg.num_clutter_patches = 91;
    cfg.grid = {32, 32};
    cfg.snr_db = 20.0;
    cfg.k_sigma = 3.0;
    cfg.rng_seed = 77;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ClassifierModel toy_model() {
    ClassifierModel m;
    m.m0 << 0.14, 0.23;
    m.m1 << 1.0, 1.75;
    m.C0.setIdentity();
    m.C1.setIdentity();
    m.count0 = m.count1 = 2;
    return m;
}

}  // namespace

TEST_CASE("config JSON round-trips to an equal struct, including unset spacing") {
    auto cfg = crabbed_scene_config();
    const std::string text = config_to_json_text(cfg);
    const auto back = config_from_json_text(text);
    CHECK(back == cfg);
    CHECK(config_to_json_text(back) == text);

    cfg.element_spacing_m = 0.25;
    cfg.covariance_mode = CovarianceMode::Sample;
    cfg.pooled_covariance = true;
    const auto back2 = config_from_json_text(config_to_json_text(cfg));
    CHECK(back2 == cfg);
}

TEST_CASE("config digest is stable across round-trips and distinguishes configs") {
    const auto cfg = crabbed_scene_config();
    const auto d1 = config_digest(cfg);
    CHECK(d1.substr(0, 2) == "0x");
    CHECK(d1.size() == 18);
    const auto back = config_from_json_text(config_to_json_text(cfg));
    CHECK(config_digest(back) == d1);
    auto other = cfg;
    other.k_sigma += 1.0;
    CHECK(config_digest(other) != d1);
}

TEST_CASE("the shipped reference config matches the built-in factory") {
    const auto loaded = load_config(std::string(GMTD_SOURCE_DIR) + "/configs/crabbed_scene.json");
    CHECK(loaded == crabbed_scene_config());
}

TEST_CASE("validate rejects out-of-range fields") {
    auto cfg = small_config();
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.num_elements = 1;
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.prf_hz = 0.0;
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.target_doppler_hz = 1e4;  // beyond +-PRF/2
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.azimuth_start_deg = 350.0;
    bad.azimuth_end_deg = 10.0;  // end must exceed start
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.edge_guard_cols = 16;  // 2*guard must stay below n_angle
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.k_sigma = 0.0;
    CHECK_THROWS_AS(validate(bad), validation_error);

    bad = cfg;
    bad.train_h1_fraction = 1.5;
    CHECK_THROWS_AS(validate(bad), validation_error);
}

TEST_CASE("load_config reports missing files as io errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), io_error);
}

TEST_CASE("ridge crossings: one in-sector crossing for the reference scene") {
    const auto cfg = crabbed_scene_config();
    const auto xs = ridge_crossings_hz(cfg, 0.0);
    REQUIRE(xs.size() == 1);
    const double want = (2.0 * cfg.platform_speed_mps / cfg.wavelength_m()) *
                        std::cos(kPi / 2.0 - cfg.crab_angle_rad());
    CHECK(xs[0] == doctest::Approx(want).epsilon(1e-12));
    CHECK(xs[0] == doctest::Approx(106.14).epsilon(1e-3));
}

TEST_CASE("ridge crossings: full-circle zero-crab scene crosses theta=0 at 0 Hz") {
    RadarScenarioConfig cfg;  // defaults: full circle, chi = 0
    const auto xs = ridge_crossings_hz(cfg, 0.0);
    REQUIRE(xs.size() == 2);
    CHECK(std::abs(xs[0]) < 1e-9);
    CHECK(std::abs(xs[1]) < 1e-9);

    // Spatial frequencies outside the visible ring have no crossings.
    CHECK(ridge_crossings_hz(cfg, 0.9).empty());
}

TEST_CASE("target Doppler draws respect the band and the exclusion zones") {
    const auto cfg = crabbed_scene_config();
    const auto xs = ridge_crossings_hz(cfg, cfg.target_spatial_freq);
    Rng rng(404);
    for (int i = 0; i < 500; ++i) {
        const double f = draw_target_doppler(cfg, rng);
        const double a = std::abs(f);
        CHECK(a >= 30.0 - 1e-9);
        CHECK(a <= 120.0 + 1e-9);
        for (double x : xs) CHECK(std::abs(f - x) >= cfg.train_exclusion_hz - 1e-9);
    }
    // Determinism of the draw stream.
    Rng r1(99), r2(99);
    for (int i = 0; i < 10; ++i)
        CHECK(draw_target_doppler(cfg, r1) == draw_target_doppler(cfg, r2));
}

TEST_CASE("an all-excluded band is a validation error") {
    auto cfg = crabbed_scene_config();
    cfg.train_exclusion_hz = 500.0;  // swallows the whole +-[30,120] band
    Rng rng(1);
    CHECK_THROWS_AS(draw_target_doppler(cfg, rng), validation_error);
}

TEST_CASE("run_scene on the reference scenario separates target and ridge") {
    const auto cfg = crabbed_scene_config();
    const auto res = run_scene(cfg, Hypothesis::H1);
    CHECK(res.raw.values.rows() == cfg.grid.n_doppler);
    CHECK(res.raw.values.cols() == cfg.grid.n_angle);
    REQUIRE(!res.regions.empty());
    CHECK(res.contours.size() == res.regions.size());
    CHECK(res.features.size() == res.regions.size());
    CHECK(res.perimeters.size() == res.regions.size());
    // The injected target must land in a surviving region.
    REQUIRE(res.target_region_index >= 0);
    REQUIRE(res.target_region_index < static_cast<int>(res.regions.size()));
    // ... and that region should be compact relative to the ridge.
    double best_cr = 0.0;
    for (const auto& f : res.features) best_cr = std::max(best_cr, f.cr);
    CHECK(res.features[static_cast<std::size_t>(res.target_region_index)].cr ==
          doctest::Approx(best_cr));
    // H0 has no target cell.
    const auto res0 = run_scene(cfg, Hypothesis::H0);
    CHECK(res0.target_region_index == -1);
}

TEST_CASE("training set generation is deterministic and respects h1_fraction") {
    auto cfg = small_config();
    const auto a = generate_training_set(cfg, 6, 5150);
    const auto b = generate_training_set(cfg, 6, 5150);
    CHECK(a.trials_run == 6);
    CHECK(a.h1_trials == 3);  // fraction 0.5 -> every other trial
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].label == b.rows[i].label);
        CHECK(a.rows[i].f.cr == b.rows[i].f.cr);
        CHECK(a.rows[i].f.eb == b.rows[i].f.eb);
    }
    const auto c = generate_training_set(cfg, 6, 5151);
    bool any_diff = c.rows.size() != a.rows.size();
    for (std::size_t i = 0; !any_diff && i < a.rows.size(); ++i)
        any_diff = a.rows[i].f.cr != c.rows[i].f.cr;
    CHECK(any_diff);
}

TEST_CASE("h1_fraction zero yields clutter-only labels") {
    auto cfg = small_config();
    cfg.train_h1_fraction = 0.0;
    const auto set = generate_training_set(cfg, 4, 11);
    CHECK(set.h1_trials == 0);
    for (const auto& row : set.rows) CHECK(row.label == 0);
}

TEST_CASE("an absurd threshold skips every trial") {
    auto cfg = small_config();
    cfg.k_sigma = 1e9;
    const auto set = generate_training_set(cfg, 4, 11);
    CHECK(set.rows.empty());
    CHECK(set.skipped_trials == 4);
}

TEST_CASE("generate_training_set and run_eval validate their trial counts") {
    const auto cfg = small_config();
    CHECK_THROWS_AS(generate_training_set(cfg, 1, 1), validation_error);
    CHECK_THROWS_AS(run_eval(cfg, toy_model(), 0, 1), validation_error);
}

TEST_CASE("run_detect writes the full artifact set, byte-identical on rerun") {
    const auto cfg = small_config();
    const auto model = toy_model();
    const auto dir1 = std::filesystem::temp_directory_path() / "gmtd_detect_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "gmtd_detect_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);

    const auto rep1 = run_detect(cfg, model, dir1.string());
    const auto rep2 = run_detect(cfg, model, dir2.string());
    CHECK(rep1.config_digest == config_digest(cfg));

    const char* names[] = {"report.json",  "features.csv",     "regions.jsonl",
                           "map_raw.csv",  "map_raw.pgm",      "map_denoised.csv",
                           "map_denoised.pgm"};
    for (const char* name : names) {
        CAPTURE(name);
        REQUIRE(std::filesystem::exists(dir1 / name));
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
    // timing.json exists but is not expected to be identical.
    CHECK(std::filesystem::exists(dir1 / "timing.json"));
    const std::string report = slurp(dir1 / "report.json");
    CHECK(report.find("config_digest") != std::string::npos);
    CHECK(report.find("_ms") == std::string::npos);  // no wall times in the report

    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("run_detect by path loads config and model files") {
    const auto cfg = small_config();
    const auto model = toy_model();
    const auto base = std::filesystem::temp_directory_path() / "gmtd_detect_paths";
    std::filesystem::remove_all(base);
    std::filesystem::create_directories(base);
    const auto cfg_path = base / "config.json";
    const auto model_path = base / "model.json";
    save_config(cfg, cfg_path.string());
    save_model(model, model_path.string());

    const auto rep = run_detect(cfg_path.string(), model_path.string(), (base / "out").string());
    CHECK(rep.config_digest == config_digest(cfg));
    CHECK(std::filesystem::exists(base / "out" / "report.json"));
    std::filesystem::remove_all(base);
}

TEST_CASE("train then eval on the scaled-down scenario learns the separation") {
    auto cfg = small_config();
    const auto base = std::filesystem::temp_directory_path() / "gmtd_train_small";
    std::filesystem::remove_all(base);
    std::filesystem::create_directories(base);
    const auto model_path = (base / "model.json").string();

    const auto model = run_train(cfg, 40, 2024, model_path);
    CHECK(model.count0 + model.count1 > 0);
    CHECK(model.config_digest == config_digest(cfg));
    const auto loaded = load_model(model_path);
    CHECK(loaded.m0 == model.m0);
    CHECK(loaded.m1 == model.m1);

    const auto summary = run_eval(cfg, model, 20, 909);
    CHECK(summary.trials == 20);
    CHECK(summary.target_total + summary.clutter_total > 0);
    // Determinism of the eval path.
    const auto summary2 = run_eval(cfg, model, 20, 909);
    CHECK(eval_to_json_text(summary2) == eval_to_json_text(summary));
    // Eval streams differ from training streams under the same seed.
    const auto summary3 = run_eval(cfg, model, 20, 2024);
    CHECK(summary3.trials == 20);
    std::filesystem::remove_all(base);
}

TEST_CASE("report JSON serialization is stable and complete") {
    DetectionReport rep;
    rep.config_digest = "0xdeadbeef00000000";
    rep.threshold = 0.0042;
    rep.support_count = 17;
    rep.discarded_regions = 1;
    rep.regions.push_back({1, 120, 98.5, 0.14, 0.22, 0.1, 3.5, "clutter"});
    rep.regions.push_back({2, 14, 11.656854249492381, 1.29, 0.96, 2.8, 0.2, "target"});
    const std::string a = report_to_json_text(rep);
    const std::string b = report_to_json_text(rep);
    CHECK(a == b);
    CHECK(a.find("\"config_digest\"") != std::string::npos);
    CHECK(a.find("\"threshold\"") != std::string::npos);
    CHECK(a.find("\"regions\"") != std::string::npos);
    CHECK(a.find("\"target\"") != std::string::npos);
    CHECK(a.back() == '\n');
}
