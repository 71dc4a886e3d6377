#include "gmtd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gmtd {

using ordered_json = nlohmann::ordered_json;

namespace {

const char* mode_name(CovarianceMode m) {
    return m == CovarianceMode::Exact ? "exact" : "sample";
}

CovarianceMode mode_from_name(const std::string& s) {
    if (s == "exact") return CovarianceMode::Exact;
    if (s == "sample") return CovarianceMode::Sample;
    throw validation_error("config: covariance.mode must be \"exact\" or \"sample\", got \"" + s +
                           "\"");
}

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw validation_error(std::string("config: ") + field + " not finite");
}

}  // namespace

void validate(const RadarScenarioConfig& cfg) {
    auto fail = [](const std::string& msg) { throw validation_error("config: " + msg); };

    if (cfg.num_elements < 2) fail("num_elements must be >= 2");
    if (cfg.num_pulses < 2) fail("num_pulses must be >= 2");
    require_finite(cfg.carrier_freq_hz, "carrier_freq_hz");
    if (cfg.carrier_freq_hz <= 0) fail("carrier_freq_hz must be > 0");
    require_finite(cfg.prf_hz, "prf_hz");
    if (cfg.prf_hz <= 0) fail("prf_hz must be > 0");
    if (cfg.element_spacing_m && *cfg.element_spacing_m <= 0)
        fail("element_spacing_m must be > 0");
    require_finite(cfg.platform_speed_mps, "platform_speed_mps");
    if (cfg.platform_speed_mps < 0) fail("platform_speed_mps must be >= 0");
    require_finite(cfg.crab_angle_deg, "crab_angle_deg");
    require_finite(cfg.cnr_db, "cnr_db");
    require_finite(cfg.snr_db, "snr_db");
    require_finite(cfg.noise_power, "noise_power");
    if (cfg.noise_power <= 0) fail("noise_power must be > 0");
    require_finite(cfg.target_doppler_hz, "target_doppler_hz");
    if (std::abs(cfg.target_doppler_hz) > 0.5 * cfg.prf_hz)
        fail("target_doppler_hz magnitude must be <= prf/2");
    require_finite(cfg.target_spatial_freq, "target_spatial_freq");
    if (cfg.num_clutter_patches < 8) fail("num_clutter_patches must be >= 8");
    require_finite(cfg.backlobe_gain_db, "backlobe_gain_db");
    require_finite(cfg.azimuth_start_deg, "azimuth_start_deg");
    require_finite(cfg.azimuth_end_deg, "azimuth_end_deg");
    if (cfg.azimuth_start_deg < 0 || cfg.azimuth_start_deg >= 360)
        fail("azimuth_start_deg must be in [0, 360)");
    if (cfg.azimuth_end_deg <= cfg.azimuth_start_deg)
        fail("azimuth_end_deg must exceed azimuth_start_deg");
    if (cfg.azimuth_end_deg - cfg.azimuth_start_deg > 360)
        fail("azimuth support cannot exceed 360 degrees");
    require_finite(cfg.edge_taper_deg, "edge_taper_deg");
    if (cfg.edge_taper_deg < 0) fail("edge_taper_deg must be >= 0");
    if (cfg.num_snapshots < 1) fail("num_snapshots must be >= 1");
    if (cfg.grid.n_angle < 16 || cfg.grid.n_doppler < 16) fail("grid dims must be >= 16");
    require_finite(cfg.k_sigma, "k_sigma");
    if (cfg.k_sigma <= 0) fail("k_sigma must be > 0");
    if (cfg.min_region_area < 1) fail("min_region_area must be >= 1");
    if (cfg.edge_guard_cols < 0) fail("edge_guard_cols must be >= 0");
    if (2 * cfg.edge_guard_cols >= cfg.grid.n_angle) fail("edge_guard_cols covers the whole grid");
    require_finite(cfg.train_exclusion_hz, "train_exclusion_hz");
    if (cfg.train_exclusion_hz < 0) fail("train_exclusion_hz must be >= 0");
    require_finite(cfg.train_h1_fraction, "train_h1_fraction");
    if (cfg.train_h1_fraction < 0 || cfg.train_h1_fraction > 1)
        fail("train_h1_fraction must be in [0, 1]");
}

namespace {

ordered_json to_json(const RadarScenarioConfig& cfg) {
    ordered_json j;
    ordered_json radar;
    radar["num_elements"] = cfg.num_elements;
    radar["num_pulses"] = cfg.num_pulses;
    radar["carrier_freq_hz"] = cfg.carrier_freq_hz;
    radar["prf_hz"] = cfg.prf_hz;
    if (cfg.element_spacing_m)
        radar["element_spacing_m"] = *cfg.element_spacing_m;
    else
        radar["element_spacing_m"] = nullptr;  // half a wavelength
    radar["platform_speed_mps"] = cfg.platform_speed_mps;
    radar["crab_angle_deg"] = cfg.crab_angle_deg;
    j["radar"] = radar;

    ordered_json clutter;
    clutter["num_patches"] = cfg.num_clutter_patches;
    clutter["cnr_db"] = cfg.cnr_db;
    clutter["backlobe_gain_db"] = cfg.backlobe_gain_db;
    clutter["azimuth_start_deg"] = cfg.azimuth_start_deg;
    clutter["azimuth_end_deg"] = cfg.azimuth_end_deg;
    clutter["edge_taper_deg"] = cfg.edge_taper_deg;
    clutter["amplitude_jitter"] = cfg.amplitude_jitter;
    j["clutter"] = clutter;

    ordered_json target;
    target["snr_db"] = cfg.snr_db;
    target["doppler_hz"] = cfg.target_doppler_hz;
    target["spatial_freq"] = cfg.target_spatial_freq;
    j["target"] = target;

    j["noise"] = ordered_json{{"power", cfg.noise_power}};

    ordered_json cov;
    cov["mode"] = mode_name(cfg.covariance_mode);
    cov["num_snapshots"] = cfg.num_snapshots;
    j["covariance"] = cov;

    ordered_json map;
    map["n_angle"] = cfg.grid.n_angle;
    map["n_doppler"] = cfg.grid.n_doppler;
    j["map"] = map;

    j["denoise"] = ordered_json{{"k_sigma", cfg.k_sigma}};

    ordered_json regions;
    regions["min_area"] = cfg.min_region_area;
    regions["edge_guard_cols"] = cfg.edge_guard_cols;
    j["regions"] = regions;

    j["classifier"] = ordered_json{{"pooled_covariance", cfg.pooled_covariance}};

    ordered_json training;
    training["exclusion_hz"] = cfg.train_exclusion_hz;
    training["h1_fraction"] = cfg.train_h1_fraction;
    j["training"] = training;

    j["rng_seed"] = cfg.rng_seed;
    return j;
}

RadarScenarioConfig from_json(const ordered_json& j) {
    RadarScenarioConfig cfg;
    try {
        const auto& radar = j.at("radar");
        cfg.num_elements = radar.at("num_elements").get<int>();
        cfg.num_pulses = radar.at("num_pulses").get<int>();
        cfg.carrier_freq_hz = radar.at("carrier_freq_hz").get<double>();
        cfg.prf_hz = radar.at("prf_hz").get<double>();
        if (radar.contains("element_spacing_m") && !radar.at("element_spacing_m").is_null())
            cfg.element_spacing_m = radar.at("element_spacing_m").get<double>();
        cfg.platform_speed_mps = radar.at("platform_speed_mps").get<double>();
        cfg.crab_angle_deg = radar.at("crab_angle_deg").get<double>();

        const auto& clutter = j.at("clutter");
        cfg.num_clutter_patches = clutter.at("num_patches").get<int>();
        cfg.cnr_db = clutter.at("cnr_db").get<double>();
        cfg.backlobe_gain_db = clutter.at("backlobe_gain_db").get<double>();
        cfg.azimuth_start_deg = clutter.at("azimuth_start_deg").get<double>();
        cfg.azimuth_end_deg = clutter.at("azimuth_end_deg").get<double>();
        cfg.edge_taper_deg = clutter.at("edge_taper_deg").get<double>();
        cfg.amplitude_jitter = clutter.at("amplitude_jitter").get<bool>();

        const auto& target = j.at("target");
        cfg.snr_db = target.at("snr_db").get<double>();
        cfg.target_doppler_hz = target.at("doppler_hz").get<double>();
        cfg.target_spatial_freq = target.at("spatial_freq").get<double>();

        cfg.noise_power = j.at("noise").at("power").get<double>();

        const auto& cov = j.at("covariance");
        cfg.covariance_mode = mode_from_name(cov.at("mode").get<std::string>());
        cfg.num_snapshots = cov.at("num_snapshots").get<int>();

        const auto& map = j.at("map");
        cfg.grid.n_angle = map.at("n_angle").get<int>();
        cfg.grid.n_doppler = map.at("n_doppler").get<int>();

        cfg.k_sigma = j.at("denoise").at("k_sigma").get<double>();

        const auto& regions = j.at("regions");
        cfg.min_region_area = regions.at("min_area").get<int>();
        cfg.edge_guard_cols = regions.at("edge_guard_cols").get<int>();

        cfg.pooled_covariance = j.at("classifier").at("pooled_covariance").get<bool>();

        const auto& training = j.at("training");
        cfg.train_exclusion_hz = training.at("exclusion_hz").get<double>();
        cfg.train_h1_fraction = training.at("h1_fraction").get<double>();

        cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

}  // namespace

RadarScenarioConfig config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j);
}

RadarScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return config_from_json_text(ss.str());
    } catch (const validation_error& e) {
        throw validation_error(std::string(e.what()) + " (" + path + ")");
    }
}

std::string config_to_json_text(const RadarScenarioConfig& cfg) {
    return to_json(cfg).dump(2) + "\n";
}

void save_config(const RadarScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write config file: " + path);
    out << config_to_json_text(cfg);
    if (!out) throw io_error("failed writing config file: " + path);
}

std::string config_digest(const RadarScenarioConfig& cfg) {
    const std::string text = config_to_json_text(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RadarScenarioConfig crabbed_scene_config() {
    RadarScenarioConfig cfg;
    cfg.crab_angle_deg = 45.0;
    // Side-looking main-beam clutter footprint; keeps the visible ridge an
    // open arc inside the unambiguous angle-Doppler window.
    cfg.azimuth_start_deg = 80.0;
    cfg.azimuth_end_deg = 142.0;
    cfg.edge_taper_deg = 6.0;
    cfg.backlobe_gain_db = 30.0;
    cfg.amplitude_jitter = true;
    // The exact-covariance MV floor is nearly flat, so the useful threshold
    // sits hundreds of bottom-half standard deviations above its mean
    // (T ~ 1.41x the floor for this scene).
    cfg.k_sigma = 154.0;
    cfg.train_exclusion_hz = 20.0;
    cfg.rng_seed = 20260814;
    return cfg;
}

}  // namespace gmtd
