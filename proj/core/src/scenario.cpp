#include "sitesim/scenario.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sitesim/errors.hpp"
#include "sitesim/rng.hpp"

namespace sitesim {

using nlohmann::json;

std::string mode_to_string(Mode mode) {
  switch (mode) {
    case Mode::DozerOnly: return "dozer_only";
    case Mode::DumperOnly: return "dumper_only";
    case Mode::Uncoordinated: return "uncoordinated";
    case Mode::Saw: return "saw";
    case Mode::SawLocNoise: return "saw_loc_noise";
    case Mode::SawLocAware: return "saw_loc_aware";
  }
  return "saw";
}

Mode mode_from_string(const std::string& name) {
  if (name == "dozer_only") return Mode::DozerOnly;
  if (name == "dumper_only") return Mode::DumperOnly;
  if (name == "uncoordinated") return Mode::Uncoordinated;
  if (name == "saw") return Mode::Saw;
  if (name == "saw_loc_noise") return Mode::SawLocNoise;
  if (name == "saw_loc_aware") return Mode::SawLocAware;
  throw ConfigError("unknown mode: " + name);
}

void ScenarioConfig::validate() const {
  if (site_width <= 0.0 || site_height <= 0.0 || cell_size <= 0.0)
    throw ConfigError("site dimensions must be > 0");
  if (pile_count.lo < 0 || pile_count.hi < pile_count.lo)
    throw ConfigError("pile_count range is empty");
  if (dump_point_count.lo < 0 || dump_point_count.hi < dump_point_count.lo)
    throw ConfigError("dump_point_count range is empty");
  if (pile_volume.lo <= 0.0 || pile_volume.hi < pile_volume.lo)
    throw ConfigError("pile_volume range is empty");
  if (pile_sigma.lo <= 0.0 || pile_sigma.hi < pile_sigma.lo)
    throw ConfigError("pile_sigma range is empty");
  if (timeout <= 0.0 || dt <= 0.0) throw ConfigError("timeout and dt must be > 0");
  if (loading_point.x < 0.0 || loading_point.x > site_width ||
      loading_point.y < 0.0 || loading_point.y > site_height)
    throw ConfigError("loading point outside the site");
  dozer_spec.validate();
  dumper_spec.validate();
  saw.validate();
}

namespace {

void read_range(const json& j, const char* key, IntRange& out) {
  if (!j.contains(key)) return;
  out.lo = j.at(key).at(0).get<int>();
  out.hi = j.at(key).at(1).get<int>();
}

void read_range(const json& j, const char* key, RealRange& out) {
  if (!j.contains(key)) return;
  out.lo = j.at(key).at(0).get<double>();
  out.hi = j.at(key).at(1).get<double>();
}

void read_vec3(const json& j, const char* key, Vec3& out) {
  if (!j.contains(key)) return;
  for (int i = 0; i < 3; ++i) out[i] = j.at(key).at(i).get<double>();
}

template <typename T>
void read_value(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

const char* const kKnownKeys[] = {
    "site_width", "site_height", "cell_size", "target_height", "pile_count",
    "pile_volume", "pile_sigma", "dump_point_count", "placement_margin",
    "min_separation", "loading_clearance", "loading_apron", "dozer_start_x",
    "dozer_start_y", "dumper_start_jitter", "loading_point", "seed", "mode",
    "timeout", "dt", "done_threshold", "dozer", "dumper", "spread", "saw",
    "aware_margin_boost", "observation_noise", "localization", "dozer_expert",
    "dumper_expert"};

}  // namespace

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw ConfigError("unknown config key: " + key);
  }

  ScenarioConfig c;
  read_value(j, "site_width", c.site_width);
  read_value(j, "site_height", c.site_height);
  read_value(j, "cell_size", c.cell_size);
  read_value(j, "target_height", c.target_height);
  read_range(j, "pile_count", c.pile_count);
  read_range(j, "pile_volume", c.pile_volume);
  read_range(j, "pile_sigma", c.pile_sigma);
  read_range(j, "dump_point_count", c.dump_point_count);
  read_value(j, "placement_margin", c.placement_margin);
  read_value(j, "min_separation", c.min_separation);
  read_value(j, "loading_clearance", c.loading_clearance);
  read_value(j, "loading_apron", c.loading_apron);
  read_range(j, "dozer_start_x", c.dozer_start_x);
  read_range(j, "dozer_start_y", c.dozer_start_y);
  read_value(j, "dumper_start_jitter", c.dumper_start_jitter);
  if (j.contains("loading_point")) {
    c.loading_point = {j.at("loading_point").at(0).get<double>(),
                       j.at("loading_point").at(1).get<double>()};
  }
  read_value(j, "seed", c.seed);
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  read_value(j, "timeout", c.timeout);
  read_value(j, "dt", c.dt);
  read_value(j, "done_threshold", c.done_threshold);
  read_value(j, "aware_margin_boost", c.aware_margin_boost);

  if (j.contains("dozer")) {
    const json& d = j.at("dozer");
    read_value(d, "length", c.dozer_spec.length);
    read_value(d, "width", c.dozer_spec.width);
    read_value(d, "speed", c.dozer_spec.speed);
    read_value(d, "turn_rate", c.dozer_spec.turn_rate);
    read_value(d, "blade_width", c.dozer_spec.blade_width);
  }
  if (j.contains("dumper")) {
    const json& d = j.at("dumper");
    read_value(d, "length", c.dumper_spec.length);
    read_value(d, "width", c.dumper_spec.width);
    read_value(d, "speed", c.dumper_spec.speed);
    read_value(d, "turn_rate", c.dumper_spec.turn_rate);
    read_value(d, "payload_capacity", c.dumper_spec.payload_capacity);
  }
  if (j.contains("spread")) {
    read_value(j.at("spread"), "sigma", c.spread.sigma);
    read_value(j.at("spread"), "pile_volume", c.spread.pile_volume);
  }
  if (j.contains("saw")) {
    const json& s = j.at("saw");
    read_value(s, "safety_margin", c.saw.safety_margin);
    read_value(s, "check_dt", c.saw.check_dt);
    read_value(s, "hold_increment", c.saw.hold_increment);
    read_value(s, "max_hold", c.saw.max_hold);
  }
  if (j.contains("observation_noise")) {
    const json& n = j.at("observation_noise");
    read_value(n, "salt_pepper_sigma", c.noise.salt_pepper_sigma);
    read_value(n, "gmm_pile_mean", c.noise.gmm_pile_mean);
    read_value(n, "gmm_pile_sigma", c.noise.gmm_pile_sigma);
    read_value(n, "gmm_pile_count", c.noise.gmm_pile_count);
    read_value(n, "gmm_pile_spatial_sigma", c.noise.gmm_pile_spatial_sigma);
  }
  if (j.contains("localization")) {
    const json& l = j.at("localization");
    if (l.contains("paper_scale")) {
      c.localization = LocalizationParams::paper_sim(l.at("paper_scale").get<double>());
    }
    read_vec3(l, "init_pos_std", c.localization.init_pos_std);
    read_vec3(l, "init_vel_std", c.localization.init_vel_std);
    read_vec3(l, "init_att_std", c.localization.init_att_std);
    read_vec3(l, "aiding_pos_std", c.localization.aiding_pos_std);
    read_vec3(l, "aiding_att_std", c.localization.aiding_att_std);
    read_value(l, "drift_rate", c.localization.drift_rate);
    read_value(l, "sensor_rate", c.localization.sensor_rate);
  }
  if (j.contains("dozer_expert")) {
    const json& d = j.at("dozer_expert");
    read_value(d, "work_threshold", c.dozer_expert.work_threshold);
    read_value(d, "fov_side", c.dozer_expert.fov_side);
    read_value(d, "approach_clearance", c.dozer_expert.approach_clearance);
    read_value(d, "waypoint_spacing", c.dozer_expert.waypoint_spacing);
  }
  if (j.contains("dumper_expert")) {
    const json& d = j.at("dumper_expert");
    read_value(d, "load_duration", c.dumper_expert.load_duration);
    read_value(d, "dump_duration", c.dumper_expert.dump_duration);
    read_value(d, "arrive_radius", c.dumper_expert.arrive_radius);
    read_value(d, "waypoint_spacing", c.dumper_expert.waypoint_spacing);
  }

  c.validate();
  return c;
}

ScenarioConfig config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return config_from_json(text);
}

std::string config_to_json(const ScenarioConfig& c) {
  const json j = {
      {"site_width", c.site_width},
      {"site_height", c.site_height},
      {"cell_size", c.cell_size},
      {"target_height", c.target_height},
      {"pile_count", {c.pile_count.lo, c.pile_count.hi}},
      {"pile_volume", {c.pile_volume.lo, c.pile_volume.hi}},
      {"pile_sigma", {c.pile_sigma.lo, c.pile_sigma.hi}},
      {"dump_point_count", {c.dump_point_count.lo, c.dump_point_count.hi}},
      {"placement_margin", c.placement_margin},
      {"min_separation", c.min_separation},
      {"loading_clearance", c.loading_clearance},
      {"loading_apron", c.loading_apron},
      {"dozer_start_x", {c.dozer_start_x.lo, c.dozer_start_x.hi}},
      {"dozer_start_y", {c.dozer_start_y.lo, c.dozer_start_y.hi}},
      {"dumper_start_jitter", c.dumper_start_jitter},
      {"loading_point", {c.loading_point.x, c.loading_point.y}},
      {"seed", c.seed},
      {"mode", mode_to_string(c.mode)},
      {"timeout", c.timeout},
      {"dt", c.dt},
      {"done_threshold", c.done_threshold},
      {"aware_margin_boost", c.aware_margin_boost},
      {"dozer",
       {{"length", c.dozer_spec.length},
        {"width", c.dozer_spec.width},
        {"speed", c.dozer_spec.speed},
        {"turn_rate", c.dozer_spec.turn_rate},
        {"blade_width", c.dozer_spec.blade_width}}},
      {"dumper",
       {{"length", c.dumper_spec.length},
        {"width", c.dumper_spec.width},
        {"speed", c.dumper_spec.speed},
        {"turn_rate", c.dumper_spec.turn_rate},
        {"payload_capacity", c.dumper_spec.payload_capacity}}},
      {"spread", {{"sigma", c.spread.sigma}, {"pile_volume", c.spread.pile_volume}}},
      {"saw",
       {{"safety_margin", c.saw.safety_margin},
        {"check_dt", c.saw.check_dt},
        {"hold_increment", c.saw.hold_increment},
        {"max_hold", c.saw.max_hold}}},
      {"observation_noise",
       {{"salt_pepper_sigma", c.noise.salt_pepper_sigma},
        {"gmm_pile_mean", c.noise.gmm_pile_mean},
        {"gmm_pile_sigma", c.noise.gmm_pile_sigma},
        {"gmm_pile_count", c.noise.gmm_pile_count},
        {"gmm_pile_spatial_sigma", c.noise.gmm_pile_spatial_sigma}}},
      {"localization",
       {{"init_pos_std", c.localization.init_pos_std},
        {"init_vel_std", c.localization.init_vel_std},
        {"init_att_std", c.localization.init_att_std},
        {"aiding_pos_std", c.localization.aiding_pos_std},
        {"aiding_att_std", c.localization.aiding_att_std},
        {"drift_rate", c.localization.drift_rate},
        {"sensor_rate", c.localization.sensor_rate}}},
  };
  return j.dump(2);
}

uint64_t episode_seed(uint64_t root_seed, uint64_t episode_index) {
  return RngStream::derive_seed(root_seed,
                                {episode_index, RngStream::hash_label("scenario")});
}

SiteState generate_scenario(const ScenarioConfig& config, uint64_t episode_index) {
  config.validate();
  RngStream rng(episode_seed(config.seed, episode_index));

  SiteState state;
  const size_t w = static_cast<size_t>(std::lround(config.site_width / config.cell_size));
  const size_t h = static_cast<size_t>(std::lround(config.site_height / config.cell_size));
  state.map = HeightMap(w, h, config.cell_size, {0.0, 0.0}, config.target_height);
  state.target_height = config.target_height;
  state.route.loading_point = config.loading_point;

  // Grading boundary: the site minus an apron strip along the edge nearest
  // the loading point, so the loading station stays off the work area.
  double b_min_x = 0.0, b_min_y = 0.0;
  double b_max_x = state.map.world_width(), b_max_y = state.map.world_height();
  if (config.loading_apron > 0.0) {
    const Vec2 l = config.loading_point;
    const double d_left = l.x, d_right = b_max_x - l.x;
    const double d_bottom = l.y, d_top = b_max_y - l.y;
    const double m = std::min({d_left, d_right, d_bottom, d_top});
    if (m == d_bottom) b_min_y = config.loading_apron;
    else if (m == d_top) b_max_y -= config.loading_apron;
    else if (m == d_left) b_min_x = config.loading_apron;
    else b_max_x -= config.loading_apron;
  }
  state.grading_boundary = Polygon::rectangle(b_min_x, b_min_y, b_max_x, b_max_y);

  const double margin = config.placement_margin;
  const double lo_x = b_min_x + margin, hi_x = b_max_x - margin;
  const double lo_y = b_min_y + margin, hi_y = b_max_y - margin;
  if (lo_x >= hi_x || lo_y >= hi_y)
    throw InfeasibleScenario("placement margin leaves no room");

  std::vector<Vec2> placed;
  auto place = [&](double clearance) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec2 p{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
      bool ok = distance(p, config.loading_point) >= config.loading_clearance;
      for (const Vec2& q : placed) ok = ok && distance(p, q) >= clearance;
      if (ok) {
        placed.push_back(p);
        return p;
      }
    }
    throw InfeasibleScenario("could not place scenario feature after 100 attempts");
  };

  // Initial piles.
  const int n_piles = static_cast<int>(
      rng.uniform_int(config.pile_count.lo, config.pile_count.hi));
  for (int i = 0; i < n_piles; ++i) {
    const Vec2 center = place(config.min_separation);
    const double volume = rng.uniform(config.pile_volume.lo, config.pile_volume.hi);
    const double sigma = rng.uniform(config.pile_sigma.lo, config.pile_sigma.hi);
    add_sand_pile(state.map, center, sigma, volume);
  }

  // Dump points, serviced in placement order.
  const int n_dumps = static_cast<int>(
      rng.uniform_int(config.dump_point_count.lo, config.dump_point_count.hi));
  for (int i = 0; i < n_dumps; ++i) state.route.dump_points.push_back(place(config.min_separation));

  // Dumper starts at the loading point (jittered along x), loaded and in the
  // loading orientation.
  const double jitter = config.dumper_start_jitter > 0.0
                            ? rng.uniform(-config.dumper_start_jitter, config.dumper_start_jitter)
                            : 0.0;
  state.dumper.x = std::clamp(config.loading_point.x + jitter, config.dumper_spec.width,
                              state.map.world_width() - config.dumper_spec.width);
  state.dumper.y = config.loading_point.y;
  state.dumper.heading = DumperExpert::loading_facing(state);
  state.dumper_load = config.dumper_spec.payload_capacity;

  // Dozer start: anywhere in its range that does not overlap the dumper.
  bool placed_dozer = false;
  for (int attempt = 0; attempt < 100 && !placed_dozer; ++attempt) {
    Pose candidate;
    candidate.x = rng.uniform(config.dozer_start_x.lo, config.dozer_start_x.hi);
    candidate.y = rng.uniform(config.dozer_start_y.lo, config.dozer_start_y.hi);
    candidate.heading = rng.uniform(-kPi, kPi);
    if (!check_footprint_collision(candidate, config.dozer_spec, state.dumper,
                                   config.dumper_spec, 10.0)) {
      state.dozer = candidate;
      placed_dozer = true;
    }
  }
  if (!placed_dozer)
    throw InfeasibleScenario("could not place dozer start after 100 attempts");

  state.recompute_map_volume();
  state.initial_above_target =
      state.map.volume_above(state.target_height, state.grading_boundary);
  return state;
}

}  // namespace sitesim
