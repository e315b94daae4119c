#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sitesim/serialization.hpp"

using namespace sitesim;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "sitesim_ser_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("height map round-trips through the f32 + sidecar format") {
  HeightMap map(64, 48, 2.0, {10.0, 20.0});
  add_sand_pile(map, {70.0, 60.0}, 10.0, 4000.0);

  const auto prefix = temp_dir() / "map";
  save_height_map(map, prefix);
  const HeightMap back = load_height_map(prefix);

  CHECK(back.width_cells() == 64);
  CHECK(back.height_cells() == 48);
  CHECK(back.cell_size() == doctest::Approx(2.0));
  CHECK(back.origin().x == doctest::Approx(10.0));
  for (size_t r = 0; r < 48; ++r)
    for (size_t c = 0; c < 64; ++c)
      CHECK(static_cast<float>(back.at(c, r)) ==
            doctest::Approx(static_cast<float>(map.at(c, r))));
}

TEST_CASE("grid files are little-endian float32") {
  const auto path = temp_dir() / "grid.f32";
  const float values[2] = {1.0f, -2.5f};
  write_f32_grid(path, values, 2);

  std::ifstream in(path, std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  // 1.0f = 0x3f800000 little-endian.
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[1] == 0x00);
  CHECK(bytes[2] == 0x80);
  CHECK(bytes[3] == 0x3f);

  const auto back = read_f32_grid(path);
  CHECK(back.size() == 2);
  CHECK(back[0] == 1.0f);
  CHECK(back[1] == -2.5f);
}

TEST_CASE("trajectory JSON round-trip") {
  const TimedTrajectory t = TimedTrajectory::from_waypoints({
      {1.5f, 2.5f, 0.0f},
      {10.0f, 20.0f, 3.25f},
  });
  const std::string text = trajectory_to_json(t);
  CHECK(trajectory_from_json(text) == t);
  CHECK(trajectory_from_json("[[1.5,2.5,0.0],[10,20,3.25]]") == t);
  CHECK_THROWS_AS(trajectory_from_json("{\"nope\":1}"), IoError);
  CHECK_THROWS_AS(trajectory_from_json("not json"), IoError);
}

TEST_CASE("trajectory message JSON carries the sentinel-padded array") {
  const TimedTrajectory t = TimedTrajectory::from_waypoints({
      {5.0f, 6.0f, 1.0f},
      {7.0f, 8.0f, 2.0f},
  });
  const TrajectoryMessage msg = make_message("dozer", AgentKind::Dozer, t, 9);
  const std::string text = message_to_json(msg);
  const TrajectoryMessage back = message_from_json(text);
  CHECK(back.agent_id == "dozer");
  CHECK(back.kind == AgentKind::Dozer);
  CHECK(back.plan_epoch == 9);
  CHECK(back.trajectory == msg.trajectory);
  CHECK(decode_trajectory(back.trajectory) == t);
}

TEST_CASE("site state snapshot round-trip") {
  SiteState state;
  state.map = HeightMap(120, 120, 1.0);
  add_sand_pile(state.map, {60.0, 60.0}, 12.0, 9000.0);
  state.dozer = {30.0, 40.0, 0.5, 12.0};
  state.dumper = {100.0, 15.0, -1.2, 12.0};
  state.dumper_load = 5000.0;
  state.clock = 12.0;
  state.route.loading_point = {100.0, 10.0};
  state.route.dump_points = {{60.0, 60.0}, {30.0, 90.0}};
  state.route.next_index = 1;
  state.cleared_volume = 1234.5;
  state.total_dumped = 9000.0;
  state.initial_above_target = 500.0;

  const auto prefix = temp_dir() / "site";
  save_site_state(state, prefix);
  const SiteState back = load_site_state(prefix);

  CHECK(back.clock == doctest::Approx(12.0));
  CHECK(back.dumper_load == doctest::Approx(5000.0));
  CHECK(back.route.next_index == 1);
  CHECK(back.route.dump_points.size() == 2);
  CHECK(back.dozer.heading == doctest::Approx(0.5));
  CHECK(back.cleared_volume == doctest::Approx(1234.5));
  CHECK(static_cast<float>(back.map.at(60, 60)) ==
        doctest::Approx(static_cast<float>(state.map.at(60, 60))));
}

TEST_CASE("pgm writer emits a valid P5 header") {
  const auto path = temp_dir() / "frame.pgm";
  write_pgm(path, 4, 2, std::vector<uint8_t>{0, 64, 128, 255, 1, 2, 3, 4});
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  size_t w, h, maxval;
  in >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == 4);
  CHECK(h == 2);
  CHECK(maxval == 255);
}
