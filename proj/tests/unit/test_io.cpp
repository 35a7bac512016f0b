// Copyright 2026 The cfh Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "cfh/checkpoint.hpp"
#include "cfh/manifest.hpp"
#include "test_util.hpp"

using namespace cfh;
using cfh::testing::temp_dir;
using cfh::testing::tiny_config;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("save/load round trip is bit-exact") {
  const auto dir = temp_dir("ckpt");
  Checkpoint ckpt;
  ckpt.live = init_parameters<float>(tiny_config(), 1);
  ckpt.ema = init_parameters<float>(tiny_config(), 2);
  ckpt.live.stem.weight(0, 0) = -0.0f;
  ckpt.live.stem.bias(0, 1) = 1e-38f;
  ckpt.metadata = {{"steps", 12}, {"note", "x"}};
  const std::string path = (dir / "model.bin").string();
  save_checkpoint(path, ckpt);
  const Checkpoint back = load_checkpoint(path);
  CHECK(identical(back.live, ckpt.live));
  REQUIRE(back.ema.has_value());
  CHECK(identical(*back.ema, *ckpt.ema));
  CHECK(back.metadata == ckpt.metadata);
  CHECK(back.config().alphabet == "abc ");
  CHECK(back.config().noise_scenes == tiny_config().noise_scenes);
  CHECK(&back.inference_parameters() == &*back.ema);

  // Saving what was loaded reproduces the file byte for byte.
  const std::string again = (dir / "again.bin").string();
  save_checkpoint(again, back);
  CHECK(slurp(again) == slurp(path));
}

TEST_CASE("checkpoint without EMA serves the live weights") {
  const auto dir = temp_dir("ckpt_live");
  Checkpoint ckpt;
  ckpt.live = init_parameters<float>(tiny_config(), 1);
  save_checkpoint((dir / "m.bin").string(), ckpt);
  const Checkpoint back = load_checkpoint((dir / "m.bin").string());
  CHECK_FALSE(back.ema.has_value());
  CHECK(identical(back.inference_parameters(), ckpt.live));
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto dir = temp_dir("ckpt_bad");
  Checkpoint ckpt;
  ckpt.live = init_parameters<float>(tiny_config(), 1);
  const fs::path good = dir / "good.bin";
  save_checkpoint(good.string(), ckpt);
  const std::string bytes = slurp(good);

  std::string magic = bytes;
  magic[0] = 'X';
  dump(dir / "magic.bin", magic);
  CHECK_THROWS_AS(load_checkpoint((dir / "magic.bin").string()), InvalidInput);

  dump(dir / "short.bin", bytes.substr(0, bytes.size() - 7));
  CHECK_THROWS_AS(load_checkpoint((dir / "short.bin").string()), InvalidInput);

  dump(dir / "long.bin", bytes + "zz");
  CHECK_THROWS_AS(load_checkpoint((dir / "long.bin").string()), InvalidInput);

  CHECK_THROWS_AS(load_checkpoint((dir / "missing.bin").string()), InvalidInput);
}

}  // TEST_SUITE

TEST_SUITE("manifest") {

TEST_CASE("entries round trip through JSON") {
  ManifestEntry speech{"a.wav", "help me", "helpme", std::nullopt, std::nullopt};
  ManifestEntry noise{"b.wav", std::nullopt, std::nullopt, "office", "out-of-domain"};
  for (const ManifestEntry& e : {speech, noise}) {
    const ManifestEntry back = manifest_entry_from_json(to_json(e));
    CHECK(back.audio == e.audio);
    CHECK(back.transcript == e.transcript);
    CHECK(back.cfh_class == e.cfh_class);
    CHECK(back.noise_scene == e.noise_scene);
    CHECK(back.domain == e.domain);
  }
  CHECK(speech.is_speech());
  CHECK_FALSE(noise.is_speech());
}

TEST_CASE("schema violations are rejected") {
  using nlohmann::json;
  CHECK_THROWS_AS(manifest_entry_from_json(json::array()), InvalidInput);
  CHECK_THROWS_AS(manifest_entry_from_json(json{{"transcript", "x"}, {"cfh_class", "others"}}), InvalidInput);
  CHECK_THROWS_AS(manifest_entry_from_json(json{{"audio", "a"}, {"transcript", "x"}, {"noise_scene", "office"}}),
                  InvalidInput);
  CHECK_THROWS_AS(manifest_entry_from_json(json{{"audio", "a"}, {"transcript", nullptr}, {"noise_scene", nullptr}}),
                  InvalidInput);
  CHECK_THROWS_AS(manifest_entry_from_json(json{{"audio", "a"}, {"transcript", "x"}, {"cfh_class", "panic"}}),
                  InvalidInput);
  CHECK_THROWS_AS(manifest_entry_from_json(json{{"audio", 3}, {"noise_scene", "office"}}), InvalidInput);
}

TEST_CASE("read_manifest resolves paths and reports line numbers") {
  const auto dir = temp_dir("manifest");
  std::ofstream(dir / "m.jsonl")
      << R"({"audio": "clips/a.wav", "transcript": "save me", "cfh_class": "saveme", "noise_scene": null})" << "\n\n"
      << R"({"audio": "/abs/b.wav", "transcript": null, "cfh_class": null, "noise_scene": "traffic"})" << "\n";
  const auto entries = read_manifest((dir / "m.jsonl").string());
  REQUIRE(entries.size() == 2);
  CHECK(fs::path(entries[0].audio) == dir / "clips/a.wav");
  CHECK(entries[1].audio == "/abs/b.wav");

  std::ofstream(dir / "bad.jsonl") << R"({"audio": "a.wav", "transcript": "x", "cfh_class": "others"})" << "\n"
                                   << "{not json\n";
  try {
    read_manifest((dir / "bad.jsonl").string());
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK_THROWS_AS(read_manifest((dir / "none.jsonl").string()), InvalidInput);
}

TEST_CASE("write then read preserves entries") {
  const auto dir = temp_dir("manifest_rt");
  const std::vector<ManifestEntry> entries{{"x.wav", "help me", "helpme", std::nullopt, std::nullopt},
                                           {"y.wav", std::nullopt, std::nullopt, "machine", "in-domain"}};
  write_manifest((dir / "m.jsonl").string(), entries);
  const auto back = read_manifest((dir / "m.jsonl").string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].transcript == entries[0].transcript);
  CHECK(back[1].noise_scene == entries[1].noise_scene);
  CHECK(scene_names(back) == std::vector<std::string>{"machine"});
}

}  // TEST_SUITE
