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

#include "cfh/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "cfh/checkpoint.hpp"
#include "cfh/config_json.hpp"
#include "cfh/detection.hpp"
#include "cfh/evaluation.hpp"
#include "cfh/gradcheck.hpp"
#include "cfh/manifest.hpp"

namespace cfh {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json fixture_sizes_to_json(const FixtureConfig& f) {
  return json{{"sample_rate", f.sample_rate},   {"clip_seconds", f.clip_seconds},
              {"char_seconds", f.char_seconds}, {"snr_db", f.snr_db},
              {"train_speech", f.train_speech}, {"train_noise", f.train_noise},
              {"test_speech", f.test_speech},   {"test_noise", f.test_noise},
              {"ood_noise", f.ood_noise}};
}

FixtureConfig fixtures_from_json(const json& j, FixtureConfig f) {
  f.sample_rate = j.value("sample_rate", f.sample_rate);
  f.clip_seconds = j.value("clip_seconds", f.clip_seconds);
  f.char_seconds = j.value("char_seconds", f.char_seconds);
  f.snr_db = j.value("snr_db", f.snr_db);
  f.train_speech = j.value("train_speech", f.train_speech);
  f.train_noise = j.value("train_noise", f.train_noise);
  f.test_speech = j.value("test_speech", f.test_speech);
  f.test_noise = j.value("test_noise", f.test_noise);
  f.ood_noise = j.value("ood_noise", f.ood_noise);
  return f;
}

KeywordLexicon resolve_lexicon(const RunConfig& c, const json& metadata) {
  if (c.lexicon) return KeywordLexicon::load(*c.lexicon);
  if (metadata.contains("lexicon")) return KeywordLexicon::from_json(metadata.at("lexicon"));
  return KeywordLexicon::english_default();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j{{"model", to_json(c.model)},
         {"train", to_json(c.train)},
         {"fixtures", fixture_sizes_to_json(c.fixtures)},
         {"tau", c.tau},
         {"noise_manifests", c.noise_manifests},
         {"out", c.out_dir},
         {"gradcheck_tolerance", c.gradcheck_tolerance},
         {"gradcheck_samples", c.gradcheck_samples}};
  if (c.lexicon) j["lexicon"] = *c.lexicon;
  if (c.train_manifest) j["train_manifest"] = *c.train_manifest;
  if (c.eval_manifest) j["eval_manifest"] = *c.eval_manifest;
  if (c.seed) j["seed"] = *c.seed;
  if (c.checkpoint) j["checkpoint"] = *c.checkpoint;
  return j;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  if (j.contains("preset")) c.model = ModelConfig::from_preset(j.at("preset").get<std::string>());
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"), c.model);
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
  if (j.contains("fixtures")) c.fixtures = fixtures_from_json(j.at("fixtures"), c.fixtures);
  c.tau = j.value("tau", c.tau);
  if (j.contains("lexicon")) c.lexicon = j.at("lexicon").get<std::string>();
  if (j.contains("train_manifest")) c.train_manifest = j.at("train_manifest").get<std::string>();
  if (j.contains("eval_manifest")) c.eval_manifest = j.at("eval_manifest").get<std::string>();
  if (j.contains("noise_manifests")) c.noise_manifests = j.at("noise_manifests").get<std::vector<std::string>>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.out_dir = j.value("out", c.out_dir);
  if (j.contains("checkpoint")) c.checkpoint = j.at("checkpoint").get<std::string>();
  c.gradcheck_tolerance = j.value("gradcheck_tolerance", c.gradcheck_tolerance);
  c.gradcheck_samples = j.value("gradcheck_samples", c.gradcheck_samples);
  return c;
}

int cmd_make_fixtures(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.seed) {
    err << "make-fixtures: --seed is required\n";
    return 1;
  }
  FixtureConfig f = c.fixtures;
  f.seed = *c.seed;
  f.alphabet = c.model.alphabet;
  try {
    const FixtureCorpus corpus = make_fixtures(f, c.out_dir);
    out << json{{"train", corpus.train_manifest},
                {"test", corpus.test_manifest},
                {"noise_test", corpus.noise_test_manifest},
                {"noise_ood", corpus.noise_ood_manifest},
                {"lexicon", corpus.lexicon}}
               .dump()
        << '\n';
  } catch (const std::exception& e) {
    err << "make-fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.seed) {
    err << "train: --seed is required\n";
    return 1;
  }
  if (!c.train_manifest) {
    err << "train: --train-manifest is required\n";
    return 1;
  }
  TrainConfig tc = c.train;
  tc.seed = *c.seed;
  tc.tau = c.tau;
  try {
    const std::vector<ManifestEntry> train_entries = read_manifest(*c.train_manifest);
    std::vector<ManifestEntry> eval_entries;
    if (c.eval_manifest) eval_entries = read_manifest(*c.eval_manifest);
    const KeywordLexicon lexicon = c.lexicon ? KeywordLexicon::load(*c.lexicon) : KeywordLexicon::english_default();
    const TrainOutputs outputs = train(c.model, train_entries, eval_entries, tc, c.out_dir, lexicon);
    for (const EpochMetrics& m : outputs.result.epochs) out << to_json(m).dump() << '\n';
    out << json{{"checkpoint", outputs.checkpoint_path},
                {"metrics", outputs.metrics_path},
                {"steps", outputs.result.steps}}
               .dump()
        << '\n';
  } catch (const TrainingDiverged& e) {
    err << "train: diverged: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "train: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.checkpoint) {
    err << "eval: --checkpoint is required\n";
    return 1;
  }
  if (!c.eval_manifest && c.noise_manifests.empty()) {
    err << "eval: give --manifest and/or --noise-manifest\n";
    return 1;
  }
  try {
    const Checkpoint ckpt = load_checkpoint(*c.checkpoint);
    const KeywordLexicon lexicon = resolve_lexicon(c, ckpt.metadata);
    const TransformerSpeechModel model(std::make_shared<const ModelParameters<float>>(ckpt.inference_parameters()));
    const fs::path dir(c.out_dir);
    fs::create_directories(dir);

    json report{{"checkpoint", *c.checkpoint}, {"tau", c.tau}, {"cfh", json::array()}, {"noise_scenes", json::array()}};
    std::vector<ManifestEntry> scene_entries;
    if (c.eval_manifest) {
      const std::vector<ManifestEntry> entries = read_manifest(*c.eval_manifest);
      // The 3-class view bypasses the gate; the 4-class view uses the configured tau.
      std::vector<std::pair<ClassSpace, double>> runs;
      if (c.tau > 0.0) runs.emplace_back(ClassSpace::k4Class, c.tau);
      runs.emplace_back(ClassSpace::k3Class, 0.0);
      for (const auto& [space, tau] : runs) {
        const BatchDetection batch = detect_batch(entries, model, lexicon, tau);
        const CfhReport r = evaluate_cfh(batch.events, entries, space, batch.decoder_invocations);
        json rj = to_json(r);
        rj["tau"] = tau;
        report["cfh"].push_back(rj);
        const std::string tag(to_string(space));
        write_text(dir / ("confusion_" + tag + ".csv"), confusion_csv(r.confusion));
        std::ofstream events(dir / ("events_" + tag + ".jsonl"));
        for (const DetectionEvent& e : batch.events) events << to_json(e).dump() << '\n';
        out << format_table(r) << '\n';
      }
      for (const ManifestEntry& e : entries) {
        if (!e.is_speech()) scene_entries.push_back(e);
      }
    }
    std::vector<std::vector<ManifestEntry>> scene_sets;
    if (!scene_entries.empty()) scene_sets.push_back(scene_entries);
    for (const std::string& path : c.noise_manifests) scene_sets.push_back(read_manifest(path));
    for (std::size_t i = 0; i < scene_sets.size(); ++i) {
      const NoiseSceneReport r = evaluate_noise_scenes(model, scene_sets[i]);
      report["noise_scenes"].push_back(to_json(r));
      write_text(dir / ("scenes_" + std::to_string(i) + "_" + r.domain + ".csv"), confusion_csv(r.confusion));
      out << format_table(r) << '\n';
    }
    write_text(dir / "report.json", report.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_detect(const RunConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
  if (!c.checkpoint) {
    err << "detect: --checkpoint is required\n";
    return 1;
  }
  if (c.inputs.empty()) {
    err << "detect: no input audio\n";
    return 1;
  }
  std::unique_ptr<TransformerSpeechModel> model;
  KeywordLexicon lexicon;
  try {
    const Checkpoint ckpt = load_checkpoint(*c.checkpoint);
    lexicon = resolve_lexicon(c, ckpt.metadata);
    model = std::make_unique<TransformerSpeechModel>(
        std::make_shared<const ModelParameters<float>>(ckpt.inference_parameters()));
  } catch (const std::exception& e) {
    err << "detect: " << e.what() << '\n';
    return 1;
  }

  bool failed = false;
  bool emergency = false;
  for (const std::string& input : c.inputs) {
    json line;
    try {
      const Waveform w = input == "-" ? read_wav(in, "<stdin>") : read_wav(input);
      const DetectionEvent e = detect(w, *model, lexicon, c.tau);
      line = to_json(e);
      emergency = emergency || e.klass == CfhClass::kSaveMe || e.klass == CfhClass::kHelpMe;
    } catch (const std::exception& e) {
      err << "detect: " << input << ": " << e.what() << '\n';
      DetectionEvent failed_event;
      failed_event.klass = CfhClass::kOthers;
      failed_event.error = e.what();
      line = to_json(failed_event);
      failed = true;
    }
    line["input"] = input;
    out << line.dump() << '\n';
  }
  if (failed) return 1;
  return emergency ? 2 : 0;
}

int cmd_gradcheck(const RunConfig& c, std::ostream& out, std::ostream& err) {
  GradcheckOptions opt;
  opt.tolerance = c.gradcheck_tolerance;
  opt.samples_per_class = c.gradcheck_samples;
  opt.seed = c.seed.value_or(0);
  try {
    const GradcheckSuite suite = gradcheck_suite(c.model, opt);
    for (const auto& [path, r] : suite.paths) {
      out << path << ": max_rel_error " << std::setprecision(6) << r.max_rel_error << " (" << r.worst_tensor
          << ", " << r.coordinates << " coordinates)\n";
      for (const auto& [cls, e] : r.class_max_error) {
        out << "  " << std::left << std::setw(28) << cls << std::right << " " << e << " over "
            << r.class_coordinates.at(cls) << '\n';
      }
    }
    out << "max_rel_error " << suite.max_rel_error << " tolerance " << opt.tolerance << ' '
        << (suite.passed ? "PASS" : "FAIL") << '\n';
    return suite.passed ? 0 : 1;
  } catch (const std::exception& e) {
    err << "gradcheck: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise-gated call-for-help detection: fixtures, training, evaluation and detection."};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> tau;
    std::optional<std::string> preset;
    std::optional<std::string> checkpoint;
    std::optional<std::string> lexicon;
    std::optional<std::string> train_manifest;
    std::optional<std::string> eval_manifest;
    std::vector<std::string> noise_manifests;
    std::vector<std::string> inputs;
    bool single_task = false;
    std::optional<int> epochs;
    std::optional<long> max_steps;
    std::optional<double> lr;
    std::optional<int> batch_size;
    std::optional<double> speech_fraction;
    std::optional<int> train_speech, train_noise, test_speech, test_noise, ood_noise;
    std::optional<double> tolerance;
    std::optional<int> samples;
  } f;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "JSON run config; flags override its keys")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--tau", f.tau, "Speech-gate threshold in [0, 1]; 0 disables the gate");
    cmd->add_option("--preset", f.preset, "Model preset")->check(CLI::IsMember({"toy", "paper"}));
  };

  CLI::App* fixtures = app.add_subcommand("make-fixtures", "Generate the synthetic tone/noise corpus");
  common(fixtures);
  fixtures->add_option("--train-speech", f.train_speech, "Training speech clips");
  fixtures->add_option("--train-noise", f.train_noise, "Training noise clips");
  fixtures->add_option("--test-speech", f.test_speech, "Test speech clips");
  fixtures->add_option("--test-noise", f.test_noise, "Test noise clips");
  fixtures->add_option("--ood-noise", f.ood_noise, "Out-of-domain noise clips");

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint.bin + metrics.jsonl");
  common(train_cmd);
  train_cmd->add_option("--train-manifest", f.train_manifest, "Training manifest (JSONL)");
  train_cmd->add_option("--eval-manifest", f.eval_manifest, "Held-out manifest evaluated after each epoch");
  train_cmd->add_option("--lexicon", f.lexicon, "Keyword lexicon JSON");
  train_cmd->add_flag("--single-task", f.single_task, "Train without the noise loss");
  train_cmd->add_option("--epochs", f.epochs, "Epochs");
  train_cmd->add_option("--max-steps", f.max_steps, "Cap on optimizer steps (0 = none)");
  train_cmd->add_option("--lr", f.lr, "Peak learning rate");
  train_cmd->add_option("--batch-size", f.batch_size, "Batch size");
  train_cmd->add_option("--speech-fraction", f.speech_fraction, "Speech share of each batch (0 = natural mix)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a checkpoint; writes report.json and CSV matrices");
  common(eval_cmd);
  eval_cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint file");
  eval_cmd->add_option("--manifest", f.eval_manifest, "Call-for-help evaluation manifest");
  eval_cmd->add_option("--noise-manifest", f.noise_manifests, "Extra noise-scene manifests (repeatable)");
  eval_cmd->add_option("--lexicon", f.lexicon, "Keyword lexicon JSON (default: the checkpoint's)");

  CLI::App* detect_cmd = app.add_subcommand("detect", "Classify WAV files ('-' reads stdin); one JSON line each");
  common(detect_cmd);
  detect_cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint file");
  detect_cmd->add_option("--lexicon", f.lexicon, "Keyword lexicon JSON (default: the checkpoint's)");
  detect_cmd->add_option("inputs", f.inputs, "WAV paths or '-'")->required();

  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  common(grad_cmd);
  grad_cmd->add_option("--tolerance", f.tolerance, "Max relative error for a pass");
  grad_cmd->add_option("--samples", f.samples, "Coordinates sampled per tensor class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  RunConfig c;
  try {
    if (!f.config.empty()) {
      std::ifstream cf(f.config);
      c = run_config_from_json(json::parse(cf));
    }
  } catch (const std::exception& e) {
    err << "config: " << e.what() << '\n';
    return 1;
  }
  if (f.preset) c.model = ModelConfig::from_preset(*f.preset);
  if (f.seed) c.seed = f.seed;
  if (f.out) c.out_dir = *f.out;
  if (f.tau) c.tau = *f.tau;
  if (f.checkpoint) c.checkpoint = f.checkpoint;
  if (f.lexicon) c.lexicon = f.lexicon;
  if (f.train_manifest) c.train_manifest = f.train_manifest;
  if (f.eval_manifest) c.eval_manifest = f.eval_manifest;
  if (!f.noise_manifests.empty()) c.noise_manifests = f.noise_manifests;
  if (!f.inputs.empty()) c.inputs = f.inputs;
  if (f.single_task) c.train.single_task = true;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.max_steps) c.train.max_steps = *f.max_steps;
  if (f.lr) c.train.base_lr = *f.lr;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.speech_fraction) c.train.speech_fraction = *f.speech_fraction;
  if (f.train_speech) c.fixtures.train_speech = *f.train_speech;
  if (f.train_noise) c.fixtures.train_noise = *f.train_noise;
  if (f.test_speech) c.fixtures.test_speech = *f.test_speech;
  if (f.test_noise) c.fixtures.test_noise = *f.test_noise;
  if (f.ood_noise) c.fixtures.ood_noise = *f.ood_noise;
  if (f.tolerance) c.gradcheck_tolerance = *f.tolerance;
  if (f.samples) c.gradcheck_samples = *f.samples;
  if (c.tau < 0.0 || c.tau > 1.0) {
    err << "--tau must lie in [0, 1]\n";
    return 1;
  }

  if (fixtures->parsed()) return cmd_make_fixtures(c, out, err);
  if (train_cmd->parsed()) return cmd_train(c, out, err);
  if (eval_cmd->parsed()) return cmd_eval(c, out, err);
  if (detect_cmd->parsed()) return cmd_detect(c, in, out, err);
  return cmd_gradcheck(c, out, err);
}

}  // namespace cfh
