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

// Acceptance runner. One PASS/FAIL line per criterion; exit 0 iff all pass.
//
//   cfh_acceptance --criterion 1,2,3     run a subset
//   cfh_acceptance                        run everything (about 12 minutes)

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfh/audio.hpp"
#include "cfh/checkpoint.hpp"
#include "cfh/commands.hpp"
#include "cfh/detection.hpp"
#include "cfh/evaluation.hpp"
#include "cfh/fixtures.hpp"
#include "cfh/gradcheck.hpp"
#include "cfh/losses.hpp"
#include "cfh/manifest.hpp"
#include "cfh/trainer.hpp"
#include "metric_oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cfh;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

bool report(const std::string& id, bool pass, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
  return pass;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cfh_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<TrainingExample> random_batch(const ModelConfig& cfg, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 4);
  std::uniform_real_distribution<float> level(-1.5f, 1.5f);
  std::uniform_int_distribution<int> token(kNumSpecials, cfg.vocab_size() - 1);
  std::uniform_int_distribution<int> scene(0, cfg.n_noise_classes());
  std::uniform_int_distribution<int> len(1, cfg.max_target_len - 1);
  std::vector<TrainingExample> batch(static_cast<std::size_t>(size(rng)));
  for (auto& ex : batch) {
    ex.mel = Eigen::MatrixXf::NullaryExpr(cfg.n_frames(), cfg.n_mels(), [&] { return level(rng); });
    ex.noise_label = scene(rng);
    if (ex.noise_label == 0) {
      TokenSequence t(static_cast<std::size_t>(len(rng)));
      for (int& id : t) id = token(rng);
      ex.target_tokens = t;
    }
  }
  return batch;
}

ModelConfig toy_model() {
  ModelConfig cfg = ModelConfig::toy();
  cfg.noise_scenes = toy_scene_names();
  return cfg;
}

// 1. l_multi is exactly l_noise + l_seq2seq, and both parts match a
// per-item recomputation.
bool criterion_1() {
  const auto t0 = Clock::now();
  const ModelConfig cfg = toy_model();
  const auto p = init_parameters<double>(cfg, 1);
  std::mt19937_64 rng(2026);
  long exact = 0;
  double worst = 0.0;
  for (int b = 0; b < 500; ++b) {
    const auto batch = random_batch(cfg, rng);
    const LossBreakdown l = multitask_loss<double>(p, batch);
    if (l.l_multi == l.l_noise + l.l_seq2seq) ++exact;
    double noise_sum = 0.0, seq_sum = 0.0;
    int speech = 0;
    for (const auto& ex : batch) {
      const auto e = encode<double>(ex.mel.cast<double>().eval(), p);
      noise_sum += noise_loss<double>(noise_head<double>(mean_pool_time(e), p), ex.noise_label);
      if (ex.has_transcript()) {
        const TokenSequence out = teacher_output(*ex.target_tokens);
        seq_sum += seq2seq_loss<double>(decoder_forward<double>(teacher_input(*ex.target_tokens), e, p), out,
                                        std::vector<bool>(out.size(), true));
        ++speech;
      }
    }
    const double l_noise = noise_sum / static_cast<double>(batch.size());
    const double l_seq = speech > 0 ? seq_sum / speech : 0.0;
    worst = std::max({worst, std::abs(l.l_noise - l_noise), std::abs(l.l_seq2seq - l_seq)});
  }
  const double secs = seconds_since(t0);
  return report("1", exact == 500 && worst <= 1e-12 && secs < 10.0,
                "exact sums " + std::to_string(exact) + "/500, component diff " + fmt(worst) + ", " +
                    fmt(secs, 3) + " s");
}

// 2. Gradient check on the toy preset through the gradcheck command. Its
// printed report is parsed for the per-path, per-class coverage.
bool criterion_2() {
  const auto t0 = Clock::now();
  RunConfig rc;
  std::ostringstream out, err;
  const int code = cmd_gradcheck(rc, out, err);
  const double secs = seconds_since(t0);

  std::map<std::string, long> class_size;
  auto shapes = init_parameters<double>(toy_model(), 0);
  for_each_tensor(shapes, [&](const std::string& name, const Mat<double>& t) { class_size[tensor_class(name)] += t.size(); });

  std::map<std::string, std::map<std::string, long>> coords;
  std::string path;
  double max_rel = std::numeric_limits<double>::infinity();
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) {
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (line.rfind("max_rel_error ", 0) == 0) {
      ls >> max_rel;
    } else if (!line.empty() && line[0] != ' ' && first.back() == ':') {
      path = first.substr(0, first.size() - 1);
    } else if (!path.empty() && line.rfind("  ", 0) == 0) {
      double e = 0.0;
      std::string over;
      long n = 0;
      ls >> e >> over >> n;
      coords[path][first] = n;
    }
  }
  bool coverage = coords.size() == 3;
  long min_coords = std::numeric_limits<long>::max();
  for (const char* name : {"noise", "seq2seq", "multitask"}) {
    const auto it = coords.find(name);
    if (it == coords.end() || it->second.size() != class_size.size()) {
      coverage = false;
      continue;
    }
    for (const auto& [cls, n] : it->second) {
      coverage = coverage && class_size.count(cls) && n >= std::min(200L, class_size.at(cls));
      min_coords = std::min(min_coords, n);
    }
  }
  const bool pass = code == 0 && max_rel <= 1e-4 && coverage && secs < 120.0;
  return report("2", pass,
                "max_rel_error " + fmt(max_rel) + " over paths noise/seq2seq/multitask, " +
                    std::to_string(class_size.size()) + " tensor classes, min coordinates per class " +
                    std::to_string(min_coords) + " (classes under 200 are exhaustive), exit " +
                    std::to_string(code) + ", " + fmt(secs, 3) + " s");
}

// 3. Uniform and saturated loss fixtures.
bool criterion_3() {
  double worst = 0.0;
  const Vec<double> two = Vec<double>::Constant(2, 0.37);
  worst = std::max(worst, std::abs(noise_loss<double>(two, 1) - std::numbers::ln2));
  const ModelConfig cfg = toy_model();
  const int v = cfg.vocab_size();
  const TokenSequence targets{5, 9, kEot};
  const Mat<double> flat = Mat<double>::Constant(3, v, -1.25);
  worst = std::max(worst, std::abs(seq2seq_loss<double>(flat, targets, {true, true, true}) - std::log(v)));
  Mat<double> sharp = Mat<double>::Constant(3, v, -50.0);
  for (int t = 0; t < 3; ++t) sharp(t, targets[static_cast<std::size_t>(t)]) = 50.0;
  const double saturated_seq = seq2seq_loss<double>(sharp, targets, {true, true, true});
  Vec<double> noise_sharp = Vec<double>::Constant(5, -50.0);
  noise_sharp[2] = 50.0;
  const double saturated_noise = noise_loss<double>(noise_sharp, 2);
  const bool pass = worst <= 1e-9 && saturated_seq < 1e-9 && saturated_noise < 1e-9;
  return report("3", pass,
                "uniform error " + fmt(worst) + " (ln 2, ln " + std::to_string(v) + "), saturated " +
                    fmt(saturated_noise) + " / " + fmt(saturated_seq));
}

// 4. Metrics against the brute-force oracle.
bool criterion_4() {
  std::mt19937_64 rng(44);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto counts = cfh::testing::random_counts(rng);
    const auto oracle = cfh::testing::oracle_metrics(counts);
    const ConfusionMatrix cm = cfh::testing::to_confusion(counts);
    worst = std::max({worst, std::abs(accuracy(cm) - oracle.accuracy), std::abs(macro_f1(cm) - oracle.macro_f1)});
  }
  return report("4", worst <= 1e-12, "1000 matrices, max |diff| " + fmt(worst));
}

// Counts decoder calls independently of the pipeline's own bookkeeping.
class CountingModel : public SpeechModel {
 public:
  explicit CountingModel(const SpeechModel& inner) : inner_(inner) {}
  const FrontendConfig& frontend() const override { return inner_.frontend(); }
  Eigen::MatrixXf encode(const MelSpectrogram& mel) const override { return inner_.encode(mel); }
  Eigen::VectorXd noise_logits(const Eigen::MatrixXf& s) const override { return inner_.noise_logits(s); }
  std::string transcribe(const Eigen::MatrixXf& s) const override {
    ++calls;
    return inner_.transcribe(s);
  }
  const std::vector<std::string>& scene_names() const override { return inner_.scene_names(); }
  mutable long calls = 0;

 private:
  const SpeechModel& inner_;
};

// 5. Decoder invocations equal speech verdicts; none on an all-noise manifest.
bool criterion_5() {
  const auto t0 = Clock::now();
  const fs::path dir = work_dir("c5");
  FixtureConfig fc;
  fc.seed = 5;
  fc.train_speech = 40;
  fc.train_noise = 40;
  fc.test_speech = 12;
  fc.test_noise = 12;
  fc.ood_noise = 4;
  const FixtureCorpus corpus = make_fixtures(fc, (dir / "fixtures").string());
  TrainConfig tc;
  tc.base_lr = 1e-3;
  tc.epochs = 15;
  tc.batch_size = 16;
  tc.seed = 5;
  const TrainOutputs trained = train(ModelConfig::toy(), read_manifest(corpus.train_manifest), {}, tc,
                                     (dir / "run").string());
  const TransformerSpeechModel model(std::make_shared<const ModelParameters<float>>(trained.result.ema));
  const KeywordLexicon lexicon = KeywordLexicon::english_default();

  auto check = [&](const std::vector<ManifestEntry>& entries, double tau, long& verdicts, long& invocations) {
    verdicts = 0;
    for (const auto& e : entries) {
      const Eigen::MatrixXf states = model.encode(featurize(read_wav(e.audio), model.frontend()));
      if (gate(model.noise_logits(states), tau).speech) ++verdicts;
    }
    CountingModel counting(model);
    const BatchDetection batch = detect_batch(entries, counting, lexicon, tau);
    long flagged = 0;
    bool noise_clean = true;
    for (const auto& ev : batch.events) {
      flagged += ev.decoder_invoked;
      if (ev.klass == CfhClass::kNoise) noise_clean = noise_clean && !ev.decoder_invoked && ev.transcript.empty();
    }
    invocations = counting.calls;
    return noise_clean && batch.errors == 0 && counting.calls == verdicts && batch.decoder_invocations == verdicts &&
           flagged == verdicts;
  };

  const auto mixed = read_manifest(corpus.test_manifest);
  const auto all_noise = read_manifest(corpus.noise_test_manifest);
  long v_mixed = 0, i_mixed = 0, v_noise = 0, i_noise = 0, v_zero = 0, i_zero = 0;
  const bool ok_mixed = check(mixed, 0.5, v_mixed, i_mixed);
  const bool ok_zero = check(mixed, 0.0, v_zero, i_zero);
  const bool ok_noise = check(all_noise, 0.5, v_noise, i_noise);
  const bool pass = ok_mixed && ok_zero && ok_noise && i_noise == 0 && i_zero == static_cast<long>(mixed.size()) &&
                    v_mixed > 0 && v_mixed < static_cast<long>(mixed.size());
  return report("5", pass,
                "mixed manifest " + std::to_string(i_mixed) + " invocations / " + std::to_string(v_mixed) +
                    " speech verdicts of " + std::to_string(mixed.size()) + "; tau 0: " + std::to_string(i_zero) +
                    "/" + std::to_string(v_zero) + "; all-noise: " + std::to_string(i_noise) + " invocations over " +
                    std::to_string(all_noise.size()) + " clips, " + fmt(seconds_since(t0), 3) + " s");
}

// Toy recipe shared by criteria 6-8.
TrainConfig toy_recipe(bool single_task) {
  TrainConfig tc;
  tc.base_lr = 1e-3;
  tc.epochs = 40;
  tc.batch_size = 32;
  tc.single_task = single_task;
  return tc;
}

struct SeedRun {
  json summary;            // every number the criteria look at
  std::string artifacts;   // checkpoint and metrics bytes, concatenated
  double seconds = 0.0;
};

std::pair<int, std::string> run_command(const std::string& command) {
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {-1, output};
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

SeedRun run_seed(std::uint64_t seed, const fs::path& root) {
  const auto t0 = Clock::now();
  SeedRun run;
  const fs::path dir = root / ("seed_" + std::to_string(seed));
  std::ostringstream sink, err;

  RunConfig rc;
  rc.seed = seed;
  rc.fixtures.seed = seed;
  rc.out_dir = (dir / "fixtures").string();
  if (cmd_make_fixtures(rc, sink, err) != 0) throw std::runtime_error("make-fixtures failed: " + err.str());
  const FixtureCorpus corpus{(dir / "fixtures/train.jsonl").string(), (dir / "fixtures/test.jsonl").string(),
                             (dir / "fixtures/noise_test.jsonl").string(), (dir / "fixtures/noise_ood.jsonl").string(),
                             (dir / "fixtures/lexicon.json").string()};

  for (const bool single : {false, true}) {
    const std::string tag = single ? "single" : "multi";
    RunConfig tr = rc;
    tr.train = toy_recipe(single);
    tr.train_manifest = corpus.train_manifest;
    tr.eval_manifest = corpus.test_manifest;
    tr.lexicon = corpus.lexicon;
    tr.out_dir = (dir / tag).string();
    if (cmd_train(tr, sink, err) != 0) throw std::runtime_error("train failed: " + err.str());
    const std::string ckpt_path = (dir / tag / "checkpoint.bin").string();
    run.artifacts += slurp(ckpt_path) + slurp(dir / tag / "metrics.jsonl");
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    json& s = run.summary[tag];
    s["steps"] = ckpt.metadata.at("steps");
    s["train_noise_accuracy"] = ckpt.metadata.at("train_noise_accuracy");
    s["train_token_accuracy"] = ckpt.metadata.at("train_token_accuracy");

    const TransformerSpeechModel model(std::make_shared<const ModelParameters<float>>(ckpt.inference_parameters()));
    const auto test = read_manifest(corpus.test_manifest);
    const KeywordLexicon lexicon = KeywordLexicon::load(corpus.lexicon);
    if (single) {
      // Without a trained gate the single-task model runs ungated, and every
      // clip (noise included) gets one of the three speech verdicts.
      const BatchDetection b = detect_batch(test, model, lexicon, 0.0);
      const CfhReport r = evaluate_cfh(b.events, test, ClassSpace::k4Class, b.decoder_invocations);
      s["cfh_4class"] = to_json(r);
    } else {
      RunConfig ev = tr;
      ev.checkpoint = ckpt_path;
      ev.noise_manifests = {corpus.noise_ood_manifest};
      ev.out_dir = (dir / tag / "eval").string();
      if (cmd_eval(ev, sink, err) != 0) throw std::runtime_error("eval failed: " + err.str());
      json rep = json::parse(slurp(dir / tag / "eval" / "report.json"));
      rep.erase("checkpoint");
      s["cfh_4class"] = rep.at("cfh").at(0);
      s["cfh_3class"] = rep.at("cfh").at(1);
      s["noise_scenes"] = rep.at("noise_scenes");

      // Held-out "save me" clip, rendered with a seed no fixture uses.
      FixtureConfig fc = rc.fixtures;
      std::mt19937_64 rng(seed * 1000 + 17);
      const fs::path clip = dir / "heldout_save_me.wav";
      write_wav(clip.string(), synthesize_speech("save me", fc, rng));
      const auto [code, out] =
          run_command(std::string("\"") + CFH_BINARY + "\" detect --checkpoint \"" + ckpt_path + "\" \"" +
                      clip.string() + "\" 2>&1");
      s["heldout_exit"] = code;
      try {
        s["heldout_klass"] = json::parse(out).at("klass");
        s["heldout_transcript"] = json::parse(out).at("transcript");
      } catch (const std::exception&) {
        s["heldout_klass"] = "unparsed: " + out;
      }
    }
  }
  run.seconds = seconds_since(t0);
  return run;
}

bool criteria_6_7_8(const std::set<std::string>& wanted) {
  const std::vector<std::uint64_t> seeds{7, 8, 9};
  std::vector<SeedRun> first, second;
  const fs::path a = work_dir("runs_a");
  for (const auto s : seeds) {
    first.push_back(run_seed(s, a));
    const json& m = first.back().summary.at("multi");
    std::cout << "  seed " << s << ": multitask 4-class " << m.at("cfh_4class").at("accuracy").dump()
              << ", single-task 4-class " << first.back().summary.at("single").at("cfh_4class").at("accuracy").dump()
              << ", out-of-domain scenes " << m.at("noise_scenes").at(1).at("accuracy").dump() << "  ("
              << fmt(first.back().seconds, 4) << " s)" << std::endl;
  }
  bool all = true;

  if (wanted.count("6")) {
    const json& m = first[0].summary.at("multi");
    const double noise_acc = m.at("train_noise_accuracy");
    const double token_acc = m.at("train_token_accuracy");
    const double scene_acc = m.at("noise_scenes").at(0).at("accuracy");
    const long steps = m.at("steps");
    const bool pass = noise_acc >= 0.95 && token_acc >= 0.90 && scene_acc >= 0.90 && steps <= 2000 &&
                      m.at("heldout_klass") == "saveme" && m.at("heldout_exit") == 2 && first[0].seconds < 900.0;
    all &= report("6", pass,
                  "seed 7: train noise acc " + fmt(noise_acc) + ", token acc " + fmt(token_acc) +
                      ", test scene acc " + fmt(scene_acc) + ", " + std::to_string(steps) +
                      " steps, held-out \"save me\" -> " + m.at("heldout_klass").dump() + " (exit " +
                      m.at("heldout_exit").dump() + "), " + fmt(first[0].seconds, 4) + " s");
  }
  if (wanted.count("7")) {
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const double mt = first[i].summary.at("multi").at("cfh_4class").at("accuracy");
      const double st = first[i].summary.at("single").at("cfh_4class").at("accuracy");
      pass = pass && mt > st;
      detail += "seed " + std::to_string(seeds[i]) + ": multitask " + fmt(mt) + " vs single-task " + fmt(st) + "; ";
    }
    all &= report("7", pass, detail + "4-class accuracy on the mixed test split");
  }
  if (wanted.count("8")) {
    const fs::path b = work_dir("runs_b");
    bool pass = true;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      second.push_back(run_seed(seeds[i], b));
      pass = pass && second[i].summary.dump() == first[i].summary.dump() && second[i].artifacts == first[i].artifacts;
    }
    all &= report("8", pass, "repeat of seeds 7, 8, 9: metrics, checkpoints and metric logs " +
                                 std::string(pass ? "bit-identical" : "DIFFER"));
  }
  return all;
}

// 9. Frozen frontend values and checkpoint round trip.
bool criterion_9() {
  const FrontendConfig fe = ModelConfig::toy().frontend;
  Waveform zero;
  zero.samples = Eigen::VectorXf::Zero(fe.target_rate);
  const MelSpectrogram mel = featurize(zero, fe);
  const double zero_dev = (mel.frames.array().cast<double>() + 1.5).abs().maxCoeff();

  // 440 Hz at 44.1 kHz, resampled to 16 kHz: one second, so bin k is k Hz.
  Waveform tone;
  tone.sample_rate = 44100;
  tone.samples.resize(44100);
  for (Eigen::Index i = 0; i < tone.samples.size(); ++i) {
    tone.samples[i] = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 44100.0));
  }
  const Waveform r = resample(tone, 16000);
  long peak = 0;
  double best = -1.0;
  for (long k = 0; k <= 8000; ++k) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index n = 0; n < r.samples.size(); ++n) {
      acc += static_cast<double>(r.samples[n]) *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * n % 16000) / 16000.0);
    }
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      peak = k;
    }
  }

  const fs::path dir = work_dir("c9");
  Checkpoint ckpt;
  ckpt.live = init_parameters<float>(toy_model(), 9);
  ckpt.ema = init_parameters<float>(toy_model(), 10);
  ckpt.metadata = json{{"note", "round trip"}};
  save_checkpoint((dir / "a.bin").string(), ckpt);
  const Checkpoint back = load_checkpoint((dir / "a.bin").string());
  save_checkpoint((dir / "b.bin").string(), back);
  const bool round_trip = identical(back.live, ckpt.live) && back.ema && identical(*back.ema, *ckpt.ema) &&
                          back.metadata == ckpt.metadata && slurp(dir / "a.bin") == slurp(dir / "b.bin");

  const bool pass = r.samples.size() == 16000 && zero_dev == 0.0 && peak == 440 && round_trip;
  return report("9", pass,
                "zero-waveform log-mel max |x + 1.5| " + fmt(zero_dev) + " over " +
                    std::to_string(mel.frames.rows()) + "x" + std::to_string(mel.frames.cols()) +
                    ", resampled 440 Hz peak bin " + std::to_string(peak) + " Hz, checkpoint round trip " +
                    (round_trip ? "bit-exact" : "MISMATCH"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfh acceptance criteria"};
  std::string criteria = "1,2,3,4,5,6,7,8,9";
  app.add_option("--criterion", criteria, "Comma-separated criterion numbers");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> wanted;
  std::stringstream ss(criteria);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) wanted.insert(item);
  }
  bool all = true;
  try {
    if (wanted.count("1")) all &= criterion_1();
    if (wanted.count("2")) all &= criterion_2();
    if (wanted.count("3")) all &= criterion_3();
    if (wanted.count("4")) all &= criterion_4();
    if (wanted.count("5")) all &= criterion_5();
    if (wanted.count("6") || wanted.count("7") || wanted.count("8")) all &= criteria_6_7_8(wanted);
    if (wanted.count("9")) all &= criterion_9();
  } catch (const std::exception& e) {
    std::cout << "criterion run aborted: " << e.what() << std::endl;
    return 1;
  }
  return all ? 0 : 1;
}
