// tests/test-pipeline.cc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "orbitsig/pipeline.h"
#include "orbitsig/synth.h"
#include "orbitsig/util.h"

using namespace orbitsig;
namespace fs = std::filesystem;

namespace {

// Small but realistic settings: 8 kHz, 100 ms windows, 64 reduced bins.
PipelineConfig tiny_config() {
  PipelineConfig cfg;
  cfg.base.sample_rate = 8000;
  cfg.base.spec.window_ms = 100.0;
  cfg.base.spec.hop_ms = 50.0;
  cfg.base.reduced_bins = 64;
  cfg.warp.templates = 8;
  cfg.warp.epsilon_count = 5;
  cfg.pitch.templates = 4;
  cfg.pitch.shift_min = -4;
  cfg.pitch.shift_max = 4;
  cfg.pitch.shift_step = 2;
  return cfg;
}

SynthConfig tiny_synth() {
  SynthConfig sc;
  sc.classes = 2;
  sc.tracks_per_class = 3;
  sc.duration_s = 1.5;
  sc.sample_rate = 8000;
  sc.seed = 3;
  return sc;
}

const DatasetManifest& tiny_corpus() {
  static const DatasetManifest manifest = [] {
    const fs::path dir = fs::temp_directory_path() / "orbitsig-pipe-corpus";
    fs::remove_all(dir);
    return generate_synth_corpus(dir.string(), tiny_synth());
  }();
  return manifest;
}

AudioClip tone_clip(int sr, double seconds, double freq) {
  AudioClip clip;
  clip.sample_rate = sr;
  const auto n = static_cast<size_t>(seconds * sr);
  for (size_t i = 0; i < n; ++i) {
    clip.samples.push_back(0.5 * std::sin(2.0 * M_PI * freq * i / sr));
  }
  return clip;
}

}  // namespace

TEST_CASE("config: stage names, enable monotonicity, JSON round-trip") {
  CHECK(stage_name(Stage::WarpTranslation) == "warp+translation");
  CHECK(stage_from_name("warp+translation+pitch") == Stage::WarpTranslationPitch);
  CHECK_THROWS_AS(stage_from_name("bogus"), ConfigError);

  PipelineConfig cfg = tiny_config();
  cfg.warp.enabled = false;
  cfg.maxpool.enabled = true;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.maxpool.enabled = false;
  cfg.pitch.enabled = true;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  const PipelineConfig copy = PipelineConfig::from_json(cfg.to_json());
  CHECK(copy.to_json() == cfg.to_json());
  CHECK(copy.config_hash() == cfg.config_hash());

  // The hash ignores enable flags but tracks parameters.
  CHECK(cfg.for_stage(Stage::Base).config_hash() ==
        cfg.for_stage(Stage::WarpTranslationPitch).config_hash());
  PipelineConfig other = cfg;
  other.warp.epsilon_count = 7;
  CHECK(other.config_hash() != cfg.config_hash());

  CHECK(cfg.for_stage(Stage::Warp).deepest_stage() == Stage::Warp);
  CHECK(cfg.for_stage(Stage::Base).deepest_stage() == Stage::Base);
}

TEST_CASE("layer1: framing count, dimension, silence") {
  const PipelineConfig cfg = tiny_config().for_stage(Stage::Base);
  const FeaturePipeline pipe(cfg, std::nullopt, std::nullopt);

  const AudioClip clip = tone_clip(8000, 1.5, 440.0);
  const FeatureSequence seq = pipe.layer1(clip);
  const FramePlan plan = plan_frames(clip.samples.size(), 8000, 100.0, 50.0);
  CHECK(seq.rows.rows() == plan.count);
  CHECK(seq.rows.cols() == 64);
  CHECK(seq.stage_tag == "base");

  AudioClip silence;
  silence.sample_rate = 8000;
  silence.samples.assign(12000, 0.0);
  const FeatureSequence s = pipe.layer1(silence);
  for (Eigen::Index i = 1; i < s.rows.rows(); ++i) {
    CHECK(s.rows.row(i) == s.rows.row(0));
  }
  CHECK(s.rows(0, 0) == doctest::Approx(std::log(cfg.base.spec.log_floor)));
}

TEST_CASE("warp bank: shapes, unit members, determinism") {
  const PipelineConfig cfg = tiny_config().for_stage(Stage::Warp);
  const auto [train, test] = split_dataset(tiny_corpus(), 0.5, 0);
  const TemplateBank bank = build_warp_bank(train, cfg);
  CHECK(bank.orbit_count() == 8);
  CHECK(bank.members_per_orbit() == 5);
  CHECK(bank.dim() == 64);
  CHECK(bank.layer_tag == "warp");
  CHECK(bank.config_hash == cfg.config_hash());
  CHECK_NOTHROW(bank.validate());
  for (const auto& orbit : bank.orbits) {
    CHECK(!orbit.source_track.empty());
  }

  const TemplateBank again = build_warp_bank(train, cfg);
  CHECK(again.stacked() == bank.stacked());  // bit-exact reproducibility
}

TEST_CASE("layer2: signature shape, silence convention, template match") {
  PipelineConfig cfg = tiny_config().for_stage(Stage::Warp);
  const auto [train, test] = split_dataset(tiny_corpus(), 0.5, 0);
  const TemplateBank bank = build_warp_bank(train, cfg);
  const FeaturePipeline pipe(cfg, bank, std::nullopt);

  const AudioClip clip = load_clip(tiny_corpus().entries[0], cfg.base);
  const FeatureSequence base = pipe.layer1(clip);
  const FeatureSequence warp = pipe.layer2_warp(base);
  CHECK(warp.rows.rows() == base.rows.rows());
  CHECK(warp.rows.cols() == 8 * 3);  // K * |orders|
  CHECK(warp.stage_tag == "warp");
  CHECK(warp.rows.allFinite());
  CHECK(warp.rows.maxCoeff() <= 1.0 + 1e-12);
  CHECK(warp.rows.minCoeff() >= -1.0 - 1e-12);

  FeatureSequence with_silence = base;
  with_silence.rows.row(3).setZero();
  const FeatureSequence sig = pipe.layer2_warp(with_silence);
  CHECK(sig.rows.row(3).cwiseAbs().maxCoeff() == 0.0);

  // An input equal to a template's untransformed member projects to 1 there,
  // so that orbit's first moment dominates every other first moment.
  PipelineConfig identity_cfg = cfg;
  identity_cfg.warp.epsilon_count = 1;  // orbit = {epsilon = 0}
  const TemplateBank id_bank = build_warp_bank(train, identity_cfg);
  const FeaturePipeline id_pipe(identity_cfg, id_bank, std::nullopt);
  Eigen::MatrixXd row(1, id_bank.dim());
  row.row(0) = id_bank.orbits[2].members.row(0);
  FeatureSequence fs;
  fs.rows = row;
  fs.stage_tag = "base";
  const Eigen::MatrixXd out = id_pipe.layer2_warp(fs).rows;
  const int stats = 3;
  const double matched = out(0, 2 * stats + 0);
  CHECK(matched == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < 8; ++k) {
    CHECK(out(0, k * stats + 0) <= matched + 1e-12);
  }
}

TEST_CASE("layer3: shape law, identity, constant, monotonicity") {
  auto rows_for = [](int t) {
    Eigen::MatrixXd m(t, 3);
    for (int i = 0; i < t; ++i) {
      m(i, 0) = i;
      m(i, 1) = -i;
      m(i, 2) = (i % 5);
    }
    return m;
  };

  FeatureSequence seq;
  seq.stage_tag = "warp";
  seq.rows = rows_for(161);
  const FeatureSequence out = FeaturePipeline::layer3_maxpool(seq, 8, 3);
  CHECK(out.rows.rows() == 52);
  CHECK(out.stage_tag == "warp+translation");
  // Row j is the elementwise max over rows [3j, 3j+8).
  CHECK(out.rows(0, 0) == 7.0);
  CHECK(out.rows(0, 1) == 0.0);
  CHECK(out.rows(51, 0) == 160.0);

  seq.rows = rows_for(10);
  const FeatureSequence id = FeaturePipeline::layer3_maxpool(seq, 1, 1);
  CHECK(id.rows == seq.rows);

  seq.rows = Eigen::MatrixXd::Constant(20, 4, 0.7);
  const FeatureSequence c = FeaturePipeline::layer3_maxpool(seq, 8, 3);
  CHECK(c.rows.isApproxToConstant(0.7));

  seq.rows = rows_for(7);
  CHECK_THROWS_AS(FeaturePipeline::layer3_maxpool(seq, 8, 3), std::invalid_argument);

  // Permutation within a window leaves the output unchanged; raising any
  // input never lowers any output.
  Rng rng(5);
  Eigen::MatrixXd base_m(8, 4);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 4; ++j) base_m(i, j) = rng.normal();
  }
  seq.rows = base_m;
  const Eigen::MatrixXd pooled = FeaturePipeline::layer3_maxpool(seq, 8, 3).rows;
  Eigen::MatrixXd permuted = base_m;
  permuted.row(0).swap(permuted.row(5));
  permuted.row(2).swap(permuted.row(7));
  seq.rows = permuted;
  CHECK(FeaturePipeline::layer3_maxpool(seq, 8, 3).rows == pooled);
  Eigen::MatrixXd bumped = base_m;
  bumped(3, 2) += 1.0;
  seq.rows = bumped;
  const Eigen::MatrixXd bumped_out = FeaturePipeline::layer3_maxpool(seq, 8, 3).rows;
  CHECK((bumped_out - pooled).minCoeff() >= 0.0);
}

TEST_CASE("layer3 shape law across T") {
  for (int t = 8; t <= 500; ++t) {
    CHECK(FeaturePipeline::maxpool_output_rows(t, 8, 3) == (t - 8) / 3 + 1);
  }
  CHECK_THROWS_AS(FeaturePipeline::maxpool_output_rows(7, 8, 3), std::invalid_argument);
}

TEST_CASE("layer4: pitch-shift structure of a constructed bank") {
  // Narrowband vector on a constant background; its pitch orbit is closed
  // under interior shifts, so signatures are shift-invariant.
  const int d = 48;
  const double bg = -10.0;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(d, bg);
  v[20] = 4.0;
  v[21] = 2.0;

  const TransformSpec spec = shift_grid(-6, 6, 2);
  const std::vector<double> vv(v.data(), v.data() + d);
  std::vector<Eigen::VectorXd> members;
  for (double p : spec.parameters) {
    const auto s = pitch_shift_frame(vv, static_cast<int>(p), bg);
    members.push_back(Eigen::Map<const Eigen::VectorXd>(s.data(), d));
  }
  TemplateBank bank;
  bank.layer_tag = "pitch";
  bank.config_hash = sha256_hex("constructed");
  TemplateOrbit orbit = finalize_orbit(members, spec);
  orbit.template_id = 0;
  bank.orbits.push_back(orbit);

  // Self-projection: the unshifted input is member s=0.
  const Eigen::VectorXd p = project(v, bank.orbits[0]);
  CHECK(p.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));

  const BankProjector projector(bank, PoolingSpec::moments({1, 2, 3}));
  Eigen::MatrixXd rows(3, d);
  rows.row(0) = v;
  const auto s2 = pitch_shift_frame(vv, 2, bg);
  const auto s4 = pitch_shift_frame(vv, -4, bg);
  rows.row(1) = Eigen::Map<const Eigen::VectorXd>(s2.data(), d);
  rows.row(2) = Eigen::Map<const Eigen::VectorXd>(s4.data(), d);
  const Eigen::MatrixXd sigs = projector.signatures(rows);
  CHECK((sigs.row(1) - sigs.row(0)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((sigs.row(2) - sigs.row(0)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("pitch bank: built from third-layer representations") {
  PipelineConfig cfg = tiny_config().for_stage(Stage::WarpTranslationPitch);
  cfg.maxpool.width = 4;  // the tiny tracks have ~28 frames
  cfg.maxpool.stride = 2;
  const auto [train, test] = split_dataset(tiny_corpus(), 0.5, 0);
  const TemplateBank warp_bank = build_warp_bank(train, cfg);
  const TemplateBank pitch_bank = build_pitch_bank(train, cfg, warp_bank);
  CHECK(pitch_bank.orbit_count() == 4);
  CHECK(pitch_bank.members_per_orbit() == 5);  // shifts -4..4 step 2
  CHECK(pitch_bank.dim() == 8 * 3);            // third-layer width
  CHECK_NOTHROW(pitch_bank.validate());

  const FeaturePipeline pipe(cfg, warp_bank, pitch_bank);
  const AudioClip clip = load_clip(tiny_corpus().entries[1], cfg.base);
  const FeatureSequence out = pipe.extract(clip);
  CHECK(out.stage_tag == "warp+translation+pitch");
  CHECK(out.rows.cols() == 4 * 3);
  CHECK(out.rows.allFinite());
}

TEST_CASE("extract: stage gating, maxpool arithmetic, determinism") {
  PipelineConfig cfg = tiny_config();
  const auto [train, test] = split_dataset(tiny_corpus(), 0.5, 0);
  const AudioClip clip = load_clip(tiny_corpus().entries[2], cfg.base);

  const FeaturePipeline base_pipe(cfg.for_stage(Stage::Base), std::nullopt, std::nullopt);
  const FeatureSequence base = base_pipe.extract(clip);
  CHECK(base.stage_tag == "base");
  CHECK(base.rows == base_pipe.layer1(clip).rows);

  const TemplateBank bank = build_warp_bank(train, cfg);
  const FeaturePipeline wt_pipe(cfg.for_stage(Stage::WarpTranslation), bank, std::nullopt);
  const FeatureSequence wt = wt_pipe.extract(clip);
  const int t = static_cast<int>(base.rows.rows());
  CHECK(wt.rows.rows() == (t - cfg.maxpool.width) / cfg.maxpool.stride + 1);

  const FeatureSequence wt2 = wt_pipe.extract(clip);
  CHECK(wt.rows == wt2.rows);  // bit-identical reruns
}

TEST_CASE("pipeline: bank hash mismatches are refused") {
  PipelineConfig cfg = tiny_config().for_stage(Stage::Warp);
  const auto [train, test] = split_dataset(tiny_corpus(), 0.5, 0);
  TemplateBank bank = build_warp_bank(train, cfg);

  PipelineConfig other = cfg;
  other.warp.epsilon_range = 0.3;
  CHECK_THROWS_AS(FeaturePipeline(other, bank, std::nullopt), ConfigError);
  CHECK_THROWS_AS(FeaturePipeline(cfg, std::nullopt, std::nullopt), ConfigError);
  CHECK_NOTHROW(FeaturePipeline(cfg, bank, std::nullopt));
}

TEST_CASE("feature cache: hit on matching hash, miss otherwise") {
  const fs::path dir = fs::temp_directory_path() / "orbitsig-cache-test";
  fs::remove_all(dir);
  const PipelineConfig cfg = tiny_config().for_stage(Stage::Base);
  const FeaturePipeline pipe(cfg, std::nullopt, std::nullopt);
  const AudioClip clip = load_clip(tiny_corpus().entries[0], cfg.base);
  const FeatureSequence seq = pipe.extract(clip);

  write_cached_features(dir.string(), "trk", seq, cfg);
  const auto hit = read_cached_features(dir.string(), "trk", "base", cfg.config_hash());
  REQUIRE(hit.has_value());
  CHECK(*hit == seq.rows);  // cache equivalence is bit-exact

  CHECK(!read_cached_features(dir.string(), "trk", "base", sha256_hex("other")).has_value());
  CHECK(!read_cached_features(dir.string(), "nope", "base", cfg.config_hash()).has_value());
}

TEST_CASE("load_clip: sample-rate policy") {
  const PipelineConfig cfg = tiny_config();
  const fs::path dir = fs::temp_directory_path() / "orbitsig-rate-test";
  fs::create_directories(dir);
  const AudioClip tone = tone_clip(16000, 0.5, 500.0);
  const std::string path = (dir / "hi.wav").string();
  save_wav16(path, tone);

  ManifestEntry entry{"hi", path, 0};
  CHECK_THROWS_WITH_AS(load_clip(entry, cfg.base), doctest::Contains("allow_resample"),
                       ConfigError);

  BaseLayerConfig relaxed = cfg.base;
  relaxed.allow_resample = true;
  const AudioClip resampled = load_clip(entry, relaxed);
  CHECK(resampled.sample_rate == 8000);
  CHECK(resampled.samples.size() == 4000);
}
