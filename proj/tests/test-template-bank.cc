// tests/test-template-bank.cc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "orbitsig/template-bank.h"
#include "orbitsig/util.h"

using namespace orbitsig;
namespace fs = std::filesystem;

namespace {

DatasetManifest toy_manifest(int tracks) {
  DatasetManifest m;
  m.class_names = {"only"};
  for (int t = 0; t < tracks; ++t) {
    m.entries.push_back({"t" + std::to_string(t), "none.wav", 0});
  }
  return m;
}

// Deterministic fake feature provider: track i yields (i % 3 + 1) vectors
// tagged by (track, frame) in their coordinates.
FeatureProvider fake_provider(int dim) {
  return [dim](const ManifestEntry& entry) {
    const int idx = std::stoi(entry.track_id.substr(1));
    std::vector<Eigen::VectorXd> out;
    for (int f = 0; f < idx % 3 + 1; ++f) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      v[0] = idx + 1;
      v[1] = f + 1;
      v[2] = 0.5;
      out.push_back(v);
    }
    return out;
  };
}

std::string dummy_hash() { return sha256_hex("bank-test-config"); }

}  // namespace

TEST_CASE("sample_templates: single track, single frame") {
  const auto manifest = toy_manifest(1);
  const auto samples = sample_templates(manifest, 1, fake_provider(4), 0);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].source_track == "t0");
  CHECK(samples[0].vec[0] == 1.0);
  CHECK(samples[0].vec[1] == 1.0);
}

TEST_CASE("sample_templates: deterministic under the seed") {
  const auto manifest = toy_manifest(20);
  const auto a = sample_templates(manifest, 16, fake_provider(4), 99);
  const auto b = sample_templates(manifest, 16, fake_provider(4), 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].source_track == b[i].source_track);
    CHECK(a[i].vec == b[i].vec);
  }
  const auto c = sample_templates(manifest, 16, fake_provider(4), 100);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    any_diff = any_diff || a[i].source_track != c[i].source_track || a[i].vec != c[i].vec;
  }
  CHECK(any_diff);
}

TEST_CASE("sample_templates: every draw is a member of the provider's output") {
  const auto manifest = toy_manifest(10);
  const auto provider = fake_provider(4);
  const auto samples = sample_templates(manifest, 40, provider, 7);
  REQUIRE(samples.size() == 40);
  for (const auto& s : samples) {
    bool found = false;
    for (const auto& entry : manifest.entries) {
      for (const auto& v : provider(entry)) {
        if (v == s.vec && entry.track_id == s.source_track) found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("sample_templates: empty provider output is an error") {
  const auto manifest = toy_manifest(1);
  FeatureProvider empty = [](const ManifestEntry&) { return std::vector<Eigen::VectorXd>{}; };
  CHECK_THROWS_WITH_AS(sample_templates(manifest, 1, empty, 0), doctest::Contains("t0"),
                       std::runtime_error);
  CHECK_THROWS_AS(sample_templates(manifest, 0, fake_provider(4), 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_templates(DatasetManifest{}, 1, fake_provider(4), 0),
                  std::invalid_argument);
}

TEST_CASE("build_orbit: identity spec on a unit template") {
  Eigen::VectorXd t(4);
  t << 0.5, 0.5, 0.5, 0.5;
  TransformSpec spec;
  spec.kind = TransformKind::CyclicShift;
  spec.parameters = {0.0};
  const TemplateOrbit orbit = build_orbit(t, spec);
  REQUIRE(orbit.size() == 1);
  CHECK((orbit.members.row(0).transpose() - t).norm() < 1e-15);
}

TEST_CASE("build_orbit: all members unit-norm for random templates") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd t(32);
    for (int i = 0; i < 32; ++i) t[i] = rng.normal() * 10.0;
    const auto spec = warp_grid(9, 0.4);
    const TemplateOrbit orbit = build_orbit(t, spec);
    REQUIRE(orbit.size() == 9);
    for (int m = 0; m < orbit.size(); ++m) {
      CHECK(std::abs(orbit.members.row(m).norm() - 1.0) <= 1e-9);
    }
    CHECK_NOTHROW(orbit.validate());
  }
}

TEST_CASE("build_orbit: degenerate members are rejected with the parameter") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
  TransformSpec spec;
  spec.kind = TransformKind::CyclicShift;
  spec.parameters = {0.0};
  CHECK_THROWS_AS(build_orbit(zero, spec), std::runtime_error);

  // A warp that pushes all mass off the end produces a zero member.
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(8);
  impulse[1] = 1.0;
  TransformSpec warp;
  warp.kind = TransformKind::TimeWarp;
  warp.parameters = {9.0};  // samples land past the impulse
  CHECK_THROWS_WITH_AS(build_orbit(impulse, warp), doctest::Contains("9.0"), std::runtime_error);
}

TEST_CASE("build_orbit: representation function is applied after the transform") {
  Eigen::VectorXd t(4);
  t << 1.0, 2.0, 3.0, 4.0;
  TransformSpec spec;
  spec.kind = TransformKind::CyclicShift;
  spec.parameters = {0.0, 1.0};
  RepresentationFn rep = [](const std::vector<double>& v) {
    Eigen::VectorXd out(2);
    out << v[0], v[1];  // keep the first two coordinates
    return out;
  };
  const TemplateOrbit orbit = build_orbit(t, spec, rep);
  REQUIRE(orbit.dim() == 2);
  // Member 1 is the rotation [4,1,2,3] -> first two coords (4,1), normalized.
  Eigen::Vector2d expected(4.0, 1.0);
  expected.normalize();
  CHECK((orbit.members.row(1).transpose() - expected).norm() < 1e-12);
}

TEST_CASE("full cyclic orbit consists of the normalized rotations") {
  Rng rng(31);
  Eigen::VectorXd t(16);
  for (int i = 0; i < 16; ++i) t[i] = rng.normal();
  const auto spec = shift_grid(0, 15, 1, TransformKind::CyclicShift);
  const TemplateOrbit orbit = build_orbit(t, spec);
  const Eigen::VectorXd unit = t / t.norm();
  for (int k = 0; k < 16; ++k) {
    const std::vector<double> uv(unit.data(), unit.data() + 16);
    const auto rot = cyclic_shift(uv, k);
    for (int i = 0; i < 16; ++i) {
      CHECK(orbit.members(k, i) == doctest::Approx(rot[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("bank save/load round-trip is field-for-field exact") {
  const fs::path dir = fs::temp_directory_path() / "orbitsig-tbk";
  fs::create_directories(dir);
  const std::string path = (dir / "bank.tbk").string();

  Rng rng(41);
  TemplateBank bank;
  bank.layer_tag = "warp";
  bank.config_hash = dummy_hash();
  const auto spec = warp_grid(5, 0.4);
  for (int k = 0; k < 7; ++k) {
    Eigen::VectorXd t(24);
    for (int i = 0; i < 24; ++i) t[i] = rng.normal();
    TemplateOrbit orbit = build_orbit(t, spec);
    orbit.template_id = k;
    orbit.source_track = "track-" + std::to_string(k);
    bank.orbits.push_back(std::move(orbit));
  }
  save_bank(path, bank);

  const TemplateBank loaded = load_bank(path, bank.config_hash);
  CHECK(loaded.layer_tag == bank.layer_tag);
  CHECK(loaded.config_hash == bank.config_hash);
  REQUIRE(loaded.orbit_count() == bank.orbit_count());
  for (int k = 0; k < bank.orbit_count(); ++k) {
    CHECK(loaded.orbits[k].template_id == bank.orbits[k].template_id);
    CHECK(loaded.orbits[k].source_track == bank.orbits[k].source_track);
    CHECK(loaded.orbits[k].spec.parameters == bank.orbits[k].spec.parameters);
    CHECK(loaded.orbits[k].members == bank.orbits[k].members);  // bit-exact
  }

  // Saving twice produces identical bytes.
  const std::string path2 = (dir / "bank2.tbk").string();
  save_bank(path2, bank);
  CHECK(read_file_bytes(path) == read_file_bytes(path2));
}

TEST_CASE("bank load: hash mismatch, truncation, bad magic") {
  const fs::path dir = fs::temp_directory_path() / "orbitsig-tbk2";
  fs::create_directories(dir);
  const std::string path = (dir / "bank.tbk").string();

  TemplateBank bank;
  bank.layer_tag = "warp";
  bank.config_hash = dummy_hash();
  Eigen::VectorXd t(8);
  t << 1, 2, 3, 4, 5, 6, 7, 8;
  TemplateOrbit orbit = build_orbit(t, warp_grid(3, 0.2));
  orbit.template_id = 0;
  bank.orbits.push_back(orbit);
  save_bank(path, bank);

  CHECK_THROWS_AS(load_bank(path, sha256_hex("a different config")), ConfigError);
  CHECK_NOTHROW(load_bank(path));  // no expected hash = no check

  const std::string bytes = read_file_bytes(path);
  write_file_bytes(path, bytes.substr(0, bytes.size() - 9));
  CHECK_THROWS_WITH_AS(load_bank(path), doctest::Contains("corrupted"), IoError);

  write_file_bytes(path, "NOPE" + bytes.substr(4));
  CHECK_THROWS_WITH_AS(load_bank(path), doctest::Contains("magic"), IoError);

  // Corrupting a member breaks the unit-norm invariant on load. The first
  // coordinate of the last member is t[0] scaled, comfortably nonzero.
  std::string tampered = bytes;
  const size_t float_region = tampered.size() - 32 - 8 * 8;
  for (int i = 0; i < 8; ++i) tampered[float_region + i] = '\0';
  write_file_bytes(path, tampered);
  CHECK_THROWS_WITH_AS(load_bank(path), doctest::Contains("invariant"), IoError);
}
