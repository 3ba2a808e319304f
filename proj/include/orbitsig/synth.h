// orbitsig/synth.h

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include "orbitsig/signal-io.h"

namespace orbitsig {

// Procedural benchmark corpus: each class is a fixed harmonic stack with a
// class-specific amplitude profile and beat envelope; each track renders the
// class theme at a random playback rate (1 + warp), a random pitch offset,
// and additive noise. Playback-rate variation is the dominant nuisance, so
// warp-invariant features are what separates the classes.
struct SynthConfig {
  int classes = 5;
  int tracks_per_class = 40;
  double duration_s = 5.0;
  int sample_rate = 22050;
  double snr_db = 15.0;                 // >= 300 (or non-finite) disables noise
  double warp_jitter = 0.3;             // per-track warp in [-warp_jitter, warp_jitter]
  double pitch_jitter_semitones = 1.0;  // per-track pitch offset
  uint64_t seed = 0;
};

// Renders one track deterministically; track index selects the per-track
// draws within the corpus stream.
AudioClip render_synth_track(const SynthConfig& cfg, int class_index, int track_index);

// Writes classes x tracks WAV files plus manifest.csv into out_dir and
// returns the manifest.
DatasetManifest generate_synth_corpus(const std::string& out_dir, const SynthConfig& cfg);

}  // namespace orbitsig
