// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "audioinsight/manifest.hpp"

namespace audioinsight {

// Parameters of the synthetic conversation corpus. Each group of
// participants contributes, per threat condition, one group conversation and
// one dyadic conversation per participant pair.
//
// `separability` scales every class-discriminative contrast: how distinct the
// simulated voices are within a clip (drives the dyadic/group contrast) and
// the pitch/jitter shift of evaluative clips (drives the threat contrast).
// At 0 both tasks are chance level; at 1 they are strongly separable.
//
// `group_nuisance` adds per-group acoustic idiosyncrasies (gain, noise floor,
// spectral tilt, pitch offset) shared by all clips of a group, so that
// sample-wide cross-validation can exploit group identity while
// leave-one-group-out cannot.
struct SynthSpec {
    int n_groups = 2;
    int participants_per_group = 4;  // 4..6
    double dyadic_duration_s = 240.0;
    double group_duration_s = 360.0;
    double separability = 1.0;   // [0,1]
    double group_nuisance = 0.0; // [0,1]
    uint64_t seed = 0;
};

// Writes WAV clips under <out_dir>/clips plus <out_dir>/manifest.csv and
// returns the manifest. Deterministic for a fixed spec (byte-identical
// output), independent of thread count.
DatasetManifest synthesize_corpus(const SynthSpec& spec, const std::string& out_dir);

}  // namespace audioinsight
