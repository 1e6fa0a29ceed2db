#pragma once

#include <cstdint>
#include <filesystem>

#include "costarr/dataset.hpp"

namespace costarr {

// Deterministic benchmark generator. Every class activates a sparse subset
// of feature dimensions; the head weights echo that mask. Unknown samples
// start as attenuated copies of a known class and then light up a random
// number of off-mask dimensions -- from none at all (low-intensity
// impostors that only the logit scale can catch) to many (high-energy
// impostors that fool raw-logit scores), which is what spreads the
// scoring methods apart.
struct SynthConfig {
    std::uint64_t seed = 42;
    std::int64_t num_classes = 50;
    std::int64_t feature_dim = 256;
    std::int64_t train_per_class = 200;
    std::int64_t test_known = 1000;
    std::int64_t test_unknown = 1000;
    double active_frac = 0.1;
    double unknown_boost = 3.0;

    void validate() const; // ArgumentError on out-of-range values
    std::int64_t mask_size() const;
};

struct SynthData {
    Tensor weights; // [C x D] f64
    Tensor bias;    // [C] f64, all zero
    Tensor masks;   // [C x D] i64 0/1
    LabeledSet train;
    LabeledSet val;  // same composition as test, independent draws
    LabeledSet test; // knowns first, then unknowns labeled -1
};

SynthData generate_synth(const SynthConfig& cfg);

// weights/bias/masks plus {train,val,test}_{features,logits,labels}.cst
// and a plain-text synth_config.txt.
void save_synth(const SynthData& data, const SynthConfig& cfg, const std::filesystem::path& dir);

} // namespace costarr
