#pragma once

#include <cstdint>

#include "bzscr/types.hpp"

namespace bzscr {

struct SyntheticSpec {
  int classes = 15;       // C
  int seen = 10;          // C_S, classes 1..C_S are seen
  int embed_dim = 16;     // d
  int feature_dim = 16;   // m
  int samples_per_class = 60;
  double noise_scale = 1.0;
};

struct SyntheticData {
  Dataset train;  // seen classes only
  Dataset test;   // unseen classes only
  LabelEmbeddings embeddings;
  ClassSplit split;
};

// Class embeddings on the unit sphere, a fixed random linear map A (m x d),
// and samples x = A*phi(y) + noise_scale * gaussian. Pure function of
// (spec, seed).
SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

}  // namespace bzscr
