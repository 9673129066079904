#pragma once

#include "bzscr/types.hpp"

namespace bzscr {

// Normalized cosine divergence: (1 - cos(phi(y1), phi(y2))) scaled by the
// worst pair so the maximum entry is exactly 1. Throws if all embeddings are
// pairwise identical in direction (the normalizer would be 0).
DivergenceMatrix cosine_divergence(const LabelEmbeddings& embeddings);

// Path-length divergence 1 - 1/(path + 1). The input must be symmetric with
// non-negative entries and a zero diagonal.
DivergenceMatrix path_divergence(const IntMatrix& path_lengths);

}  // namespace bzscr
