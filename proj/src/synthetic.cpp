#include "bzscr/synthetic.hpp"

#include <random>

namespace bzscr {

SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
  if (spec.seen < 2 || spec.seen >= spec.classes)
    throw std::invalid_argument("generate_synthetic: need 2 <= seen < classes");
  if (spec.embed_dim < 1 || spec.feature_dim < 1 || spec.samples_per_class < 1)
    throw std::invalid_argument("generate_synthetic: dimensions must be positive");
  if (spec.noise_scale < 0.0)
    throw std::invalid_argument("generate_synthetic: noise_scale must be non-negative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticData out;
  const int c = spec.classes;
  const int d = spec.embed_dim;
  const int m = spec.feature_dim;

  out.embeddings.phi.resize(c, d);
  for (int y = 0; y < c; ++y) {
    for (int k = 0; k < d; ++k) out.embeddings.phi(y, k) = gauss(rng);
    out.embeddings.phi.row(y).normalize();
  }

  Matrix map(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) map(i, j) = gauss(rng);

  auto fill = [&](Dataset& ds, int first_class, int last_class) {
    const int n = (last_class - first_class + 1) * spec.samples_per_class;
    ds.features.resize(n, m);
    ds.labels.reserve(n);
    int row = 0;
    for (int y = first_class; y <= last_class; ++y) {
      const Vector mean = map * out.embeddings.phi.row(y - 1).transpose();
      for (int k = 0; k < spec.samples_per_class; ++k, ++row) {
        for (int j = 0; j < m; ++j)
          ds.features(row, j) = mean(j) + spec.noise_scale * gauss(rng);
        ds.labels.push_back(y);
      }
    }
  };
  fill(out.train, 1, spec.seen);
  fill(out.test, spec.seen + 1, c);

  for (int y = 1; y <= c; ++y)
    (y <= spec.seen ? out.split.seen : out.split.unseen).push_back(y);

  return out;
}

}  // namespace bzscr
