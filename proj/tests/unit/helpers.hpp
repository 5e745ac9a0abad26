#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "secseq/cumfn.hpp"
#include "secseq/probkit.hpp"

namespace testutil {

inline std::vector<double> random_mass(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = exp1(rng) + 1e-6;
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

inline secseq::Pmf random_pmf(std::mt19937_64& rng, std::size_t n) {
  return secseq::Pmf(random_mass(rng, n));
}

inline secseq::Dmc random_dmc(std::mt19937_64& rng, std::size_t in,
                              std::size_t out) {
  std::vector<double> flat;
  for (std::size_t u = 0; u < in; ++u) {
    auto row = random_mass(rng, out);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return secseq::Dmc(in, out, std::move(flat));
}

inline secseq::WiretapKernel random_kernel(std::mt19937_64& rng, std::size_t nu,
                                           std::size_t nv, std::size_t nz) {
  std::vector<double> flat;
  for (std::size_t u = 0; u < nu; ++u) {
    auto slice = random_mass(rng, nv * nz);
    flat.insert(flat.end(), slice.begin(), slice.end());
  }
  return secseq::WiretapKernel(nu, nv, nz, std::move(flat));
}

// Regular step function with `jumps` random jump locations and sizes.
inline secseq::CumulativeFn random_step(std::mt19937_64& rng, std::size_t jumps,
                                        double scale = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> b{0.0};
  while (b.size() < jumps + 1) {
    const double x = unif(rng);
    if (x > 1e-6 && x < 1.0 - 1e-6) b.push_back(x);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (b.back() != 1.0) b.push_back(1.0);
  std::vector<double> v(b.size());
  v[0] = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i)
    v[i] = v[i - 1] + scale * unif(rng);
  return secseq::CumulativeFn::step(std::move(b), std::move(v));
}

}  // namespace testutil
