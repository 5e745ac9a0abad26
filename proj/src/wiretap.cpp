#include "secseq/wiretap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace secseq {

namespace {

constexpr double kLog2e = 1.4426950408889634;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

CapacityResult capacity(const Dmc& ch) {
  const std::size_t nu = ch.input_size(), nv = ch.output_size();
  std::vector<double> q(nu, 1.0 / static_cast<double>(nu));
  std::vector<double> mv(nv), dkl(nu);
  double c_nats = 0.0;
  int iter = 0;
  for (; iter < 200000; ++iter) {
    std::fill(mv.begin(), mv.end(), 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v) mv[v] += q[u] * ch.at(u, v);
    double lower = 0.0, upper = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < nu; ++u) {
      double d = 0.0;
      for (std::size_t v = 0; v < nv; ++v) {
        const double p = ch.at(u, v);
        if (p > 0.0) d += p * std::log(p / mv[v]);
      }
      dkl[u] = d;
      lower += q[u] * d;
      upper = std::max(upper, d);
    }
    c_nats = lower;
    if (upper - lower < 1e-13) break;
    double norm = 0.0;
    for (std::size_t u = 0; u < nu; ++u) {
      q[u] *= std::exp(dkl[u] - upper);  // shift keeps exp() in range
      norm += q[u];
    }
    for (double& x : q) x /= norm;
  }
  return {std::max(c_nats, 0.0) * kLog2e, Pmf(std::move(q)), iter};
}

namespace {

// Secrecy objective and its gradient for a joint weight J (aux w by input u),
// all in nats. Av, Az are the marginal channels of the wiretap kernel.
struct SecrecyProblem {
  const Dmc& av;
  const Dmc& az;

  double objective(const std::vector<double>& j) const {
    const std::size_t nw = j.size() / av.input_size();
    return info(j, nw, av) - info(j, nw, az);
  }

  // I(W;Out) for the given branch.
  double info(const std::vector<double>& j, std::size_t nw, const Dmc& ch) const {
    const std::size_t nu = ch.input_size(), ny = ch.output_size();
    double h_wy = 0.0, h_w = 0.0;
    std::vector<double> py(ny, 0.0);
    for (std::size_t w = 0; w < nw; ++w) {
      double pw = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double pwy = 0.0;
        for (std::size_t u = 0; u < nu; ++u)
          pwy += j[w * nu + u] * ch.at(u, y);
        py[y] += pwy;
        h_wy -= xlogx(pwy);
      }
      for (std::size_t u = 0; u < nu; ++u) pw += j[w * nu + u];
      h_w -= xlogx(pw);
    }
    double h_y = 0.0;
    for (double p : py) h_y -= xlogx(p);
    return std::max(h_w + h_y - h_wy, 0.0);
  }

  void gradient(const std::vector<double>& j, std::vector<double>& g) const {
    const std::size_t nu = av.input_size();
    const std::size_t nw = j.size() / nu;
    grad_branch(j, nw, av, +1.0, g, true);
    grad_branch(j, nw, az, -1.0, g, false);
  }

  void grad_branch(const std::vector<double>& j, std::size_t nw, const Dmc& ch,
                   double sign, std::vector<double>& g, bool reset) const {
    const std::size_t nu = ch.input_size(), ny = ch.output_size();
    std::vector<double> py(ny, 0.0), pwy(nw * ny, 0.0), pw(nw, 0.0);
    for (std::size_t w = 0; w < nw; ++w)
      for (std::size_t u = 0; u < nu; ++u) {
        const double juw = j[w * nu + u];
        pw[w] += juw;
        if (juw == 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y) {
          const double m = juw * ch.at(u, y);
          pwy[w * ny + y] += m;
          py[y] += m;
        }
      }
    // d(I)/dJ(w,u) = sum_y ch(u,y) ln(p(y|w)/p(y)), up to a constant that
    // cancels between the V and Z branches.
    for (std::size_t w = 0; w < nw; ++w)
      for (std::size_t u = 0; u < nu; ++u) {
        double s = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          const double p = ch.at(u, y);
          if (p <= 0.0 || py[y] <= 0.0) continue;
          const double cond =
              pw[w] > 0.0 ? pwy[w * ny + y] / pw[w] : py[y];
          if (cond > 0.0) s += p * std::log(cond / py[y]);
        }
        if (reset)
          g[w * nu + u] = sign * s;
        else
          g[w * nu + u] += sign * s;
      }
  }
};

// Exponentiated-gradient ascent from one start; monotone by construction
// (a step is only accepted if the objective does not decrease).
double ascend(const SecrecyProblem& prob, std::vector<double>& j) {
  double best = prob.objective(j);
  std::vector<double> g(j.size()), trial(j.size());
  double eta = 0.5;
  for (int iter = 0; iter < 4000; ++iter) {
    prob.gradient(j, g);
    const double gmax = *std::max_element(g.begin(), g.end());
    bool improved = false;
    while (eta > 1e-14) {
      double norm = 0.0;
      for (std::size_t i = 0; i < j.size(); ++i) {
        trial[i] = j[i] * std::exp(eta * (g[i] - gmax));
        norm += trial[i];
      }
      for (double& x : trial) x /= norm;
      const double val = prob.objective(trial);
      if (val > best + 1e-15) {
        best = val;
        j = trial;
        eta = std::min(eta * 1.5, 64.0);
        improved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

std::vector<std::vector<double>> diag_grid_starts(std::size_t nu) {
  std::vector<std::vector<double>> starts;
  auto push_diag = [&](const std::vector<double>& p) {
    std::vector<double> j(nu * nu, 1e-12);
    for (std::size_t u = 0; u < nu; ++u) j[u * nu + u] = std::max(p[u], 1e-9);
    double norm = 0.0;
    for (double x : j) norm += x;
    for (double& x : j) x /= norm;
    starts.push_back(std::move(j));
  };
  if (nu == 2) {
    for (int i = 0; i <= 32; ++i) {
      const double p = static_cast<double>(i) / 32.0;
      push_diag({p, 1.0 - p});
    }
  } else if (nu == 3) {
    const int m = 12;
    for (int a = 0; a <= m; ++a)
      for (int b = 0; a + b <= m; ++b)
        push_diag({static_cast<double>(a) / m, static_cast<double>(b) / m,
                   static_cast<double>(m - a - b) / m});
  }
  return starts;
}

struct StartOutcome {
  double value;
  int index;
  std::vector<double> joint;
};

}  // namespace

SecrecyResult secrecy_capacity(const WiretapKernel& w, std::size_t aux_size,
                               std::uint64_t seed, int threads) {
  const std::size_t nu = w.input_size();
  if (aux_size == 0) aux_size = nu;
  if (aux_size < 1 || aux_size > nu)
    throw std::invalid_argument("secrecy_capacity: aux_size must be in [1, |U|]");
  if (threads < 1) throw std::invalid_argument("secrecy_capacity: threads < 1");

  const Dmc av = marginal_v(w);
  const Dmc az = marginal_z(w);
  SecrecyProblem prob{av, az};

  std::vector<std::vector<double>> starts;
  if (aux_size == nu) {
    starts = diag_grid_starts(nu);
    // Capacity-achieving input of the main channel, coupled as W = U.
    const Pmf pcap = capacity(av).input;
    std::vector<double> j(nu * nu, 1e-12);
    for (std::size_t u = 0; u < nu; ++u)
      j[u * nu + u] = std::max(pcap[u], 1e-9);
    double norm = 0.0;
    for (double x : j) norm += x;
    for (double& x : j) x /= norm;
    starts.push_back(std::move(j));
  }
  for (int s = 0; s < 64; ++s) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x51ULL * s + 1);
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> j(aux_size * nu);
    double norm = 0.0;
    for (double& x : j) {
      x = exp1(rng) + 1e-12;
      norm += x;
    }
    for (double& x : j) x /= norm;
    starts.push_back(std::move(j));
  }

  std::vector<StartOutcome> outcomes(starts.size());
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::vector<double> j = starts[i];
      const double val = ascend(prob, j);
      outcomes[i] = {val, static_cast<int>(i), std::move(j)};
    }
  };
  if (threads == 1 || starts.size() < 2) {
    run_range(0, starts.size());
  } else {
    const std::size_t nt = std::min<std::size_t>(threads, starts.size());
    std::vector<std::thread> pool;
    const std::size_t chunk = (starts.size() + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(starts.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic merge: best value, lowest start index on ties.
  const StartOutcome* best = &outcomes.front();
  for (const auto& o : outcomes)
    if (o.value > best->value ||
        (o.value == best->value && o.index < best->index))
      best = &o;

  SecrecyResult out;
  if (best->value <= 0.0) {
    out.secrecy_bits = 0.0;
    out.input.aux_size = aux_size;
    out.input.joint.assign(aux_size * nu,
                           1.0 / static_cast<double>(aux_size * nu));
    out.best_start = -1;
    return out;
  }
  out.secrecy_bits = best->value * kLog2e;
  out.input.aux_size = aux_size;
  out.input.joint = best->joint;
  out.best_start = best->index;
  return out;
}

namespace {

// Rate and secrecy slack of one candidate joint, in bits.
struct Candidate {
  double rate;
  double slack;
};

Candidate evaluate_candidate(const SecrecyProblem& prob,
                             const std::vector<double>& j) {
  const std::size_t nw = j.size() / prob.av.input_size();
  const double iv = prob.info(j, nw, prob.av) * kLog2e;
  const double iz = prob.info(j, nw, prob.az) * kLog2e;
  return {iv, iv - iz};
}

}  // namespace

BoundarySweep rate_leakage_boundary(const WiretapKernel& w, std::size_t grid,
                                    std::uint64_t seed, int threads) {
  if (grid < 16)
    throw std::invalid_argument("rate_leakage_boundary: grid must be >= 16");
  const std::size_t nu = w.input_size();
  const Dmc av = marginal_v(w);
  const Dmc az = marginal_z(w);
  SecrecyProblem prob{av, az};

  const CapacityResult cap = capacity(av);
  const SecrecyResult sec = secrecy_capacity(w, nu, seed, threads);

  BoundarySweep out;
  out.summary.C = cap.capacity_bits;
  out.summary.capacity_input = cap.input;
  out.summary.secrecy_input = sec.input;

  if (cap.capacity_bits < 1e-9) {
    out.summary.degenerate = true;
    out.summary.C_WT = 0.0;
    out.summary.C1 = 0.0;
    out.summary.C2 = 0.0;
    out.summary.ell = 1.0;
    out.points.push_back({0.0, 0.0});
    return out;
  }

  // Candidate sweep: dense W=U grid, the capacity input, the secrecy input.
  std::vector<Candidate> cands;
  auto add_diag = [&](const std::vector<double>& p) {
    std::vector<double> j(nu * nu, 0.0);
    for (std::size_t u = 0; u < nu; ++u) j[u * nu + u] = p[u];
    cands.push_back(evaluate_candidate(prob, j));
  };
  if (nu == 2) {
    for (int i = 0; i <= 64; ++i) {
      const double p = static_cast<double>(i) / 64.0;
      add_diag({p, 1.0 - p});
    }
  } else if (nu == 3) {
    const int m = 16;
    for (int a = 0; a <= m; ++a)
      for (int b = 0; a + b <= m; ++b)
        add_diag({static_cast<double>(a) / m, static_cast<double>(b) / m,
                  static_cast<double>(m - a - b) / m});
  } else {
    std::mt19937_64 rng(seed + 0xb5297a4d);
    std::exponential_distribution<double> exp1(1.0);
    for (int s = 0; s < 256; ++s) {
      std::vector<double> p(nu);
      double norm = 0.0;
      for (double& x : p) {
        x = exp1(rng);
        norm += x;
      }
      for (double& x : p) x /= norm;
      add_diag(p);
    }
  }
  add_diag(cap.input.probs());
  if (!sec.input.joint.empty())
    cands.push_back(evaluate_candidate(prob, sec.input.joint));

  double max_slack = std::max(sec.secrecy_bits, 0.0);
  for (const auto& c : cands) max_slack = std::max(max_slack, c.slack);
  const double c_wt = max_slack;
  out.summary.C_WT = c_wt;
  out.summary.C1 = c_wt;
  out.summary.C2 = cap.capacity_bits;

  // Required leakage along the rate grid: the best candidate able to carry
  // rate R determines how much must be conceded to the eavesdropper.
  out.points.reserve(grid);
  for (std::size_t gidx = 0; gidx < grid; ++gidx) {
    const double r = cap.capacity_bits * static_cast<double>(gidx) /
                     static_cast<double>(grid - 1);
    double req = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      if (c.rate + 1e-9 < r) continue;
      req = std::min(req, std::max(0.0, r - std::max(0.0, c.slack)));
    }
    if (std::isinf(req)) req = std::max(0.0, r - std::max(0.0, max_slack));
    out.points.push_back({r, req});
  }

  double ell = 0.0;
  for (const auto& pt : out.points) {
    const double dr = pt.rate - out.summary.C1;
    if (dr > 1e-9) ell = std::max(ell, pt.leakage / dr);
  }
  out.summary.ell = ell > 0.0 ? ell : 1.0;
  return out;
}

std::uint64_t precode(std::uint64_t m, std::uint64_t q, unsigned n_bits) {
  if (n_bits == 0 || n_bits > 63)
    throw std::invalid_argument("precode: n_bits must be in [1, 63]");
  const std::uint64_t size = std::uint64_t{1} << n_bits;
  if (m >= size || q >= size)
    throw std::invalid_argument("precode: message or key out of range");
  return (m + q) & (size - 1);
}

std::uint64_t precode_inverse(std::uint64_t m_prime, std::uint64_t q,
                              unsigned n_bits) {
  if (n_bits == 0 || n_bits > 63)
    throw std::invalid_argument("precode_inverse: n_bits must be in [1, 63]");
  const std::uint64_t size = std::uint64_t{1} << n_bits;
  if (m_prime >= size || q >= size)
    throw std::invalid_argument("precode_inverse: input out of range");
  return (m_prime + size - q) & (size - 1);
}

Pmf precode_pushforward(const Pmf& message, const Pmf& key) {
  if (message.size() != key.size())
    throw std::invalid_argument("precode_pushforward: size mismatch");
  const std::size_t n = message.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    if (message[m] == 0.0) continue;
    for (std::size_t q = 0; q < n; ++q)
      out[(m + q) % n] += message[m] * key[q];
  }
  return Pmf(std::move(out));
}

}  // namespace secseq
