#include "secseq/seqsim.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

namespace secseq {

namespace {

constexpr std::size_t kCellCap = std::size_t{1} << 24;

std::size_t checked_pow(std::size_t base, std::size_t exp, const char* what) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > kCellCap / base + 1)
      throw feasibility_error(std::string(what) +
                              ": state space exceeds the 2^24 cell cap");
    out *= base;
  }
  return out;
}

// Lexicographic digits, first symbol most significant.
void digits_of(std::size_t index, std::size_t base, std::size_t len,
               std::vector<std::size_t>& out) {
  out.resize(len);
  for (std::size_t t = len; t-- > 0;) {
    out[t] = index % base;
    index /= base;
  }
}

}  // namespace

void SequentialCode::validate() const {
  if (k == 0 || n == 0) throw validation_error("SequentialCode: k, n > 0");
  if (schedule.k != k || schedule.n != n)
    throw validation_error("SequentialCode: schedule mismatch");
  if (encoders.size() != k)
    throw validation_error("SequentialCode: need one encoder per block");
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t in_count = checked_pow(x_size, (i + 1) * n, "encoder");
    if (encoders[i].size() != in_count)
      throw validation_error("SequentialCode: encoder " + std::to_string(i + 1) +
                             " table has wrong size");
    const std::size_t out_count =
        checked_pow(u_size, schedule.block_length(i), "encoder");
    for (std::uint32_t e : encoders[i])
      if (e >= out_count)
        throw validation_error("SequentialCode: encoder output exceeds budget");
  }
  const std::size_t v_count = checked_pow(v_size, schedule.total_length(), "decoder");
  if (decoder.size() != v_count)
    throw validation_error("SequentialCode: decoder table has wrong size");
  const std::size_t xhat_count = checked_pow(xhat_size, n * k, "decoder");
  for (std::uint32_t d : decoder)
    if (d >= xhat_count)
      throw validation_error("SequentialCode: decoder output out of range");
}

AuditReport run_exact(const SequentialCode& code, const SourceSpec& source,
                      const WiretapKernel& w, const CumulativeFn& G,
                      const CumulativeFn& L, double d_bar) {
  code.validate();
  if (source.px.size() != code.x_size || source.nxhat != code.xhat_size)
    throw std::invalid_argument("run_exact: source does not match the code");
  if (w.input_size() != code.u_size || w.legit_size() != code.v_size)
    throw std::invalid_argument("run_exact: channel does not match the code");

  // The schedule must be the one Eq.-style bookkeeping derives from G.
  const BlockSchedule from_g = BlockSchedule::from_crdf(G, code.k, code.n);
  if (from_g.m != code.schedule.m)
    throw validation_error("run_exact: code schedule inconsistent with G");

  const std::size_t nk = code.n * code.k;
  const std::size_t mk = code.schedule.total_length();
  const std::size_t x_total = checked_pow(code.x_size, nk, "run_exact");
  const std::size_t v_total = checked_pow(code.v_size, mk, "run_exact");
  const std::size_t z_total = checked_pow(w.eaves_size(), mk, "run_exact");
  if (x_total > kCellCap / std::max<std::size_t>(v_total, 1) ||
      x_total > kCellCap / std::max<std::size_t>(z_total, 1))
    throw feasibility_error(
        "run_exact: joint state space exceeds the 2^24 cell cap; reduce n, k "
        "or the alphabet sizes");

  const Dmc pv = marginal_v(w);
  const Dmc pz = marginal_z(w);

  // Channel input string per source realization, flat with stride m_k
  // (encoders are causal by construction: block i reads only the first
  // i*n symbols).
  std::vector<std::size_t> u_digits(x_total * mk);
  std::vector<double> px_full(x_total);
  std::vector<std::size_t> xd, tmp;
  for (std::size_t x = 0; x < x_total; ++x) {
    digits_of(x, code.x_size, nk, xd);
    double p = 1.0;
    for (std::size_t t = 0; t < nk; ++t) p *= source.px[xd[t]];
    px_full[x] = p;
    std::size_t pos = x * mk;
    std::size_t prefix = 0;
    for (std::size_t i = 0; i < code.k; ++i) {
      for (std::size_t t = i * code.n; t < (i + 1) * code.n; ++t)
        prefix = prefix * code.x_size + xd[t];
      const std::size_t len = code.schedule.block_length(i);
      digits_of(code.encoders[i][prefix], code.u_size, len, tmp);
      for (std::size_t t = 0; t < len; ++t) u_digits[pos++] = tmp[t];
    }
  }

  AuditReport report;
  report.d_bar = d_bar;

  // Expected distortion: exact sum over (x, v) pairs.
  std::vector<std::size_t> vd, hatd;
  double e_d = 0.0;
  for (std::size_t x = 0; x < x_total; ++x) {
    if (px_full[x] == 0.0) continue;
    const std::size_t* u = u_digits.data() + x * mk;
    digits_of(x, code.x_size, nk, xd);
    for (std::size_t v = 0; v < v_total; ++v) {
      digits_of(v, code.v_size, mk, vd);
      double pvz = 1.0;
      for (std::size_t t = 0; t < mk && pvz > 0.0; ++t)
        pvz *= pv.at(u[t], vd[t]);
      if (pvz == 0.0) continue;
      digits_of(code.decoder[v], code.xhat_size, nk, hatd);
      double dist = 0.0;
      for (std::size_t t = 0; t < nk; ++t) dist += source.dist(xd[t], hatd[t]);
      e_d += px_full[x] * pvz * dist / static_cast<double>(nk);
    }
  }
  report.expected_distortion = e_d;
  if (e_d > d_bar + 1e-12)
    report.violations.push_back({"distortion", 0, e_d - d_bar});

  // Per-prefix leakage: exact joint of (X^{in}, Z^{m_i}) for each i.
  for (std::size_t i = 1; i <= code.k; ++i) {
    const std::size_t mi = code.schedule.m[i];
    const std::size_t xi_total = checked_pow(code.x_size, i * code.n, "leakage");
    const std::size_t zi_total = checked_pow(w.eaves_size(), mi, "leakage");
    const std::size_t tail = nk - i * code.n;
    const std::size_t tail_total = checked_pow(code.x_size, tail, "leakage");

    std::vector<double> joint(xi_total * zi_total, 0.0);
    std::vector<std::size_t> zd;
    for (std::size_t xp = 0; xp < xi_total; ++xp) {
      // p(prefix) and u^{m_i} from any full realization with this prefix:
      // the first m_i channel symbols depend on the prefix only.
      const std::size_t x_full = xp * tail_total;
      const std::size_t* u = u_digits.data() + x_full * mk;
      double p_prefix = px_full[x_full];
      if (tail > 0) {
        digits_of(xp, code.x_size, i * code.n, xd);
        p_prefix = 1.0;
        for (std::size_t t = 0; t < i * code.n; ++t)
          p_prefix *= source.px[xd[t]];
      }
      if (p_prefix == 0.0) continue;
      for (std::size_t z = 0; z < zi_total; ++z) {
        digits_of(z, w.eaves_size(), mi, zd);
        double pzg = 1.0;
        for (std::size_t t = 0; t < mi && pzg > 0.0; ++t)
          pzg *= pz.at(u[t], zd[t]);
        if (pzg > 0.0) joint[xp * zi_total + z] = p_prefix * pzg;
      }
    }
    const JointDist jd({"X", "Z"}, {xi_total, zi_total}, std::move(joint),
                       kCellCap);
    const double mi_bits = mutual_information(jd, {"X"}, {"Z"});
    const double leak = mi_bits / static_cast<double>(nk);
    report.leakage.push_back(leak);
    const double budget = L.eval(static_cast<double>(i) /
                                 static_cast<double>(code.k));
    report.leakage_budget.push_back(budget);
    if (leak > budget + 1e-12)
      report.violations.push_back({"leakage", i, leak - budget});
  }
  return report;
}

MonotoneLeakageReport audit_monotone_leakage(const AuditReport& report,
                                             std::size_t n, std::size_t k) {
  MonotoneLeakageReport out;
  const double nk = static_cast<double>(n * k);
  for (std::size_t i = 1; i < report.leakage.size(); ++i) {
    if (nk * report.leakage[i] < nk * report.leakage[i - 1] - 1e-10) {
      out.ok = false;
      out.first_decrease = i + 1;
      return out;
    }
  }
  return out;
}

namespace {

// Optimal reconstruction letter and cost of one quantizer cell.
struct CellChoice {
  std::size_t letter = 0;
  double cost = 0.0;
};

CellChoice best_letter(const SourceSpec& s, const std::vector<std::size_t>& cell) {
  CellChoice best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t y = 0; y < s.nxhat; ++y) {
    double c = 0.0;
    for (std::size_t x : cell)
      if (s.px[x] > 0.0) c += s.px[x] * s.dist(x, y);
    if (c < best.cost) best = {y, c};
  }
  return best;
}

// Greedy scalar quantizer of the source letters into `levels` cells:
// repeatedly applies the two-way split with the largest cost reduction.
struct ScalarQuantizer {
  std::vector<std::size_t> cell_of;      // per source letter
  std::vector<std::size_t> reconstruct;  // per cell
};

ScalarQuantizer design_quantizer(const SourceSpec& s, std::size_t levels) {
  if (s.nx > 16)
    throw feasibility_error("quantizer design caps the source alphabet at 16");
  std::vector<std::vector<std::size_t>> cells;
  {
    std::vector<std::size_t> all(s.nx);
    for (std::size_t x = 0; x < s.nx; ++x) all[x] = x;
    cells.push_back(std::move(all));
  }
  while (cells.size() < levels) {
    double best_gain = 0.0;
    std::size_t best_cell = cells.size();
    std::vector<std::size_t> best_a, best_b;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& cell = cells[ci];
      if (cell.size() < 2) continue;
      const double cost0 = best_letter(s, cell).cost;
      const std::size_t subsets = std::size_t{1} << (cell.size() - 1);
      for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<std::size_t> a, b;
        for (std::size_t j = 0; j < cell.size(); ++j)
          ((mask >> j) & 1u ? a : b).push_back(cell[j]);
        const double gain =
            cost0 - best_letter(s, a).cost - best_letter(s, b).cost;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_cell = ci;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_cell == cells.size()) break;  // no split helps
    cells[best_cell] = best_a;
    cells.push_back(best_b);
  }
  ScalarQuantizer q;
  q.cell_of.assign(s.nx, 0);
  q.reconstruct.resize(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t x : cells[ci]) q.cell_of[x] = ci;
    q.reconstruct[ci] = best_letter(s, cells[ci]).letter;
  }
  return q;
}

}  // namespace

SequentialCode builtin_code(BuiltinCode kind, const SourceSpec& source,
                            const WiretapKernel& w, const CumulativeFn& G,
                            std::size_t k, std::size_t n) {
  SequentialCode code;
  code.k = k;
  code.n = n;
  code.schedule = BlockSchedule::from_crdf(G, k, n);
  code.x_size = source.nx;
  code.u_size = w.input_size();
  code.v_size = w.legit_size();
  code.xhat_size = source.nxhat;

  const std::size_t nk = n * k;
  const std::size_t mk = code.schedule.total_length();
  const std::size_t v_total = checked_pow(code.v_size, mk, "builtin_code");
  checked_pow(code.x_size, nk, "builtin_code");

  const std::size_t constant_letter = source.best_constant();

  auto constant_encoder = [&](std::size_t i) {
    const std::size_t in_count = checked_pow(code.x_size, (i + 1) * n, "builtin");
    return std::vector<std::uint32_t>(in_count, 0);
  };

  std::vector<std::size_t> vd;
  switch (kind) {
    case BuiltinCode::kNull: {
      for (std::size_t i = 0; i < k; ++i)
        code.encoders.push_back(constant_encoder(i));
      std::size_t hat = 0;
      for (std::size_t t = 0; t < nk; ++t)
        hat = hat * code.xhat_size + constant_letter;
      code.decoder.assign(v_total, static_cast<std::uint32_t>(hat));
      break;
    }
    case BuiltinCode::kRepeat: {
      if (code.u_size < code.x_size || code.v_size != code.u_size ||
          code.xhat_size < code.x_size)
        throw std::invalid_argument(
            "builtin repeat code needs |U| = |V| >= |X| and |X-hat| >= |X|");
      // Copy counts per fresh symbol within each block.
      std::vector<std::vector<std::size_t>> reps(k, std::vector<std::size_t>(n, 0));
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t len = code.schedule.block_length(i);
        for (std::size_t t = 0; t < n; ++t) reps[i][t] = len / n;
        for (std::size_t t = 0; t < len % n; ++t) ++reps[i][t];
      }
      std::vector<std::size_t> xd;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t in_count =
            checked_pow(code.x_size, (i + 1) * n, "builtin");
        std::vector<std::uint32_t> enc(in_count, 0);
        for (std::size_t p = 0; p < in_count; ++p) {
          digits_of(p, code.x_size, (i + 1) * n, xd);
          std::size_t out = 0;
          for (std::size_t t = 0; t < n; ++t)
            for (std::size_t rcopy = 0; rcopy < reps[i][t]; ++rcopy)
              out = out * code.u_size + xd[i * n + t];
          enc[p] = static_cast<std::uint32_t>(out);
        }
        code.encoders.push_back(std::move(enc));
      }
      code.decoder.resize(v_total);
      for (std::size_t v = 0; v < v_total; ++v) {
        digits_of(v, code.v_size, mk, vd);
        std::size_t hat = 0;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t t = 0; t < n; ++t) {
            std::size_t letter = constant_letter;
            if (reps[i][t] > 0) {
              std::vector<std::size_t> votes(code.v_size, 0);
              for (std::size_t rcopy = 0; rcopy < reps[i][t]; ++rcopy)
                ++votes[vd[pos + rcopy]];
              letter = static_cast<std::size_t>(
                  std::max_element(votes.begin(), votes.end()) - votes.begin());
              if (letter >= code.xhat_size) letter = constant_letter;
              pos += reps[i][t];
            }
            hat = hat * code.xhat_size + letter;
          }
        code.decoder[v] = static_cast<std::uint32_t>(hat);
      }
      break;
    }
    case BuiltinCode::kQuantizeIndex: {
      if (code.v_size != code.u_size)
        throw std::invalid_argument(
            "builtin quantize-and-index code needs |V| = |U|");
      // Per block: message space u^len, split across the fresh symbols by
      // greedy level allocation (largest distortion gain first).
      std::vector<std::vector<std::size_t>> levels(k, std::vector<std::size_t>(n, 1));
      std::vector<double> level_cost(source.nx + 1, 0.0);
      for (std::size_t m = 1; m <= source.nx; ++m) {
        const ScalarQuantizer q = design_quantizer(source, m);
        double c = 0.0;
        for (std::size_t x = 0; x < source.nx; ++x)
          if (source.px[x] > 0.0)
            c += source.px[x] * source.dist(x, q.reconstruct[q.cell_of[x]]);
        level_cost[m] = c;
      }
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t cap =
            checked_pow(code.u_size, code.schedule.block_length(i), "builtin");
        std::size_t used = 1;
        bool progress = true;
        while (progress) {
          progress = false;
          double best_gain = 0.0;
          std::size_t best_t = n;
          for (std::size_t t = 0; t < n; ++t) {
            const std::size_t cur = levels[i][t];
            if (cur >= source.nx) continue;
            if (used / cur * (cur + 1) > cap) continue;
            const double gain = level_cost[cur] - level_cost[cur + 1];
            if (gain > best_gain + 1e-15) {
              best_gain = gain;
              best_t = t;
            }
          }
          if (best_t < n) {
            used = used / levels[i][best_t] * (levels[i][best_t] + 1);
            ++levels[i][best_t];
            progress = true;
          }
        }
        if (used == 1 && code.schedule.block_length(i) > 0)
          std::cerr << "builtin_code: block " << i + 1
                    << " budget below one codeword, emitting constants\n";
      }
      std::vector<ScalarQuantizer> by_levels(source.nx + 1);
      for (std::size_t m = 1; m <= source.nx; ++m)
        by_levels[m] = design_quantizer(source, m);

      std::vector<std::size_t> xd;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t in_count =
            checked_pow(code.x_size, (i + 1) * n, "builtin");
        std::vector<std::uint32_t> enc(in_count, 0);
        for (std::size_t p = 0; p < in_count; ++p) {
          digits_of(p, code.x_size, (i + 1) * n, xd);
          std::size_t msg = 0;
          for (std::size_t t = 0; t < n; ++t) {
            const std::size_t lv = levels[i][t];
            msg = msg * lv + by_levels[lv].cell_of[xd[i * n + t]];
          }
          enc[p] = static_cast<std::uint32_t>(msg);
        }
        code.encoders.push_back(std::move(enc));
      }
      code.decoder.resize(v_total);
      for (std::size_t v = 0; v < v_total; ++v) {
        digits_of(v, code.v_size, mk, vd);
        std::size_t hat = 0;
        for (std::size_t i = 0; i < k; ++i) {
          const std::size_t len = code.schedule.block_length(i);
          std::size_t msg_cap = 1;
          for (std::size_t t = 0; t < n; ++t) msg_cap *= levels[i][t];
          std::size_t word = 0;
          for (std::size_t t = 0; t < len; ++t)
            word = word * code.v_size + vd[code.schedule.m[i] + t];
          std::size_t msg = msg_cap > 0 ? word % msg_cap : 0;
          // Unpack the per-symbol cells (last symbol least significant).
          std::vector<std::size_t> cell(n, 0);
          for (std::size_t t = n; t-- > 0;) {
            cell[t] = msg % levels[i][t];
            msg /= levels[i][t];
          }
          for (std::size_t t = 0; t < n; ++t) {
            const std::size_t lv = levels[i][t];
            const std::size_t letter =
                lv == 1 ? by_levels[1].reconstruct[0]
                        : by_levels[lv].reconstruct[cell[t]];
            hat = hat * code.xhat_size + letter;
          }
        }
        code.decoder[v] = static_cast<std::uint32_t>(hat);
      }
      break;
    }
  }
  code.validate();
  return code;
}

double mc_distortion(const SequentialCode& code, const SourceSpec& source,
                     const Dmc& main_channel, std::uint64_t seed,
                     std::size_t trials) {
  code.validate();
  if (trials == 0) throw std::invalid_argument("mc_distortion: zero trials");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t nk = code.n * code.k;
  const std::size_t mk = code.schedule.total_length();

  auto sample = [&](std::span<const double> w) {
    double r = unif(rng);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (r < w[i]) return i;
      r -= w[i];
    }
    return w.size() - 1;
  };

  std::vector<std::size_t> xd(nk), ud, hatd, tmp;
  double total = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t t = 0; t < nk; ++t)
      xd[t] = sample(source.px.probs());
    ud.clear();
    std::size_t prefix = 0;
    for (std::size_t i = 0; i < code.k; ++i) {
      for (std::size_t t = i * code.n; t < (i + 1) * code.n; ++t)
        prefix = prefix * code.x_size + xd[t];
      digits_of(code.encoders[i][prefix], code.u_size,
                code.schedule.block_length(i), tmp);
      ud.insert(ud.end(), tmp.begin(), tmp.end());
    }
    std::size_t v = 0;
    for (std::size_t t = 0; t < mk; ++t)
      v = v * code.v_size + sample(main_channel.row(ud[t]));
    digits_of(code.decoder[v], code.xhat_size, nk, hatd);
    double dist = 0.0;
    for (std::size_t t = 0; t < nk; ++t) dist += source.dist(xd[t], hatd[t]);
    total += dist / static_cast<double>(nk);
  }
  return total / static_cast<double>(trials);
}

}  // namespace secseq
