#include "secseq/probkit.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace secseq {

namespace {

// Validates a mass vector in place according to the normalization policy.
void normalize_mass(std::vector<double>& w, const char* what) {
  if (w.empty()) throw validation_error(std::string(what) + ": empty");
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0))  // catches negatives and NaN
      throw validation_error(std::string(what) + ": negative or NaN entry");
    sum += x;
  }
  const double drift = std::abs(sum - 1.0);
  if (drift <= kProbSumTol) return;
  if (drift <= kProbSumRenorm) {
    std::cerr << what << ": renormalizing drift " << drift << "\n";
    for (double& x : w) x /= sum;
    return;
  }
  throw validation_error(std::string(what) + ": mass " + std::to_string(sum) +
                         " too far from 1");
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  normalize_mass(p_, "Pmf");
}

Pmf Pmf::uniform(std::size_t n) {
  if (n == 0) throw validation_error("Pmf::uniform: n == 0");
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::point(std::size_t n, std::size_t at) {
  if (at >= n) throw std::invalid_argument("Pmf::point: index out of range");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Pmf(std::move(p));
}

Dmc::Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> flat)
    : in_(input_size), out_(output_size), p_(std::move(flat)) {
  if (in_ == 0 || out_ == 0 || p_.size() != in_ * out_)
    throw std::invalid_argument("Dmc: dimension mismatch");
  for (std::size_t u = 0; u < in_; ++u) {
    std::vector<double> row(p_.begin() + u * out_, p_.begin() + (u + 1) * out_);
    normalize_mass(row, "Dmc row");
    std::copy(row.begin(), row.end(), p_.begin() + u * out_);
  }
}

Dmc Dmc::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Dmc: no rows");
  const std::size_t out = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * out);
  for (const auto& r : rows) {
    if (r.size() != out) throw std::invalid_argument("Dmc: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Dmc(rows.size(), out, std::move(flat));
}

Dmc Dmc::bsc(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0))
    throw std::invalid_argument("Dmc::bsc: crossover outside [0,1]");
  return Dmc(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

Dmc Dmc::identity(std::size_t n) {
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) flat[i * n + i] = 1.0;
  return Dmc(n, n, std::move(flat));
}

WiretapKernel::WiretapKernel(std::size_t input_size, std::size_t legit_size,
                             std::size_t eaves_size, std::vector<double> flat)
    : in_(input_size), nv_(legit_size), nz_(eaves_size), p_(std::move(flat)) {
  if (in_ == 0 || nv_ == 0 || nz_ == 0 || p_.size() != in_ * nv_ * nz_)
    throw std::invalid_argument("WiretapKernel: dimension mismatch");
  const std::size_t slice = nv_ * nz_;
  for (std::size_t u = 0; u < in_; ++u) {
    std::vector<double> s(p_.begin() + u * slice, p_.begin() + (u + 1) * slice);
    normalize_mass(s, "WiretapKernel slice");
    std::copy(s.begin(), s.end(), p_.begin() + u * slice);
  }
}

WiretapKernel WiretapKernel::from_nested(
    const std::vector<std::vector<std::vector<double>>>& p) {
  if (p.empty() || p.front().empty() || p.front().front().empty())
    throw std::invalid_argument("WiretapKernel: empty nesting");
  const std::size_t nu = p.size(), nv = p.front().size(),
                    nz = p.front().front().size();
  std::vector<double> flat;
  flat.reserve(nu * nv * nz);
  for (const auto& byv : p) {
    if (byv.size() != nv) throw std::invalid_argument("WiretapKernel: ragged v");
    for (const auto& byz : byv) {
      if (byz.size() != nz) throw std::invalid_argument("WiretapKernel: ragged z");
      flat.insert(flat.end(), byz.begin(), byz.end());
    }
  }
  return WiretapKernel(nu, nv, nz, std::move(flat));
}

WiretapKernel WiretapKernel::degraded(const Dmc& main, const Dmc& z_given_v) {
  if (z_given_v.input_size() != main.output_size())
    throw std::invalid_argument("WiretapKernel::degraded: dimension mismatch");
  const std::size_t nu = main.input_size(), nv = main.output_size(),
                    nz = z_given_v.output_size();
  std::vector<double> flat(nu * nv * nz);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t z = 0; z < nz; ++z)
        flat[(u * nv + v) * nz + z] = main.at(u, v) * z_given_v.at(v, z);
  return WiretapKernel(nu, nv, nz, std::move(flat));
}

WiretapKernel WiretapKernel::independent_eaves(const Dmc& main, const Pmf& z) {
  const std::size_t nu = main.input_size(), nv = main.output_size(),
                    nz = z.size();
  std::vector<double> flat(nu * nv * nz);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t zz = 0; zz < nz; ++zz)
        flat[(u * nv + v) * nz + zz] = main.at(u, v) * z[zz];
  return WiretapKernel(nu, nv, nz, std::move(flat));
}

WiretapKernel WiretapKernel::copy_eaves(const Dmc& main) {
  const std::size_t nu = main.input_size(), nv = main.output_size();
  std::vector<double> flat(nu * nv * nv, 0.0);
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t v = 0; v < nv; ++v)
      flat[(u * nv + v) * nv + v] = main.at(u, v);
  return WiretapKernel(nu, nv, nv, std::move(flat));
}

JointDist::JointDist(std::vector<std::string> variables,
                     std::vector<std::size_t> sizes, std::vector<double> table,
                     std::size_t max_cells)
    : names_(std::move(variables)), sizes_(std::move(sizes)), t_(std::move(table)) {
  if (names_.empty() || names_.size() != sizes_.size())
    throw std::invalid_argument("JointDist: variable manifest mismatch");
  std::size_t cells = 1;
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("JointDist: zero-sized variable");
    if (cells > max_cells / s)
      throw feasibility_error("JointDist: table exceeds cell cap");
    cells *= s;
  }
  if (t_.size() != cells)
    throw std::invalid_argument("JointDist: table size mismatch");
  for (std::size_t a = 0; a < names_.size(); ++a)
    for (std::size_t b = a + 1; b < names_.size(); ++b)
      if (names_[a] == names_[b])
        throw std::invalid_argument("JointDist: duplicate variable name");
  normalize_mass(t_, "JointDist");
}

std::vector<std::size_t> JointDist::indices_of(
    const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) {
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end())
      throw std::invalid_argument("JointDist: unknown variable " + n);
    idx.push_back(static_cast<std::size_t>(it - names_.begin()));
  }
  return idx;
}

std::vector<double> JointDist::marginal(
    const std::vector<std::string>& keep) const {
  const auto keep_idx = indices_of(keep);
  std::vector<bool> kept(names_.size(), false);
  for (std::size_t i : keep_idx) kept[i] = true;

  // Strides of the full table (row-major, last variable fastest).
  std::vector<std::size_t> stride(names_.size(), 1);
  for (std::size_t i = names_.size(); i-- > 1;)
    stride[i - 1] = stride[i] * sizes_[i];

  // Kept variables in manifest order determine the output layout.
  std::vector<std::size_t> out_vars;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (kept[i]) out_vars.push_back(i);
  std::size_t out_cells = 1;
  for (std::size_t i : out_vars) out_cells *= sizes_[i];
  std::vector<std::size_t> out_stride(out_vars.size(), 1);
  for (std::size_t i = out_vars.size(); i-- > 1;)
    out_stride[i - 1] = out_stride[i] * sizes_[out_vars[i]];

  std::vector<double> out(out_cells, 0.0);
  for (std::size_t cell = 0; cell < t_.size(); ++cell) {
    std::size_t key = 0;
    for (std::size_t j = 0; j < out_vars.size(); ++j) {
      const std::size_t v = out_vars[j];
      key += ((cell / stride[v]) % sizes_[v]) * out_stride[j];
    }
    out[key] += t_[cell];
  }
  return out;
}

double JointDist::entropy_bits(const std::vector<std::string>& group) const {
  return secseq::entropy_bits(marginal(group));
}

double entropy_bits(std::span<const double> mass) {
  double h = 0.0;
  for (double w : mass)
    if (w > 0.0) h -= w * std::log2(w);
  return h;
}

double entropy(const Pmf& p) { return entropy_bits(p.probs()); }

double mutual_information(const JointDist& joint,
                          const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b) {
  for (const auto& a : group_a)
    for (const auto& b : group_b)
      if (a == b)
        throw std::invalid_argument("mutual_information: groups overlap at " + a);
  std::vector<std::string> both = group_a;
  both.insert(both.end(), group_b.begin(), group_b.end());
  const double i = joint.entropy_bits(group_a) + joint.entropy_bits(group_b) -
                   joint.entropy_bits(both);
  if (i <= 0.0 && i > -1e-9) return 0.0;  // clamp -0.0 and rounding residue
  return i;
}

Pmf push_through(const Pmf& p, const Dmc& ch) {
  if (p.size() != ch.input_size())
    throw std::invalid_argument("push_through: dimension mismatch");
  std::vector<double> out(ch.output_size(), 0.0);
  for (std::size_t u = 0; u < ch.input_size(); ++u) {
    const double pu = p[u];
    if (pu == 0.0) continue;
    for (std::size_t v = 0; v < ch.output_size(); ++v)
      out[v] += pu * ch.at(u, v);
  }
  return Pmf(std::move(out));
}

Dmc marginal_v(const WiretapKernel& w) {
  std::vector<double> flat(w.input_size() * w.legit_size(), 0.0);
  for (std::size_t u = 0; u < w.input_size(); ++u)
    for (std::size_t v = 0; v < w.legit_size(); ++v) {
      double s = 0.0;
      for (std::size_t z = 0; z < w.eaves_size(); ++z) s += w.at(u, v, z);
      flat[u * w.legit_size() + v] = s;
    }
  return Dmc(w.input_size(), w.legit_size(), std::move(flat));
}

Dmc marginal_z(const WiretapKernel& w) {
  std::vector<double> flat(w.input_size() * w.eaves_size(), 0.0);
  for (std::size_t u = 0; u < w.input_size(); ++u)
    for (std::size_t z = 0; z < w.eaves_size(); ++z) {
      double s = 0.0;
      for (std::size_t v = 0; v < w.legit_size(); ++v) s += w.at(u, v, z);
      flat[u * w.eaves_size() + z] = s;
    }
  return Dmc(w.input_size(), w.eaves_size(), std::move(flat));
}

}  // namespace secseq
