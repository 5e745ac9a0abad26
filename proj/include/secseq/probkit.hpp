#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace secseq {

/// Data violates a documented invariant (bad distribution, non-regular
/// cumulative function, inconsistent schedule, ...).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested computation is well-formed but cannot be carried out
/// (state space too large, infeasible reshape target, ...).
struct feasibility_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Normalization policy for anything that must sum to one: accept drift up to
// 1e-12 as-is, renormalize (with a stderr note) up to 1e-9, reject beyond.
inline constexpr double kProbSumTol = 1e-12;
inline constexpr double kProbSumRenorm = 1e-9;

/// Finite probability mass function. Immutable after construction.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t n);
  static Pmf point(std::size_t n, std::size_t at);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

/// Discrete memoryless channel: row-stochastic matrix p(v|u).
class Dmc {
 public:
  Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> flat);
  static Dmc from_rows(const std::vector<std::vector<double>>& rows);
  static Dmc bsc(double crossover);
  static Dmc identity(std::size_t n);

  std::size_t input_size() const noexcept { return in_; }
  std::size_t output_size() const noexcept { return out_; }
  double at(std::size_t u, std::size_t v) const { return p_[u * out_ + v]; }
  std::span<const double> row(std::size_t u) const {
    return {p_.data() + u * out_, out_};
  }

 private:
  std::size_t in_, out_;
  std::vector<double> p_;
};

/// Wiretap channel p(v,z|u): for each input u a joint law over the
/// legitimate output v and the eavesdropper output z.
class WiretapKernel {
 public:
  WiretapKernel(std::size_t input_size, std::size_t legit_size,
                std::size_t eaves_size, std::vector<double> flat);
  static WiretapKernel from_nested(
      const std::vector<std::vector<std::vector<double>>>& p);
  /// Physically degraded construction: p(v,z|u) = main(v|u) * z_given_v(z|v).
  static WiretapKernel degraded(const Dmc& main, const Dmc& z_given_v);
  /// Independent eavesdropper: p(v,z|u) = main(v|u) * z(z).
  static WiretapKernel independent_eaves(const Dmc& main, const Pmf& z);
  /// Eavesdropper sees the legitimate output exactly: z = v.
  static WiretapKernel copy_eaves(const Dmc& main);

  std::size_t input_size() const noexcept { return in_; }
  std::size_t legit_size() const noexcept { return nv_; }
  std::size_t eaves_size() const noexcept { return nz_; }
  double at(std::size_t u, std::size_t v, std::size_t z) const {
    return p_[(u * nv_ + v) * nz_ + z];
  }

 private:
  std::size_t in_, nv_, nz_;
  std::vector<double> p_;
};

/// Dense joint distribution over named finite variables, row-major in the
/// declared variable order. Desk scale only; the cell count is capped.
class JointDist {
 public:
  static constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 20;

  JointDist(std::vector<std::string> variables, std::vector<std::size_t> sizes,
            std::vector<double> table,
            std::size_t max_cells = kDefaultMaxCells);

  const std::vector<std::string>& variables() const noexcept { return names_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  const std::vector<double>& table() const noexcept { return t_; }

  /// Marginal table over `keep` (listed in manifest order internally).
  std::vector<double> marginal(const std::vector<std::string>& keep) const;
  /// H(group) in bits.
  double entropy_bits(const std::vector<std::string>& group) const;

 private:
  std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const;

  std::vector<std::string> names_;
  std::vector<std::size_t> sizes_;
  std::vector<double> t_;
};

/// Shannon entropy in bits, 0*log 0 = 0.
double entropy(const Pmf& p);

/// Entropy in bits of a raw mass vector (entries >= 0, summing to ~1).
double entropy_bits(std::span<const double> mass);

/// I(A;B) = H(A) + H(B) - H(A,B) in bits. Groups must be disjoint and
/// present; tiny negatives from rounding are clamped to +0.0.
double mutual_information(const JointDist& joint,
                          const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b);

/// Output law of `p` pushed through `ch`.
Pmf push_through(const Pmf& p, const Dmc& ch);

/// Legitimate-receiver channel p(v|u) of a wiretap kernel.
Dmc marginal_v(const WiretapKernel& w);
/// Eavesdropper channel p(z|u) of a wiretap kernel.
Dmc marginal_z(const WiretapKernel& w);

}  // namespace secseq
