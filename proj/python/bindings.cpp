#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secseq/bounds.hpp"
#include "secseq/cumfn.hpp"
#include "secseq/probkit.hpp"
#include "secseq/rdtool.hpp"
#include "secseq/seqsim.hpp"
#include "secseq/wiretap.hpp"

namespace py = pybind11;
using namespace secseq;

namespace {

CumulativeFn cumfn_from_dict(const py::dict& d) {
  const auto kind = d["kind"].cast<std::string>();
  auto b = d["breakpoints"].cast<std::vector<double>>();
  auto v = d["values"].cast<std::vector<double>>();
  if (kind == "step") return CumulativeFn::step(std::move(b), std::move(v));
  if (kind == "linear" || kind == "piecewise-linear")
    return CumulativeFn::piecewise_linear(std::move(b), std::move(v));
  throw std::invalid_argument("kind must be 'step' or 'linear'");
}

SourceSpec source_from_args(const std::vector<double>& px,
                            const std::vector<std::vector<double>>& distortion) {
  return SourceSpec(Pmf(px), distortion);
}

py::dict profile_to_dict(const EffectiveProfile& p) {
  py::dict out;
  out["penalty_constant"] = p.penalty_constant;
  out["raw_breakpoints"] = p.raw.breakpoints();
  out["raw_values"] = p.raw.values();
  std::vector<std::pair<double, double>> env;
  for (std::size_t i = 0; i < p.envelope.knot_count(); ++i)
    env.emplace_back(p.envelope.alphas()[i], p.envelope.values()[i]);
  out["envelope_knots"] = env;
  return out;
}

py::dict report_to_dict(const AuditReport& r) {
  py::dict out;
  out["expected_distortion"] = r.expected_distortion;
  out["d_bar"] = r.d_bar;
  out["leakage"] = r.leakage;
  out["leakage_budget"] = r.leakage_budget;
  py::list viols;
  for (const auto& v : r.violations) {
    py::dict d;
    d["constraint"] = v.constraint;
    d["block"] = v.block;
    d["margin"] = v.margin;
    viols.append(d);
  }
  out["violations"] = viols;
  return out;
}

}  // namespace

PYBIND11_MODULE(_secseq, m) {
  m.doc() = "secure sequential source-channel coding toolkit";

  m.def(
      "entropy",
      [](const std::vector<double>& p) { return entropy(Pmf(p)); },
      py::arg("probs"), "Shannon entropy in bits.");

  m.def(
      "mutual_information",
      [](const std::vector<std::vector<double>>& table) {
        std::vector<double> flat;
        const std::size_t cols = table.empty() ? 0 : table.front().size();
        for (const auto& row : table) {
          if (row.size() != cols)
            throw std::invalid_argument("ragged joint table");
          flat.insert(flat.end(), row.begin(), row.end());
        }
        JointDist j({"A", "B"}, {table.size(), cols}, std::move(flat));
        return mutual_information(j, {"A"}, {"B"});
      },
      py::arg("joint_table"), "I(A;B) in bits of a two-variable joint table.");

  m.def(
      "push_through",
      [](const std::vector<double>& p,
         const std::vector<std::vector<double>>& rows) {
        return push_through(Pmf(p), Dmc::from_rows(rows)).probs();
      },
      py::arg("pmf"), py::arg("channel"));

  m.def(
      "capacity",
      [](const std::vector<std::vector<double>>& rows) {
        const auto res = capacity(Dmc::from_rows(rows));
        py::dict out;
        out["C"] = res.capacity_bits;
        out["input"] = res.input.probs();
        return out;
      },
      py::arg("channel"), "Blahut-Arimoto channel capacity in bits per use.");

  m.def(
      "secrecy_capacity",
      [](const std::vector<std::vector<std::vector<double>>>& kernel,
         std::size_t aux_size, std::uint64_t seed, int threads) {
        const auto res = secrecy_capacity(WiretapKernel::from_nested(kernel),
                                          aux_size, seed, threads);
        py::dict out;
        out["C_WT"] = res.secrecy_bits;
        out["aux_size"] = res.input.aux_size;
        out["joint"] = res.input.joint;
        out["best_start"] = res.best_start;
        return out;
      },
      py::arg("kernel"), py::arg("aux_size") = 0, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "rate_leakage_boundary",
      [](const std::vector<std::vector<std::vector<double>>>& kernel,
         std::size_t grid, std::uint64_t seed, int threads) {
        const auto sweep = rate_leakage_boundary(WiretapKernel::from_nested(kernel),
                                                 grid, seed, threads);
        py::dict out;
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : sweep.points) pts.emplace_back(p.rate, p.leakage);
        out["points"] = pts;
        out["C"] = sweep.summary.C;
        out["C_WT"] = sweep.summary.C_WT;
        out["C1"] = sweep.summary.C1;
        out["C2"] = sweep.summary.C2;
        out["ell"] = sweep.summary.ell;
        out["degenerate"] = sweep.summary.degenerate;
        return out;
      },
      py::arg("kernel"), py::arg("grid") = 64, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "rate_at_distortion",
      [](const std::vector<double>& px,
         const std::vector<std::vector<double>>& distortion, double d) {
        return RateDistortionCurve(source_from_args(px, distortion))
            .rate_at_distortion(d);
      },
      py::arg("px"), py::arg("distortion"), py::arg("D"));

  m.def(
      "distortion_at_rate",
      [](const std::vector<double>& px,
         const std::vector<std::vector<double>>& distortion, double r) {
        return RateDistortionCurve(source_from_args(px, distortion))
            .distortion_at_rate(r);
      },
      py::arg("px"), py::arg("distortion"), py::arg("R"));

  m.def("closed_form_binary", &closed_form_binary, py::arg("p"), py::arg("D"));
  m.def("binary_entropy", &binary_entropy, py::arg("p"));

  m.def(
      "concave_envelope",
      [](const py::dict& f) {
        const auto env = concave_envelope(cumfn_from_dict(f));
        std::vector<std::pair<double, double>> knots;
        for (std::size_t i = 0; i < env.knot_count(); ++i)
          knots.emplace_back(env.alphas()[i], env.values()[i]);
        return knots;
      },
      py::arg("f"), "Least concave majorant as a knot list.");

  m.def(
      "step_from_rates",
      [](const std::vector<double>& rates) {
        const auto g = step_from_rates(rates);
        py::dict out;
        out["kind"] = "step";
        out["breakpoints"] = g.breakpoints();
        out["values"] = g.values();
        return out;
      },
      py::arg("rates"));

  m.def(
      "rates_from_crdf",
      [](const py::dict& g, std::size_t k) {
        return rates_from_crdf(cumfn_from_dict(g), k);
      },
      py::arg("G"), py::arg("k"));

  m.def(
      "effective_out",
      [](const py::dict& g, const py::dict& l, double C, double C_WT) {
        return profile_to_dict(
            effective_out(cumfn_from_dict(g), cumfn_from_dict(l), C, C_WT));
      },
      py::arg("G"), py::arg("L"), py::arg("C"), py::arg("C_WT"));

  m.def(
      "effective_in",
      [](const py::dict& g, const py::dict& l, double C1, double C2,
         double ell) {
        return profile_to_dict(
            effective_in(cumfn_from_dict(g), cumfn_from_dict(l), C1, C2, ell));
      },
      py::arg("G"), py::arg("L"), py::arg("C1"), py::arg("C2"),
      py::arg("ell"));

  m.def(
      "discretize_effective",
      [](const py::dict& g, const py::dict& l, double C, double C_WT,
         std::size_t k) {
        return profile_to_dict(discretize_effective(
            cumfn_from_dict(g), cumfn_from_dict(l), C, C_WT, k));
      },
      py::arg("G"), py::arg("L"), py::arg("C"), py::arg("C_WT"), py::arg("k"));

  m.def(
      "distortion_bound",
      [](const py::dict& g, const py::dict& l, double C, double C_WT,
         const std::vector<double>& px,
         const std::vector<std::vector<double>>& distortion) {
        RateDistortionCurve curve(source_from_args(px, distortion));
        return distortion_bound(
            effective_out(cumfn_from_dict(g), cumfn_from_dict(l), C, C_WT),
            curve);
      },
      py::arg("G"), py::arg("L"), py::arg("C"), py::arg("C_WT"), py::arg("px"),
      py::arg("distortion"),
      "Distortion integral of the outer profile's envelope.");

  m.def(
      "reshape_rates",
      [](const std::vector<double>& entries, double target) {
        RateVector in;
        in.entries = entries;
        in.k = entries.size();
        return reshape_rates(in, target).entries;
      },
      py::arg("rates"), py::arg("target_total"));

  m.def("precode", &precode, py::arg("m"), py::arg("q"), py::arg("n_bits"));
  m.def("precode_inverse", &precode_inverse, py::arg("m_prime"), py::arg("q"),
        py::arg("n_bits"));
  m.def(
      "precode_pushforward",
      [](const std::vector<double>& message, const std::vector<double>& key) {
        return precode_pushforward(Pmf(message), Pmf(key)).probs();
      },
      py::arg("message"), py::arg("key"));

  m.def(
      "simulate",
      [](const std::vector<double>& px,
         const std::vector<std::vector<double>>& distortion,
         const std::vector<std::vector<std::vector<double>>>& kernel,
         const py::dict& g, const py::dict& l, double d_bar, std::size_t k,
         std::size_t n, const std::string& builtin) {
        const auto source = source_from_args(px, distortion);
        const auto w = WiretapKernel::from_nested(kernel);
        const auto G = cumfn_from_dict(g);
        const auto L = cumfn_from_dict(l);
        BuiltinCode kind;
        if (builtin == "null")
          kind = BuiltinCode::kNull;
        else if (builtin == "repeat")
          kind = BuiltinCode::kRepeat;
        else if (builtin == "quantize_index")
          kind = BuiltinCode::kQuantizeIndex;
        else
          throw std::invalid_argument("builtin must be null|repeat|quantize_index");
        const auto code = builtin_code(kind, source, w, G, k, n);
        return report_to_dict(run_exact(code, source, w, G, L, d_bar));
      },
      py::arg("px"), py::arg("distortion"), py::arg("kernel"), py::arg("G"),
      py::arg("L"), py::arg("d_bar"), py::arg("k"), py::arg("n"),
      py::arg("builtin") = "quantize_index",
      "Exact audit of a built-in sequential code.");
}
