#include "secseq/jsonio.hpp"

#include <fstream>
#include <limits>

namespace secseq::io {

namespace {

const json& field_at(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw config_error("missing config field '" + field + "'");
  return j.at(field);
}

double number_or_inf(const json& j, const std::string& field) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw config_error("field '" + field + "': unrecognized number string");
  }
  if (!j.is_number())
    throw config_error("field '" + field + "' must be a number");
  return j.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array())
    throw config_error("field '" + field + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number_or_inf(x, field));
  return out;
}

}  // namespace

Pmf parse_pmf(const json& j, const std::string& field) {
  try {
    return Pmf(number_array(j, field));
  } catch (const validation_error& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
}

Dmc parse_dmc(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw config_error("field '" + field + "' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(number_array(r, field));
  try {
    return Dmc::from_rows(rows);
  } catch (const std::exception& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
}

WiretapKernel parse_wiretap(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw config_error("field '" + field + "' must be a (u, v, z) nest");
  std::vector<std::vector<std::vector<double>>> nest;
  for (const auto& byv : j) {
    if (!byv.is_array())
      throw config_error("field '" + field + "' must be a (u, v, z) nest");
    std::vector<std::vector<double>> mid;
    for (const auto& byz : byv) mid.push_back(number_array(byz, field));
    nest.push_back(std::move(mid));
  }
  try {
    return WiretapKernel::from_nested(nest);
  } catch (const std::exception& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
}

SourceSpec parse_source(const json& j, const std::string& field) {
  const json& px = field_at(j, "px");
  const json& dist = field_at(j, "distortion");
  if (!dist.is_array())
    throw config_error("field '" + field + ".distortion' must be a matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& r : dist) rows.push_back(number_array(r, field + ".distortion"));
  try {
    return SourceSpec(parse_pmf(px, field + ".px"), rows);
  } catch (const std::exception& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
}

CumulativeFn parse_cumulative(const json& j, const std::string& field) {
  const std::string kind = field_at(j, "kind").get<std::string>();
  auto b = number_array(field_at(j, "breakpoints"), field + ".breakpoints");
  auto v = number_array(field_at(j, "values"), field + ".values");
  try {
    if (kind == "step") return CumulativeFn::step(std::move(b), std::move(v));
    if (kind == "linear" || kind == "piecewise-linear")
      return CumulativeFn::piecewise_linear(std::move(b), std::move(v));
  } catch (const std::exception& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
  throw config_error("field '" + field + ".kind' must be step or linear");
}

SequentialCode parse_code(const json& j, const SourceSpec& source,
                          const WiretapKernel& w, const CumulativeFn& G,
                          const std::string& field) {
  const std::size_t k = field_at(j, "k").get<std::size_t>();
  const std::size_t n = field_at(j, "n").get<std::size_t>();
  if (j.contains("builtin")) {
    const std::string name = j.at("builtin").get<std::string>();
    BuiltinCode kind;
    if (name == "null")
      kind = BuiltinCode::kNull;
    else if (name == "repeat")
      kind = BuiltinCode::kRepeat;
    else if (name == "quantize_index")
      kind = BuiltinCode::kQuantizeIndex;
    else
      throw config_error("field '" + field + ".builtin' unknown kind " + name);
    return builtin_code(kind, source, w, G, k, n);
  }
  SequentialCode code;
  code.k = k;
  code.n = n;
  code.schedule = BlockSchedule::from_crdf(G, k, n);
  code.x_size = source.nx;
  code.u_size = w.input_size();
  code.v_size = w.legit_size();
  code.xhat_size = source.nxhat;
  const json& encs = field_at(j, "encoders");
  if (!encs.is_array() || encs.size() != k)
    throw config_error("field '" + field + ".encoders' must list k tables");
  for (const auto& table : encs) {
    std::vector<std::uint32_t> t;
    for (const auto& e : table) t.push_back(e.get<std::uint32_t>());
    code.encoders.push_back(std::move(t));
  }
  for (const auto& d : field_at(j, "decoder"))
    code.decoder.push_back(d.get<std::uint32_t>());
  try {
    code.validate();
  } catch (const std::exception& e) {
    throw config_error("field '" + field + "': " + e.what());
  }
  return code;
}

json to_json(const CumulativeFn& f) {
  return json{{"kind", f.kind() == CumKind::kStep ? "step" : "linear"},
              {"breakpoints", f.breakpoints()},
              {"values", f.values()}};
}

json to_json(const PiecewiseLinearFn& f) {
  json knots = json::array();
  for (std::size_t i = 0; i < f.knot_count(); ++i)
    knots.push_back(json::array({f.alphas()[i], f.values()[i]}));
  return knots;
}

json to_json(const EffectiveProfile& p) {
  json out;
  switch (p.kind) {
    case ProfileKind::kOuter:
      out["kind"] = "outer";
      out["params"] = {{"C", p.c_high}, {"C_WT", p.c_low}};
      break;
    case ProfileKind::kInner:
      out["kind"] = "inner";
      out["params"] = {{"C1", p.c_low}, {"C2", p.c_high}, {"ell", p.ell}};
      break;
    case ProfileKind::kDiscretized:
      out["kind"] = "discretized";
      out["params"] = {{"C", p.c_high}, {"C_WT", p.c_low}, {"k", *p.k}};
      break;
  }
  out["penalty_constant"] = p.penalty_constant;
  out["raw_knots"] = to_json(p.raw);
  out["envelope_knots"] = to_json(p.envelope);
  return out;
}

json to_json(const AuditReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back(json{{"constraint", x.constraint},
                     {"block", x.block},
                     {"margin", x.margin}});
  return json{{"expected_distortion", r.expected_distortion},
              {"d_bar", r.d_bar},
              {"leakage", r.leakage},
              {"leakage_budget", r.leakage_budget},
              {"violations", v}};
}

json to_json(const ChannelSummary& s) {
  return json{{"C", s.C},
              {"C_WT", s.C_WT},
              {"C1", s.C1},
              {"C2", s.C2},
              {"ell", s.ell},
              {"capacity_input", s.capacity_input.probs()},
              {"secrecy_input",
               {{"aux_size", s.secrecy_input.aux_size},
                {"joint", s.secrecy_input.joint}}},
              {"degenerate", s.degenerate}};
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("config parse error: " + std::string(e.what()));
  }
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace secseq::io
