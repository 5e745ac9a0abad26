#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "secseq/bounds.hpp"
#include "secseq/cumfn.hpp"
#include "secseq/probkit.hpp"
#include "secseq/rdtool.hpp"
#include "secseq/seqsim.hpp"
#include "secseq/wiretap.hpp"

namespace secseq::io {

using json = nlohmann::ordered_json;

/// A config field is missing or malformed; the message names the field.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Pmf parse_pmf(const json& j, const std::string& field);
Dmc parse_dmc(const json& j, const std::string& field);
WiretapKernel parse_wiretap(const json& j, const std::string& field);
SourceSpec parse_source(const json& j, const std::string& field);
/// {kind: "step"|"linear", breakpoints: [...], values: [...]}; "inf" and
/// 1e999-style overflows in values are read as +infinity.
CumulativeFn parse_cumulative(const json& j, const std::string& field);
SequentialCode parse_code(const json& j, const SourceSpec& source,
                          const WiretapKernel& w, const CumulativeFn& G,
                          const std::string& field);

json to_json(const CumulativeFn& f);
json to_json(const PiecewiseLinearFn& f);
json to_json(const EffectiveProfile& p);
json to_json(const AuditReport& r);
json to_json(const ChannelSummary& s);

json load_config(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace secseq::io
