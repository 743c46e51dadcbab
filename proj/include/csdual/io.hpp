#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csdual/ansatz.hpp"
#include "csdual/dual.hpp"
#include "csdual/error.hpp"
#include "csdual/model.hpp"
#include "csdual/solver.hpp"

namespace csdual {

/// Malformed input document (unknown keys, wrong types, bad values).
class InputError : public Error {
 public:
  using Error::Error;
};

using Json = nlohmann::ordered_json;

/// Reads a file when `arg` names one, otherwise parses `arg` as inline JSON.
Json load_json_arg(const std::string& arg);

/// {"terms": [[p, c], ...], "h": h}; "h" defaults to 0.
MixedModel model_from_json(const Json& j);
Json to_json(const MixedModel& model);

/// {"atoms": [[q, m], ...], "segments": [[r1, r2], ...]}, or a solve report
/// carrying such an object under "measure". Segments are linked to `model`.
ParisiMeasure measure_from_json(const Json& j, const MixedModel& model);
Json to_json(const ParisiMeasure& mu);

Json to_json(const Interval& iv);
Json to_json(const SignPattern& pattern);
Json to_json(const AnsatzFamily& family);
Json to_json(const DualCertificate& cert);
Json to_json(const RSDiagnostics& rs);
Json to_json(const SolveOptions& opt);
/// Telemetry is included; its wall time is the only field that varies
/// between identical runs.
Json to_json(const SolveReport& report);
Json to_json(const OracleResult& oracle);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace csdual
