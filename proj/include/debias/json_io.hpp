#pragma once

#include "debias/action_set.hpp"
#include "debias/fpe.hpp"
#include "debias/instances.hpp"
#include "debias/model.hpp"

#include <json.hpp>

#include <filesystem>

namespace debias {

using Json = nlohmann::ordered_json;

/// {"d": int, "actions": [{"x": [...], "z": +-1}, ...]}; unknown fields are
/// rejected with std::invalid_argument.
ActionSet action_set_from_json(const Json& j);
Json to_json(const ActionSet& a);

/// {"gamma": [...], "omega": real}
Parameter parameter_from_json(const Json& j);
Json to_json(const Parameter& p);

Json to_json(const RunResult& r);
Json to_json(const InstanceMeta& m);

/// Parse errors surface as std::invalid_argument, missing files as std::runtime_error.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace debias
