#pragma once

#include <string>

#include "hrl/gp_model.hpp"

namespace hrl {

// JSON persistence of GPQModel snapshots: kernel spec, dictionary points,
// per-action alpha / cov_factor / information blocks, hyperparameters, and a
// format-version field. All reals survive a save/load round trip bit-exactly.
void save_model(const GPQModel& model, const std::string& path);
GPQModel load_model(const std::string& path);

std::string model_to_json(const GPQModel& model);
GPQModel model_from_json(const std::string& text);

}  // namespace hrl
