#include "hrl/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hrl/errors.hpp"
#include "hrl/version.hpp"

namespace hrl {

namespace {

using json = nlohmann::ordered_json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  return m;
}

}  // namespace

std::string model_to_json(const GPQModel& model) {
  GPQModelState state = model.to_state();
  json j;
  j["format_version"] = kModelFormatVersion;
  json kernel;
  kernel["belief"] = state.kernel.belief_kernel == BeliefKernelKind::Linear ? "linear" : "gaussian";
  kernel["gaussian_width"] = state.kernel.gaussian_width;
  kernel["action"] =
      state.kernel.action_kernel == ActionKernelKind::Delta ? "delta" : "restricted_delta";
  kernel["shared_actions"] = state.kernel.shared_actions;
  kernel["prior_mean"] = state.kernel.prior_mean;
  kernel["noise_variance"] = state.kernel.noise_variance;
  j["kernel"] = std::move(kernel);
  j["gamma"] = state.gamma;
  j["sparsify_threshold"] = state.sparsify_threshold;
  j["dictionary_cap"] = state.dictionary_cap;
  j["belief_dim"] = state.belief_dim;
  j["action_names"] = state.action_names;
  j["restricted_prefix"] = state.restricted_prefix;
  json dict = json::array();
  for (const JointPoint& p : state.dictionary)
    dict.push_back({{"action", p.action}, {"belief", vector_to_json(p.belief)}});
  j["dictionary"] = std::move(dict);
  json blocks = json::array();
  for (std::size_t a = 0; a < state.blocks.size(); ++a) {
    const GPQBlockState& b = state.blocks[a];
    json jb;
    jb["action"] = state.action_names[a];
    jb["alpha"] = vector_to_json(b.alpha);
    jb["cov_factor"] = matrix_to_json(b.cov);
    jb["info"] = matrix_to_json(b.info);
    jb["info_vec"] = vector_to_json(b.info_vec);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  return j.dump(1);
}

GPQModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw ConfigError("load_model: unsupported model format version " +
                      std::to_string(j.at("format_version").get<int>()));
  GPQModelState state;
  const nlohmann::json& kernel = j.at("kernel");
  state.kernel.belief_kernel = kernel.at("belief").get<std::string>() == "linear"
                                   ? BeliefKernelKind::Linear
                                   : BeliefKernelKind::Gaussian;
  state.kernel.gaussian_width = kernel.at("gaussian_width").get<double>();
  state.kernel.action_kernel = kernel.at("action").get<std::string>() == "delta"
                                   ? ActionKernelKind::Delta
                                   : ActionKernelKind::RestrictedDelta;
  state.kernel.shared_actions = kernel.at("shared_actions").get<std::vector<int>>();
  state.kernel.prior_mean = kernel.at("prior_mean").get<double>();
  state.kernel.noise_variance = kernel.at("noise_variance").get<double>();
  state.gamma = j.at("gamma").get<double>();
  state.sparsify_threshold = j.at("sparsify_threshold").get<double>();
  state.dictionary_cap = j.at("dictionary_cap").get<int>();
  state.belief_dim = j.at("belief_dim").get<int>();
  state.action_names = j.at("action_names").get<std::vector<std::string>>();
  state.restricted_prefix = j.at("restricted_prefix").get<int>();
  for (const auto& jp : j.at("dictionary")) {
    JointPoint p;
    p.action = jp.at("action").get<int>();
    p.belief = vector_from_json(jp.at("belief"));
    state.dictionary.push_back(std::move(p));
  }
  const nlohmann::json& blocks = j.at("blocks");
  if (blocks.size() != state.action_names.size())
    throw ConfigError("load_model: block count does not match the action table");
  state.blocks.resize(blocks.size());
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const nlohmann::json& jb = blocks[a];
    if (jb.at("action").get<std::string>() != state.action_names[a])
      throw ConfigError("load_model: block order does not match the action table");
    state.blocks[a].alpha = vector_from_json(jb.at("alpha"));
    state.blocks[a].cov = matrix_from_json(jb.at("cov_factor"));
    state.blocks[a].info = matrix_from_json(jb.at("info"));
    state.blocks[a].info_vec = vector_from_json(jb.at("info_vec"));
  }
  return GPQModel::from_state(std::move(state));
}

void save_model(const GPQModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_model: cannot write " + path);
  out << model_to_json(model) << "\n";
}

GPQModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_model: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace hrl
