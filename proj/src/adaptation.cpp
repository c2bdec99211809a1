#include "hrl/adaptation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "hrl/errors.hpp"

namespace hrl {

std::vector<std::string> PolicyTransferSpec::shared() const {
  std::set<std::string> src(source_actions.begin(), source_actions.end());
  std::vector<std::string> out;
  for (const std::string& t : target_actions)
    if (src.count(t)) out.push_back(t);
  return out;
}

KernelSpec restrict_action_kernel(const KernelSpec& base, const PolicyTransferSpec& transfer) {
  std::vector<std::string> shared = transfer.shared();
  if (shared.empty())
    throw ConfigError("restrict_action_kernel: shared action set is empty; no transfer possible");
  KernelSpec spec = base;
  spec.action_kernel = ActionKernelKind::RestrictedDelta;
  spec.shared_actions.clear();
  std::set<std::string> shared_set(shared.begin(), shared.end());
  for (std::size_t i = 0; i < transfer.target_actions.size(); ++i)
    if (shared_set.count(transfer.target_actions[i]))
      spec.shared_actions.push_back(static_cast<int>(i));
  std::sort(spec.shared_actions.begin(), spec.shared_actions.end());
  return spec;
}

GPQModel adapt_policy(const GPQModel& pretrained, const PolicyTransferSpec& transfer,
                      int target_belief_dim) {
  std::set<std::string> source_set(transfer.source_actions.begin(),
                                   transfer.source_actions.end());
  for (const std::string& name : pretrained.action_names())
    if (!source_set.count(name))
      throw std::invalid_argument("adapt_policy: pretrained action '" + name +
                                  "' is not in the source action set");
  if (target_belief_dim < 0) target_belief_dim = pretrained.belief_dim();
  if (target_belief_dim != pretrained.belief_dim())
    throw std::invalid_argument("adapt_policy: belief dimension mismatch: " +
                                std::to_string(pretrained.belief_dim()) + " vs " +
                                std::to_string(target_belief_dim));

  GPQModelState src = pretrained.to_state();

  std::map<std::string, int> target_index;
  for (std::size_t i = 0; i < transfer.target_actions.size(); ++i)
    target_index[transfer.target_actions[i]] = static_cast<int>(i);

  GPQModelState dst;
  dst.kernel = restrict_action_kernel(src.kernel, transfer);
  dst.gamma = src.gamma;
  dst.sparsify_threshold = src.sparsify_threshold;
  dst.dictionary_cap = src.dictionary_cap;
  dst.belief_dim = src.belief_dim;
  dst.action_names = transfer.target_actions;

  // Source action id -> target action id, or -1 for actions the target drops.
  std::vector<int> remap(src.action_names.size(), -1);
  for (std::size_t a = 0; a < src.action_names.size(); ++a) {
    auto it = target_index.find(src.action_names[a]);
    if (it != target_index.end()) remap[a] = it->second;
  }

  for (const JointPoint& p : src.dictionary) {
    if (remap[p.action] < 0) continue;
    dst.dictionary.push_back({p.belief, remap[p.action]});
  }
  dst.restricted_prefix = static_cast<int>(dst.dictionary.size());

  dst.blocks.resize(transfer.target_actions.size());
  for (std::size_t a = 0; a < src.action_names.size(); ++a) {
    if (remap[a] < 0) continue;
    dst.blocks[remap[a]] = src.blocks[a];
  }
  for (std::size_t a = 0; a < dst.blocks.size(); ++a) {
    GPQBlockState& bs = dst.blocks[a];
    if (bs.info.rows() == 0 && bs.info.cols() == 0 && bs.info_vec.size() == 0) {
      bs.info = Eigen::MatrixXd::Zero(0, 0);
      bs.info_vec = Eigen::VectorXd::Zero(0);
      bs.alpha = Eigen::VectorXd::Zero(0);
      bs.cov = Eigen::MatrixXd::Zero(0, 0);
    }
  }
  return GPQModel::from_state(std::move(dst));
}

}  // namespace hrl
