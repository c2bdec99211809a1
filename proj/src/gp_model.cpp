#include "hrl/gp_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hrl/errors.hpp"

namespace hrl {

GPQModel::GPQModel(KernelSpec spec, double gamma, double sparsify_threshold,
                   int dictionary_cap, int belief_dim,
                   std::vector<std::string> action_names)
    : spec_(std::move(spec)),
      gamma_(gamma),
      nu_(sparsify_threshold),
      cap_(dictionary_cap),
      belief_dim_(belief_dim),
      action_names_(std::move(action_names)) {
  if (gamma_ <= 0.0 || gamma_ > 1.0)
    throw std::invalid_argument("GPQModel: gamma must lie in (0, 1]");
  if (nu_ < 0.0) throw std::invalid_argument("GPQModel: sparsify_threshold must be >= 0");
  if (cap_ < 1) throw std::invalid_argument("GPQModel: dictionary_cap must be positive");
  if (spec_.noise_variance <= 0.0)
    throw std::invalid_argument("GPQModel: noise_variance must be > 0");
  if (action_names_.empty())
    throw std::invalid_argument("GPQModel: action table must be non-empty");
  blocks_.resize(action_names_.size());
}

GPQModel GPQModel::from_state(GPQModelState state) {
  GPQModel model(state.kernel, state.gamma, state.sparsify_threshold,
                 state.dictionary_cap, state.belief_dim, state.action_names);
  model.restricted_prefix_ = state.restricted_prefix;
  model.dict_ = std::move(state.dictionary);
  for (int i = 0; i < static_cast<int>(model.dict_.size()); ++i) {
    const JointPoint& p = model.dict_[i];
    model.check_belief(p.belief);
    model.check_action(p.action);
    model.blocks_[p.action].global_index.push_back(i);
  }
  if (state.blocks.size() != model.blocks_.size())
    throw std::invalid_argument("GPQModel::from_state: block count mismatch");
  for (std::size_t a = 0; a < model.blocks_.size(); ++a) {
    Block& blk = model.blocks_[a];
    const GPQBlockState& bs = state.blocks[a];
    const int m = blk.size();
    if (bs.info.rows() != m || bs.info.cols() != m || bs.info_vec.size() != m ||
        bs.alpha.size() != m || bs.cov.rows() != m || bs.cov.cols() != m)
      throw std::invalid_argument("GPQModel::from_state: block size mismatch for action " +
                                  model.action_names_[a]);
    blk.S = bs.info;
    blk.t = bs.info_vec;
    blk.alpha = bs.alpha;
    blk.C = bs.cov;
    model.rebuild_block_gram(blk);
  }
  return model;
}

GPQModelState GPQModel::to_state() const {
  GPQModelState state;
  state.kernel = spec_;
  state.gamma = gamma_;
  state.sparsify_threshold = nu_;
  state.dictionary_cap = cap_;
  state.belief_dim = belief_dim_;
  state.action_names = action_names_;
  state.restricted_prefix = restricted_prefix_;
  state.dictionary = dict_;
  state.blocks.resize(blocks_.size());
  for (std::size_t a = 0; a < blocks_.size(); ++a) {
    const Block& blk = blocks_[a];
    const int m = blk.size();
    GPQBlockState& bs = state.blocks[a];
    bs.info = blk.S.rows() == m ? blk.S : Eigen::MatrixXd::Zero(m, m);
    bs.info_vec = blk.t.size() == m ? blk.t : Eigen::VectorXd::Zero(m);
    bs.alpha = blk.alpha.size() == m ? blk.alpha : Eigen::VectorXd::Zero(m);
    bs.cov = blk.C.rows() == m ? blk.C : Eigen::MatrixXd::Zero(m, m);
  }
  return state;
}

double GPQModel::prior_variance(const Eigen::VectorXd& belief) const {
  // The action kernel diagonal counts as 1 for every action the model can
  // take, including options added after a transfer; the restricted gate only
  // cuts covariance through carried-over dictionary points.
  return belief_kernel_eval(spec_, belief, belief);
}

double GPQModel::cross_kernel(const Eigen::VectorXd& belief, int action,
                              int dict_index) const {
  const JointPoint& p = dict_[dict_index];
  if (p.action != action) return 0.0;
  if (spec_.action_kernel == ActionKernelKind::RestrictedDelta &&
      dict_index < restricted_prefix_ && !spec_.action_in_shared_set(action))
    return 0.0;
  return belief_kernel_eval(spec_, belief, p.belief);
}

Eigen::VectorXd GPQModel::block_cross(const Eigen::VectorXd& belief, int action) const {
  const Block& blk = blocks_[action];
  Eigen::VectorXd k(blk.size());
  for (int j = 0; j < blk.size(); ++j)
    k(j) = cross_kernel(belief, action, blk.global_index[j]);
  return k;
}

void GPQModel::check_action(int action) const {
  if (action < 0 || action >= static_cast<int>(action_names_.size()))
    throw std::invalid_argument("GPQModel: action index " + std::to_string(action) +
                                " outside table of size " +
                                std::to_string(action_names_.size()));
}

void GPQModel::check_belief(const Eigen::VectorXd& belief) const {
  if (belief.size() != belief_dim_)
    throw std::invalid_argument("GPQModel: belief dimension mismatch: " +
                                std::to_string(belief.size()) + " vs " +
                                std::to_string(belief_dim_));
}

void GPQModel::rebuild_block_gram(Block& blk) {
  const int m = blk.size();
  blk.K.resize(m, m);
  for (int i = 0; i < m; ++i) {
    const JointPoint& pi = dict_[blk.global_index[i]];
    for (int j = 0; j <= i; ++j) {
      const double v = cross_kernel(pi.belief, pi.action, blk.global_index[j]);
      blk.K(i, j) = v;
      blk.K(j, i) = v;
    }
    // The diagonal goes through the same gate as off-diagonal entries so that
    // carried points outside the shared set become inert.
    blk.K(i, i) = cross_kernel(pi.belief, pi.action, blk.global_index[i]);
  }
  Eigen::MatrixXd jittered = blk.K;
  jittered.diagonal().array() += kJitter;
  blk.L = Eigen::LLT<Eigen::MatrixXd>(jittered).matrixL();
}

double GPQModel::admit_residual(const JointPoint& x) const {
  check_belief(x.belief);
  check_action(x.action);
  const Block& blk = blocks_[x.action];
  const double kxx = prior_variance(x.belief);
  if (blk.size() == 0) return kxx;
  Eigen::VectorXd k = block_cross(x.belief, x.action);
  Eigen::VectorXd w = blk.L.triangularView<Eigen::Lower>().solve(k);
  return kxx - w.squaredNorm();
}

AdmitDecision GPQModel::dictionary_admit(const JointPoint& x) const {
  if (admit_residual(x) > nu_ && dictionary_size() < cap_)
    return AdmitDecision::Admit;
  return AdmitDecision::RepresentByExisting;
}

void GPQModel::admit_point(const JointPoint& x) {
  Block& blk = blocks_[x.action];
  dict_.push_back(x);
  blk.global_index.push_back(static_cast<int>(dict_.size()) - 1);
  const int m = blk.size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(m);
  if (m > 1) {
    S.topLeftCorner(m - 1, m - 1) = blk.S;
    t.head(m - 1) = blk.t;
  }
  blk.S = std::move(S);
  blk.t = std::move(t);
  rebuild_block_gram(blk);
}

void GPQModel::solve_block(Block& blk) {
  const int m = blk.size();
  if (m == 0) {
    blk.alpha.resize(0);
    blk.C.resize(0, 0);
    return;
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) + blk.S * blk.K;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  blk.alpha = lu.solve(blk.t);
  Eigen::MatrixXd C = lu.solve(blk.S);
  blk.C = 0.5 * (C + C.transpose());
}

void GPQModel::gptd_update(const EpisodeTransitions& episode) {
  if (episode.empty())
    throw std::invalid_argument("gptd_update: episode must be non-empty");
  const int n = static_cast<int>(episode.size());
  for (int i = 0; i < n; ++i) {
    const Transition& tr = episode[i];
    check_belief(tr.point.belief);
    check_action(tr.point.action);
    if (!tr.point.belief.allFinite())
      throw std::invalid_argument("gptd_update: non-finite belief entry; episode rejected");
    if (!std::isfinite(tr.reward) || !std::isfinite(tr.discount_to_next))
      throw std::invalid_argument("gptd_update: non-finite reward; episode rejected");
    if (tr.discount_to_next <= 0.0 || tr.discount_to_next > 1.0)
      throw std::invalid_argument("gptd_update: discount_to_next must lie in (0, 1]");
    if (tr.is_terminal != (i == n - 1))
      throw std::invalid_argument(
          "gptd_update: episode must end with its single terminal transition");
  }

  // Discounted returns-to-go; with Sigma = sigma^2 H H^T the TD observation
  // model reduces to independent regression targets y_i.
  Eigen::VectorXd y(n);
  y(n - 1) = episode[n - 1].reward;
  for (int i = n - 2; i >= 0; --i)
    y(i) = episode[i].reward + episode[i].discount_to_next * y(i + 1);

  const double inv_noise = 1.0 / spec_.noise_variance;
  std::vector<bool> dirty(blocks_.size(), false);
  for (int i = 0; i < n; ++i) {
    const JointPoint& x = episode[i].point;
    Block& blk = blocks_[x.action];
    Eigen::VectorXd a;
    const double kxx = prior_variance(x.belief);
    if (blk.size() == 0) {
      if (kxx > nu_ && dictionary_size() < cap_) {
        admit_point(x);
        a = Eigen::VectorXd::Zero(blk.size());
        a(blk.size() - 1) = 1.0;
      } else {
        a = Eigen::VectorXd::Zero(0);
      }
    } else {
      Eigen::VectorXd k = block_cross(x.belief, x.action);
      Eigen::VectorXd w = blk.L.triangularView<Eigen::Lower>().solve(k);
      const double residual = kxx - w.squaredNorm();
      if (residual > nu_ && dictionary_size() < cap_) {
        admit_point(x);
        a = Eigen::VectorXd::Zero(blk.size());
        a(blk.size() - 1) = 1.0;
      } else {
        a = blk.L.transpose().triangularView<Eigen::Upper>().solve(w);
      }
    }
    if (a.size() == 0) continue;
    blk.S.noalias() += inv_noise * a * a.transpose();
    blk.t.noalias() += inv_noise * y(i) * a;
    dirty[x.action] = true;
  }
  for (std::size_t act = 0; act < blocks_.size(); ++act)
    if (dirty[act]) solve_block(blocks_[act]);
}

PosteriorStat GPQModel::q_posterior_one(const Eigen::VectorXd& belief, int action) const {
  check_belief(belief);
  check_action(action);
  const Block& blk = blocks_[action];
  const double prior = prior_variance(belief);
  if (blk.size() == 0 || blk.alpha.size() == 0) return {0.0, prior};
  Eigen::VectorXd k = block_cross(belief, action);
  const double mean = k.dot(blk.alpha);
  double var = prior - k.dot(blk.C * k);
  if (var < 0.0) {
    if (var < -kVarianceClamp)
      throw NumericalError("q_posterior: variance " + std::to_string(var) +
                           " below -1e-9; covariance factor is broken");
    var = 0.0;
  }
  return {mean, var};
}

std::vector<PosteriorStat> GPQModel::q_posterior(const Eigen::VectorXd& belief,
                                                 const std::vector<int>& actions) const {
  if (actions.empty())
    throw std::invalid_argument("q_posterior: action list must be non-empty");
  std::vector<PosteriorStat> out;
  out.reserve(actions.size());
  for (int a : actions) out.push_back(q_posterior_one(belief, a));
  return out;
}

int GPQModel::sample_action(const Eigen::VectorXd& belief, const std::vector<int>& actions,
                            double exploration_scale, RandomSource& rng) const {
  if (actions.empty())
    throw std::invalid_argument("sample_action: action list must be non-empty");
  if (exploration_scale < 0.0)
    throw std::invalid_argument("sample_action: exploration_scale must be >= 0");
  std::vector<PosteriorStat> stats = q_posterior(belief, actions);
  int best = actions[0];
  double best_q = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    double q = stats[i].mean;
    if (exploration_scale > 0.0)
      q = rng.normal(stats[i].mean, exploration_scale * std::sqrt(stats[i].variance));
    if (first || q > best_q || (q == best_q && actions[i] < best)) {
      best = actions[i];
      best_q = q;
      first = false;
    }
  }
  return best;
}

Eigen::VectorXd GPQModel::alpha() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dictionary_size());
  for (const Block& blk : blocks_)
    for (int j = 0; j < blk.size(); ++j)
      if (blk.alpha.size() == blk.size()) out(blk.global_index[j]) = blk.alpha(j);
  return out;
}

Eigen::MatrixXd GPQModel::cov_factor() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dictionary_size(), dictionary_size());
  for (const Block& blk : blocks_) {
    if (blk.C.rows() != blk.size()) continue;
    for (int i = 0; i < blk.size(); ++i)
      for (int j = 0; j < blk.size(); ++j)
        out(blk.global_index[i], blk.global_index[j]) = blk.C(i, j);
  }
  return out;
}

}  // namespace hrl
