#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gridlab/error.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/trajectory.hpp"

namespace gridlab {

// Per-decision temporal-difference residuals and their exponentially weighted
// sums. values has one more entry than deltas/advantages (terminal bootstrap).
struct AdvantageBatch {
    std::vector<double> deltas;
    std::vector<double> advantages;
    std::vector<double> values;
    double gamma = 1.0;
    double lambda = 1.0;
};

// Backward-recursive generalized advantage estimation:
//   delta_t = r_t + gamma * V(s_{t+1}) - V(s_t)
//   A_t     = delta_t + gamma * lambda * A_{t+1}
// Requires values.size() == rewards.size() + 1 (LengthMismatch otherwise).
AdvantageBatch compute_gae(const std::vector<double>& rewards,
                           const std::vector<double>& values,
                           double gamma, double lambda);

// Pessimistic clipped surrogate contribution for one decision:
//   min(ratio * A, clamp(ratio, 1 - epsilon, 1 + epsilon) * A)
// ratio must be positive (NonPositiveRatio) and epsilon in (0, 1).
double ppo_clip_term(double ratio, double advantage, double epsilon);

enum class PolicyKind { TabularSoftmax, LinearSoftmax };

// Parameter container shared by both policy kinds, their gradients, and Adam
// moments. Tabular policies keep one keyed logit row per visited state;
// linear policies keep a single dense weight block.
struct ParamBlock {
    std::map<std::string, std::vector<double>> rows;
    std::vector<double> dense;

    void add_scaled(const ParamBlock& other, double scale);
    double max_abs() const;
    std::size_t component_count() const;
};

class PolicyModel {
  public:
    PolicyModel(PolicyKind kind, std::vector<std::string> action_vocabulary,
                int feature_dim = 64);

    PolicyKind kind() const { return kind_; }
    const std::vector<std::string>& action_vocabulary() const { return vocabulary_; }
    int num_actions() const { return static_cast<int>(vocabulary_.size()); }
    int feature_dim() const { return feature_dim_; }

    // Logits for unvisited tabular states are all-zero (uniform policy).
    std::vector<double> logits(const std::string& state_key) const;
    std::vector<double> probs(const std::string& state_key) const;
    double log_prob(const std::string& state_key, int action_id) const;
    int sample_action(const std::string& state_key, SplitMix64& rng) const;

    // Materialize the tabular row for a state so optimizer steps and
    // finite-difference probes address the same parameter set. No-op for
    // linear policies.
    void touch(const std::string& state_key);

    ParamBlock& parameters() { return params_; }
    const ParamBlock& parameters() const { return params_; }

    // Hashed character-trigram features for the linear kind (L2-normalized).
    std::vector<double> features(const std::string& state_key) const;

  private:
    PolicyKind kind_;
    std::vector<std::string> vocabulary_;
    int feature_dim_;
    ParamBlock params_;
};

// Gradient of the mean on-policy surrogate (1/B) * sum_t A_t * log pi(a_t|s_t)
// with respect to the policy parameters. Every decision's stored behavior
// log-probability must match the current policy within 1e-9
// (OffPolicyDetected), enforcing strictly on-policy updates.
ParamBlock policy_gradient(const std::vector<DecisionPoint>& decisions,
                           const std::vector<double>& advantages,
                           const PolicyModel& policy);

// The surrogate value itself (for loss reporting and numerical checks).
double policy_surrogate(const std::vector<DecisionPoint>& decisions,
                        const std::vector<double>& advantages,
                        const PolicyModel& policy);

// State-value estimates keyed by canonical state. Unseen states value 0.
class ValueTable {
  public:
    double value(const std::string& state_key) const;
    void set_value(const std::string& state_key, double value);

    double mse(const std::vector<std::string>& keys,
               const std::vector<double>& targets) const;
    // Gradient of the mean squared error with respect to the stored values.
    ParamBlock mse_gradient(const std::vector<std::string>& keys,
                            const std::vector<double>& targets) const;

    ParamBlock& parameters() { return params_; }
    const ParamBlock& parameters() const { return params_; }

  private:
    ParamBlock params_; // one-element row per state
};

// One plain gradient-descent step of the critic toward empirical returns.
// Returns the pre-step mean squared error. LengthMismatch on size mismatch.
double value_regression_step(ValueTable& table,
                             const std::vector<std::string>& keys,
                             const std::vector<double>& targets,
                             double learning_rate);

// Adam with bias correction. Sparse convention for keyed rows: only rows
// present in the gradient are touched (the dense block always updates).
// Pass the gradient of the LOSS; the step descends.
class AdamOptimizer {
  public:
    AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    void step(ParamBlock& params, const ParamBlock& gradient, double learning_rate);
    long long steps_taken() const { return t_; }

  private:
    double beta1_;
    double beta2_;
    double epsilon_;
    long long t_ = 0;
    ParamBlock m_;
    ParamBlock v_;
};

// Linear learning-rate warmup: scales base_lr by step/warmup_steps until the
// warmup completes, then holds at base_lr. Steps are one-indexed.
double warmup_lr(double base_lr, long long step, long long warmup_steps);

} // namespace gridlab
