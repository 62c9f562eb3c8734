#include "gridlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridlab {

AdvantageBatch compute_gae(const std::vector<double>& rewards,
                           const std::vector<double>& values,
                           double gamma, double lambda) {
    if (values.size() != rewards.size() + 1) {
        std::ostringstream msg;
        msg << "values length " << values.size() << " must be rewards length + 1 ("
            << rewards.size() + 1 << ")";
        throw Error(ErrorCode::LengthMismatch, msg.str());
    }
    AdvantageBatch batch;
    batch.gamma = gamma;
    batch.lambda = lambda;
    batch.values = values;
    const std::size_t T = rewards.size();
    batch.deltas.resize(T);
    batch.advantages.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        batch.deltas[t] = rewards[t] + gamma * values[t + 1] - values[t];
    }
    double running = 0.0;
    for (std::size_t i = T; i > 0; --i) {
        const std::size_t t = i - 1;
        running = batch.deltas[t] + gamma * lambda * running;
        batch.advantages[t] = running;
    }
    return batch;
}

double ppo_clip_term(double ratio, double advantage, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::ConfigError, "clip epsilon must lie in (0, 1)");
    }
    if (!(ratio > 0.0)) {
        throw Error(ErrorCode::NonPositiveRatio, "probability ratio must be positive");
    }
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

void ParamBlock::add_scaled(const ParamBlock& other, double scale) {
    for (const auto& [key, row] : other.rows) {
        auto& mine = rows[key];
        if (mine.size() < row.size()) mine.resize(row.size(), 0.0);
        for (std::size_t i = 0; i < row.size(); ++i) mine[i] += scale * row[i];
    }
    if (dense.size() < other.dense.size()) dense.resize(other.dense.size(), 0.0);
    for (std::size_t i = 0; i < other.dense.size(); ++i) dense[i] += scale * other.dense[i];
}

double ParamBlock::max_abs() const {
    double out = 0.0;
    for (const auto& [key, row] : rows) {
        (void)key;
        for (double x : row) out = std::max(out, std::abs(x));
    }
    for (double x : dense) out = std::max(out, std::abs(x));
    return out;
}

std::size_t ParamBlock::component_count() const {
    std::size_t n = dense.size();
    for (const auto& [key, row] : rows) {
        (void)key;
        n += row.size();
    }
    return n;
}

PolicyModel::PolicyModel(PolicyKind kind, std::vector<std::string> action_vocabulary,
                         int feature_dim)
    : kind_(kind), vocabulary_(std::move(action_vocabulary)), feature_dim_(feature_dim) {
    if (vocabulary_.empty()) {
        throw Error(ErrorCode::ConfigError, "policy needs a non-empty action vocabulary");
    }
    if (kind_ == PolicyKind::LinearSoftmax) {
        if (feature_dim_ < 1) throw Error(ErrorCode::ConfigError, "feature_dim must be >= 1");
        params_.dense.assign(static_cast<std::size_t>(num_actions()) * feature_dim_, 0.0);
    }
}

std::vector<double> PolicyModel::features(const std::string& state_key) const {
    std::vector<double> phi(static_cast<std::size_t>(feature_dim_), 0.0);
    const std::size_t n = state_key.size();
    if (n < 3) {
        phi[0] = 1.0;
        return phi;
    }
    for (std::size_t i = 0; i + 3 <= n; ++i) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::size_t j = i; j < i + 3; ++j) {
            h ^= static_cast<unsigned char>(state_key[j]);
            h *= 1099511628211ull;
        }
        const double sign = (h & 1ull) ? 1.0 : -1.0;
        phi[(h >> 1) % static_cast<std::uint64_t>(feature_dim_)] += sign;
    }
    double norm = 0.0;
    for (double x : phi) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : phi) x /= norm;
    } else {
        phi[0] = 1.0;
    }
    return phi;
}

std::vector<double> PolicyModel::logits(const std::string& state_key) const {
    const std::size_t actions = static_cast<std::size_t>(num_actions());
    if (kind_ == PolicyKind::TabularSoftmax) {
        auto it = params_.rows.find(state_key);
        if (it == params_.rows.end()) return std::vector<double>(actions, 0.0);
        return it->second;
    }
    const std::vector<double> phi = features(state_key);
    std::vector<double> out(actions, 0.0);
    for (std::size_t a = 0; a < actions; ++a) {
        const double* w = params_.dense.data() + a * static_cast<std::size_t>(feature_dim_);
        double dot = 0.0;
        for (int k = 0; k < feature_dim_; ++k) dot += w[k] * phi[static_cast<std::size_t>(k)];
        out[a] = dot;
    }
    return out;
}

std::vector<double> PolicyModel::probs(const std::string& state_key) const {
    std::vector<double> z = logits(state_key);
    const double zmax = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& x : z) {
        x = std::exp(x - zmax);
        total += x;
    }
    for (double& x : z) x /= total;
    return z;
}

double PolicyModel::log_prob(const std::string& state_key, int action_id) const {
    if (action_id < 0 || action_id >= num_actions()) {
        throw Error(ErrorCode::ConfigError, "action id out of range");
    }
    const std::vector<double> z = logits(state_key);
    const double zmax = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double x : z) total += std::exp(x - zmax);
    return (z[static_cast<std::size_t>(action_id)] - zmax) - std::log(total);
}

int PolicyModel::sample_action(const std::string& state_key, SplitMix64& rng) const {
    const std::vector<double> p = probs(state_key);
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        cum += p[a];
        if (u < cum) return static_cast<int>(a);
    }
    return num_actions() - 1;
}

void PolicyModel::touch(const std::string& state_key) {
    if (kind_ != PolicyKind::TabularSoftmax) return;
    auto it = params_.rows.find(state_key);
    if (it == params_.rows.end()) {
        params_.rows.emplace(state_key,
                             std::vector<double>(static_cast<std::size_t>(num_actions()), 0.0));
    }
}

namespace {

void check_on_policy(const DecisionPoint& decision, const PolicyModel& policy) {
    const double current = policy.log_prob(decision.state_key, decision.action_id);
    if (std::abs(current - decision.logprob_behavior) > 1e-9) {
        std::ostringstream msg;
        msg << "behavior logprob " << decision.logprob_behavior << " differs from current "
            << current << " for action " << decision.action_id;
        throw Error(ErrorCode::OffPolicyDetected, msg.str());
    }
}

} // namespace

ParamBlock policy_gradient(const std::vector<DecisionPoint>& decisions,
                           const std::vector<double>& advantages,
                           const PolicyModel& policy) {
    if (decisions.size() != advantages.size()) {
        throw Error(ErrorCode::LengthMismatch, "decision/advantage counts differ");
    }
    ParamBlock grad;
    if (policy.kind() == PolicyKind::LinearSoftmax) {
        grad.dense.assign(policy.parameters().dense.size(), 0.0);
    }
    if (decisions.empty()) return grad;
    const double inv_batch = 1.0 / static_cast<double>(decisions.size());
    const std::size_t actions = static_cast<std::size_t>(policy.num_actions());
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        const DecisionPoint& d = decisions[i];
        check_on_policy(d, policy);
        const std::vector<double> p = policy.probs(d.state_key);
        const double scale = advantages[i] * inv_batch;
        if (policy.kind() == PolicyKind::TabularSoftmax) {
            auto& row = grad.rows[d.state_key];
            if (row.empty()) row.assign(actions, 0.0);
            for (std::size_t a = 0; a < actions; ++a) {
                const double indicator = (static_cast<int>(a) == d.action_id) ? 1.0 : 0.0;
                row[a] += scale * (indicator - p[a]);
            }
        } else {
            const std::vector<double> phi = policy.features(d.state_key);
            for (std::size_t a = 0; a < actions; ++a) {
                const double indicator = (static_cast<int>(a) == d.action_id) ? 1.0 : 0.0;
                const double coeff = scale * (indicator - p[a]);
                double* g = grad.dense.data() + a * phi.size();
                for (std::size_t k = 0; k < phi.size(); ++k) g[k] += coeff * phi[k];
            }
        }
    }
    return grad;
}

double policy_surrogate(const std::vector<DecisionPoint>& decisions,
                        const std::vector<double>& advantages,
                        const PolicyModel& policy) {
    if (decisions.size() != advantages.size()) {
        throw Error(ErrorCode::LengthMismatch, "decision/advantage counts differ");
    }
    if (decisions.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        total += advantages[i] * policy.log_prob(decisions[i].state_key, decisions[i].action_id);
    }
    return total / static_cast<double>(decisions.size());
}

double ValueTable::value(const std::string& state_key) const {
    auto it = params_.rows.find(state_key);
    return it == params_.rows.end() ? 0.0 : it->second[0];
}

void ValueTable::set_value(const std::string& state_key, double value) {
    params_.rows[state_key] = {value};
}

double ValueTable::mse(const std::vector<std::string>& keys,
                       const std::vector<double>& targets) const {
    if (keys.size() != targets.size()) {
        throw Error(ErrorCode::LengthMismatch, "key/target counts differ");
    }
    if (keys.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const double err = value(keys[i]) - targets[i];
        total += err * err;
    }
    return total / static_cast<double>(keys.size());
}

ParamBlock ValueTable::mse_gradient(const std::vector<std::string>& keys,
                                    const std::vector<double>& targets) const {
    if (keys.size() != targets.size()) {
        throw Error(ErrorCode::LengthMismatch, "key/target counts differ");
    }
    ParamBlock grad;
    if (keys.empty()) return grad;
    const double scale = 2.0 / static_cast<double>(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto& row = grad.rows[keys[i]];
        if (row.empty()) row.assign(1, 0.0);
        row[0] += scale * (value(keys[i]) - targets[i]);
    }
    return grad;
}

double value_regression_step(ValueTable& table,
                             const std::vector<std::string>& keys,
                             const std::vector<double>& targets,
                             double learning_rate) {
    const double before = table.mse(keys, targets);
    const ParamBlock grad = table.mse_gradient(keys, targets);
    for (const auto& [key, row] : grad.rows) {
        table.set_value(key, table.value(key) - learning_rate * row[0]);
    }
    return before;
}

AdamOptimizer::AdamOptimizer(double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || epsilon <= 0.0) {
        throw Error(ErrorCode::ConfigError, "invalid optimizer hyperparameters");
    }
}

void AdamOptimizer::step(ParamBlock& params, const ParamBlock& gradient, double learning_rate) {
    ++t_;
    const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto update = [&](double& param, double& m, double& v, double g) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        const double mhat = m / bias1;
        const double vhat = v / bias2;
        param -= learning_rate * mhat / (std::sqrt(vhat) + epsilon_);
    };
    for (const auto& [key, grow] : gradient.rows) {
        auto& prow = params.rows[key];
        if (prow.size() < grow.size()) prow.resize(grow.size(), 0.0);
        auto& mrow = m_.rows[key];
        auto& vrow = v_.rows[key];
        if (mrow.size() < grow.size()) mrow.resize(grow.size(), 0.0);
        if (vrow.size() < grow.size()) vrow.resize(grow.size(), 0.0);
        for (std::size_t i = 0; i < grow.size(); ++i) {
            update(prow[i], mrow[i], vrow[i], grow[i]);
        }
    }
    if (!gradient.dense.empty()) {
        if (params.dense.size() < gradient.dense.size()) {
            params.dense.resize(gradient.dense.size(), 0.0);
        }
        if (m_.dense.size() < gradient.dense.size()) m_.dense.resize(gradient.dense.size(), 0.0);
        if (v_.dense.size() < gradient.dense.size()) v_.dense.resize(gradient.dense.size(), 0.0);
        for (std::size_t i = 0; i < gradient.dense.size(); ++i) {
            update(params.dense[i], m_.dense[i], v_.dense[i], gradient.dense[i]);
        }
    }
}

double warmup_lr(double base_lr, long long step, long long warmup_steps) {
    if (warmup_steps <= 0) return base_lr;
    if (step >= warmup_steps) return base_lr;
    if (step < 0) return 0.0;
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
}

} // namespace gridlab
