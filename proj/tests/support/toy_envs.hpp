#pragma once

#include <vector>

#include "envopt/env.hpp"
#include "envopt/random.hpp"

namespace envopt::testing {

// Two-armed bandit: one state, episodes of a single step, deterministic
// arm rewards.
class BanditEnv {
public:
    using Observation = int;
    using Action = int;

    explicit BanditEnv(std::vector<double> arm_rewards) : rewards_(std::move(arm_rewards)) {}

    int reset(Rng&) { return 0; }
    EnvStep<int> step(int action, Rng&) {
        EnvStep<int> out;
        out.observation = 0;
        out.reward = rewards_[size_t(action)];
        out.status = StepStatus::Terminal;
        return out;
    }
    int num_constraints() const { return 0; }

private:
    std::vector<double> rewards_;
};

// Fixed-length episode whose single constraint indicator is a constant.
class FixedIndicatorEnv {
public:
    using Observation = int;
    using Action = int;

    FixedIndicatorEnv(int steps, double indicator) : steps_(steps), indicator_(indicator) {}

    int reset(Rng&) {
        t_ = 0;
        return 0;
    }
    EnvStep<int> step(int, Rng&) {
        EnvStep<int> out;
        out.observation = 0;
        out.constraint_indicators = {indicator_};
        out.status = ++t_ >= steps_ ? StepStatus::Terminal : StepStatus::Running;
        return out;
    }
    int num_constraints() const { return 1; }

private:
    int steps_;
    double indicator_;
    int t_ = 0;
};

// One-step episodes with a Bernoulli constraint indicator.
class BernoulliIndicatorEnv {
public:
    using Observation = int;
    using Action = int;

    explicit BernoulliIndicatorEnv(double p) : p_(p) {}

    int reset(Rng&) { return 0; }
    EnvStep<int> step(int, Rng& rng) {
        EnvStep<int> out;
        out.observation = 0;
        out.constraint_indicators = {rng.uniform() < p_ ? 1.0 : 0.0};
        out.status = StepStatus::Terminal;
        return out;
    }
    int num_constraints() const { return 1; }

private:
    double p_;
};

// Two-state, two-action constrained process: the next state equals the
// chosen action, rewards and the constraint indicator depend on the action.
// Episodes truncate at a fixed horizon (the value bootstraps there).
struct TwoStateCmdpSpec {
    // indexed [state][action]
    double reward[2][2] = {{0.5, 1.0}, {0.5, 1.0}};
    double indicator[2][2] = {{1.0, 0.0}, {1.0, 0.0}};
    int horizon = 60;
    int initial_state = 0;
};

class TwoStateCmdpEnv {
public:
    using Observation = int;
    using Action = int;
    using Spec = TwoStateCmdpSpec;

    explicit TwoStateCmdpEnv(const Spec& spec = {}) : spec_(spec) {}

    int reset(Rng&) {
        t_ = 0;
        state_ = spec_.initial_state;
        return state_;
    }
    EnvStep<int> step(int action, Rng&) {
        EnvStep<int> out;
        out.reward = spec_.reward[state_][action];
        out.constraint_indicators = {spec_.indicator[state_][action]};
        state_ = action;
        out.observation = state_;
        out.status = ++t_ >= spec_.horizon ? StepStatus::Truncated : StepStatus::Running;
        return out;
    }
    int num_constraints() const { return 1; }

    const Spec& spec() const { return spec_; }

private:
    Spec spec_;
    int t_ = 0;
    int state_ = 0;
};

} // namespace envopt::testing
