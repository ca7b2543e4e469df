#include "cos/coopnav.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cos {

void WorldConfig::validate() const {
    if (n_landmarks < 1) throw ConfigError("n_landmarks must be positive");
    if (n_agents != 2 * n_landmarks)
        throw ConfigError("n_agents must equal 2*n_landmarks (got " + std::to_string(n_agents) +
                          " agents for " + std::to_string(n_landmarks) + " landmarks)");
    if (max_steps < 1) throw ConfigError("max_steps must be positive");
    if (!(occupy_radius > 0.0)) throw ConfigError("occupy_radius must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (damping < 0.0 || damping >= 1.0) throw ConfigError("damping must be in [0, 1)");
    if (!(world_half_extent > 0.0)) throw ConfigError("world_half_extent must be positive");
}

WorldState reset(const WorldConfig& config, std::uint64_t seed) {
    config.validate();
    WorldState s;
    s.rng.reseed(seed);
    const double he = config.world_half_extent;
    s.agent_pos.resize(config.n_agents);
    s.agent_vel.assign(config.n_agents, Vec2{0.0, 0.0});
    s.landmark_pos.resize(config.n_landmarks);
    for (auto& p : s.agent_pos) p = Vec2{s.rng.uniform(-he, he), s.rng.uniform(-he, he)};
    for (auto& p : s.landmark_pos) p = Vec2{s.rng.uniform(-he, he), s.rng.uniform(-he, he)};
    s.step = 0;
    s.done = false;
    return s;
}

Occupancy occupancy(const WorldState& state, const WorldConfig& config) {
    Occupancy occ;
    const double r2 = config.occupy_radius * config.occupy_radius;
    for (const auto& lm : state.landmark_pos) {
        int count = 0;
        for (const auto& ag : state.agent_pos) {
            const double dx = ag.x - lm.x, dy = ag.y - lm.y;
            if (dx * dx + dy * dy <= r2) ++count;
        }
        if (count == 1) ++occ.single;
        if (config.double_rule == DoubleRule::AtLeastTwo ? count >= 2 : count == 2) ++occ.dbl;
    }
    return occ;
}

double reward_from_occupancy(const Occupancy& occ) {
    return -0.1 + 3.0 * occ.single + 10.0 * occ.dbl;
}

double reward(const WorldState& state, const WorldConfig& config) {
    return reward_from_occupancy(occupancy(state, config));
}

namespace {

Vec2 discrete_force(int action) {
    switch (action) {
        case kActionUp: return {0.0, 1.0};
        case kActionDown: return {0.0, -1.0};
        case kActionLeft: return {-1.0, 0.0};
        case kActionRight: return {1.0, 0.0};
        case kActionStop: return {0.0, 0.0};
        default:
            throw ContractError("discrete action index " + std::to_string(action) +
                                " out of range [0, 5)");
    }
}

}  // namespace

StepResult step(WorldState& state, const JointAction& actions, const WorldConfig& config) {
    if (state.done) throw ContractError("step on a finished episode");
    const int n = config.n_agents;
    const bool discrete = config.action_mode == ActionMode::Discrete;
    if (discrete ? static_cast<int>(actions.discrete.size()) != n
                 : static_cast<int>(actions.continuous.size()) != n)
        throw ContractError("joint action size does not match agent count");

    const double he = config.world_half_extent;
    for (int i = 0; i < n; ++i) {
        Vec2 u;
        if (discrete) {
            u = discrete_force(actions.discrete[i]);
        } else {
            u.x = std::clamp(actions.continuous[i].x, -1.0, 1.0);
            u.y = std::clamp(actions.continuous[i].y, -1.0, 1.0);
        }
        auto& v = state.agent_vel[i];
        v.x = (1.0 - config.damping) * v.x + config.force_scale * u.x * config.dt;
        v.y = (1.0 - config.damping) * v.y + config.force_scale * u.y * config.dt;
        auto& p = state.agent_pos[i];
        p.x = std::clamp(p.x + v.x * config.dt, -he, he);
        p.y = std::clamp(p.y + v.y * config.dt, -he, he);
    }
    state.step += 1;

    StepResult res;
    res.info.occupancy = occupancy(state, config);
    res.reward = reward_from_occupancy(res.info.occupancy);
    const bool success = res.info.occupancy.dbl == config.n_landmarks;
    res.done = success || state.step >= config.max_steps;
    if (res.done) {
        state.done = true;
        res.info.end_step = state.step;
    }
    return res;
}

std::vector<double> observe(const WorldState& state, int agent_index,
                            const WorldConfig& config) {
    const int n = config.n_agents;
    if (agent_index < 0 || agent_index >= n)
        throw ContractError("agent index " + std::to_string(agent_index) + " out of range");
    std::vector<double> obs;
    obs.reserve(config.obs_dim());
    const Vec2& pos = state.agent_pos[agent_index];
    const Vec2& vel = state.agent_vel[agent_index];
    obs.push_back(vel.x);
    obs.push_back(vel.y);
    obs.push_back(pos.x);
    obs.push_back(pos.y);
    for (int j = 0; j < n; ++j) {
        if (j == agent_index) continue;
        obs.push_back(state.agent_pos[j].x - pos.x);
        obs.push_back(state.agent_pos[j].y - pos.y);
    }
    for (const auto& lm : state.landmark_pos) {
        obs.push_back(lm.x - pos.x);
        obs.push_back(lm.y - pos.y);
    }
    return obs;
}

std::vector<double> global_state(const WorldState& state) {
    std::vector<double> s;
    s.reserve(4 * state.agent_pos.size() + 2 * state.landmark_pos.size());
    for (const auto& p : state.agent_pos) {
        s.push_back(p.x);
        s.push_back(p.y);
    }
    for (const auto& v : state.agent_vel) {
        s.push_back(v.x);
        s.push_back(v.y);
    }
    for (const auto& lm : state.landmark_pos) {
        s.push_back(lm.x);
        s.push_back(lm.y);
    }
    return s;
}

}  // namespace cos
