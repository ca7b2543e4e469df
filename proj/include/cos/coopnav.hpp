#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cos/common.hpp"
#include "cos/rng.hpp"

namespace cos {

enum class ActionMode { Discrete, Continuous };

// How a landmark counts as "double" occupied.
enum class DoubleRule { AtLeastTwo, ExactlyTwo };

struct WorldConfig {
    int n_landmarks = 2;
    int n_agents = 4;  // must equal 2 * n_landmarks
    ActionMode action_mode = ActionMode::Discrete;
    int max_steps = 25;
    double dt = 0.1;
    double damping = 0.25;
    double force_scale = 5.0;
    double occupy_radius = 0.1;
    double world_half_extent = 1.0;
    DoubleRule double_rule = DoubleRule::AtLeastTwo;

    void validate() const;
    int obs_dim() const { return 4 + 2 * (n_agents - 1) + 2 * n_landmarks; }
    int global_state_dim() const { return 4 * n_agents + 2 * n_landmarks; }
    int action_dim() const { return action_mode == ActionMode::Discrete ? 5 : 2; }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// discrete action indices: up, down, left, right, stop
constexpr int kActionUp = 0;
constexpr int kActionDown = 1;
constexpr int kActionLeft = 2;
constexpr int kActionRight = 3;
constexpr int kActionStop = 4;

struct JointAction {
    std::vector<int> discrete;          // per agent, index in [0, 5)
    std::vector<Vec2> continuous;       // per agent, clamped to [-1, 1]^2
};

struct Occupancy {
    int single = 0;  // landmarks with exactly one occupant
    int dbl = 0;     // landmarks with two occupants (>= 2 under AtLeastTwo)
};

struct StepInfo {
    Occupancy occupancy;
    int end_step = -1;  // set when done
};

struct WorldState {
    std::vector<Vec2> agent_pos;
    std::vector<Vec2> agent_vel;
    std::vector<Vec2> landmark_pos;
    int step = 0;
    bool done = false;
    Rng rng;
};

WorldState reset(const WorldConfig& config, std::uint64_t seed);

Occupancy occupancy(const WorldState& state, const WorldConfig& config);

// r = -0.1 + 3 * single + 10 * double, shared by the whole team
double reward_from_occupancy(const Occupancy& occ);
double reward(const WorldState& state, const WorldConfig& config);

struct StepResult {
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

StepResult step(WorldState& state, const JointAction& actions, const WorldConfig& config);

// own velocity, own position, displacement to each other agent, displacement
// to each landmark
std::vector<double> observe(const WorldState& state, int agent_index,
                            const WorldConfig& config);

// all positions, all velocities, all landmark positions
std::vector<double> global_state(const WorldState& state);

}  // namespace cos
