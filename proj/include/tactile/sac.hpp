#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "tactile/mlp.hpp"
#include "tactile/rng.hpp"

namespace tactile {

inline constexpr int kActionUp = 0;
inline constexpr int kActionDown = 1;
inline constexpr int kNumActions = 2;

// Normalized end-effector position; the network sees values in [-1, 1].
struct EnvObservation {
    std::array<double, 3> position_mm{};
    std::array<double, 3> normalized{};
};

struct Transition {
    std::array<double, 3> obs{};
    int action = 0;
    double reward = 0.0;
    std::array<double, 3> next_obs{};
    bool done = false;
};

// Fixed-capacity ring with uniform sampling. FIFO eviction.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t logical) const;   // 0 = oldest retained

    std::vector<Transition> sample(Rng& rng, std::size_t n) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::vector<Transition> storage_;
};

struct SacHyper {
    std::vector<int> hidden{64, 64};
    double gamma = 0.99;
    double tau = 0.005;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double alpha_lr = 3e-4;
    int batch_size = 64;
    std::size_t buffer_capacity = 50000;
    double target_entropy = 0.34657359027997264;   // 0.5 * ln 2
    double initial_alpha = 1.0;
    std::size_t warmup_transitions = 200;
    int updates_per_step = 1;
};

struct LossReport {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha_loss = 0.0;
};

struct EpisodeResult {
    int episode = 0;
    int steps = 0;
    double cumulative_reward = 0.0;
};

// Environment surface the trainer drives. PressEnv implements it; tests can
// supply anything else. `truncated` marks episode ends that are budget or
// goal plateaus rather than true terminals: the trainer bootstraps through
// them so episode length does not distort the value function.
struct StepResult {
    EnvObservation obs;
    double reward = 0.0;
    bool done = false;
    bool truncated = false;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual EnvObservation reset() = 0;
    virtual StepResult step(int action) = 0;
    virtual int max_episode_steps() const = 0;
};

// Maximum-entropy actor-critic over the two Z-step actions: categorical
// actor, twin per-action critics with Polyak-averaged targets, temperature
// tuned toward a target entropy. Expectations over the two actions are taken
// in closed form.
class SacAgent {
public:
    SacAgent(int obs_dim, const SacHyper& hyper, std::uint64_t seed);

    const SacHyper& hyper() const { return hyper_; }
    double alpha() const;

    std::array<double, 2> policy_distribution(const EnvObservation& obs) const;
    std::array<double, 2> policy_from_logits(std::span<const double> logits) const;
    int greedy_action(const EnvObservation& obs) const;
    int sample_action(const EnvObservation& obs);

    // Soft Bellman targets: r + gamma * (1-done) * E_pi[min Q_target - alpha ln pi].
    std::vector<double> critic_targets(const std::vector<Transition>& batch) const;

    // Loss evaluators; gradient outputs are optional so finite-difference
    // tests can call them as pure functions of the current parameters.
    double critic_loss(const std::vector<Transition>& batch, const std::vector<double>& targets,
                       std::vector<double>* grad_q1, std::vector<double>* grad_q2) const;
    double actor_loss(const std::vector<Transition>& batch, std::vector<double>* grad_actor) const;
    double alpha_loss(const std::vector<Transition>& batch, double* grad_log_alpha) const;

    // One gradient step on critics, actor, and temperature plus the Polyak
    // target update. Throws NonFiniteLoss when a loss leaves R.
    LossReport update_step(const std::vector<Transition>& batch);

    ReplayBuffer& buffer() { return buffer_; }

    // Off-policy training loop; returns the per-episode reward trace.
    std::vector<EpisodeResult> train(Environment& env, int episodes,
                                     const std::function<void(const EpisodeResult&)>& on_episode = {});

    Mlp& actor() { return actor_; }
    Mlp& q1() { return q1_; }
    Mlp& q2() { return q2_; }
    Mlp& q1_target() { return q1_tgt_; }
    Mlp& q2_target() { return q2_tgt_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& q1() const { return q1_; }
    const Mlp& q2() const { return q2_; }
    const Mlp& q1_target() const { return q1_tgt_; }
    const Mlp& q2_target() const { return q2_tgt_; }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }

    void polyak_update();

    // Versioned binary checkpoint (magic, shapes, little-endian f64 payload).
    void save(const std::filesystem::path& path) const;
    static SacAgent load(const std::filesystem::path& path);

private:
    SacHyper hyper_;
    int obs_dim_;
    Mlp actor_, q1_, q2_, q1_tgt_, q2_tgt_;
    double log_alpha_;
    Adam opt_actor_, opt_q1_, opt_q2_, opt_alpha_;
    ReplayBuffer buffer_;
    Rng rng_;
};

// Stable softmax + entropy helpers shared with tests.
std::array<double, 2> softmax2(double l0, double l1);
double entropy2(const std::array<double, 2>& p);

} // namespace tactile
