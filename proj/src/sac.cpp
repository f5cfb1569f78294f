#include "tactile/sac.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "tactile/errors.hpp"

namespace tactile {

std::array<double, 2> softmax2(double l0, double l1) {
    double m = std::max(l0, l1);
    double e0 = std::exp(l0 - m), e1 = std::exp(l1 - m);
    double z = e0 + e1;
    return {e0 / z, e1 / z};
}

double entropy2(const std::array<double, 2>& p) {
    double h = 0.0;
    for (double q : p)
        if (q > 0.0) h -= q * std::log(q);
    return h;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    storage_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(const Transition& t) {
    if (size_ < capacity_) {
        storage_.push_back(t);
        ++size_;
    } else {
        storage_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(std::size_t logical) const {
    return storage_[(head_ + logical) % size_];
}

std::vector<Transition> ReplayBuffer::sample(Rng& rng, std::size_t n) const {
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(storage_[static_cast<std::size_t>(rng.below(size_))]);
    return out;
}

namespace {
std::vector<int> net_dims(int obs_dim, const std::vector<int>& hidden) {
    std::vector<int> d{obs_dim};
    d.insert(d.end(), hidden.begin(), hidden.end());
    d.push_back(kNumActions);
    return d;
}
} // namespace

SacAgent::SacAgent(int obs_dim, const SacHyper& hyper, std::uint64_t seed)
    : hyper_(hyper),
      obs_dim_(obs_dim),
      actor_(net_dims(obs_dim, hyper.hidden)),
      q1_(net_dims(obs_dim, hyper.hidden)),
      q2_(q1_),
      q1_tgt_(q1_),
      q2_tgt_(q2_),
      log_alpha_(std::log(hyper.initial_alpha)),
      opt_actor_(actor_.param_count(), hyper.actor_lr),
      opt_q1_(q1_.param_count(), hyper.critic_lr),
      opt_q2_(q2_.param_count(), hyper.critic_lr),
      opt_alpha_(1, hyper.alpha_lr),
      buffer_(hyper.buffer_capacity),
      rng_(seed) {
    actor_.init_xavier(rng_);
    actor_.zero_final_layer();   // start from the uniform policy
    q1_.init_xavier(rng_);
    q2_.init_xavier(rng_);
    q1_tgt_ = q1_;
    q2_tgt_ = q2_;
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

std::array<double, 2> SacAgent::policy_from_logits(std::span<const double> logits) const {
    return softmax2(logits[0], logits[1]);
}

std::array<double, 2> SacAgent::policy_distribution(const EnvObservation& obs) const {
    auto logits = actor_.forward(obs.normalized);
    return softmax2(logits[0], logits[1]);
}

int SacAgent::greedy_action(const EnvObservation& obs) const {
    auto p = policy_distribution(obs);
    return p[kActionUp] >= p[kActionDown] ? kActionUp : kActionDown;
}

int SacAgent::sample_action(const EnvObservation& obs) {
    auto p = policy_distribution(obs);
    return rng_.uniform01() < p[kActionUp] ? kActionUp : kActionDown;
}

std::vector<double> SacAgent::critic_targets(const std::vector<Transition>& batch) const {
    std::vector<double> y(batch.size());
    double a = alpha();
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& t = batch[b];
        if (t.done) {
            y[b] = t.reward;
            continue;
        }
        auto logits = actor_.forward(t.next_obs);
        auto pi = softmax2(logits[0], logits[1]);
        auto t1 = q1_tgt_.forward(t.next_obs);
        auto t2 = q2_tgt_.forward(t.next_obs);
        double v = 0.0;
        for (int act = 0; act < kNumActions; ++act) {
            double minq = std::min(t1[act], t2[act]);
            double logp = std::log(pi[act]);
            v += pi[act] * (minq - a * logp);
        }
        y[b] = t.reward + hyper_.gamma * v;
    }
    return y;
}

double SacAgent::critic_loss(const std::vector<Transition>& batch, const std::vector<double>& targets,
                             std::vector<double>* grad_q1, std::vector<double>* grad_q2) const {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    Mlp::Tape tape1, tape2;
    std::vector<double> dout(kNumActions);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& t = batch[b];
        q1_.forward(t.obs, tape1);
        q2_.forward(t.obs, tape2);
        double e1 = tape1.act.back()[t.action] - targets[b];
        double e2 = tape2.act.back()[t.action] - targets[b];
        loss += (e1 * e1 + e2 * e2) * inv_b;
        if (grad_q1) {
            std::fill(dout.begin(), dout.end(), 0.0);
            dout[t.action] = 2.0 * e1 * inv_b;
            q1_.backward(tape1, dout, *grad_q1);
        }
        if (grad_q2) {
            std::fill(dout.begin(), dout.end(), 0.0);
            dout[t.action] = 2.0 * e2 * inv_b;
            q2_.backward(tape2, dout, *grad_q2);
        }
    }
    return loss;
}

double SacAgent::actor_loss(const std::vector<Transition>& batch, std::vector<double>* grad_actor) const {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const double a = alpha();
    double loss = 0.0;
    Mlp::Tape tape;
    std::vector<double> dout(kNumActions);
    for (const auto& t : batch) {
        actor_.forward(t.obs, tape);
        const auto& logits = tape.act.back();
        auto pi = softmax2(logits[0], logits[1]);
        auto v1 = q1_.forward(t.obs);
        auto v2 = q2_.forward(t.obs);

        double g[kNumActions];
        double mean_g = 0.0;
        for (int act = 0; act < kNumActions; ++act) {
            double minq = std::min(v1[act], v2[act]);
            g[act] = a * std::log(pi[act]) - minq;
            mean_g += pi[act] * g[act];
        }
        loss += mean_g * inv_b;

        if (grad_actor) {
            for (int act = 0; act < kNumActions; ++act)
                dout[act] = inv_b * pi[act] * (g[act] - mean_g);
            actor_.backward(tape, dout, *grad_actor);
        }
    }
    return loss;
}

double SacAgent::alpha_loss(const std::vector<Transition>& batch, double* grad_log_alpha) const {
    double mean_h = 0.0;
    for (const auto& t : batch) {
        auto logits = actor_.forward(t.obs);
        mean_h += entropy2(softmax2(logits[0], logits[1]));
    }
    mean_h /= static_cast<double>(batch.size());
    // Gradient is positive when entropy exceeds the target.
    if (grad_log_alpha) *grad_log_alpha = mean_h - hyper_.target_entropy;
    return log_alpha_ * (mean_h - hyper_.target_entropy);
}

void SacAgent::polyak_update() {
    const double tau = hyper_.tau;
    auto blend = [tau](Mlp& target, const Mlp& online) {
        auto& tp = target.params();
        const auto& op = online.params();
        for (std::size_t i = 0; i < tp.size(); ++i) tp[i] = (1.0 - tau) * tp[i] + tau * op[i];
    };
    blend(q1_tgt_, q1_);
    blend(q2_tgt_, q2_);
}

LossReport SacAgent::update_step(const std::vector<Transition>& batch) {
    if (batch.empty()) throw Error("update_step: empty batch");
    LossReport report;

    auto targets = critic_targets(batch);

    std::vector<double> gq1(q1_.param_count(), 0.0), gq2(q2_.param_count(), 0.0);
    report.critic_loss = critic_loss(batch, targets, &gq1, &gq2);
    if (!std::isfinite(report.critic_loss))
        throw NonFiniteLoss("critic loss = " + std::to_string(report.critic_loss) +
                            " (alpha=" + std::to_string(alpha()) + ")");
    opt_q1_.step(q1_.params(), gq1);
    opt_q2_.step(q2_.params(), gq2);

    std::vector<double> gactor(actor_.param_count(), 0.0);
    report.actor_loss = actor_loss(batch, &gactor);
    if (!std::isfinite(report.actor_loss))
        throw NonFiniteLoss("actor loss = " + std::to_string(report.actor_loss));
    opt_actor_.step(actor_.params(), gactor);

    double galpha = 0.0;
    report.alpha_loss = alpha_loss(batch, &galpha);
    if (!std::isfinite(report.alpha_loss))
        throw NonFiniteLoss("alpha loss = " + std::to_string(report.alpha_loss));
    std::vector<double> la{log_alpha_}, ga{galpha};
    opt_alpha_.step(la, ga);
    log_alpha_ = la[0];

    polyak_update();
    return report;
}

std::vector<EpisodeResult> SacAgent::train(Environment& env, int episodes,
                                           const std::function<void(const EpisodeResult&)>& on_episode) {
    std::vector<EpisodeResult> trace;
    trace.reserve(std::max(episodes, 0));
    for (int ep = 0; ep < episodes; ++ep) {
        EnvObservation obs = env.reset();
        EpisodeResult result;
        result.episode = ep;
        for (int step = 0; step < env.max_episode_steps(); ++step) {
            int action = buffer_.size() < hyper_.warmup_transitions
                             ? static_cast<int>(rng_.below(kNumActions))
                             : sample_action(obs);
            StepResult sr = env.step(action);

            Transition t;
            t.obs = obs.normalized;
            t.action = action;
            t.reward = sr.reward;
            t.next_obs = sr.obs.normalized;
            t.done = sr.done && !sr.truncated;
            buffer_.push(t);

            result.cumulative_reward += sr.reward;
            ++result.steps;
            obs = sr.obs;

            if (buffer_.size() >= hyper_.warmup_transitions &&
                buffer_.size() >= static_cast<std::size_t>(hyper_.batch_size)) {
                for (int u = 0; u < hyper_.updates_per_step; ++u)
                    update_step(buffer_.sample(rng_, hyper_.batch_size));
            }
            if (sr.done) break;
        }
        if (on_episode) on_episode(result);
        trace.push_back(result);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: explicit little-endian byte order.

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

void put_f64(std::ofstream& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(out, v);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::ifstream& in) {
    std::uint64_t v = get_u64(in);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

constexpr char kMagic[4] = {'T', 'S', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_params(std::ofstream& out, const std::vector<double>& p) {
    put_u64(out, p.size());
    for (double v : p) put_f64(out, v);
}

void get_params(std::ifstream& in, std::vector<double>& p) {
    std::uint64_t n = get_u64(in);
    if (n != p.size()) throw ArtifactError("checkpoint parameter count mismatch");
    for (auto& v : p) v = get_f64(in);
}

} // namespace

void SacAgent::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(obs_dim_));
    put_u32(out, kNumActions);
    put_u32(out, static_cast<std::uint32_t>(hyper_.hidden.size()));
    for (int h : hyper_.hidden) put_u32(out, static_cast<std::uint32_t>(h));
    put_f64(out, hyper_.gamma);
    put_f64(out, hyper_.tau);
    put_f64(out, hyper_.actor_lr);
    put_f64(out, hyper_.critic_lr);
    put_f64(out, hyper_.alpha_lr);
    put_u32(out, static_cast<std::uint32_t>(hyper_.batch_size));
    put_u64(out, hyper_.buffer_capacity);
    put_f64(out, hyper_.target_entropy);
    put_f64(out, hyper_.initial_alpha);
    put_u64(out, hyper_.warmup_transitions);
    put_u32(out, static_cast<std::uint32_t>(hyper_.updates_per_step));
    put_f64(out, log_alpha_);
    put_params(out, actor_.params());
    put_params(out, q1_.params());
    put_params(out, q2_.params());
    put_params(out, q1_tgt_.params());
    put_params(out, q2_tgt_.params());
    for (const Adam* opt : {&opt_actor_, &opt_q1_, &opt_q2_, &opt_alpha_}) {
        auto* mut = const_cast<Adam*>(opt);
        put_u64(out, opt->steps_taken());
        put_params(out, mut->first_moment());
        put_params(out, mut->second_moment());
    }
    if (!out) throw ArtifactError("short write to " + path.string());
}

SacAgent SacAgent::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ArtifactError(path.string() + ": not a checkpoint file");
    if (get_u32(in) != kVersion) throw ArtifactError(path.string() + ": unsupported checkpoint version");

    int obs_dim = static_cast<int>(get_u32(in));
    if (get_u32(in) != kNumActions) throw ArtifactError(path.string() + ": action count mismatch");

    SacHyper hyper;
    hyper.hidden.resize(get_u32(in));
    for (auto& h : hyper.hidden) h = static_cast<int>(get_u32(in));
    hyper.gamma = get_f64(in);
    hyper.tau = get_f64(in);
    hyper.actor_lr = get_f64(in);
    hyper.critic_lr = get_f64(in);
    hyper.alpha_lr = get_f64(in);
    hyper.batch_size = static_cast<int>(get_u32(in));
    hyper.buffer_capacity = get_u64(in);
    hyper.target_entropy = get_f64(in);
    hyper.initial_alpha = get_f64(in);
    hyper.warmup_transitions = get_u64(in);
    hyper.updates_per_step = static_cast<int>(get_u32(in));

    SacAgent agent(obs_dim, hyper, /*seed=*/1);
    agent.log_alpha_ = get_f64(in);
    get_params(in, agent.actor_.params());
    get_params(in, agent.q1_.params());
    get_params(in, agent.q2_.params());
    get_params(in, agent.q1_tgt_.params());
    get_params(in, agent.q2_tgt_.params());
    for (Adam* opt : {&agent.opt_actor_, &agent.opt_q1_, &agent.opt_q2_, &agent.opt_alpha_}) {
        opt->set_steps_taken(get_u64(in));
        get_params(in, opt->first_moment());
        get_params(in, opt->second_moment());
    }
    if (!in) throw ArtifactError(path.string() + ": truncated checkpoint");
    return agent;
}

} // namespace tactile
