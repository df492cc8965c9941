#include "hartogs/sampling.hpp"

#include <cstdlib>
#include <string>

namespace hartogs::sampling {

namespace {

constexpr std::uint64_t kAcceptanceWindow = 100000;
constexpr std::uint64_t kMinAcceptedPerWindow = 10;  // rate 1e-4

std::atomic<std::size_t> g_worker_override{0};

std::size_t default_workers() {
  if (const char* env = std::getenv("HARTOGS_WITNESS_THREADS")) {
    try {
      const long parsed = std::stol(env);
      if (parsed >= 1) return static_cast<std::size_t>(parsed);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void draw_disk_point(Philox4x32& engine, Complex& out) {
  for (;;) {
    const double x = engine.uniform_symmetric();
    const double y = engine.uniform_symmetric();
    if (x * x + y * y < 1.0) {
      out = {x, y};
      return;
    }
  }
}

}  // namespace

std::size_t worker_count() {
  const std::size_t forced = g_worker_override.load();
  return forced != 0 ? forced : default_workers();
}

void set_worker_count(std::size_t workers) { g_worker_override.store(workers); }

BallSampler::BallSampler(norms::NormSpec spec) : spec_(spec), volume_(norms::ball_volume(spec)) {}

double BallSampler::acceptance_rate() const {
  return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

void BallSampler::note_proposal(bool accepted) {
  ++proposals_;
  ++window_proposals_;
  if (accepted) {
    ++accepted_;
    ++window_accepted_;
  }
  if (window_proposals_ == kAcceptanceWindow) {
    if (window_accepted_ < kMinAcceptedPerWindow) {
      throw DiagnosticError("sample_ball: acceptance rate below 1e-4 for k=" + std::to_string(spec_.k()) +
                            ", p=" + spec_.p_label());
    }
    window_proposals_ = 0;
    window_accepted_ = 0;
  }
}

void BallSampler::draw(Philox4x32& engine, std::span<Complex> out) {
  if (out.size() != dimension()) throw UsageError("sample_ball: output length mismatch");
  if (spec_.is_max()) {
    for (auto& c : out) draw_disk_point(engine, c);
    note_proposal(true);
    return;
  }
  for (;;) {
    for (auto& c : out) c = {engine.uniform_symmetric(), engine.uniform_symmetric()};
    const bool inside = norms::norm_eval(spec_, out) < 1.0;
    note_proposal(inside);
    if (inside) return;
  }
}

ConeSampler::ConeSampler(norms::NormSpec spec) : ball_(spec) {}

void ConeSampler::draw(Philox4x32& engine, std::span<Complex> out) {
  for (;;) {
    ball_.draw(engine, out);
    const double n = norms::norm_eval(ball_.spec(), out);
    if (n > 0.0) {
      for (auto& c : out) c /= n;
      return;
    }
  }
}

void BoxSampler::draw(Philox4x32& engine, std::span<Complex> out) {
  if (out.size() != dimension_) throw UsageError("box sampler: output length mismatch");
  for (auto& c : out) c = {engine.uniform_symmetric(), engine.uniform_symmetric()};
}

ComplexVector sample_ball(const norms::NormSpec& spec, Philox4x32& engine) {
  BallSampler sampler(spec);
  ComplexVector out(sampler.dimension());
  sampler.draw(engine, out);
  return out;
}

ComplexVector sample_cone_boundary(const norms::NormSpec& spec, Philox4x32& engine) {
  ConeSampler sampler(spec);
  ComplexVector out(sampler.dimension());
  sampler.draw(engine, out);
  return out;
}

MomentAccumulator::MomentAccumulator(std::size_t components)
    : shift_(components, 0.0), sum_(components, 0.0), sum_sq_(components, 0.0), finite_(components, 1) {}

void MomentAccumulator::add(std::span<const double> x) {
  if (count_ == 0) std::copy(x.begin(), x.end(), shift_.begin());
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - shift_[c];
    sum_[c] += d;
    sum_sq_[c] += d * d;
    if (!std::isfinite(x[c])) finite_[c] = 0;
  }
  ++count_;
}

Moments MomentAccumulator::moments() const {
  Moments m;
  m.count = count_;
  m.finite = finite_;
  m.mean.resize(sum_.size());
  m.m2.resize(sum_.size());
  const double n = static_cast<double>(count_);
  for (std::size_t c = 0; c < sum_.size(); ++c) {
    if (count_ == 0) continue;
    m.mean[c] = shift_[c] + sum_[c] / n;
    m.m2[c] = std::max(0.0, sum_sq_[c] - sum_[c] * sum_[c] / n);
  }
  return m;
}

void Moments::merge(const Moments& later) {
  rejected += later.rejected;
  if (later.count == 0) return;
  if (count == 0) {
    const auto keep = rejected;
    *this = later;
    rejected = keep;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(later.count);
  const double n = na + nb;
  for (std::size_t c = 0; c < mean.size(); ++c) {
    const double delta = later.mean[c] - mean[c];
    mean[c] += delta * nb / n;
    m2[c] += later.m2[c] + delta * delta * na * nb / n;
    finite[c] = static_cast<char>(finite[c] && later.finite[c]);
  }
  count += later.count;
}

std::vector<Estimate> Moments::estimates(double mass) const {
  std::vector<Estimate> out(mean.size());
  const double n = static_cast<double>(count);
  for (std::size_t c = 0; c < mean.size(); ++c) {
    const double se = count > 1 ? std::sqrt(m2[c] / ((n - 1.0) * n)) : 0.0;
    out[c] = {mass * mean[c], mass * se, count, finite[c] != 0};
  }
  return out;
}

Estimate ball_volume_mc(const norms::NormSpec& spec, std::uint64_t n_samples, const RngStream& rng) {
  return mc_estimate([&spec](std::span<const Complex> x) { return norms::norm_eval(spec, x) < 1.0 ? 1.0 : 0.0; },
                     BoxSampler(static_cast<std::size_t>(spec.k())), n_samples, rng);
}

}  // namespace hartogs::sampling
