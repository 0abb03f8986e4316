#include "aoisim/policy.hpp"

#include <cmath>
#include <utility>

namespace aoisim {
namespace {

// Attempt once per unit-spaced epoch; keep silent when the battery is empty.
class BuPolicy final : public PolicyDriver {
 public:
  double next_scheduled() const override { return static_cast<double>(next_epoch_); }

  void on_scheduled(PathContext& ctx, double t) override {
    const std::int64_t n = next_epoch_++;
    if (ctx.battery() >= 1) {
      ctx.attempt(t, n, 1);
    } else {
      ctx.skip_no_energy(t, n);
    }
  }

 private:
  std::int64_t next_epoch_ = 1;
};

// Epochs spaced 1/p; retransmit at the same instant until a success or an
// empty battery.
class BurPolicy final : public PolicyDriver {
 public:
  explicit BurPolicy(double p) : p_(p) {}

  double next_scheduled() const override {
    return static_cast<double>(next_epoch_) / p_;
  }

  void on_scheduled(PathContext& ctx, double t) override {
    const std::int64_t n = next_epoch_++;
    if (ctx.battery() < 1) {
      ctx.skip_no_energy(t, n);
      return;
    }
    for (int k = 1; ctx.battery() >= 1; ++k) {
      if (ctx.attempt(t, n, k)) break;
    }
  }

 private:
  double p_;
  std::int64_t next_epoch_ = 1;
};

// One attempt at every energy arrival; the deposit guarantees feasibility.
class GreedyPolicy final : public PolicyDriver {
 public:
  double next_scheduled() const override { return kNever; }
  void on_scheduled(PathContext&, double) override {}

  void on_arrival(PathContext& ctx, double t) override {
    ctx.attempt(t, ++arrival_ordinal_, 1);
  }

 private:
  std::int64_t arrival_ordinal_ = 0;
};

// BU with energy removal. Stage one runs BU until the post-attempt battery
// first hits zero, or unconditionally at cycle time T0 (deplete). Stage two
// runs BU until the first success that leaves the battery at one or more;
// the battery is then reduced to exactly one and the cycle restarts there.
// The stage-two success trigger is a simulator-level observation (the
// physical policy has no feedback); the measured age is unaffected.
class BuErPolicy final : public PolicyDriver {
 public:
  explicit BuErPolicy(double t0) : t0_(t0) {}

  double next_scheduled() const override {
    const double epoch_time = static_cast<double>(origin_epoch_ + next_rel_);
    if (stage1_) return std::min(epoch_time, deadline());
    return epoch_time;
  }

  void on_scheduled(PathContext& ctx, double t) override {
    if (stage1_ && deadline() < static_cast<double>(origin_epoch_ + next_rel_)) {
      // Removal deadline strictly before the next epoch. Ties go to the
      // epoch: the depletion happens just past T0.
      ctx.deplete(t);
      begin_stage2(ctx, t);
      return;
    }
    const std::int64_t n = origin_epoch_ + next_rel_;
    if (stage1_) {
      ctx.attempt(t, n, 1);  // stage-one epochs are always feasible
      if (ctx.battery() == 0) begin_stage2(ctx, t);
    } else {
      ++stage2_epochs_;
      if (ctx.battery() >= 1) {
        const bool success = ctx.attempt(t, n, 1);
        if (success && ctx.battery() >= 1) {
          ctx.reduce_to_one(t);
          ctx.mark_cycle_reset(t, stage2_epochs_);
          origin_epoch_ += next_rel_;
          next_rel_ = 0;
          stage1_ = true;
          stage2_epochs_ = 0;
        }
      } else {
        ctx.skip_no_energy(t, n);
      }
    }
    ++next_rel_;
  }

 private:
  double deadline() const { return static_cast<double>(origin_epoch_) + t0_; }

  void begin_stage2(PathContext& ctx, double t) {
    stage1_ = false;
    stage2_epochs_ = 0;
    ctx.mark_stage_boundary(t);
  }

  double t0_;
  std::int64_t origin_epoch_ = 0;  // cycle origin on the integer epoch grid
  std::int64_t next_rel_ = 1;      // next epoch, cycle-relative
  bool stage1_ = true;
  std::int64_t stage2_epochs_ = 0;
};

// BUR with energy removal. Stage one ends when an epoch burst leaves the
// battery empty, or at the first successful update at cycle time >= T0
// (which is followed by a depletion). Stage two ends at the first burst
// that succeeds with at least one unit remaining.
class BurErPolicy final : public PolicyDriver {
 public:
  BurErPolicy(double t0, double p) : t0_(t0), p_(p) {}

  double next_scheduled() const override {
    return static_cast<double>(origin_grid_ + next_rel_) / p_;
  }

  void on_scheduled(PathContext& ctx, double t) override {
    const std::int64_t n = origin_grid_ + next_rel_;
    if (stage1_) {
      if (ctx.battery() < 1) {
        throw EnergyCausalityError("BUR-ER: infeasible stage-one epoch");
      }
      bool success = false;
      for (int k = 1; ctx.battery() >= 1; ++k) {
        if (ctx.attempt(t, n, k)) {
          success = true;
          break;
        }
      }
      const double cycle_time = static_cast<double>(next_rel_) / p_;
      if (ctx.battery() == 0) {
        begin_stage2(ctx, t);
      } else if (success && cycle_time >= t0_ - 1e-9) {
        ctx.deplete(t);
        begin_stage2(ctx, t);
      }
    } else {
      ++stage2_epochs_;
      if (ctx.battery() < 1) {
        ctx.skip_no_energy(t, n);
      } else {
        bool success = false;
        for (int k = 1; ctx.battery() >= 1; ++k) {
          if (ctx.attempt(t, n, k)) {
            success = true;
            break;
          }
        }
        if (success && ctx.battery() >= 1) {
          ctx.reduce_to_one(t);
          ctx.mark_cycle_reset(t, stage2_epochs_);
          origin_grid_ += next_rel_;
          next_rel_ = 0;
          stage1_ = true;
          stage2_epochs_ = 0;
        }
      }
    }
    ++next_rel_;
  }

 private:
  void begin_stage2(PathContext& ctx, double t) {
    stage1_ = false;
    stage2_epochs_ = 0;
    ctx.mark_stage_boundary(t);
  }

  double t0_;
  double p_;
  std::int64_t origin_grid_ = 0;  // cycle origin on the 1/p epoch grid
  std::int64_t next_rel_ = 1;
  bool stage1_ = true;
  std::int64_t stage2_epochs_ = 0;
};

// After each success, attempt at delays x_1, x_2, ... from the success until
// the next one. An attempt that finds the battery empty is skipped and
// retried at the next spacing step; when that step is not in the future the
// policy waits for the next arrival and attempts right after the deposit.
class ConstantRenewalPolicy final : public PolicyDriver {
 public:
  explicit ConstantRenewalPolicy(SpacingRule rule) : rule_(std::move(rule)) {}

  double next_scheduled() const override {
    return waiting_for_energy_ ? kNever : due_time();
  }

  void on_scheduled(PathContext& ctx, double t) override { run_due(ctx, t); }

  void on_arrival(PathContext& ctx, double t) override {
    if (waiting_for_energy_ && due_time() <= t) {
      waiting_for_energy_ = false;
      run_due(ctx, t);
    }
  }

 private:
  double due_time() const {
    return last_success_ + rule_.at(static_cast<std::size_t>(step_ + 1));
  }

  void run_due(PathContext& ctx, double t) {
    while (!waiting_for_energy_ && due_time() <= t) {
      if (ctx.battery() >= 1) {
        const bool success = ctx.attempt(t, success_count_, static_cast<int>(step_ + 1));
        if (success) {
          last_success_ = t;
          step_ = 0;
          ++success_count_;
        } else {
          ++step_;
        }
      } else {
        ctx.skip_no_energy(t, success_count_);
        ++step_;
        if (due_time() <= t) waiting_for_energy_ = true;
      }
    }
  }

  SpacingRule rule_;
  double last_success_ = 0.0;
  std::int64_t step_ = 0;           // non-successes since the last success
  std::int64_t success_count_ = 0;  // doubles as the channel epoch index
  bool waiting_for_energy_ = false;
};

}  // namespace

std::unique_ptr<PolicyDriver> make_policy(const PolicySpec& spec, double success_prob) {
  switch (spec.kind) {
    case PolicyKind::Bu:
      return std::make_unique<BuPolicy>();
    case PolicyKind::Bur:
      return std::make_unique<BurPolicy>(success_prob);
    case PolicyKind::Greedy:
      return std::make_unique<GreedyPolicy>();
    case PolicyKind::BuEr:
      return std::make_unique<BuErPolicy>(spec.t0.value());
    case PolicyKind::BurEr:
      return std::make_unique<BurErPolicy>(spec.t0.value(), success_prob);
    case PolicyKind::ConstantRenewal:
      return std::make_unique<ConstantRenewalPolicy>(spec.spacings.value());
  }
  throw std::invalid_argument("make_policy: unhandled policy kind");
}

}  // namespace aoisim
