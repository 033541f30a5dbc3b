#pragma once

#include "rfx/mdp.hpp"

namespace rfx {

// What the exploration phase is allowed to see: the known feature maps and
// sampled transitions. No rewards and no true parameter pass through here.
class ExplorationEnv {
 public:
  explicit ExplorationEnv(const LinearMixtureMdp& mdp) : mdp_(&mdp) {}

  int num_states() const { return mdp_->num_states(); }
  int num_actions() const { return mdp_->num_actions(); }
  int horizon() const { return mdp_->horizon(); }
  int dim() const { return mdp_->dim(); }
  double param_bound() const { return mdp_->param_bound(); }
  FeatureView features() const { return mdp_->features(); }

  int sample_initial(SplitRng& rng) const { return mdp_->sample_initial(rng); }
  int sample_transition(int s, int a, SplitRng& rng) const {
    return mdp_->sample_transition(s, a, rng);
  }

 private:
  const LinearMixtureMdp* mdp_;
};

}  // namespace rfx
