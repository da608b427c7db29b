#include "jurymech/model.hpp"

namespace jurymech {

RationalModelParams to_rational(const ModelParams& params) {
  if (const auto& pay = params.payoffs()) {
    return RationalModelParams::from_payoffs(params.agents(), rationalize(params.prior_alpha()),
                                             rationalize(params.p_alpha()), rationalize(params.p_beta()),
                                             rationalize(pay->V_alpha), rationalize(pay->V_beta),
                                             rationalize(pay->U_alpha), rationalize(pay->U_beta));
  }
  return RationalModelParams::from_thresholds(params.agents(), rationalize(params.prior_alpha()),
                                              rationalize(params.p_alpha()), rationalize(params.p_beta()),
                                              rationalize(params.t_P()), rationalize(params.t_J()));
}

ModelParams to_double_params(const RationalModelParams& params) {
  if (const auto& pay = params.payoffs()) {
    return ModelParams::from_payoffs(params.agents(), to_double(params.prior_alpha()),
                                     to_double(params.p_alpha()), to_double(params.p_beta()),
                                     to_double(pay->V_alpha), to_double(pay->V_beta), to_double(pay->U_alpha),
                                     to_double(pay->U_beta));
  }
  return ModelParams::from_thresholds(params.agents(), to_double(params.prior_alpha()),
                                      to_double(params.p_alpha()), to_double(params.p_beta()),
                                      to_double(params.t_P()), to_double(params.t_J()));
}

}  // namespace jurymech
