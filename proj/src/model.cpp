#include "perceptfe/model.hpp"

#include <algorithm>

#include "perceptfe/errors.hpp"

namespace pfe {

const char* to_string(Outcome o) {
  return o == Outcome::Searched ? "searched" : "arrested";
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::LinearFE: return "linear_fe";
    case Estimator::FeglmLogit: return "feglm_logit";
    case Estimator::ConditionalLogit: return "conditional_logit";
  }
  return "?";
}

const char* to_string(FeDim d) {
  switch (d) {
    case FeDim::Driver: return "driver";
    case FeDim::Officer: return "officer";
    case FeDim::County: return "county";
  }
  return "?";
}

bool ModelSpec::absorbs(FeDim d) const {
  return std::find(fe_dims.begin(), fe_dims.end(), d) != fe_dims.end();
}

void ModelSpec::validate() const {
  if (estimator == Estimator::ConditionalLogit) {
    if (!fe_dims.empty())
      throw SpecificationError(
          "conditional_logit stratifies on driver and admits no absorbed dimensions");
  } else {
    if (fe_dims.empty() || fe_dims.front() != FeDim::Driver)
      throw SpecificationError("driver must be the first absorbed dimension");
    if (estimator == Estimator::FeglmLogit && fe_dims.size() != 1)
      throw SpecificationError("feglm_logit absorbs only the driver dimension; "
                               "other categoricals enter as dummy columns");
  }
  for (size_t i = 0; i < fe_dims.size(); ++i)
    for (size_t j = i + 1; j < fe_dims.size(); ++j)
      if (fe_dims[i] == fe_dims[j]) throw SpecificationError("duplicate absorbed dimension");
  if (absorbs(FeDim::Officer) && !(controls & kControlOfficer))
    throw SpecificationError("absorbing officer requires the officer control");
  if (absorbs(FeDim::County) && !(controls & kControlLocationTime))
    throw SpecificationError("absorbing county requires the location/time controls");
}

}  // namespace pfe
