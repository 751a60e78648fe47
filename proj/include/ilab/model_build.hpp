#pragma once

// ModelDocument -> SurveyModel plus the observation scheme, target and
// process split the document names.

#include <memory>
#include <string>

#include "ilab/design_library.hpp"
#include "ilab/ignorance.hpp"
#include "ilab/model_document.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

struct BuiltModel {
  std::string name;
  std::shared_ptr<const SurveyModel> model;
  ObservationScheme scheme;
  std::string target = "mean_y1";
  std::string split_v = "(signal, design_variable)";
  std::string split_v_bar = "selection";
};

/// Engine errors raised while building (e.g. an infeasible stratified
/// allocation) are rethrown as DocumentError at the offending key.
BuiltModel build_model(const ModelDocument& d);

DesignKernel build_design(const DesignTerm& t, const Population& population);
ObservationScheme build_scheme(const std::string& scheme, bool unordered);

/// The split named by the model over the family's world space.
ProcessSplit build_split(const BuiltModel& b, const Family& f, OmegaMode mode = OmegaMode::Product);

}  // namespace ilab
