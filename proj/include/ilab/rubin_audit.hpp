#pragma once

// Exact audits of Rubin's (1976) theorems on models in the missing-data
// shape: a signal, a without-replacement selection listed in label order
// (equivalently the response indicator) and an observation revealing the
// sampled values and the indicator.

#include <memory>
#include <string>
#include <vector>

#include "ilab/ignorance.hpp"
#include "ilab/inference_check.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

struct TheoremCheck {
  std::string theorem;  // "6.1", "6.2", "6.3", "7.1", "7.2"
  bool iff = false;     // 6.2 and 6.3 are stated as equivalences
  bool hypotheses = false;
  bool conclusion = false;
  std::string detail;

  /// Implications fail only on true hypotheses with a false conclusion;
  /// equivalences fail whenever the two sides differ.
  bool sound() const { return iff ? hypotheses == conclusion : (!hypotheses || conclusion); }
};

struct RubinRecord {
  Value x;
  bool mar = false;
  bool oar = false;
  bool distinct = false;
  std::vector<TheoremCheck> theorems;
};

/// Throws NotRubinShape when the model is not in the missing-data shape.
void require_rubin_shape(const Family& m, const ObservationScheme& s);

RubinRecord rubin_theorem_audit(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                                const Value& x);

struct RubinJob {
  std::string name;
  std::shared_ptr<const SurveyModel> model;
  ObservationScheme scheme;
};

struct RubinAudit {
  std::string name;
  std::vector<RubinRecord> records;  // one per observation of positive mass
  std::size_t counterexamples(const std::string& theorem = "") const;
};

/// Audits every x of positive mass under the job's model.
RubinAudit audit_all_x(const RubinJob& job);

/// The exhaustive family used by the soundness sweep: N = 2, iid Bernoulli
/// signal with theta from {1/3, 1/2, 2/3}, theta and phi grids of size <= 2,
/// each phi point carrying one of six indicator kernels, Gamma the product or
/// (for equal sizes) the diagonal.
std::vector<RubinJob> rubin_sweep_family();
/// Names of the six kernels in the catalog.
std::vector<std::string> rubin_kernel_catalog();

}  // namespace ilab
