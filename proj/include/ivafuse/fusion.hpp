#pragma once

#include "ivafuse/dataio.hpp"
#include "ivafuse/iva.hpp"
#include "ivafuse/multiset.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ivafuse::fusion {

enum class Mode { Single, Regular, Ica, Iva };

/// How several aligned feature tables become one regression input.
struct Spec {
  Mode mode = Mode::Iva;
  std::string single_name;  // table used by Mode::Single
  Index order = 10;         // PCA order P per dataset (ICA/IVA)
  bool whiten = true;
  IvaOptions iva;
};

/// "regular", "ica", "iva" or "single:<table>".
Spec parse_mode(const std::string& text, Spec base = {});
std::string mode_name(const Spec& spec);

/// A fusion transform fitted on a set of training columns.
struct Model {
  Spec spec;
  std::vector<std::size_t> tables;  // indices of participating tables
  std::vector<Reducer> reducers;    // ICA/IVA only
  std::optional<DemixingSet> demixing;

  Index output_dim(std::span<const FeatureTable> all) const;
};

/// Fits the stage-2 transform on `train` columns only.
Model fit(std::span<const FeatureTable> tables, const std::vector<Index>& train, const Spec& spec);

/// Features (dim x |columns|) for the given columns using a fitted model.
Matrix apply(const Model& model, std::span<const FeatureTable> tables, const std::vector<Index>& columns);

/// Feature labels of the fused representation.
std::vector<std::string> feature_labels(const Model& model, std::span<const FeatureTable> tables);

}  // namespace ivafuse::fusion
