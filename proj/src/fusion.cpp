#include "ivafuse/fusion.hpp"

namespace ivafuse::fusion {

Spec parse_mode(const std::string& text, Spec base) {
  if (text == "regular") {
    base.mode = Mode::Regular;
  } else if (text == "ica") {
    base.mode = Mode::Ica;
  } else if (text == "iva") {
    base.mode = Mode::Iva;
  } else if (text.rfind("single:", 0) == 0 && text.size() > 7) {
    base.mode = Mode::Single;
    base.single_name = text.substr(7);
  } else {
    throw Error("unknown fusion mode \"" + text + "\" (expected regular, ica, iva or single:<name>)");
  }
  return base;
}

std::string mode_name(const Spec& spec) {
  switch (spec.mode) {
    case Mode::Single: return "single:" + spec.single_name;
    case Mode::Regular: return "regular";
    case Mode::Ica: return "ica";
    case Mode::Iva: return "iva";
  }
  return "?";
}

namespace {

Matrix gather(const FeatureTable& t, const std::vector<Index>& columns) {
  Matrix out(t.dim(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.col(static_cast<Index>(j)) = t.data.col(columns[j]);
  return out;
}

}  // namespace

Index Model::output_dim(std::span<const FeatureTable> all) const {
  if (spec.mode == Mode::Ica || spec.mode == Mode::Iva) {
    return spec.order * static_cast<Index>(tables.size());
  }
  Index d = 0;
  for (auto k : tables) d += all[k].dim();
  return d;
}

Model fit(std::span<const FeatureTable> tables, const std::vector<Index>& train, const Spec& spec) {
  if (tables.empty()) throw Error("fusion: no feature tables");
  Model m;
  m.spec = spec;
  if (spec.mode == Mode::Single) {
    for (std::size_t k = 0; k < tables.size(); ++k) {
      if (tables[k].name == spec.single_name) m.tables.push_back(k);
    }
    if (m.tables.size() != 1) throw Error("fusion: no unique table named \"" + spec.single_name + "\"");
    return m;
  }
  for (std::size_t k = 0; k < tables.size(); ++k) m.tables.push_back(k);
  if (spec.mode == Mode::Regular) return m;

  std::vector<Matrix> slices;
  std::vector<std::string> names;
  for (auto k : m.tables) {
    const Matrix x = gather(tables[k], train);
    Reducer r = multiset::fit_reducer(x, spec.order, spec.whiten, tables[k].name);
    r.feature_labels = tables[k].features;
    slices.push_back(multiset::apply_reducer(r, x));
    names.push_back(tables[k].name);
    m.reducers.push_back(std::move(r));
  }
  const MultisetTensor tensor = multiset::make_tensor(std::move(slices), std::move(names));
  m.demixing = spec.mode == Mode::Iva ? iva::iva_l(tensor, spec.iva) : iva::ica_mode(tensor, spec.iva);
  return m;
}

Matrix apply(const Model& model, std::span<const FeatureTable> tables, const std::vector<Index>& columns) {
  switch (model.spec.mode) {
    case Mode::Single:
      return gather(tables[model.tables.front()], columns);
    case Mode::Regular: {
      Matrix out(model.output_dim(tables), static_cast<Index>(columns.size()));
      Index at = 0;
      for (auto k : model.tables) {
        out.middleRows(at, tables[k].dim()) = gather(tables[k], columns);
        at += tables[k].dim();
      }
      return out;
    }
    case Mode::Ica:
    case Mode::Iva: {
      std::vector<Matrix> y;
      for (std::size_t i = 0; i < model.tables.size(); ++i) {
        const Matrix xhat = multiset::apply_reducer(model.reducers[i], gather(tables[model.tables[i]], columns));
        y.push_back(model.demixing->W[i] * xhat);
      }
      return multiset::scv_concat(y);
    }
  }
  return {};
}

std::vector<std::string> feature_labels(const Model& model, std::span<const FeatureTable> tables) {
  std::vector<std::string> labels;
  switch (model.spec.mode) {
    case Mode::Single:
      return tables[model.tables.front()].features;
    case Mode::Regular:
      for (auto k : model.tables) {
        for (const auto& f : tables[k].features) labels.push_back(tables[k].name + ":" + f);
      }
      return labels;
    case Mode::Ica:
    case Mode::Iva:
      for (Index p = 0; p < model.spec.order; ++p) {
        for (auto k : model.tables) labels.push_back("scv" + std::to_string(p + 1) + ":" + tables[k].name);
      }
      return labels;
  }
  return labels;
}

}  // namespace ivafuse::fusion
