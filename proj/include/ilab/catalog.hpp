#pragma once

// Built-in example models, stored as canonical model files.

#include <string>
#include <vector>

#include "ilab/model_build.hpp"

namespace ilab {

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::string text;  // canonical model-file text
};

const std::vector<CatalogEntry>& example_catalog();
const CatalogEntry& catalog_entry(const std::string& name);
BuiltModel catalog_model(const std::string& name);

}  // namespace ilab
