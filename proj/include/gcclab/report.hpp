#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gcclab/construct.hpp"
#include "gcclab/covering.hpp"
#include "gcclab/evolution.hpp"
#include "gcclab/spectral.hpp"

namespace gcclab::report {

using nlohmann::ordered_json;

std::string version();

// Non-finite values serialize as the strings "inf", "-inf", "nan".
ordered_json number(double v);

ordered_json to_json(const spectral::GridSpec& g);
ordered_json to_json(const spectral::SpectralReport& r);
ordered_json to_json(const evolution::GramianReport& r);
ordered_json to_json(const evolution::LinearFit& f);
ordered_json to_json(const covering::EffectiveCovering& c);
ordered_json to_json(const covering::CoverReport& c);
ordered_json to_json(const covering::CertifyReport& c);
ordered_json to_json(const construct::MinorantChecks& c);
ordered_json to_json(const FamilyDescriptor& f);

// Fixed-precision decimal for CSV cells.
std::string cell(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

void write_text(const std::string& path, const std::string& text);

}  // namespace gcclab::report
