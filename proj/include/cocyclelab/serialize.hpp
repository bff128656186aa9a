#pragma once

#include <string>

#include <json.hpp>

#include "cocyclelab/approximation.hpp"
#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/hyperbolicity.hpp"
#include "cocyclelab/spectrum.hpp"
#include "cocyclelab/subshift.hpp"
#include "cocyclelab/uniformity.hpp"

namespace cocyclelab::serialize {

using nlohmann::json;

// stable shortest-roundtrip formatting used by every CSV column
std::string format_double(double value);

json to_json(const SubshiftSpec& spec);
SubshiftSpec subshift_from_json(const json& j);

json to_json(const Mat2& m);
Mat2 mat2_from_json(const json& j);

json to_json(const LayeredSamplingFunction& f);
LayeredSamplingFunction sampling_from_json(const json& j);

json to_json(const LocallyConstantCocycle& cocycle);
LocallyConstantCocycle cocycle_from_json(const json& j, const Budget& budget = {});

json to_json(const hyperbolicity::UhCertificate& cert);
hyperbolicity::UhCertificate uh_certificate_from_json(const json& j);

json to_json(const hyperbolicity::SplittingSample& sample);
json to_json(const hyperbolicity::SpreadReport& report);

json to_json(const uniformity::UniformityReport& report);
json to_json(const uniformity::AvalancheCertificate& cert);
json to_json(const uniformity::AvalancheOutcome& outcome);
json to_json(const uniformity::OpennessReport& report);
json to_json(const std::vector<uniformity::EnergyClassification>& classes);

json to_json(const spectrum::BandSet& bands);
json to_json(const spectrum::SpectrumEstimate& estimate);
json to_json(const std::vector<spectrum::ApproximantLevel>& levels);
json to_json(const spectrum::SemicontinuityReport& report);

json to_json(const approximation::BlendedFamily& family);
json to_json(const approximation::ApproximationResult& result);
json to_json(const approximation::ConstructionResult& result);

// CSV bodies (header row, '.' decimals, LF endings)
std::string factors_csv(const FactorLanguage& language);
std::string frequency_csv(const FrequencyTable& table);
std::string boshernitzan_csv(const BoshernitzanProfile& profile);
std::string traces_csv(const std::vector<uniformity::ExponentTracePoint>& exponent_trace,
                       const std::vector<uniformity::VarTracePoint>& var_trace);
std::string energies_csv(const spectrum::SpectrumEstimate& estimate);
std::string bands_csv(const std::vector<spectrum::ApproximantLevel>& levels);

}  // namespace cocyclelab::serialize
