#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "kobalab/bound.hpp"
#include "kobalab/lab.hpp"
#include "kobalab/sibony.hpp"

namespace kobalab {

using Json = nlohmann::json;

/// Complex numbers are [re, im]; points are arrays of those.
Json to_json(Complex c);
Json to_json(const CPoint& p);
Json to_json(const DomainSpec& d);
Json to_json(const AnalyticDisc& d);
Json to_json(const ContainmentCertificate& c);
Json to_json(const Bound& b);
Json to_json(const Chain& c);
Json to_json(const CandidateFunction& c);
Json to_json(const AdmissibilityReport& r);
Json to_json(const SeriesFit& f);
Json to_json(const Report& r);

/// Writes to_json(report) with two-space indentation; throws Error naming the path on I/O failure.
void write_report_json(const std::string& path, const Report& report);

}  // namespace kobalab
