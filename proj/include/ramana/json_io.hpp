#ifndef RAMANA_JSON_IO_HPP
#define RAMANA_JSON_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "ramana/duals.hpp"
#include "ramana/facial.hpp"

namespace ramana {

using Json = nlohmann::json;

// Schema "facial-certificate/1": order, face rank, block sizes, the chain
// Y_1..Y_k (upper triangles), and the accumulated transform (T row-major
// plus its composition log). Numbers survive a dump/parse cycle exactly.
Json to_json(const FacialCertificate& cert);
FacialCertificate certificate_from_json(const Json& j);

// Schema "ramana-solution/1": levels 1..n+1 with U, V and an optional
// (W, beta) witness each; null witnesses fall back to the algebraic
// membership test during verification.
Json to_json(const RamanaSolution& sol);
RamanaSolution ramana_solution_from_json(const Json& j);

// Schema "analysis-report/1": the GapReport plus the instance digest.
// NaN (= "value unavailable") serializes as null.
Json analysis_report_json(const GapReport& rep, const std::string& digest);
GapReport analysis_report_from_json(const Json& j,
                                    std::string* digest = nullptr);

// Structural check of an analysis-report document: returns one message per
// violated schema requirement, empty when the document conforms.
std::vector<std::string> validate_analysis_report(const Json& j);

// FNV-1a (64-bit) over the instance dimensions and entries at full
// precision; stable identity for reports and fixtures.
std::string instance_digest(const SdpInstance& inst);

// Uniform text form: two-space indentation, trailing newline.
std::string dump_json(const Json& j);
// Wraps the library parser; failures surface as ParseError with the line
// computed from the byte offset.
Json parse_json(const std::string& text);
Json parse_json_file(const std::string& path);

}  // namespace ramana

#endif
