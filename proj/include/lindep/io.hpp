#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lindep/detector.hpp"

namespace lindep::io {

using json = nlohmann::ordered_json;

// "p", "-p" or "p/q" with q > 0 after canonicalization; rejects q = 0
Rat parse_rational(const std::string& s);
std::string to_string(const Rat& r);
std::string to_string(const Int& n);

struct JobSpec {
    std::string mode; // ec-detect | mul-detect | witness | local-report | torsion

    ecq::CurveQ curve;
    ecq::PointQ target;               // ec-detect
    std::vector<ecq::PointQ> gens;    // ec-detect
    std::vector<ecq::PointQ> points;  // witness / local-report (index 0 = target)

    Rat x;                            // mul-detect
    std::vector<Rat> mul_gens;        // mul-detect

    detect::WitnessQuery query;       // witness
    std::uint64_t prime = 0;          // local-report

    detect::DetectorConfig config;

    bool operator==(const JobSpec& o) const;
};

// Validates everything it touches: modes, field presence, rationals in lowest
// terms, curve membership of every point (exact arithmetic). Errors carry the
// offending field path.
JobSpec parse_job(const json& doc);
json emit_job(const JobSpec& job);

struct RunResult {
    int exit_code = 0;
    json document;     // the machine-readable result (stdout)
    std::string human; // one-paragraph summary (stderr)
};

// Execute a validated job. with_timing controls the `timing` field of the
// output document; wall-clock time always appears in the human summary.
RunResult run_job(const JobSpec& job, bool with_timing = false);

} // namespace lindep::io
