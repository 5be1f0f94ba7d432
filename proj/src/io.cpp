#include "lindep/io.hpp"

#include <chrono>
#include <sstream>

namespace lindep::io {

// ---------------------------------------------------------------- scalars

Rat parse_rational(const std::string& s) {
    if (s.empty()) throw InvalidInputError("empty rational literal");
    std::string t = s;
    if (auto pos = t.find('/'); pos != std::string::npos) {
        std::string den = t.substr(pos + 1);
        if (den.empty() || den.find_first_not_of("0123456789") != std::string::npos)
            throw InvalidInputError("malformed rational '" + s + "'");
        if (Int(den) == 0) throw InvalidInputError("zero denominator in '" + s + "'");
    }
    try {
        Rat r(t);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw InvalidInputError("malformed rational '" + s + "'");
    }
}

std::string to_string(const Rat& r) {
    std::string num = r.get_num().get_str();
    if (r.get_den() == 1) return num;
    return num + "/" + r.get_den().get_str();
}

std::string to_string(const Int& n) { return n.get_str(); }

namespace {

Int json_int(const json& v, const std::string& path) {
    try {
        if (v.is_number_integer()) return Int(static_cast<long>(v.get<long long>()));
        if (v.is_string()) return Int(v.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
    throw InvalidInputError(path + ": expected an integer (number or decimal string)");
}

Rat json_rational(const json& v, const std::string& path) {
    if (v.is_number_integer()) return Rat(Int(static_cast<long>(v.get<long long>())));
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const InvalidInputError& err) {
            throw InvalidInputError(path + ": " + err.what());
        }
    }
    throw InvalidInputError(path + ": expected a rational (number or string)");
}

std::uint64_t json_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
        return v.get<std::uint64_t>();
    if (v.is_string()) {
        Int n = json_int(v, path);
        if (n >= 0 && n.fits_ulong_p()) return n.get_ui();
    }
    throw InvalidInputError(path + ": expected a nonnegative machine integer");
}

ecq::CurveQ parse_curve(const json& v, const std::string& path) {
    Int a = 0, b = 0;
    if (v.is_object()) {
        if (!v.contains("b")) throw InvalidInputError(path + ".b: missing");
        b = json_int(v.at("b"), path + ".b");
        if (v.contains("a")) a = json_int(v.at("a"), path + ".a");
    } else if (v.is_array() && v.size() == 2) {
        a = json_int(v.at(0), path + "[0]");
        b = json_int(v.at(1), path + "[1]");
    } else if (v.is_string() || v.is_number_integer()) {
        // shorthand: "b" means y^2 = x^3 + b; "a,b" gives both coefficients
        std::string s = v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
        if (auto pos = s.find(','); pos != std::string::npos) {
            a = json_int(json(s.substr(0, pos)), path);
            b = json_int(json(s.substr(pos + 1)), path);
        } else {
            b = json_int(json(s), path);
        }
    } else {
        throw InvalidInputError(path + ": expected {a,b}, [a,b] or a shorthand string");
    }
    try {
        return ecq::CurveQ(a, b);
    } catch (const InvalidInputError& err) {
        throw InvalidInputError(path + ": " + err.what());
    }
}

ecq::PointQ parse_point(const json& v, const ecq::CurveQ& e, const std::string& path) {
    ecq::PointQ p;
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        p = ecq::PointQ::infinity_point();
    } else if (v.is_object()) {
        if (!v.contains("x") || !v.contains("y"))
            throw InvalidInputError(path + ": point object needs x and y");
        p = ecq::PointQ::affine(json_rational(v.at("x"), path + ".x"),
                                json_rational(v.at("y"), path + ".y"));
    } else if (v.is_array() && v.size() == 2) {
        p = ecq::PointQ::affine(json_rational(v.at(0), path + "[0]"),
                                json_rational(v.at(1), path + "[1]"));
    } else {
        throw InvalidInputError(path + ": expected {x,y}, [x,y] or \"inf\"");
    }
    if (!ecq::on_curve(e, p))
        throw InvalidInputError(path + ": point (" + to_string(p.x) + ", " + to_string(p.y) +
                                ") does not satisfy the curve equation");
    return p;
}

void parse_config(const json& doc, detect::DetectorConfig& cfg) {
    if (!doc.contains("config")) return;
    const json& c = doc.at("config");
    if (!c.is_object()) throw InvalidInputError("config: expected an object");
    if (c.contains("prime_bound")) cfg.prime_bound = json_u64(c.at("prime_bound"), "config.prime_bound");
    if (c.contains("stability_window"))
        cfg.stability_window = static_cast<unsigned>(json_u64(c.at("stability_window"), "config.stability_window"));
    if (c.contains("coeff_bound")) cfg.coeff_bound = json_int(c.at("coeff_bound"), "config.coeff_bound");
    if (c.contains("saturation_bound"))
        cfg.saturation_bound = static_cast<unsigned>(json_u64(c.at("saturation_bound"), "config.saturation_bound"));
    if (c.contains("seed")) cfg.seed = json_u64(c.at("seed"), "config.seed");
    if (c.contains("max_skipped_fraction")) {
        if (!c.at("max_skipped_fraction").is_number())
            throw InvalidInputError("config.max_skipped_fraction: expected a number");
        cfg.max_skipped_fraction = c.at("max_skipped_fraction").get<double>();
    }
    if (c.contains("threads"))
        cfg.worker_count = static_cast<int>(json_u64(c.at("threads"), "config.threads"));
    cfg.validate();
}

} // namespace

bool JobSpec::operator==(const JobSpec& o) const {
    auto cfg_eq = [](const detect::DetectorConfig& a, const detect::DetectorConfig& b) {
        return a.prime_bound == b.prime_bound && a.stability_window == b.stability_window &&
               a.coeff_bound == b.coeff_bound && a.saturation_bound == b.saturation_bound &&
               a.seed == b.seed && a.max_skipped_fraction == b.max_skipped_fraction &&
               a.worker_count == b.worker_count;
    };
    auto query_eq = [](const detect::WitnessQuery& a, const detect::WitnessQuery& b) {
        return a.set_i == b.set_i && a.set_j == b.set_j && a.l == b.l && a.m == b.m &&
               a.prime_bound == b.prime_bound;
    };
    return mode == o.mode && curve.a == o.curve.a && curve.b == o.curve.b && target == o.target &&
           gens == o.gens && points == o.points && x == o.x && mul_gens == o.mul_gens &&
           query_eq(query, o.query) && prime == o.prime && cfg_eq(config, o.config);
}

JobSpec parse_job(const json& doc) {
    if (!doc.is_object()) throw InvalidInputError("job: expected a JSON object");
    if (!doc.contains("mode")) throw InvalidInputError("mode: missing");
    JobSpec job;
    job.mode = doc.at("mode").get<std::string>();
    parse_config(doc, job.config);

    auto need = [&](const char* field) -> const json& {
        if (!doc.contains(field)) throw InvalidInputError(std::string(field) + ": missing");
        return doc.at(field);
    };

    if (job.mode == "ec-detect") {
        job.curve = parse_curve(need("curve"), "curve");
        job.target = parse_point(need("target"), job.curve, "target");
        const json& gens = need("gens");
        if (!gens.is_array()) throw InvalidInputError("gens: expected an array");
        for (std::size_t i = 0; i < gens.size(); ++i)
            job.gens.push_back(parse_point(gens.at(i), job.curve, "gens[" + std::to_string(i) + "]"));
    } else if (job.mode == "mul-detect") {
        job.x = json_rational(need("x"), "x");
        const json& gens = need("gens");
        if (!gens.is_array()) throw InvalidInputError("gens: expected an array");
        for (std::size_t i = 0; i < gens.size(); ++i)
            job.mul_gens.push_back(json_rational(gens.at(i), "gens[" + std::to_string(i) + "]"));
    } else if (job.mode == "witness") {
        job.curve = parse_curve(need("curve"), "curve");
        const json& pts = need("points");
        if (!pts.is_array()) throw InvalidInputError("points: expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i)
            job.points.push_back(parse_point(pts.at(i), job.curve, "points[" + std::to_string(i) + "]"));
        const json& q = need("query");
        for (const json& v : q.value("I", json::array()))
            job.query.set_i.push_back(static_cast<unsigned>(json_u64(v, "query.I")));
        for (const json& v : q.value("J", json::array()))
            job.query.set_j.push_back(static_cast<unsigned>(json_u64(v, "query.J")));
        job.query.l = json_u64(q.contains("l") ? q.at("l") : json(2), "query.l");
        job.query.m = static_cast<unsigned>(json_u64(q.contains("M") ? q.at("M") : json(1), "query.M"));
        job.query.prime_bound =
            q.contains("prime_bound") ? json_u64(q.at("prime_bound"), "query.prime_bound")
                                      : job.config.prime_bound;
        job.query.validate(job.points.size());
    } else if (job.mode == "local-report") {
        job.curve = parse_curve(need("curve"), "curve");
        const json& pts = need("points");
        if (!pts.is_array() || pts.empty())
            throw InvalidInputError("points: expected a nonempty array (points[0] is the target)");
        for (std::size_t i = 0; i < pts.size(); ++i)
            job.points.push_back(parse_point(pts.at(i), job.curve, "points[" + std::to_string(i) + "]"));
        job.prime = json_u64(need("prime"), "prime");
    } else if (job.mode == "torsion") {
        job.curve = parse_curve(need("curve"), "curve");
    } else {
        throw InvalidInputError("mode: unknown mode '" + job.mode + "'");
    }
    return job;
}

namespace {

json emit_point(const ecq::PointQ& p) {
    if (p.infinity) return "inf";
    return json{{"x", to_string(p.x)}, {"y", to_string(p.y)}};
}

// worker_count is echoed only in job documents: results are independent of
// it, and the output document must stay byte-identical across thread counts
json emit_config(const detect::DetectorConfig& c, bool include_threads) {
    json out{{"prime_bound", c.prime_bound},
             {"stability_window", c.stability_window},
             {"coeff_bound", to_string(c.coeff_bound)},
             {"saturation_bound", c.saturation_bound},
             {"seed", c.seed},
             {"max_skipped_fraction", c.max_skipped_fraction}};
    if (include_threads) out["threads"] = c.worker_count;
    return out;
}

} // namespace

json emit_job(const JobSpec& job) {
    json doc;
    doc["mode"] = job.mode;
    if (job.mode != "mul-detect")
        doc["curve"] = json{{"a", to_string(job.curve.a)}, {"b", to_string(job.curve.b)}};
    if (job.mode == "ec-detect") {
        doc["target"] = emit_point(job.target);
        json gens = json::array();
        for (const auto& g : job.gens) gens.push_back(emit_point(g));
        doc["gens"] = gens;
    } else if (job.mode == "mul-detect") {
        doc["x"] = to_string(job.x);
        json gens = json::array();
        for (const auto& g : job.mul_gens) gens.push_back(to_string(g));
        doc["gens"] = gens;
    } else if (job.mode == "witness") {
        json pts = json::array();
        for (const auto& p : job.points) pts.push_back(emit_point(p));
        doc["points"] = pts;
        doc["query"] = json{{"I", job.query.set_i},
                            {"J", job.query.set_j},
                            {"l", job.query.l},
                            {"M", job.query.m},
                            {"prime_bound", job.query.prime_bound}};
    } else if (job.mode == "local-report") {
        json pts = json::array();
        for (const auto& p : job.points) pts.push_back(emit_point(p));
        doc["points"] = pts;
        doc["prime"] = job.prime;
    }
    doc["config"] = emit_config(job.config, true);
    return doc;
}

// ---------------------------------------------------------------- output document

namespace {

json coeffs_json(const std::vector<Int>& coeffs) {
    json a = json::array();
    for (const Int& c : coeffs) a.push_back(to_string(c));
    return a;
}

json membership_json(const ecfp::LocalMembership& lm) {
    json gens = json::array();
    for (const auto& [i, j] : lm.gen_coords) gens.push_back(json::array({i, j}));
    json out{{"prime", lm.prime},
             {"d1", lm.d1},
             {"d2", lm.d2},
             {"solvable", lm.solvable},
             {"target_coords", json::array({lm.target_coords.first, lm.target_coords.second})},
             {"gen_coords", gens}};
    if (lm.solvable) {
        out["offset"] = coeffs_json(lm.offset);
        json basis = json::array();
        for (std::size_t i = 0; i < lm.basis.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < lm.basis.cols(); ++j) row.push_back(to_string(lm.basis(i, j)));
            basis.push_back(row);
        }
        out["lattice_basis"] = basis;
        out["modulus"] = lm.modulus;
    }
    return out;
}

json skipped_json(const std::vector<detect::SkippedPrime>& skipped) {
    json rows = json::array();
    for (const auto& s : skipped) rows.push_back(json{{"prime", s.prime}, {"reason", s.reason}});
    return json{{"count", skipped.size()}, {"primes", rows}};
}

json trace_json(const std::vector<detect::StabilityEntry>& trace) {
    json rows = json::array();
    for (const auto& t : trace) {
        json row{{"prime", t.prime}};
        row["candidate"] = t.candidate ? coeffs_json(*t.candidate) : json(nullptr);
        rows.push_back(row);
    }
    return rows;
}

// every verdict-bearing field is present in every mode, null when inapplicable
json base_document(const JobSpec& job) {
    json doc;
    doc["schema"] = "lindep/v1";
    doc["mode"] = job.mode;
    doc["verdict"] = nullptr;
    doc["coefficients"] = nullptr;
    doc["saturation_multiplier"] = nullptr;
    doc["witness_prime"] = nullptr;
    doc["independence_proof"] = nullptr;
    doc["inconclusive_reason"] = nullptr;
    doc["witness_detail"] = nullptr;
    doc["primes_processed"] = nullptr;
    doc["primes_skipped"] = nullptr;
    doc["stability_trace"] = nullptr;
    doc["torsion"] = nullptr;
    doc["witness_search"] = nullptr;
    doc["local_report"] = nullptr;
    doc["notes"] = json::array();
    doc["seed"] = job.config.seed;
    doc["config"] = emit_config(job.config, false);
    doc["timing"] = nullptr;
    return doc;
}

void fill_detection(json& doc, const detect::Detection& det) {
    const detect::Verdict& v = det.verdict;
    doc["verdict"] = detect::to_string(v.kind);
    switch (v.kind) {
        case detect::VerdictKind::dependent:
            doc["coefficients"] = coeffs_json(v.coeffs);
            break;
        case detect::VerdictKind::saturation_needed:
            doc["coefficients"] = coeffs_json(v.coeffs);
            doc["saturation_multiplier"] = to_string(v.saturation_multiplier);
            break;
        case detect::VerdictKind::independent:
            doc["independence_proof"] = detect::to_string(v.proof);
            if (v.proof == detect::IndependenceProof::witness_prime) {
                doc["witness_prime"] = v.witness_prime;
                if (v.witness_local) doc["witness_detail"] = membership_json(*v.witness_local);
            }
            break;
        case detect::VerdictKind::inconclusive:
            doc["inconclusive_reason"] = detect::to_string(v.reason);
            break;
    }
    doc["primes_processed"] = det.report.primes_processed;
    doc["primes_skipped"] = skipped_json(det.report.skipped);
    doc["stability_trace"] = trace_json(det.report.stability_trace);
    for (const auto& n : det.report.notes) doc["notes"].push_back(n);
}

std::string human_detection(const JobSpec& job, const detect::Detection& det) {
    std::ostringstream os;
    const detect::Verdict& v = det.verdict;
    const bool mul = job.mode == "mul-detect";
    os << job.mode << ": " << detect::to_string(v.kind);
    switch (v.kind) {
        case detect::VerdictKind::dependent: {
            if (v.coeffs.empty()) {
                os << (mul ? ": x = 1 (empty product)" : ": P = 0 (empty sum)");
            } else if (mul) {
                os << ": x =";
                for (std::size_t i = 0; i < v.coeffs.size(); ++i)
                    os << (i ? " * " : " ") << "g" << (i + 1) << "^(" << v.coeffs[i].get_str()
                       << ")";
            } else {
                os << ": P =";
                for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
                    if (i && v.coeffs[i] >= 0) os << " +";
                    os << " " << v.coeffs[i].get_str() << "*P" << (i + 1);
                }
            }
            os << " (verified exactly)";
            break;
        }
        case detect::VerdictKind::saturation_needed:
            os << ": a=" << v.saturation_multiplier.get_str()
               << " with a*P in the subgroup; SOUNDNESS ALARM, see notes";
            break;
        case detect::VerdictKind::independent:
            if (v.proof == detect::IndependenceProof::witness_prime)
                os << ": witness prime " << v.witness_prime
                   << " (local membership unsolvable; re-verified)";
            else
                os << ": target is torsion, the generated subgroup is torsion-free";
            break;
        case detect::VerdictKind::inconclusive:
            os << ": " << detect::to_string(v.reason);
            break;
    }
    os << "; primes processed " << det.report.primes_processed << ", skipped "
       << det.report.skipped.size();
    return os.str();
}

} // namespace

RunResult run_job(const JobSpec& job, bool with_timing) {
    RunResult res;
    res.document = base_document(job);
    const auto t0 = std::chrono::steady_clock::now();

    if (job.mode == "ec-detect") {
        detect::Detection det = detect::detect_ec(job.curve, job.target, job.gens, job.config);
        fill_detection(res.document, det);
        res.human = human_detection(job, det);
    } else if (job.mode == "mul-detect") {
        detect::Detection det = detect::detect_mul(job.x, job.mul_gens, job.config);
        fill_detection(res.document, det);
        res.human = human_detection(job, det);
    } else if (job.mode == "witness") {
        auto ws = detect::find_witness_primes(job.curve, job.points, job.query, job.config.seed,
                                              job.config.worker_count);
        json matches = json::array();
        for (const auto& m : ws.matches)
            matches.push_back(json{{"prime", m.prime}, {"l_part_orders", m.l_part_orders}});
        res.document["witness_search"] = json{{"matches", matches},
                                              {"scanned", ws.scanned},
                                              {"skipped", ws.skipped},
                                              {"matched", ws.matched}};
        std::ostringstream os;
        os << "witness: scanned " << ws.scanned << " good primes, matched " << ws.matched;
        res.human = os.str();
    } else if (job.mode == "local-report") {
        detect::LocalReport lr =
            detect::local_report(job.curve, job.points, job.prime, job.config.seed);
        json coords = json::array();
        for (const auto& [i, j] : lr.point_coords) coords.push_back(json::array({i, j}));
        json out{{"prime", lr.prime}, {"status", lr.status}};
        if (!lr.detail.empty()) out["detail"] = lr.detail;
        if (lr.status == "ok") {
            out["n"] = lr.n;
            out["d1"] = lr.d1;
            out["d2"] = lr.d2;
            out["point_coords"] = coords;
            if (lr.membership) out["membership"] = membership_json(*lr.membership);
        }
        res.document["local_report"] = out;
        res.human = "local-report at p=" + std::to_string(lr.prime) + ": " + lr.status;
    } else if (job.mode == "torsion") {
        ecq::TorsionGroup t = ecq::torsion_subgroup(job.curve);
        json pts = json::array();
        for (const auto& p : t.points) pts.push_back(emit_point(p));
        res.document["torsion"] = json{{"order", t.order}, {"points", pts}};
        res.human = "torsion: order " + std::to_string(t.order);
    } else {
        throw InvalidInputError("mode: unknown mode '" + job.mode + "'");
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    if (with_timing) res.document["timing"] = json{{"seconds", seconds}};
    std::ostringstream os;
    os << res.human << " [" << seconds << " s]";
    res.human = os.str();
    return res;
}

} // namespace lindep::io
