#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lindep/io.hpp"

namespace {

using lindep::InvalidInputError;
using lindep::io::JobSpec;

std::pair<lindep::Rat, lindep::Rat> split_pair(const std::string& s, const std::string& what) {
    auto pos = s.find(',');
    if (pos == std::string::npos)
        throw InvalidInputError(what + ": expected 'x,y', got '" + s + "'");
    return {lindep::io::parse_rational(s.substr(0, pos)),
            lindep::io::parse_rational(s.substr(pos + 1))};
}

lindep::ecq::CurveQ parse_curve_arg(const std::string& s) {
    lindep::Int a = 0, b = 0;
    if (auto pos = s.find(','); pos != std::string::npos) {
        lindep::Rat ra = lindep::io::parse_rational(s.substr(0, pos));
        lindep::Rat rb = lindep::io::parse_rational(s.substr(pos + 1));
        if (ra.get_den() != 1 || rb.get_den() != 1)
            throw InvalidInputError("curve: coefficients must be integers");
        a = ra.get_num();
        b = rb.get_num();
    } else {
        lindep::Rat rb = lindep::io::parse_rational(s);
        if (rb.get_den() != 1) throw InvalidInputError("curve: coefficients must be integers");
        b = rb.get_num();
    }
    return lindep::ecq::CurveQ(a, b);
}

lindep::ecq::PointQ parse_point_arg(const std::string& s, const lindep::ecq::CurveQ& e,
                                    const std::string& what) {
    if (s == "inf" || s == "infinity") return lindep::ecq::PointQ::infinity_point();
    auto [x, y] = split_pair(s, what);
    lindep::ecq::PointQ p = lindep::ecq::PointQ::affine(x, y);
    if (!lindep::ecq::on_curve(e, p))
        throw InvalidInputError(what + ": point (" + s + ") does not satisfy the curve equation");
    return p;
}

std::vector<unsigned> parse_index_list(const std::string& s) {
    std::vector<unsigned> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<unsigned>(std::stoul(item)));
        } catch (const std::exception&) {
            throw InvalidInputError("index list: '" + item + "' is not a positive integer");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lindep: decide linear dependence of rational points by reductions modulo many primes.\n"
        "Dependent verdicts are verified by exact arithmetic; independent verdicts carry a\n"
        "witness prime whose local system is unsolvable. For elliptic curves the guarantee of\n"
        "eventual termination assumes a non-CM curve and independent nontorsion generators;\n"
        "the emitted certificates are unconditional either way."};
    app.require_subcommand(0, 1);

    std::string job_file;
    bool json_only = false, with_timing = false;
    app.add_option("--job", job_file, "read a JSON job document (mode and inputs from the file)");
    app.add_flag("--json-only", json_only, "suppress the human summary on stderr");
    app.add_flag("--timing", with_timing,
                 "include wall-clock timing in the output document (off keeps runs byte-identical)");

    std::uint64_t prime_bound = 0;
    unsigned stability_window = 0;
    std::string coeff_bound;
    unsigned saturation_bound = 0;
    std::uint64_t seed = 0;
    double max_skipped = -1;
    int threads = 0;
    auto* pb = app.add_option("--prime-bound", prime_bound, "scan good primes up to this bound");
    auto* sw = app.add_option("--stability-window", stability_window,
                              "consecutive identical candidates required before verification");
    auto* cbnd = app.add_option("--coeff-bound", coeff_bound, "candidate coefficient bound");
    auto* sb = app.add_option("--saturation-bound", saturation_bound,
                              "largest multiplier tried by the saturation fallback");
    auto* sd = app.add_option("--seed", seed, "seed for all randomized subroutines");
    auto* ms = app.add_option("--max-skipped-fraction", max_skipped,
                              "tolerated ratio of skipped to processed primes");
    auto* th = app.add_option("--threads", threads, "worker threads for the per-prime scan");

    std::string curve_s, target_s, x_s;
    std::vector<std::string> gen_s, point_s;
    std::string set_i_s, set_j_s;
    std::uint64_t ell = 2, report_prime = 0;
    unsigned em = 1;

    auto* ec = app.add_subcommand("ec-detect", "is P in the subgroup generated by the gens?");
    ec->fallthrough();
    ec->add_option("--curve", curve_s, "curve 'a,b' or shorthand 'b' for y^2=x^3+ax+b")->required();
    ec->add_option("--target", target_s, "the point P as 'x,y' (rationals allowed) or 'inf'")->required();
    ec->add_option("--gen", gen_s, "a generator 'x,y'; repeat per generator");

    auto* mul = app.add_subcommand("mul-detect", "is x in the subgroup of Q* generated by the gens?");
    mul->fallthrough();
    mul->add_option("--x", x_s, "the target rational")->required();
    mul->add_option("--gen", gen_s, "a generator rational; repeat per generator");

    auto* wit = app.add_subcommand("witness", "find primes with prescribed vanishing/order pattern");
    wit->fallthrough();
    wit->add_option("--curve", curve_s)->required();
    wit->add_option("--point", point_s, "a point 'x,y'; repeat per point")->required();
    wit->add_option("--set-I", set_i_s, "comma-separated 1-based indices with trivial l-part");
    wit->add_option("--set-J", set_j_s, "comma-separated 1-based indices with order divisible by l^M");
    wit->add_option("--l", ell, "the prime l")->required();
    wit->add_option("--M", em, "the exponent M >= 1")->required();

    auto* loc = app.add_subcommand("local-report", "full local evidence at one prime");
    loc->fallthrough();
    loc->add_option("--curve", curve_s)->required();
    loc->add_option("--point", point_s, "points; the first is the membership target")->required();
    loc->add_option("--prime", report_prime, "the good prime to report on")->required();

    auto* tor = app.add_subcommand("torsion", "torsion subgroup of E(Q)");
    tor->fallthrough();
    tor->add_option("--curve", curve_s)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int help = app.exit(e); // prints the message or help text
        return help == 0 ? 0 : 2;
    }

    try {
        JobSpec job;
        if (!job_file.empty()) {
            std::ifstream in(job_file);
            if (!in) throw InvalidInputError("cannot open job file '" + job_file + "'");
            lindep::io::json doc;
            try {
                in >> doc;
            } catch (const std::exception& err) {
                throw InvalidInputError("job file: " + std::string(err.what()));
            }
            job = lindep::io::parse_job(doc);
        } else if (ec->parsed()) {
            job.mode = "ec-detect";
            job.curve = parse_curve_arg(curve_s);
            job.target = parse_point_arg(target_s, job.curve, "target");
            for (std::size_t i = 0; i < gen_s.size(); ++i)
                job.gens.push_back(parse_point_arg(gen_s[i], job.curve, "gen " + std::to_string(i + 1)));
        } else if (mul->parsed()) {
            job.mode = "mul-detect";
            job.x = lindep::io::parse_rational(x_s);
            for (const auto& g : gen_s) job.mul_gens.push_back(lindep::io::parse_rational(g));
        } else if (wit->parsed()) {
            job.mode = "witness";
            job.curve = parse_curve_arg(curve_s);
            for (std::size_t i = 0; i < point_s.size(); ++i)
                job.points.push_back(
                    parse_point_arg(point_s[i], job.curve, "point " + std::to_string(i + 1)));
            job.query.set_i = parse_index_list(set_i_s);
            job.query.set_j = parse_index_list(set_j_s);
            job.query.l = ell;
            job.query.m = em;
            job.query.prime_bound = pb->count() ? prime_bound : job.config.prime_bound;
            job.query.validate(job.points.size());
        } else if (loc->parsed()) {
            job.mode = "local-report";
            job.curve = parse_curve_arg(curve_s);
            for (std::size_t i = 0; i < point_s.size(); ++i)
                job.points.push_back(
                    parse_point_arg(point_s[i], job.curve, "point " + std::to_string(i + 1)));
            job.prime = report_prime;
        } else if (tor->parsed()) {
            job.mode = "torsion";
            job.curve = parse_curve_arg(curve_s);
        } else {
            std::cerr << app.help() << "\n";
            return 2;
        }

        if (pb->count()) {
            job.config.prime_bound = prime_bound;
            if (job.mode == "witness") job.query.prime_bound = prime_bound;
        }
        if (sw->count()) job.config.stability_window = stability_window;
        if (cbnd->count()) job.config.coeff_bound = lindep::Int(coeff_bound);
        if (sb->count()) job.config.saturation_bound = saturation_bound;
        if (sd->count()) job.config.seed = seed;
        if (ms->count()) job.config.max_skipped_fraction = max_skipped;
        if (th->count()) job.config.worker_count = threads;
        job.config.validate();

        lindep::io::RunResult res = lindep::io::run_job(job, with_timing);
        std::cout << res.document.dump(2) << "\n";
        if (!json_only) std::cerr << res.human << "\n";
        return res.exit_code;
    } catch (const InvalidInputError& err) {
        lindep::io::json doc{{"schema", "lindep/v1"}, {"error", err.what()}, {"kind", "input"}};
        std::cout << doc.dump(2) << "\n";
        std::cerr << "input error: " << err.what() << "\n";
        return 2;
    } catch (const lindep::BudgetError& err) {
        lindep::io::json doc{{"schema", "lindep/v1"}, {"error", err.what()}, {"kind", "budget"}};
        std::cout << doc.dump(2) << "\n";
        std::cerr << "budget error: " << err.what() << "\n";
        return 3;
    } catch (const lindep::Error& err) {
        lindep::io::json doc{{"schema", "lindep/v1"}, {"error", err.what()}, {"kind", "internal"}};
        std::cout << doc.dump(2) << "\n";
        std::cerr << "internal error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        lindep::io::json doc{{"schema", "lindep/v1"}, {"error", err.what()}, {"kind", "internal"}};
        std::cout << doc.dump(2) << "\n";
        std::cerr << "internal error: " << err.what() << "\n";
        return 3;
    }
}
