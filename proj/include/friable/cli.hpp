#pragma once

// Command-line front end.  run_command parses argv, dispatches to the
// library, and writes JSON/CSV/SVG.  Exit codes: 0 success, 1 failed
// assertion, 2 usage or input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "friable/census.hpp"
#include "friable/chart.hpp"
#include "friable/counts.hpp"
#include "friable/dickman.hpp"
#include "friable/error.hpp"
#include "friable/lab.hpp"
#include "friable/saddle.hpp"

namespace friable::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Float with an explicit marker, so consumers never confuse it with an exact value.
inline Json approx(double v) {
    Json j;
    j["approx"] = std::isfinite(v) ? Json(v) : Json(nullptr);
    return j;
}

inline std::string csv_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --------------------------------------------------------------------------
// Parameter parsing helpers

/// "a:b" or "a" (inclusive).
inline std::pair<unsigned, unsigned> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const unsigned v = static_cast<unsigned>(std::stoul(text));
            return {v, v};
        }
        const unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, colon)));
        const unsigned hi = static_cast<unsigned>(std::stoul(text.substr(colon + 1)));
        if (lo > hi) fail(ErrorKind::InvalidArgument, "empty range '" + text + "'");
        return {lo, hi};
    } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidArgument, "cannot parse range '" + text + "'");
    }
}

/// "lo:hi:step" grid of reals.
inline std::vector<double> parse_real_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            fail(ErrorKind::InvalidArgument, "cannot parse grid '" + text + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
        fail(ErrorKind::InvalidArgument, "grid must be lo:hi:step with step > 0");
    std::vector<double> grid;
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long k = 0; k <= steps; ++k) grid.push_back(parts[0] + k * parts[2]);
    return grid;
}

/// m-rule: "all", an integer, "fixed:k", or "c*log n" (natural log, rounded,
/// clamped to [1, n]).
inline std::vector<unsigned> apply_m_rule(const std::string& rule, unsigned n) {
    std::vector<unsigned> ms;
    if (rule == "all") {
        for (unsigned m = 1; m <= n; ++m) ms.push_back(m);
        return ms;
    }
    auto clamp = [n](double m) { return static_cast<unsigned>(std::clamp<double>(std::round(m), 1.0, n)); };
    const auto star = rule.find('*');
    try {
        if (star != std::string::npos) {
            const std::string rest = rule.substr(star + 1);
            if (rest != "log n" && rest != "log(n)" && rest != "logn")
                fail(ErrorKind::InvalidArgument, "m-rule must look like 'c*log n'");
            ms.push_back(clamp(std::stod(rule.substr(0, star)) * std::log(static_cast<double>(n))));
            return ms;
        }
        const std::string value = rule.rfind("fixed:", 0) == 0 ? rule.substr(6) : rule;
        const long k = std::stol(value);
        if (k < 1) fail(ErrorKind::InvalidArgument, "fixed m must be >= 1");
        ms.push_back(clamp(static_cast<double>(k)));
        return ms;
    } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidArgument, "cannot parse m-rule '" + rule + "'");
    }
}

// --------------------------------------------------------------------------
// Outputs

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) fail(ErrorKind::InvalidArgument, "cannot open '" + out_path + "' for writing");
    file << text;
}

inline Json params_json(const census::Params& p) { return Json{{"q", p.q()}, {"n", p.n()}, {"m", p.m()}}; }

inline Json report_json(const lab::SuiteReport& r) {
    Json j;
    j["suite_id"] = r.suite_id;
    j["passed"] = r.passed;
    j["exact_failure"] = r.exact_failure();
    j["empirical_constant"] = approx(r.empirical_constant);
    j["grid_size"] = r.grid.size();
    if (r.worst_case) j["worst_case"] = {{"params", params_json(r.worst_case->params)}, {"residual", approx(r.worst_case->residual)}};
    else j["worst_case"] = nullptr;
    j["notes"] = r.notes;
    j["checks"] = Json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"exact", c.exact}, {"detail", c.detail}});
    j["metrics"] = Json::object();
    for (const auto& m : r.metrics) j["metrics"][m.name] = approx(m.value);
    return j;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string reports_csv(const std::vector<lab::SuiteReport>& reports) {
    std::ostringstream os;
    os << "suite,kind,name,passed,exact,value,detail\n";
    for (const auto& r : reports) {
        for (const auto& c : r.checks)
            os << r.suite_id << ",check," << csv_escape(c.name) << ',' << (c.passed ? 1 : 0) << ',' << (c.exact ? 1 : 0)
               << ",," << csv_escape(c.detail) << '\n';
        for (const auto& m : r.metrics) os << r.suite_id << ",metric," << csv_escape(m.name) << ",,," << csv_float(m.value) << ",\n";
    }
    return os.str();
}

inline std::string reports_text(const std::vector<lab::SuiteReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << "suite " << r.suite_id << ": " << (r.passed ? "PASS" : "FAIL") << "  (grid " << r.grid.size()
           << ", empirical constant " << lab::fmt(r.empirical_constant) << ")\n";
        for (const auto& c : r.checks)
            os << "  [" << (c.passed ? "pass" : "FAIL") << (c.exact ? "|exact" : "") << "] " << c.name
               << (c.detail.empty() ? "" : "  -- " + c.detail) << '\n';
        for (const auto& m : r.metrics) os << "  " << m.name << " = " << lab::fmt(m.value) << '\n';
        if (r.worst_case) os << "  worst " << lab::describe(r.worst_case->params) << " residual " << lab::fmt(r.worst_case->residual) << '\n';
        if (!r.notes.empty()) os << "  notes: " << r.notes << '\n';
    }
    return os.str();
}

// --------------------------------------------------------------------------
// Subcommands

struct Options {
    // shared
    std::uint64_t q = 2;
    unsigned n = 1, m = 1;
    std::string out_path;
    // census
    unsigned d_max = 10;
    // count
    std::string kind = "poly";
    bool float_mode = false, exact_mode = false, oracle = false;
    // dickman
    std::optional<double> u;
    double tol = dickman::kMinRhoTolerance;
    bool log_only = false;
    std::string u_grid;
    // verify / sweep
    std::string suite = "all";
    std::vector<std::uint64_t> q_list;
    unsigned n_max = 40;
    std::string report = "json";
    std::string n_range = "2:20";
    std::string m_rule = "all";
    // chart
    std::string in_path, x_col;
    std::vector<std::string> y_cols;
    bool log_y = false;
};

inline int cmd_census(const Options& o, std::ostream& out) {
    auto table = census::table_for(o.q, o.d_max);
    std::ostringstream os;
    os << "d,pi_q_d\n";
    for (unsigned d = 1; d <= o.d_max; ++d) os << d << ',' << table->count(d).str() << '\n';
    emit(os.str(), o.out_path, out);
    return kExitOk;
}

inline int cmd_count(const Options& o, const Json& config, std::ostream& out) {
    if (o.kind != "perm" && o.kind != "poly") fail(ErrorKind::InvalidArgument, "--kind must be perm or poly");
    const auto kind = o.kind == "perm" ? counts::Kind::Perm : counts::Kind::Poly;
    const census::Params p(kind == counts::Kind::Perm ? 2 : o.q, o.n, o.m);
    Json j;
    j["kind"] = o.kind;
    if (kind == counts::Kind::Poly) j["q"] = p.q();
    j["n"] = p.n();
    j["m"] = p.m();
    int code = kExitOk;
    if (o.float_mode) {
        const auto row = kind == counts::Kind::Perm ? counts::perm_prob_float_row(p.m(), p.n())
                                                    : counts::poly_prob_float_row(p.q(), p.m(), p.n());
        j["mode"] = "float";
        j["prob_float"] = approx(row[p.n()]);
    } else {
        const auto prof = counts::friable_prob(kind, p);
        const auto reduced = prof.prob.reduced();
        j["mode"] = "exact";
        j["psi"] = prof.psi.str();
        j["total"] = prof.total.str();
        j["prob_num"] = reduced.num.str();
        j["prob_den"] = reduced.den.str();
        j["prob_float"] = approx(prof.prob.to_double());
        if (o.oracle) {
            const ExactCount oracle =
                kind == counts::Kind::Perm ? counts::psi_perm_oracle(p.n(), p.m()) : counts::psi_poly_oracle(p.q(), p.n(), p.m());
            j["oracle_psi"] = oracle.str();
            j["oracle_agrees"] = oracle == prof.psi;
            if (oracle != prof.psi) code = kExitAssertion;
        }
    }
    j["config"] = config;
    emit(j.dump(2) + "\n", o.out_path, out);
    return code;
}

inline Json dickman_point(double u, double tol, bool log_only) {
    Json j;
    j["u"] = approx(u);
    const auto r = dickman::rho(u, tol);
    if (!log_only) j["rho"] = approx(static_cast<double>(std::exp(r.log_value)));
    j["log_rho"] = approx(static_cast<double>(r.log_value));
    if (u > 1) {
        const double x = dickman::xi(u);
        j["xi"] = approx(x);
        j["I_xi"] = approx(dickman::exp_integral_I({x, 0.0}).real());
    } else {
        j["xi"] = nullptr;
        j["I_xi"] = nullptr;
    }
    return j;
}

inline int cmd_dickman(const Options& o, const Json& config, std::ostream& out) {
    if (!o.u_grid.empty()) {
        std::ostringstream os;
        os << "u,rho,log_rho,xi,I_xi\n";
        for (double u : parse_real_grid(o.u_grid)) {
            const auto r = dickman::rho(u, o.tol);
            const double x = u > 1 ? dickman::xi(u) : std::nan("");
            const double ix = u > 1 ? dickman::exp_integral_I({x, 0.0}).real() : std::nan("");
            os << csv_float(u) << ',' << (o.log_only ? "" : csv_float(static_cast<double>(std::exp(r.log_value)))) << ','
               << csv_float(static_cast<double>(r.log_value)) << ',' << csv_float(x) << ',' << csv_float(ix) << '\n';
        }
        emit(os.str(), o.out_path, out);
        return kExitOk;
    }
    if (!o.u) fail(ErrorKind::InvalidArgument, "dickman needs --u or --u-grid");
    Json j = dickman_point(*o.u, o.tol, o.log_only);
    j["config"] = config;
    emit(j.dump(2) + "\n", o.out_path, out);
    return kExitOk;
}

inline Json saddle_json(const census::Params& p) {
    const auto d = saddle::saddle_data(p);
    const auto pred = saddle::ratio_prediction(p);
    Json j = params_json(p);
    j["x"] = approx(d.x);
    j["lambda"] = approx(d.lambda);
    j["lambda2"] = approx(d.lambda2);
    j["log_Q"] = approx(static_cast<double>(d.Q.log_value));
    j["Gq_x"] = d.gq_at_x ? approx(*d.gq_at_x) : Json(nullptr);
    j["tail_bound"] = d.gq_at_x ? approx(d.tail_bound) : Json(nullptr);
    j["estimate_log"] = approx(static_cast<double>(d.estimate.log_value));
    j["applicable_theorem"] = std::string(saddle::to_string(pred.applicable_theorem));
    j["status"] = std::string(saddle::to_string(pred.status));
    j["envelope"] = approx(pred.thm_error_envelope);
    j["range_discrepancy"] = pred.range_discrepancy;
    return j;
}

inline int cmd_saddle(const Options& o, const Json& config, std::ostream& out) {
    Json j = saddle_json(census::Params(o.q, o.n, o.m));
    j["config"] = config;
    emit(j.dump(2) + "\n", o.out_path, out);
    return kExitOk;
}

inline Json ratio_json(const census::Params& p) {
    const auto perm = lab::perm_table(p.n());
    const auto poly = lab::poly_table(p.q(), p.n());
    const auto pt = lab::ratio_point(*perm, *poly, p);
    const auto ratio = (poly->prob(p.n(), p.m()) / perm->prob(p.n(), p.m())).reduced();
    Json j = params_json(p);
    j["ratio_num"] = ratio.num.str();
    j["ratio_den"] = ratio.den.str();
    j["ratio"] = approx(pt.ratio);
    j["ratio_minus_one"] = approx(pt.excess);
    j["Gq_x"] = pt.prediction.g_q_x ? approx(*pt.prediction.g_q_x) : Json(nullptr);
    j["main_term"] = approx(pt.prediction.main_term);
    j["applicable_theorem"] = std::string(saddle::to_string(pt.prediction.applicable_theorem));
    Json all = Json::array();
    for (auto t : pt.prediction.all_applicable) all.push_back(std::string(saddle::to_string(t)));
    j["all_applicable"] = all;
    j["status"] = std::string(saddle::to_string(pt.prediction.status));
    j["envelope"] = approx(pt.prediction.thm_error_envelope);
    j["normalized_residual"] = pt.normalized ? approx(*pt.normalized) : Json(nullptr);
    j["range_discrepancy"] = pt.prediction.range_discrepancy;
    if (!pt.prediction.notes.empty()) j["notes"] = pt.prediction.notes;
    return j;
}

inline int cmd_ratio(const Options& o, const Json& config, std::ostream& out) {
    Json j = ratio_json(census::Params(o.q, o.n, o.m));
    j["config"] = config;
    emit(j.dump(2) + "\n", o.out_path, out);
    return kExitOk;
}

inline int cmd_gap(const Options& o, const Json& config, std::ostream& out) {
    if (o.n < 1) fail(ErrorKind::InvalidArgument, "n must be >= 1");
    census::validate_prime_power(o.q);
    const auto perm = lab::perm_table(o.n);
    const auto poly = lab::poly_table(o.q, o.n);
    const auto gap = counts::expectation_gap(*perm, *poly, o.n).reduced();
    const auto el_perm = counts::expected_largest(*perm, o.n).reduced();
    const auto el_poly = counts::expected_largest(*poly, o.n).reduced();
    Json j{{"q", o.q}, {"n", o.n}};
    j["gap_num"] = gap.num.str();
    j["gap_den"] = gap.den.str();
    j["gap"] = approx(gap.to_double());
    j["expected_largest_perm"] = el_perm.to_string();
    j["expected_largest_poly"] = el_poly.to_string();
    j["config"] = config;
    emit(j.dump(2) + "\n", o.out_path, out);
    return kExitOk;
}

inline lab::LabConfig lab_config(const Options& o) {
    lab::LabConfig cfg;
    if (!o.q_list.empty()) {
        for (auto q : o.q_list) census::validate_prime_power(q);
        cfg.q_list = o.q_list;
        cfg.gap_q_list = o.q_list;
        cfg.identity_q_list = o.q_list;
    }
    if (o.n_max < 1) fail(ErrorKind::InvalidArgument, "--n-max must be >= 1");
    cfg.n_max = o.n_max;
    return cfg;
}

inline int cmd_verify(const Options& o, const Json& config, std::ostream& out) {
    const auto cfg = lab_config(o);
    std::vector<std::string> names;
    if (o.suite == "all") names = lab::suite_names();
    else names.push_back(o.suite);
    std::vector<lab::SuiteReport> reports;
    for (const auto& name : names) reports.push_back(lab::run_suite(name, cfg));
    bool exact_failure = false;
    for (const auto& r : reports) exact_failure = exact_failure || r.exact_failure();

    std::string text;
    if (o.report == "json") {
        Json j;
        j["config"] = config;
        j["passed"] = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
        j["exact_failure"] = exact_failure;
        j["suites"] = Json::array();
        for (const auto& r : reports) j["suites"].push_back(report_json(r));
        text = j.dump(2) + "\n";
    } else if (o.report == "csv") {
        text = reports_csv(reports);
    } else {
        text = reports_text(reports);
    }
    emit(text, o.out_path, out);
    return exact_failure ? kExitAssertion : kExitOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
    const auto [n_lo, n_hi] = parse_range(o.n_range);
    if (n_lo < 1) fail(ErrorKind::InvalidArgument, "n-range must start at >= 1");
    std::vector<std::uint64_t> qs = o.q_list.empty() ? std::vector<std::uint64_t>{2} : o.q_list;
    for (auto q : qs) census::validate_prime_power(q);
    std::ostringstream os;

    auto for_grid = [&](auto&& row) {
        for (auto q : qs)
            for (unsigned n = n_lo; n <= n_hi; ++n)
                for (unsigned m : apply_m_rule(o.m_rule, n)) row(census::Params(q, n, m));
    };

    if (o.kind == "count") {
        os << "q,n,m,psi_poly,psi_perm,prob_poly,prob_perm\n";
        for_grid([&](const census::Params& p) {
            const auto perm = lab::perm_table(p.n());
            const auto poly = lab::poly_table(p.q(), p.n());
            os << p.q() << ',' << p.n() << ',' << p.m() << ',' << poly->psi(p.n(), p.m()).str() << ','
               << perm->psi(p.n(), p.m()).str() << ',' << csv_float(poly->prob(p.n(), p.m()).to_double()) << ','
               << csv_float(perm->prob(p.n(), p.m()).to_double()) << '\n';
        });
    } else if (o.kind == "ratio") {
        os << "q,n,m,ratio,ratio_minus_one,Gq_x,envelope,theorem,status\n";
        for_grid([&](const census::Params& p) {
            const auto pt = lab::ratio_point(*lab::perm_table(p.n()), *lab::poly_table(p.q(), p.n()), p);
            os << p.q() << ',' << p.n() << ',' << p.m() << ',' << csv_float(pt.ratio) << ',' << csv_float(pt.excess) << ','
               << (pt.prediction.g_q_x ? csv_float(*pt.prediction.g_q_x) : "") << ','
               << csv_float(pt.prediction.thm_error_envelope) << ',' << saddle::to_string(pt.prediction.applicable_theorem)
               << ',' << saddle::to_string(pt.prediction.status) << '\n';
        });
    } else if (o.kind == "dickman") {
        os << "n,m,u,rho,log_rho,prob_perm,delta\n";
        qs = {2};
        for_grid([&](const census::Params& p) {
            const double u = p.u();
            const auto r = dickman::rho(u, o.tol);
            const double log_p = lab::perm_table(p.n())->prob(p.n(), p.m()).log_value();
            os << p.n() << ',' << p.m() << ',' << csv_float(u) << ',' << csv_float(static_cast<double>(std::exp(r.log_value))) << ','
               << csv_float(static_cast<double>(r.log_value)) << ',' << csv_float(std::exp(log_p)) << ','
               << csv_float(std::expm1(log_p - static_cast<double>(r.log_value))) << '\n';
        });
    } else if (o.kind == "saddle") {
        os << "q,n,m,x,lambda,lambda2,log_Q,Gq_x,estimate_log,exact_log\n";
        for_grid([&](const census::Params& p) {
            const auto d = saddle::saddle_data(p);
            os << p.q() << ',' << p.n() << ',' << p.m() << ',' << csv_float(d.x) << ',' << csv_float(d.lambda) << ','
               << csv_float(d.lambda2) << ',' << csv_float(static_cast<double>(d.Q.log_value)) << ','
               << (d.gq_at_x ? csv_float(*d.gq_at_x) : "") << ',' << csv_float(static_cast<double>(d.estimate.log_value)) << ','
               << csv_float(lab::perm_table(p.n())->prob(p.n(), p.m()).log_value()) << '\n';
        });
    } else if (o.kind == "gap") {
        os << "q,n,gap,log_gap\n";
        for (auto q : qs) {
            const auto perm = lab::perm_table(n_hi);
            const auto poly = lab::poly_table(q, n_hi);
            for (unsigned n = n_lo; n <= n_hi; ++n) {
                const auto g = counts::expectation_gap(*perm, *poly, n);
                os << q << ',' << n << ',' << csv_float(g.to_double()) << ',' << csv_float(g.log_value()) << '\n';
            }
        }
    } else if (o.kind == "verify") {
        Options v = o;
        v.n_max = n_hi;
        const auto cfg = lab_config(v);
        std::vector<lab::SuiteReport> reports;
        for (const auto& name : lab::suite_names()) reports.push_back(lab::run_suite(name, cfg));
        os << reports_csv(reports);
        emit(os.str(), o.out_path, out);
        for (const auto& r : reports)
            if (r.exact_failure()) return kExitAssertion;
        return kExitOk;
    } else {
        fail(ErrorKind::InvalidArgument, "unknown sweep kind '" + o.kind + "'");
    }
    emit(os.str(), o.out_path, out);
    return kExitOk;
}

inline int cmd_chart(const Options& o, std::ostream& out) {
    std::ifstream in(o.in_path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot read '" + o.in_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto table = chart::parse_csv(buffer.str());
    emit(chart::render_svg(table, o.x_col, o.y_cols, o.log_y), o.out_path, out);
    return kExitOk;
}

// --------------------------------------------------------------------------

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Exact and asymptotic friable counts for permutations and polynomials over finite fields"};
    app.name("friable_lab");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    Options o;

    auto* census_cmd = app.add_subcommand("census", "Monic irreducible counts pi_q(d)");
    census_cmd->add_option("--q", o.q, "Field size (prime power)")->required();
    census_cmd->add_option("--d-max", o.d_max, "Largest degree");
    census_cmd->add_option("--out", o.out_path, "Output file (default stdout)");

    auto* count_cmd = app.add_subcommand("count", "psi(n, m) and the friable probability");
    count_cmd->add_option("--kind", o.kind, "perm or poly")->check(CLI::IsMember({"perm", "poly"}));
    count_cmd->add_option("--q", o.q, "Field size");
    count_cmd->add_option("--n", o.n, "Degree / permutation size")->required();
    count_cmd->add_option("--m", o.m, "Friability bound")->required();
    auto* exact_flag = count_cmd->add_flag("--exact", o.exact_mode, "Exact big-integer mode (default)");
    count_cmd->add_flag("--float", o.float_mode, "Double-precision probability recurrence")->excludes(exact_flag);
    count_cmd->add_flag("--oracle", o.oracle, "Cross-check against the brute-force oracle");
    count_cmd->add_option("--out", o.out_path, "Output file");

    auto* dickman_cmd = app.add_subcommand("dickman", "rho(u), xi(u) and I(xi)");
    dickman_cmd->add_option("--u", o.u, "Argument u >= 0");
    dickman_cmd->add_option("--tol", o.tol, "Requested relative tolerance (>= 1e-14)");
    dickman_cmd->add_flag("--log", o.log_only, "Report log rho only");
    dickman_cmd->add_option("--u-grid", o.u_grid, "lo:hi:step grid, emitted as CSV");
    dickman_cmd->add_option("--out", o.out_path, "Output file");

    auto* saddle_cmd = app.add_subcommand("saddle", "Saddle point x, curvature, Q(x) and G_q(x)");
    saddle_cmd->add_option("--q", o.q, "Field size")->required();
    saddle_cmd->add_option("--n", o.n, "n")->required();
    saddle_cmd->add_option("--m", o.m, "m")->required();
    saddle_cmd->add_option("--out", o.out_path, "Output file");

    auto* ratio_cmd = app.add_subcommand("ratio", "Exact P_f/P_pi against the theorem prediction");
    ratio_cmd->add_option("--q", o.q, "Field size")->required();
    ratio_cmd->add_option("--n", o.n, "n")->required();
    ratio_cmd->add_option("--m", o.m, "m")->required();
    ratio_cmd->add_option("--out", o.out_path, "Output file");

    auto* gap_cmd = app.add_subcommand("gap", "Expectation gap E L(pi_n) - E L_q(f_n)");
    gap_cmd->add_option("--q", o.q, "Field size")->required();
    gap_cmd->add_option("--n", o.n, "n")->required();
    gap_cmd->add_option("--out", o.out_path, "Output file");

    auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
    std::vector<std::string> suites{"all"};
    for (const auto& s : lab::suite_names()) suites.push_back(s);
    verify_cmd->add_option("--suite", o.suite, "Suite name or all")->check(CLI::IsMember(suites));
    verify_cmd->add_option("--q-list", o.q_list, "Field sizes")->delimiter(',');
    verify_cmd->add_option("--n-max", o.n_max, "Largest n of the exact grid");
    verify_cmd->add_option("--report", o.report, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    verify_cmd->add_option("--out", o.out_path, "Output file");

    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep to CSV");
    sweep_cmd->add_option("--kind", o.kind, "count, ratio, dickman, saddle, gap or verify")
        ->required()
        ->check(CLI::IsMember({"count", "ratio", "dickman", "saddle", "gap", "verify"}));
    sweep_cmd->add_option("--q-list", o.q_list, "Field sizes")->delimiter(',');
    sweep_cmd->add_option("--n-range", o.n_range, "lo:hi");
    sweep_cmd->add_option("--m-rule", o.m_rule, "all, k, fixed:k or c*log n");
    sweep_cmd->add_option("--tol", o.tol, "rho tolerance");
    sweep_cmd->add_option("--out", o.out_path, "Output file");

    auto* chart_cmd = app.add_subcommand("chart", "SVG line chart from a sweep CSV");
    chart_cmd->add_option("--in", o.in_path, "CSV input")->required();
    chart_cmd->add_option("--x", o.x_col, "x column")->required();
    chart_cmd->add_option("--y", o.y_cols, "y columns")->required()->delimiter(',');
    chart_cmd->add_flag("--log-y", o.log_y, "log10 y axis");
    chart_cmd->add_option("--out", o.out_path, "SVG output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    try {
        Json config;
        config["command"] = sub->get_name();
        for (const auto* opt : sub->get_options()) {
            if (opt->get_name() == "--help") continue;
            const auto results = opt->results();
            std::string key = opt->get_name();
            while (!key.empty() && key.front() == '-') key.erase(key.begin());
            if (opt->get_items_expected_max() == 0) config[key] = opt->count() > 0;
            else if (results.size() == 1) config[key] = results.front();
            else if (!results.empty()) config[key] = results;
            else if (!opt->get_default_str().empty()) config[key] = opt->get_default_str();
            else config[key] = nullptr;
        }
        if (sub->get_name() == "dickman" || sub->get_name() == "sweep") config["rho_tolerance"] = o.tol;
        if (sub->get_name() == "verify") {
            const auto cfg = lab_config(o);
            config["grid"] = {{"q_list", cfg.q_list}, {"n_max", cfg.n_max}, {"delta_n_max", cfg.delta_n_max}};
        }

        const std::string name = sub->get_name();
        if (name == "census") return cmd_census(o, out);
        if (name == "count") return cmd_count(o, config, out);
        if (name == "dickman") return cmd_dickman(o, config, out);
        if (name == "saddle") return cmd_saddle(o, config, out);
        if (name == "ratio") return cmd_ratio(o, config, out);
        if (name == "gap") return cmd_gap(o, config, out);
        if (name == "verify") return cmd_verify(o, config, out);
        if (name == "sweep") return cmd_sweep(o, out);
        if (name == "chart") return cmd_chart(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::InternalAssertion ? kExitAssertion : kExitUsage;
    }
    return kExitUsage;
}

} // namespace friable::cli
