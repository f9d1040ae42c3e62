#include "esb3/cli.hpp"

#include "esb3/dataset.hpp"
#include "esb3/errors.hpp"
#include "esb3/esbiii.hpp"
#include "esb3/fit.hpp"
#include "esb3/gof.hpp"
#include "esb3/io.hpp"
#include "esb3/robustness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace esb3::cli {

namespace {

struct ParamFlags {
    double mu = 0.0;
    double sigma = 1.0;
    double c = 0.0;
    double k = 0.0;
    double eps = 0.0;

    Params get() const {
        const Params p{mu, sigma, c, k, eps};
        validate(p);
        return p;
    }
};

void add_param_flags(CLI::App* cmd, ParamFlags& f, bool shape_required) {
    cmd->add_option("--mu", f.mu, "location")->capture_default_str();
    cmd->add_option("--sigma", f.sigma, "scale")->capture_default_str();
    auto* c = cmd->add_option("--c", f.c, "shape c > 0");
    auto* k = cmd->add_option("--k", f.k, "shape k > 0");
    cmd->add_option("--eps", f.eps, "skewness in (-1, 1)")->capture_default_str();
    if (shape_required) {
        c->required();
        k->required();
    }
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot write '" + path + "'");
    }
    file << text;
}

std::string csv_header(const Json& manifest) { return "# " + dump_json(manifest, -1) + "\n"; }

Params parse_init(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        v.push_back(parse_number(field));
    }
    if (v.size() != 5) {
        throw InputError("--init needs five comma-separated values mu,sigma,c,k,eps");
    }
    const Params p{v[0], v[1], v[2], v[3], v[4]};
    validate(p);
    return p;
}

struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

Grid parse_grid(const std::string& text) {
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw InputError("--grid must be lo:hi:steps");
    }
    Grid g;
    g.lo = parse_number(std::string_view(text).substr(0, a));
    g.hi = parse_number(std::string_view(text).substr(a + 1, b - a - 1));
    const double steps = parse_number(std::string_view(text).substr(b + 1));
    if (steps < 2 || steps != std::floor(steps) || steps > 1e7) {
        throw InputError("--grid steps must be an integer >= 2");
    }
    if (!(g.hi > g.lo)) {
        throw InputError("--grid needs lo < hi");
    }
    g.steps = static_cast<int>(steps);
    return g;
}

Dataset load(const std::string& path, const ReadOptions& opts) {
    return Dataset(read_values_file(path, opts), std::filesystem::path(path).filename().string(),
                   path);
}

Json gof_json(const GofReport& r) {
    return Json{{"model_label", r.model_label},
                {"n", r.n},
                {"ks_stat", r.ks_stat},
                {"ks_pvalue", r.ks_pvalue},
                {"aic", r.aic},
                {"p_value_method", kKsPvalueMethod},
                {"caveat", kKsEstimatedParamsCaveat}};
}

Json limit_value(const SideLimit& s) {
    if (s.finite) {
        return s.value;
    }
    return s.value > 0 ? "+inf" : "-inf";
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::size_t column = 1;
    std::size_t skip_rows = 0;
    std::optional<double> fixed_c;
    std::string init;
    double tol = 1e-6;
    std::optional<double> score_tol;
    int max_cycles = 500;
    std::string out;
    bool timestamp = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const Dataset data = load(a.input, {a.column, a.skip_rows});
    FitConfig cfg;
    cfg.param_tol = a.tol;
    cfg.score_tol = a.score_tol;
    cfg.max_cycles = a.max_cycles;
    cfg.fixed_c = a.fixed_c;
    if (!a.init.empty()) {
        cfg.init = parse_init(a.init);
    }
    if (!(a.tol > 0.0) || (a.score_tol && !(*a.score_tol > 0.0)) || a.max_cycles < 1) {
        throw InputError("--tol and --score-tol must be positive and --max-cycles >= 1");
    }
    const FitResult r = fit_ml(data, cfg);
    const Params& p = r.params;
    const GofReport g =
        gof_report(data, "ESBIII", [&](double y) { return cdf(p, y); }, r.loglik, r.free_params);

    RunManifest m{"fit", Json::object(), std::nullopt, std::nullopt};
    m.config["input"] = a.input;
    m.config["column"] = a.column;
    m.config["skip_rows"] = a.skip_rows;
    m.config["fixed_c"] = a.fixed_c ? Json(*a.fixed_c) : Json(nullptr);
    m.config["init"] = cfg.init ? params_json(*cfg.init) : Json("moment_init");
    m.config["param_tol"] = a.tol;
    m.config["score_tol"] = cfg.score_tol.value_or(1e-5 * static_cast<double>(data.size()));
    m.config["max_cycles"] = a.max_cycles;
    if (a.timestamp) {
        m.timestamp = utc_now();
    }

    Json doc;
    doc["schema"] = "esb3.fit";
    doc["manifest"] = manifest_json(m);
    doc["data"] = {{"label", data.label()}, {"source", data.source()}, {"n", data.size()}};
    doc["params"] = params_json(p);
    doc["loglik"] = r.loglik;
    doc["aic"] = r.aic;
    doc["free_params"] = r.free_params;
    doc["converged"] = r.converged;
    doc["stop_reason"] = r.stop_reason;
    doc["cycles"] = r.cycles;
    doc["score_norm"] = r.score_norm;
    Json trace = Json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"cycle", t.cycle}, {"loglik", t.loglik}});
    }
    doc["trace"] = trace;
    doc["gof"] = gof_json(g);
    doc["record"] = {{"mu", p.mu},       {"sigma", p.sigma},  {"c", p.c}, {"k", p.k},
                     {"eps", p.eps},     {"p_ks", g.ks_pvalue}, {"aic", r.aic}};
    emit(a.out, dump_json(doc) + "\n", out);
    if (!r.converged) {
        err << "esb3: fit did not converge (" << r.stop_reason << "); result written\n";
        return kNonConvergence;
    }
    return kOk;
}

struct SampleArgs {
    ParamFlags p;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
    bool timestamp = false;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    const Params p = a.p.get();
    if (a.n < 1) {
        throw InputError("--n must be at least 1");
    }
    RunManifest m{"sample", {{"params", params_json(p)}, {"n", a.n}}, a.seed, std::nullopt};
    if (a.timestamp) {
        m.timestamp = utc_now();
    }
    std::string text = csv_header(manifest_json(m));
    for (double x : sample(p, a.n, a.seed)) {
        text += format_number(x);
        text += '\n';
    }
    emit(a.out, text, out);
    return kOk;
}

struct EvalArgs {
    ParamFlags p;
    std::string mode = "pdf";
    std::string grid;
    std::string out;
    bool timestamp = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const Params p = a.p.get();
    const Grid g = parse_grid(a.grid);
    if (a.mode == "quantile" && !(g.lo > 0.0 && g.hi < 1.0)) {
        throw InputError("quantile grid must lie inside (0, 1)");
    }
    RunManifest m{"eval", {{"params", params_json(p)}, {"mode", a.mode}, {"grid", a.grid}},
                  std::nullopt, std::nullopt};
    if (a.timestamp) {
        m.timestamp = utc_now();
    }
    std::string text = csv_header(manifest_json(m));
    text += (a.mode == "quantile" ? "prob," : "x,") + a.mode + "\n";
    for (int i = 0; i < g.steps; ++i) {
        const double x = i == g.steps - 1 ? g.hi : g.lo + (g.hi - g.lo) * i / (g.steps - 1);
        double v = 0.0;
        if (a.mode == "pdf") {
            v = pdf(p, x);
        } else if (a.mode == "cdf") {
            v = cdf(p, x);
        } else {
            v = quantile(p, x);
        }
        text += format_number(x) + "," + format_number(v) + "\n";
    }
    emit(a.out, text, out);
    return kOk;
}

struct DiagnoseArgs {
    ParamFlags p;
    double lambda = 0.1;
    std::string out;
    bool timestamp = false;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
    const Params p = a.p.get();
    if (!(a.lambda > 0.0)) {
        throw InputError("--lambda must be positive");
    }
    const ScoreReport r = diagnose(p, a.lambda);
    RunManifest m{"diagnose", {{"params", params_json(p)}, {"lambda", a.lambda}}, std::nullopt,
                  std::nullopt};
    if (a.timestamp) {
        m.timestamp = utc_now();
    }

    Json doc;
    doc["schema"] = "esb3.diagnose";
    doc["manifest"] = manifest_json(m);
    doc["params"] = {{"c", p.c}, {"k", p.k}, {"eps", p.eps}};
    Json limits = Json::object();
    Json bounded = Json::object();
    Json probe_bounded = Json::object();
    for (Coordinate which : kCoordinateOrder) {
        const std::string name(to_string(which));
        const auto& lim = r.limits.at(which);
        limits[name] = {{"plus", limit_value(lim.plus)}, {"minus", limit_value(lim.minus)}};
        bounded[name] = r.bounded.at(which);
        probe_bounded[name] = r.probe_bounded.at(which);
    }
    doc["limits"] = limits;
    doc["bounded"] = bounded;
    doc["probe_bounded"] = probe_bounded;
    doc["conflicts"] = r.conflicts;
    Json probes = Json::array();
    for (const auto& row : r.probes) {
        Json psi_row = Json::object();
        for (Coordinate which : kCoordinateOrder) {
            psi_row[std::string(to_string(which))] = row.psi[static_cast<int>(which)];
        }
        probes.push_back({{"x", row.x}, {"psi", psi_row}});
    }
    doc["psi_probes"] = probes;
    doc["x0"] = r.redescend.x0 ? Json(*r.redescend.x0) : Json(nullptr);
    doc["x0_reason"] = r.redescend.reason;
    doc["rho_conditions"] = {{"rho_zero_at_origin", r.rho.rho_zero_at_origin},
                             {"rho_diverges", r.rho.rho_diverges},
                             {"rho_sublinear", r.rho.rho_sublinear},
                             {"psi_redescending", r.rho.psi_redescending}};
    doc["tail_heavy"] = r.tail.heavy;
    Json tail = Json::array();
    for (const auto& t : r.tail.probes) {
        tail.push_back({{"x", t.x}, {"log_value", t.log_value}});
    }
    doc["tail_probes"] = tail;
    doc["tail_index_estimate"] = r.tail_index;
    emit(a.out, dump_json(doc) + "\n", out);
    return kOk;
}

struct GofArgs {
    std::string input;
    std::size_t column = 1;
    std::size_t skip_rows = 0;
    ParamFlags p;
    std::string fit_result;
    std::string overlay;
    std::string out;
    bool timestamp = false;
};

int cmd_gof(const GofArgs& a, bool params_given, std::ostream& out) {
    const Dataset data = load(a.input, {a.column, a.skip_rows});
    Params p;
    int free_params = 5;
    if (!a.fit_result.empty()) {
        std::ifstream in(a.fit_result);
        if (!in) {
            throw InputError("cannot open '" + a.fit_result + "'");
        }
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(a.fit_result + ": " + e.what());
        }
        if (!doc.contains("params")) {
            throw InputError(a.fit_result + ": no params object");
        }
        p = params_from_json(doc["params"]);
        validate(p);
        if (doc.contains("free_params") && doc["free_params"].is_number_integer()) {
            free_params = doc["free_params"].get<int>();
        }
    } else if (params_given) {
        p = a.p.get();
    } else {
        throw InputError("gof needs --c and --k (with --mu, --sigma, --eps) or --fit-result");
    }
    const double ll = loglik(p, data.values());
    const GofReport r =
        gof_report(data, "ESBIII", [&](double y) { return cdf(p, y); }, ll, free_params);

    RunManifest m{"gof", Json::object(), std::nullopt, std::nullopt};
    m.config["input"] = a.input;
    m.config["column"] = a.column;
    m.config["skip_rows"] = a.skip_rows;
    m.config["params_source"] = a.fit_result.empty() ? Json("flags") : Json(a.fit_result);
    if (a.timestamp) {
        m.timestamp = utc_now();
    }
    const Json manifest = manifest_json(m);

    if (!a.overlay.empty()) {
        std::string text = csv_header(manifest) + "x,ecdf,model_cdf\n";
        const auto sorted = data.sorted();
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
                continue;
            }
            text += format_number(sorted[i]) + "," + format_number(ecdf(data, sorted[i])) + "," +
                    format_number(cdf(p, sorted[i])) + "\n";
        }
        emit(a.overlay, text, out);
    }

    Json doc;
    doc["schema"] = "esb3.gof";
    doc["manifest"] = manifest;
    doc["data"] = {{"label", data.label()}, {"source", data.source()}, {"n", data.size()}};
    doc["params"] = params_json(p);
    doc["loglik"] = ll;
    doc["free_params"] = free_params;
    doc["report"] = gof_json(r);
    doc["overlay"] = a.overlay.empty() ? Json(nullptr) : Json(a.overlay);
    emit(a.out, dump_json(doc) + "\n", out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fit, sample, evaluate and diagnose the epsilon-skew Burr III distribution",
                 "esb3"};
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "maximum-likelihood fit with KS and AIC");
    fit->add_option("--input", fa.input, "data file")->required();
    fit->add_option("--column", fa.column, "1-based column")->capture_default_str();
    fit->add_option("--skip-rows", fa.skip_rows, "lines to drop first")->capture_default_str();
    fit->add_option("--fixed-c", fa.fixed_c, "hold c at this value");
    fit->add_option("--init", fa.init, "start \"mu,sigma,c,k,eps\"");
    fit->add_option("--tol", fa.tol, "relative parameter tolerance")->capture_default_str();
    fit->add_option("--score-tol", fa.score_tol, "score norm tolerance (default 1e-5 n)");
    fit->add_option("--max-cycles", fa.max_cycles)->capture_default_str();
    fit->add_option("--out", fa.out, "output path (default stdout)");
    fit->add_flag("--timestamp", fa.timestamp, "record the UTC time in the manifest");

    SampleArgs sa;
    auto* smp = app.add_subcommand("sample", "seeded draws, one per line");
    add_param_flags(smp, sa.p, true);
    smp->add_option("--n", sa.n)->required();
    smp->add_option("--seed", sa.seed)->required();
    smp->add_option("--out", sa.out);
    smp->add_flag("--timestamp", sa.timestamp);

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "pdf, cdf or quantile on a grid (CSV)");
    add_param_flags(ev, ea.p, true);
    ev->add_option("--mode", ea.mode)
        ->check(CLI::IsMember({"pdf", "cdf", "quantile"}))
        ->capture_default_str();
    ev->add_option("--grid", ea.grid, "lo:hi:steps")->required();
    ev->add_option("--out", ea.out);
    ev->add_flag("--timestamp", ea.timestamp);

    DiagnoseArgs da;
    auto* dg = app.add_subcommand("diagnose", "score-function robustness report");
    add_param_flags(dg, da.p, true);
    dg->add_option("--lambda", da.lambda, "heavy-tail test rate")->capture_default_str();
    dg->add_option("--out", da.out);
    dg->add_flag("--timestamp", da.timestamp);

    GofArgs ga;
    auto* gf = app.add_subcommand("gof", "KS, p-value and AIC for given parameters");
    gf->add_option("--input", ga.input, "data file")->required();
    gf->add_option("--column", ga.column)->capture_default_str();
    gf->add_option("--skip-rows", ga.skip_rows)->capture_default_str();
    add_param_flags(gf, ga.p, false);
    gf->add_option("--fit-result", ga.fit_result, "JSON written by fit");
    gf->add_option("--overlay", ga.overlay, "ECDF and model CDF CSV path");
    gf->add_option("--out", ga.out);
    gf->add_flag("--timestamp", ga.timestamp);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*fit) {
            return cmd_fit(fa, out, err);
        }
        if (*smp) {
            return cmd_sample(sa, out);
        }
        if (*ev) {
            return cmd_eval(ea, out);
        }
        if (*dg) {
            return cmd_diagnose(da, out);
        }
        const bool params_given = gf->count("--c") > 0 && gf->count("--k") > 0;
        if (!ga.fit_result.empty() && (gf->count("--c") > 0 || gf->count("--k") > 0)) {
            throw InputError("give either parameter flags or --fit-result, not both");
        }
        return cmd_gof(ga, params_given, out);
    } catch (const InputError& e) {
        err << "esb3: input error: " << e.what() << "\n";
        return kInputError;
    } catch (const SmallSample& e) {
        err << "esb3: " << e.what() << "\n";
        return kDegenerateData;
    } catch (const DegenerateData& e) {
        err << "esb3: degenerate data: " << e.what() << "\n";
        return kDegenerateData;
    } catch (const DomainError& e) {
        err << "esb3: invalid argument: " << e.what() << "\n";
        return kInputError;
    } catch (const ConvergenceError& e) {
        err << "esb3: numerical failure: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        err << "esb3: internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

} // namespace esb3::cli
