// commands.cpp: the symstruct subcommands and the command-line entry point

#include "symstruct/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#ifndef SYMSTRUCT_VERSION
#define SYMSTRUCT_VERSION "0.0.0"
#endif

namespace symstruct::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_path(const std::string& dir, const std::string& name)
{
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

json tolerances_json(const Tolerances& t)
{
    return {{"postulate", t.postulate}, {"cptp", t.cptp},         {"trace_norm", t.trace_norm},
            {"asymmetry", t.asymmetry}, {"damping", t.damping}, {"block", t.block}};
}

json metadata(const ExperimentConfig& cfg, const std::string& command)
{
    return {{"tool", "symstruct"},
            {"version", SYMSTRUCT_VERSION},
            {"command", command},
            {"config_sha256", cfg.hash},
            {"tolerances", tolerances_json(cfg.tol)},
            {"config", cfg.json}};
}

// CSV with '#' metadata lines ahead of the header row.
class Csv {
public:
    Csv(const ExperimentConfig& cfg, const std::string& command)
    {
        text_ += "# symstruct " + std::string(SYMSTRUCT_VERSION) + " " + command + "\n";
        text_ += "# config_sha256 " + cfg.hash + "\n";
        text_ += "# tolerances " + dump_json(tolerances_json(cfg.tol), 0);
    }
    void comment(const std::string& line) { text_ += "# " + line + "\n"; }
    void header(const std::vector<std::string>& cols) { row_strings(cols); }
    void row(const std::vector<double>& values)
    {
        std::vector<std::string> s;
        s.reserve(values.size());
        for (double v : values) s.push_back(format_double(v));
        row_strings(s);
    }
    const std::string& text() const { return text_; }

private:
    void row_strings(const std::vector<std::string>& cols)
    {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) text_ += ",";
            text_ += cols[i];
        }
        text_ += "\n";
    }
    std::string text_;
};

json vector_json(const std::vector<double>& v)
{
    json out = json::array();
    for (double x : v) out.push_back(x);
    return out;
}

std::string short_g(double g)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

// Transition eigenvalues a_alpha(t) = tr(F_alpha^dagger L[F_alpha]), real parts, one series per alpha.
std::vector<std::vector<double>> asymmetry_rates(const std::vector<Superoperator>& generators,
                                                 const std::vector<bool>& singular, const EigenoperatorBasis& basis)
{
    std::vector<std::vector<double>> out(static_cast<std::size_t>(basis.num_transitions()),
                                         std::vector<double>(generators.size(), kNaN));
    for (std::size_t k = 0; k < generators.size(); ++k) {
        if (singular[k] || generators[k].dim() == 0) continue;
        const BlockStructure bs = verify_block_structure(generators[k], basis);
        for (Index a = 0; a < basis.num_transitions(); ++a) {
            out[static_cast<std::size_t>(a)][k] = bs.transition_eigenvalues(a).real();
        }
    }
    return out;
}

struct ValidationInput {
    TimeGrid grid;
    std::vector<Superoperator> maps;
    std::vector<std::vector<double>> a_alpha;
    std::vector<bool> singular;
    std::vector<Superoperator> repropagated;
};

json validation_report(const ValidationInput& in, const EigenoperatorBasis& basis, const Tolerances& tol,
                       Verdict& overall)
{
    json rep;
    overall = Verdict::Pass;

    Verdict cptp_v = Verdict::Pass;
    double min_eig = std::numeric_limits<double>::infinity();
    double trace_res = 0.0;
    json failing = json::array();
    for (std::size_t k = 0; k < in.maps.size(); ++k) {
        const CptpReport r = cptp_check(in.maps[k], tol.cptp);
        min_eig = std::min(min_eig, r.min_choi_eigenvalue);
        trace_res = std::max(trace_res, r.trace_residual);
        if (r.verdict == Verdict::Fail) failing.push_back(in.grid[k]);
        cptp_v = combine(cptp_v, r.verdict);
    }
    rep["cptp"] = {{"verdict", to_string(cptp_v)},
                   {"min_choi_eigenvalue", min_eig},
                   {"max_trace_residual", trace_res},
                   {"failing_times", failing}};
    overall = combine(overall, cptp_v);

    const TraceNormReport tn = trace_norm_monotone_check(in.maps, basis, tol.trace_norm, tol.block);
    rep["trace_norm"] = {{"verdict", to_string(tn.verdict)},
                         {"max_abs_eigenvalue", tn.max_abs_eigenvalue},
                         {"max_block_residual", tn.max_block_residual}};
    overall = combine(overall, tn.verdict);

    Verdict damp_v = Verdict::Pass;
    double damp_min = std::numeric_limits<double>::infinity();
    for (const auto& m : in.maps) {
        const DampingReport d = damping_matrix_check(m, basis, tol.damping);
        damp_min = std::min(damp_min, d.min_eigenvalue);
        damp_v = combine(damp_v, d.verdict);
    }
    rep["damping"] = {{"verdict", to_string(damp_v)}, {"min_eigenvalue", damp_min}};
    overall = combine(overall, damp_v);

    const AsymmetryReport asym = asymmetry_integral_check(in.a_alpha, in.grid, in.singular, tol.asymmetry);
    json per_alpha = json::array();
    for (std::size_t a = 0; a < asym.verdicts.size(); ++a) {
        per_alpha.push_back({{"verdict", to_string(asym.verdicts[a])}, {"worst_margin", asym.worst_margin[a]}});
    }
    rep["asymmetry"] = {{"verdict", to_string(asym.verdict)}, {"transitions", per_alpha}};
    overall = combine(overall, asym.verdict);

    if (!in.repropagated.empty()) {
        Verdict rv = Verdict::Pass;
        double rmin = std::numeric_limits<double>::infinity();
        double roundtrip = 0.0;
        for (std::size_t k = 0; k < in.repropagated.size(); ++k) {
            roundtrip = std::max(roundtrip, (in.repropagated[k].matrix() - in.maps[k].matrix()).cwiseAbs().maxCoeff());
        }
        // Negativity below the measured integration error is not resolvable.
        const double floor = tol.cptp + roundtrip;
        for (const auto& m : in.repropagated) {
            const CptpReport r = cptp_check(m, floor);
            rmin = std::min(rmin, r.min_choi_eigenvalue);
            rv = combine(rv, r.verdict);
        }
        if (in.repropagated.size() < in.maps.size()) rv = combine(rv, Verdict::Inconclusive);
        rep["cptp_repropagated"] = {{"verdict", to_string(rv)},
                                    {"min_choi_eigenvalue", rmin},
                                    {"roundtrip_error", roundtrip},
                                    {"points", in.repropagated.size()}};
        overall = combine(overall, rv);
    }
    rep["verdict"] = to_string(overall);
    return rep;
}

JointSystem build_joint(const ExperimentConfig& cfg, double g)
{
    switch (cfg.model) {
    case ModelKind::JC: return jc_joint_hamiltonian(cfg.jc);
    case ModelKind::SpinStar: return spinstar_joint_hamiltonian(SpinStarConfig{cfg.spin_k, g, cfg.spin_omega});
    case ModelKind::Custom:
        return JointSystem(cfg.custom.h_s, cfg.custom.h_e, cfg.custom.h_se, DensityOperator(cfg.custom.rho_e),
                           cfg.tol.postulate);
    }
    throw InvalidArgument("unknown model");
}

double model_coupling(const ExperimentConfig& cfg)
{
    if (cfg.model == ModelKind::JC) return cfg.jc.g;
    if (cfg.model == ModelKind::SpinStar) return cfg.spin_g.front();
    return 1.0;
}

Matrix spin_initial_state(const ExperimentConfig& cfg)
{
    return 0.5 * ops::identity(2) + 0.5 * cfg.r_z * ops::pauli_z() + cfg.r_plus * ops::sigma_plus() +
           std::conj(cfg.r_plus) * ops::sigma_minus();
}

std::string model_name(ModelKind m)
{
    switch (m) {
    case ModelKind::JC: return "JC";
    case ModelKind::SpinStar: return "SPINSTAR";
    case ModelKind::Custom: return "CUSTOM";
    }
    return "?";
}

} // namespace

CommandResult cmd_jc_rates(const ExperimentConfig& cfg, const std::string& out_dir)
{
    if (cfg.model != ModelKind::JC) throw ConfigError(cfg.source, 1, "jc-rates needs model JC");
    ensure_dir(out_dir);
    const TimeGrid grid = cfg.grid(cfg.jc.g);
    const JCRates r = jc_rates(cfg.jc, grid);

    Csv csv(cfg, "jc-rates");
    csv.header({"t", "eta_par", "eta_perp", "r", "gamma_plus", "gamma_minus", "gamma_z", "singular_flag"});
    double min_plus = kNaN, min_minus = kNaN, min_z = kNaN;
    std::size_t n_singular = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool undefined = std::abs(r.eta_par[k]) < 1e-10 || std::abs(r.eta_perp[k]) < 1e-10;
        const double gp = undefined ? kNaN : r.gamma_plus[k];
        const double gm = undefined ? kNaN : r.gamma_minus[k];
        const double gz = undefined ? kNaN : r.gamma_z[k];
        if (!undefined) {
            min_plus = std::isnan(min_plus) ? gp : std::min(min_plus, gp);
            min_minus = std::isnan(min_minus) ? gm : std::min(min_minus, gm);
            min_z = std::isnan(min_z) ? gz : std::min(min_z, gz);
        }
        if (r.singular[k]) ++n_singular;
        csv.row({grid[k], r.eta_par[k], r.eta_perp[k], r.r[k], gp, gm, gz, r.singular[k] ? 1.0 : 0.0});
    }
    CommandResult res;
    const std::string csv_path = join_path(out_dir, "jc_rates.csv");
    const std::string json_path = join_path(out_dir, "jc_rates.json");
    write_file(csv_path, csv.text());
    json side = metadata(cfg, "jc-rates");
    side["summary"] = {{"points", grid.size()},
                       {"singular_points", n_singular},
                       {"min_gamma_plus", min_plus},
                       {"min_gamma_minus", min_minus},
                       {"min_gamma_z", min_z}};
    write_file(json_path, dump_json(side));
    res.files = {csv_path, json_path};
    res.messages.push_back("jc-rates: " + std::to_string(grid.size()) + " points, " + std::to_string(n_singular) +
                           " singular");
    return res;
}

CommandResult cmd_spinstar_compare(const ExperimentConfig& cfg, const std::string& out_dir, int threads)
{
    if (cfg.model != ModelKind::SpinStar) throw ConfigError(cfg.source, 1, "spinstar-compare needs model SPINSTAR");
    ensure_dir(out_dir);
    CommandResult res;
    json side = metadata(cfg, "spinstar-compare");
    json runs = json::array();
    const Matrix rho0 = spin_initial_state(cfg);
    const Matrix sz = ops::pauli_z();

    for (double g : cfg.spin_g) {
        const SpinStarConfig sc{cfg.spin_k, g, cfg.spin_omega};
        const TimeGrid grid = cfg.grid(g);
        const SpinStarKappas kap = spinstar_kappas(sc, grid);
        const Trajectory exact = spinstar_exact_trajectory(sc, rho0, grid);
        std::vector<double> exact_deriv(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) exact_deriv[k] = kap.dkappa_z[k] * cfg.r_z;

        const bool needs_joint = std::any_of(cfg.series.begin(), cfg.series.end(),
                                             [](const SeriesEntry& e) { return e.kind != ApproxKind::Exact; });
        std::unique_ptr<JointSystem> js;
        std::unique_ptr<EigenoperatorBasis> basis;
        std::map<ApproxKind, SeriesMoments> moments;
        json warnings = json::array();
        double lambda_b = 0.0;
        const double t_end = grid.back();
        if (needs_joint) {
            js = std::make_unique<JointSystem>(spinstar_joint_hamiltonian(sc));
            basis = std::make_unique<EigenoperatorBasis>(build_basis(js->system_hamiltonian()));
            lambda_b = js->spectral_bound() > 0.0 ? js->spectral_bound() : 1.0;
            for (const auto& w : js->warnings()) warnings.push_back(w);
            std::map<ApproxKind, int> max_order;
            for (const auto& e : cfg.series) {
                if (e.kind == ApproxKind::Exact) continue;
                const SeriesKind sk = e.kind == ApproxKind::Maclaurin ? SeriesKind::Maclaurin : SeriesKind::Chebychev;
                const int order = e.order > 0 ? e.order : default_order(sk, lambda_b, t_end);
                max_order[e.kind] = std::max(max_order[e.kind], order);
            }
            for (const auto& [kind, order] : max_order) {
                const SeriesKind sk = kind == ApproxKind::Maclaurin ? SeriesKind::Maclaurin : SeriesKind::Chebychev;
                moments.emplace(kind, compute_series_moments(*js, *basis, sk, order, 0.0, threads));
            }
        }

        std::vector<std::string> labels;
        std::vector<std::vector<double>> columns;
        json col_meta = json::array();
        for (const auto& e : cfg.series) {
            std::vector<double> col(grid.size(), kNaN);
            SeriesEntry entry = e;
            if (e.kind == ApproxKind::Exact) {
                const SpinStarGenerator gen = spinstar_exact_generator(sc, grid);
                const Superoperator free = ops::hamiltonian_superop(cfg.spin_omega * sz);
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    if (gen.singular[k]) continue;
                    const Superoperator l = spinstar_generator_superop(gen.eta_z[k], gen.eta[k]) + free;
                    col[k] = (sz * l.apply(exact.states[k])).trace().real();
                }
            } else {
                const SeriesKind sk = e.kind == ApproxKind::Maclaurin ? SeriesKind::Maclaurin : SeriesKind::Chebychev;
                entry.order = e.order > 0 ? e.order : default_order(sk, lambda_b, t_end);
                const SeriesExtraction ex = coefficients_from_moments(moments.at(e.kind), *basis, grid, entry.order,
                                                                      t_end, cfg.form);
                for (const auto& w : ex.warnings) warnings.push_back(entry.label() + ": " + w);
                if (cfg.form == GeneratorForm::MapDerivative) {
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        col[k] = (sz * ex.generators[k].apply(rho0)).trace().real();
                    }
                } else {
                    const KineticCoefficients sp = to_schroedinger_picture(ex.coefficients, js->system_hamiltonian());
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        if (sp.singular[k]) continue;
                        const Superoperator l = assemble_generator(sp.values[k], *basis);
                        col[k] = (sz * l.apply(exact.states[k])).trace().real();
                    }
                }
            }
            double max_err = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (!std::isnan(col[k])) max_err = std::max(max_err, std::abs(col[k] - exact_deriv[k]));
            }
            col_meta.push_back({{"label", entry.label()}, {"order", entry.order}, {"max_abs_error", max_err}});
            labels.push_back(entry.label());
            columns.push_back(std::move(col));
        }

        Csv csv(cfg, "spinstar-compare");
        csv.comment("K=" + std::to_string(cfg.spin_k) + " g=" + format_double(g) + " omega=" + format_double(cfg.spin_omega));
        std::vector<std::string> header{"t", "gt", "exact"};
        for (const auto& l : labels) header.push_back(l);
        for (const auto& l : labels) header.push_back("err_" + l);
        csv.header(header);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::vector<double> row{grid[k], g * grid[k], exact_deriv[k]};
            for (const auto& c : columns) row.push_back(c[k]);
            for (const auto& c : columns) row.push_back(std::abs(c[k] - exact_deriv[k]));
            csv.row(row);
        }
        const std::string path = join_path(out_dir, "spinstar_compare_g" + short_g(g) + ".csv");
        write_file(path, csv.text());
        res.files.push_back(path);
        runs.push_back({{"g", g},
                        {"file", std::filesystem::path(path).filename().string()},
                        {"spectral_bound", lambda_b},
                        {"t_end", t_end},
                        {"columns", col_meta},
                        {"warnings", warnings}});
        res.messages.push_back("spinstar-compare: g=" + short_g(g) + " -> " + path);
    }
    side["runs"] = runs;
    const std::string json_path = join_path(out_dir, "spinstar_compare.json");
    write_file(json_path, dump_json(side));
    res.files.push_back(json_path);
    return res;
}

CommandResult cmd_extract(const ExperimentConfig& cfg, const std::string& out_dir, int threads)
{
    ensure_dir(out_dir);
    if (cfg.model == ModelKind::SpinStar && cfg.spin_g.size() != 1) {
        throw ConfigError(cfg.source, 1, "extract needs a single spin-star coupling g");
    }
    const double g = model_coupling(cfg);
    const TimeGrid grid = cfg.grid(g);
    const JointSystem js = build_joint(cfg, g);
    const FreeHamiltonian& hs = js.system_hamiltonian();
    if (bohr_spectrum(hs, default_degeneracy_tolerance(hs)).degenerate) {
        throw DegenerateSpectrum("extract: Bohr spectrum of H_S is degenerate; lift the degeneracy first");
    }
    const EigenoperatorBasis basis = build_basis(hs);
    const Index n = basis.dim();
    SeriesEntry entry = cfg.series.front();

    KineticCoefficients coeffs;
    std::vector<Superoperator> maps;
    std::vector<Superoperator> generators;
    json warnings = json::array();
    for (const auto& w : js.warnings()) warnings.push_back(w);
    if (entry.kind == ApproxKind::Exact) {
        maps = map_from_joint_unitary(js.interaction(), js.environment_state(), n, grid, threads);
        const GeneratorSeries gs = extract_generator(maps, grid);
        coeffs.grid = grid;
        coeffs.values.resize(grid.size(), CoefficientSet::zero(n));
        coeffs.singular = gs.singular;
        flag_zero_crossings(maps, basis, coeffs.singular);
        generators = gs.generators;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (gs.singular[k]) continue;
            coeffs.values[k] = fit_coefficients_from_generator(gs.generators[k], basis).coefficients;
        }
    } else {
        const SeriesKind sk = entry.kind == ApproxKind::Maclaurin ? SeriesKind::Maclaurin : SeriesKind::Chebychev;
        const double lb = js.spectral_bound() > 0.0 ? js.spectral_bound() : 1.0;
        if (entry.order == 0) entry.order = default_order(sk, lb, grid.back());
        const SeriesExtraction ex =
            extract_kinetic_coefficients(js, SeriesSpec{sk, entry.order, grid.back(), 0.0}, grid, cfg.form, threads);
        for (std::size_t i = js.warnings().size(); i < ex.warnings.size(); ++i) warnings.push_back(ex.warnings[i]);
        coeffs = ex.coefficients;
        maps = ex.maps;
        generators = ex.generators;
    }

    ValidationInput vin;
    vin.grid = grid;
    vin.maps = maps;
    vin.singular = coeffs.singular;
    vin.a_alpha = asymmetry_rates(generators, coeffs.singular, basis);
    if (cfg.form == GeneratorForm::TimeLocal && grid.size() > 1) {
        std::size_t usable = 0;
        while (usable < grid.size() && !coeffs.singular[usable]) ++usable;
        if (usable >= 2) {
            KineticCoefficients head;
            head.grid = TimeGrid(std::vector<double>(grid.points().begin(), grid.points().begin() + static_cast<std::ptrdiff_t>(usable)));
            head.values.assign(coeffs.values.begin(), coeffs.values.begin() + static_cast<std::ptrdiff_t>(usable));
            head.singular.assign(usable, false);
            vin.repropagated = propagate_map(head, basis);
        }
    }
    Verdict verdict = Verdict::Pass;
    const json report = validation_report(vin, basis, cfg.tol, verdict);

    json out = metadata(cfg, "extract");
    out["model"] = model_name(cfg.model);
    out["series"] = entry.label();
    out["form"] = cfg.form == GeneratorForm::TimeLocal ? "time_local" : "map_derivative";
    out["picture"] = "interaction";
    out["system_hamiltonian"] = matrix_to_json(hs.matrix());
    json transitions = json::array();
    for (const auto& t : basis.transitions()) transitions.push_back({t.n, t.m, t.omega});
    out["transitions"] = transitions;
    out["postulates"] = {{"energy_conservation", js.report().energy_conservation},
                         {"stationarity", js.report().stationarity},
                         {"mean_field", js.report().mean_field},
                         {"mean_field_absorbed", js.report().mean_field_absorbed}};
    out["grid"] = vector_json(grid.points());
    json singular = json::array();
    json values = json::array();
    json map_list = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        singular.push_back(static_cast<bool>(coeffs.singular[k]));
        if (coeffs.singular[k]) {
            values.push_back(nullptr);
        } else {
            const CoefficientSet& v = coeffs.values[k];
            json c = json::array();
            for (Index i = 0; i < v.c.size(); ++i) c.push_back(v.c(i));
            values.push_back({{"c", c}, {"d", matrix_to_json(v.d)}, {"hbar", matrix_to_json(v.hbar)}});
        }
        map_list.push_back(matrix_to_json(maps[k].matrix()));
    }
    out["singular"] = singular;
    out["coefficients"] = values;
    out["maps"] = map_list;
    json a_alpha = json::array();
    for (const auto& series : vin.a_alpha) a_alpha.push_back(vector_json(series));
    out["a_alpha"] = a_alpha;
    out["warnings"] = warnings;
    out["validation"] = report;

    const std::string path = join_path(out_dir, "extract.json");
    write_file(path, dump_json(out));
    CommandResult res;
    res.files = {path};
    res.messages.push_back("extract: " + entry.label() + " on " + std::to_string(grid.size()) +
                           " points, validation " + to_string(verdict));
    return res;
}

CommandResult cmd_validate(const ExperimentConfig& cfg, const std::string& out_dir)
{
    if (cfg.inputs.empty()) throw ConfigError(cfg.source, 1, "validate needs a non-empty 'inputs' list");
    ensure_dir(out_dir);
    json out = metadata(cfg, "validate");
    json reports = json::array();
    std::ostringstream text;
    Verdict overall = Verdict::Pass;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read input '" + path + "'");
        json data;
        try {
            data = json::parse(in);
        } catch (const json::exception& e) {
            throw IoError("input '" + path + "' is not valid JSON: " + e.what());
        }
        ValidationInput vin;
        std::unique_ptr<EigenoperatorBasis> basis;
        try {
            basis = std::make_unique<EigenoperatorBasis>(
                build_basis(FreeHamiltonian(matrix_from_json(data.at("system_hamiltonian")))));
            vin.grid = TimeGrid(data.at("grid").get<std::vector<double>>());
            for (const auto& m : data.at("maps")) vin.maps.emplace_back(basis->dim(), matrix_from_json(m));
            for (const auto& s : data.at("singular")) vin.singular.push_back(s.get<bool>());
            for (const auto& series : data.at("a_alpha")) {
                std::vector<double> v;
                for (const auto& x : series) v.push_back(x.is_null() ? kNaN : x.get<double>());
                vin.a_alpha.push_back(std::move(v));
            }
        } catch (const json::exception& e) {
            throw IoError("input '" + path + "' lacks extract data: " + e.what());
        }
        Verdict v = Verdict::Pass;
        json rep = validation_report(vin, *basis, cfg.tol, v);
        overall = combine(overall, v);
        const std::string name = std::filesystem::path(path).filename().string();
        rep["input"] = name;
        rep["series"] = data.value("series", "");
        reports.push_back(rep);
        text << name << " (" << data.value("series", "") << "): " << to_string(v) << "\n";
        for (const char* key : {"cptp", "trace_norm", "damping", "asymmetry", "cptp_repropagated"}) {
            if (rep.contains(key)) text << "  " << key << ": " << rep[key]["verdict"].get<std::string>() << "\n";
        }
    }
    out["reports"] = reports;
    out["verdict"] = to_string(overall);
    text << "overall: " << to_string(overall) << "\n";
    const std::string json_path = join_path(out_dir, "validate_report.json");
    const std::string txt_path = join_path(out_dir, "validate_report.txt");
    write_file(json_path, dump_json(out));
    write_file(txt_path, "# config_sha256 " + cfg.hash + "\n" + text.str());
    CommandResult res;
    res.files = {json_path, txt_path};
    res.messages.push_back("validate: " + to_string(overall));
    if (overall == Verdict::Fail) res.exit_code = kExitPhysics;
    return res;
}

int run(int argc, char** argv)
{
    CLI::App app{"symmetry-structured kinetic coefficients for open quantum systems", "symstruct"};
    app.set_version_flag("--version", SYMSTRUCT_VERSION);
    app.require_subcommand(1);
    std::string config_path;
    std::string out_override;
    int threads = 0;
    std::vector<CLI::App*> subs;
    for (const char* name : {"jc-rates", "spinstar-compare", "extract", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_override, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
        subs.push_back(sub);
    }
    subs[0]->description("closed-form Jaynes-Cummings rates (CSV + JSON)");
    subs[1]->description("series approximations of d<sigma_z>/dt for the spin-star model");
    subs[2]->description("kinetic coefficients from a joint Hamiltonian, with validator report");
    subs[3]->description("consolidated validator report over extract outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (threads == 0) {
        if (const char* env = std::getenv("SYMSTRUCT_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                threads = 0;
            }
            if (threads < 1) {
                std::cerr << "symstruct: SYMSTRUCT_THREADS must be a positive integer\n";
                return kExitConfig;
            }
        } else {
            threads = 1;
        }
    }

    try {
        const ExperimentConfig cfg = load_config(config_path);
        const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;
        CommandResult res;
        if (subs[0]->parsed()) {
            res = cmd_jc_rates(cfg, out_dir);
        } else if (subs[1]->parsed()) {
            res = cmd_spinstar_compare(cfg, out_dir, threads);
        } else if (subs[2]->parsed()) {
            res = cmd_extract(cfg, out_dir, threads);
        } else {
            res = cmd_validate(cfg, out_dir);
        }
        for (const auto& m : res.messages) std::cout << m << "\n";
        for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
        return res.exit_code;
    } catch (const IoError& e) {
        std::cerr << "symstruct: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const PostulateViolation& e) {
        std::cerr << "symstruct: physics constraint violated: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const SymmetryViolation& e) {
        std::cerr << "symstruct: physics constraint violated: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const InvalidArgument& e) {
        std::cerr << "symstruct: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        std::cerr << "symstruct: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "symstruct: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace symstruct::cli
