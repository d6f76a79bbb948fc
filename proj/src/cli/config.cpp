// config.cpp: experiment configuration parsing and deterministic serialization

#include "symstruct/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace symstruct::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : InvalidArgument(source + ":" + std::to_string(line) + ": " + message), line_(line)
{
}

std::string SeriesEntry::label() const
{
    switch (kind) {
    case ApproxKind::Maclaurin: return "maclaurin_M" + std::to_string(order);
    case ApproxKind::Chebychev: return "chebychev_M" + std::to_string(order);
    case ApproxKind::Exact: return "exact";
    }
    return "unknown";
}

TimeGrid ExperimentConfig::grid(double g) const
{
    double end = t_max;
    if (grid_scaled) {
        if (g == 0.0) throw InvalidArgument("grid: gt_max needs a non-zero coupling");
        end = t_max / std::abs(g);
    }
    if (n_points == 1) return TimeGrid({0.0});
    return TimeGrid::uniform(0.0, end, static_cast<std::size_t>(n_points));
}

namespace {

class Reader {
public:
    Reader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

    int line_at(std::size_t pos) const
    {
        pos = std::min(pos, text_.size());
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    }

    // Line of the first occurrence of "key" after the occurrence of "parent".
    int key_line(const std::string& key, const std::string& parent = "") const
    {
        std::size_t from = 0;
        if (!parent.empty()) {
            const std::size_t p = text_.find("\"" + parent + "\"");
            if (p != std::string::npos) from = p;
        }
        const std::size_t k = text_.find("\"" + key + "\"", from);
        if (k == std::string::npos) return parent.empty() ? 1 : key_line(parent);
        return line_at(k);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& parent, const std::string& msg) const
    {
        throw ConfigError(source_, key_line(key, parent), msg);
    }

    void allow_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) const
    {
        if (!obj.is_object()) fail(where, "", "'" + where + "' must be an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key())) {
                fail(it.key(), where == "<root>" ? "" : where, "unknown key '" + it.key() + "' in " + where);
            }
        }
    }

    double number(const json& obj, const std::string& key, const std::string& parent, double fallback,
                  bool required = false) const
    {
        if (!obj.contains(key)) {
            if (required) fail(parent, "", "missing required key '" + key + "' in " + parent);
            return fallback;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) fail(key, parent, "'" + key + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, parent, "'" + key + "' must be finite");
        return d;
    }

    int integer(const json& obj, const std::string& key, const std::string& parent, int fallback,
                bool required = false) const
    {
        if (!obj.contains(key)) {
            if (required) fail(parent, "", "missing required key '" + key + "' in " + parent);
            return fallback;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(key, parent, "'" + key + "' must be an integer");
        return v.get<int>();
    }

    std::string string(const json& obj, const std::string& key, const std::string& parent,
                       const std::string& fallback, bool required = false) const
    {
        if (!obj.contains(key)) {
            if (required) fail(parent.empty() ? key : parent, "", "missing required key '" + key + "'");
            return fallback;
        }
        const json& v = obj.at(key);
        if (!v.is_string()) fail(key, parent, "'" + key + "' must be a string");
        return v.get<std::string>();
    }

    Matrix matrix(const json& obj, const std::string& key, const std::string& parent) const
    {
        if (!obj.contains(key)) fail(parent, "", "missing required matrix '" + key + "' in " + parent);
        try {
            return matrix_from_json(obj.at(key));
        } catch (const std::exception& e) {
            fail(key, parent, "'" + key + "': " + e.what());
        }
    }

private:
    const std::string& text_;
    const std::string& source_;
};

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    ExperimentConfig cfg;
    cfg.source = source;
    cfg.text = text;
    cfg.hash = sha256_hex(text);
    const Reader rd(cfg.text, cfg.source);
    try {
        cfg.json = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source, rd.line_at(e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
    }
    const json& root = cfg.json;
    rd.allow_keys(root, {"description", "model", "jc", "spinstar", "custom", "grid", "series", "form", "output",
                         "tolerances", "inputs"},
                  "<root>");
    if (root.contains("description") && !root.at("description").is_string()) {
        rd.fail("description", "", "'description' must be a string");
    }

    const std::string model = upper(rd.string(root, "model", "", "", true));
    if (model == "JC") {
        cfg.model = ModelKind::JC;
    } else if (model == "SPINSTAR") {
        cfg.model = ModelKind::SpinStar;
    } else if (model == "CUSTOM") {
        cfg.model = ModelKind::Custom;
    } else {
        rd.fail("model", "", "model must be JC, SPINSTAR or CUSTOM, got '" + model + "'");
    }

    if (cfg.model == ModelKind::JC) {
        if (!root.contains("jc")) rd.fail("model", "", "model JC needs a 'jc' section");
        const json& j = root.at("jc");
        rd.allow_keys(j, {"g", "omega", "env_populations", "fock", "n_trunc"}, "jc");
        cfg.jc.g = rd.number(j, "g", "jc", 1.0);
        cfg.jc.omega = rd.number(j, "omega", "jc", 1.0);
        std::vector<double> pops;
        if (j.contains("env_populations") && j.contains("fock")) {
            rd.fail("fock", "jc", "give either 'env_populations' or 'fock', not both");
        }
        if (j.contains("fock")) {
            const int n = rd.integer(j, "fock", "jc", 0);
            if (n < 0) rd.fail("fock", "jc", "'fock' must be >= 0");
            pops.assign(static_cast<std::size_t>(n) + 1, 0.0);
            pops.back() = 1.0;
        } else if (j.contains("env_populations")) {
            const json& p = j.at("env_populations");
            if (!p.is_array() || p.empty()) rd.fail("env_populations", "jc", "'env_populations' must be a non-empty array");
            for (const auto& v : p) {
                if (!v.is_number()) rd.fail("env_populations", "jc", "'env_populations' entries must be numbers");
                pops.push_back(v.get<double>());
            }
        } else {
            pops = {1.0};
        }
        const int n_trunc = rd.integer(j, "n_trunc", "jc", static_cast<int>(pops.size()));
        if (n_trunc < static_cast<int>(pops.size()) - 1 || n_trunc < 1) {
            rd.fail("n_trunc", "jc", "'n_trunc' must be >= 1 and cover every populated Fock level");
        }
        pops.resize(static_cast<std::size_t>(n_trunc) + 1, 0.0);
        cfg.jc.env_populations = pops;
        cfg.jc.n_trunc = n_trunc;
        try {
            cfg.jc.validate();
        } catch (const InvalidArgument& e) {
            rd.fail("jc", "", e.what());
        }
    } else if (root.contains("jc")) {
        rd.fail("jc", "", "'jc' section given for model " + model);
    }

    if (cfg.model == ModelKind::SpinStar) {
        if (!root.contains("spinstar")) rd.fail("model", "", "model SPINSTAR needs a 'spinstar' section");
        const json& s = root.at("spinstar");
        rd.allow_keys(s, {"K", "g", "omega", "r_z", "r_plus"}, "spinstar");
        cfg.spin_k = rd.integer(s, "K", "spinstar", 1, true);
        if (cfg.spin_k < 1 || cfg.spin_k > 12) rd.fail("K", "spinstar", "'K' must be in 1..12");
        cfg.spin_omega = rd.number(s, "omega", "spinstar", 1.0);
        if (s.contains("g") && s.at("g").is_array()) {
            cfg.spin_g.clear();
            for (const auto& v : s.at("g")) {
                if (!v.is_number()) rd.fail("g", "spinstar", "'g' entries must be numbers");
                cfg.spin_g.push_back(v.get<double>());
            }
            if (cfg.spin_g.empty()) rd.fail("g", "spinstar", "'g' must not be empty");
        } else {
            cfg.spin_g = {rd.number(s, "g", "spinstar", 1.0)};
        }
        cfg.r_z = rd.number(s, "r_z", "spinstar", 0.3);
        if (s.contains("r_plus") && s.at("r_plus").is_array()) {
            const json& rp = s.at("r_plus");
            if (rp.size() != 2 || !rp[0].is_number() || !rp[1].is_number()) {
                rd.fail("r_plus", "spinstar", "'r_plus' must be a number or [re, im]");
            }
            cfg.r_plus = cplx(rp[0].get<double>(), rp[1].get<double>());
        } else {
            cfg.r_plus = rd.number(s, "r_plus", "spinstar", 0.1);
        }
        if (std::abs(cfg.r_z) > 1.0 || 0.25 * cfg.r_z * cfg.r_z + std::norm(cfg.r_plus) > 0.25 + 1e-12) {
            rd.fail("r_z", "spinstar", "initial Bloch vector (r_z, r_plus) is not a valid qubit state");
        }
    } else if (root.contains("spinstar")) {
        rd.fail("spinstar", "", "'spinstar' section given for model " + model);
    }

    if (cfg.model == ModelKind::Custom) {
        if (!root.contains("custom")) rd.fail("model", "", "model CUSTOM needs a 'custom' section");
        const json& c = root.at("custom");
        rd.allow_keys(c, {"h_s", "h_e", "h_se", "rho_e"}, "custom");
        cfg.custom.h_s = rd.matrix(c, "h_s", "custom");
        cfg.custom.h_e = rd.matrix(c, "h_e", "custom");
        cfg.custom.h_se = rd.matrix(c, "h_se", "custom");
        cfg.custom.rho_e = rd.matrix(c, "rho_e", "custom");
        if (cfg.custom.h_s.rows() != cfg.custom.h_s.cols()) rd.fail("h_s", "custom", "'h_s' must be square");
        if (cfg.custom.h_e.rows() != cfg.custom.h_e.cols()) rd.fail("h_e", "custom", "'h_e' must be square");
        if (cfg.custom.rho_e.rows() != cfg.custom.h_e.rows() || cfg.custom.rho_e.cols() != cfg.custom.h_e.cols()) {
            rd.fail("rho_e", "custom", "'rho_e' must match 'h_e'");
        }
        const Index d = cfg.custom.h_s.rows() * cfg.custom.h_e.rows();
        if (cfg.custom.h_se.rows() != d || cfg.custom.h_se.cols() != d) {
            rd.fail("h_se", "custom", "'h_se' must be (dim h_s * dim h_e) square");
        }
    } else if (root.contains("custom")) {
        rd.fail("custom", "", "'custom' section given for model " + model);
    }

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        rd.allow_keys(g, {"t_max", "gt_max", "n_points"}, "grid");
        if (g.contains("t_max") && g.contains("gt_max")) rd.fail("gt_max", "grid", "give either 't_max' or 'gt_max'");
        if (g.contains("gt_max")) {
            cfg.grid_scaled = true;
            cfg.t_max = rd.number(g, "gt_max", "grid", 1.0);
        } else {
            cfg.t_max = rd.number(g, "t_max", "grid", 1.0, true);
        }
        cfg.n_points = rd.integer(g, "n_points", "grid", 2, true);
        if (cfg.n_points < 1) rd.fail("n_points", "grid", "'n_points' must be >= 1");
        if (cfg.n_points > 1 && !(cfg.t_max > 0.0)) rd.fail(cfg.grid_scaled ? "gt_max" : "t_max", "grid", "grid end must be > 0");
        if (cfg.model == ModelKind::Custom && cfg.grid_scaled) rd.fail("gt_max", "grid", "'gt_max' needs a JC or SPINSTAR coupling");
    } else if (!root.contains("inputs")) {
        rd.fail("model", "", "missing required section 'grid'");
    }

    if (root.contains("series")) {
        const json& s = root.at("series");
        if (!s.is_array() || s.empty()) rd.fail("series", "", "'series' must be a non-empty array");
        for (const auto& e : s) {
            rd.allow_keys(e, {"kind", "order"}, "series");
            SeriesEntry entry;
            const std::string kind = lower(rd.string(e, "kind", "series", "", true));
            if (kind == "maclaurin") {
                entry.kind = ApproxKind::Maclaurin;
            } else if (kind == "chebychev" || kind == "chebyshev") {
                entry.kind = ApproxKind::Chebychev;
            } else if (kind == "exact") {
                entry.kind = ApproxKind::Exact;
            } else {
                rd.fail("kind", "series", "series kind must be maclaurin, chebychev or exact, got '" + kind + "'");
            }
            entry.order = rd.integer(e, "order", "series", 0);
            if (entry.order < 0 || entry.order > 400) rd.fail("order", "series", "'order' must be in 1..400");
            cfg.series.push_back(entry);
        }
    } else {
        cfg.series = {SeriesEntry{ApproxKind::Chebychev, 0}};
    }

    const std::string form = lower(rd.string(root, "form", "", "time_local"));
    if (form == "time_local") {
        cfg.form = GeneratorForm::TimeLocal;
    } else if (form == "map_derivative") {
        cfg.form = GeneratorForm::MapDerivative;
    } else {
        rd.fail("form", "", "form must be time_local or map_derivative");
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        rd.allow_keys(o, {"dir"}, "output");
        cfg.out_dir = rd.string(o, "dir", "output", ".");
    }

    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        rd.allow_keys(t, {"postulate", "cptp", "trace_norm", "asymmetry", "damping", "block"}, "tolerances");
        auto tol = [&](const char* key, double fallback) {
            const double v = rd.number(t, key, "tolerances", fallback);
            if (!(v >= 0.0)) rd.fail(key, "tolerances", std::string("'") + key + "' must be >= 0");
            return v;
        };
        cfg.tol.postulate = tol("postulate", cfg.tol.postulate);
        cfg.tol.cptp = tol("cptp", cfg.tol.cptp);
        cfg.tol.trace_norm = tol("trace_norm", cfg.tol.trace_norm);
        cfg.tol.asymmetry = tol("asymmetry", cfg.tol.asymmetry);
        cfg.tol.damping = tol("damping", cfg.tol.damping);
        cfg.tol.block = tol("block", cfg.tol.block);
    }

    if (root.contains("inputs")) {
        const json& in = root.at("inputs");
        if (!in.is_array()) rd.fail("inputs", "", "'inputs' must be an array of paths");
        for (const auto& v : in) {
            if (!v.is_string()) rd.fail("inputs", "", "'inputs' entries must be strings");
            cfg.inputs.push_back(v.get<std::string>());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump_rec(const json& j, int indent, int depth, std::string& out)
{
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{";
        out += nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",";
                out += nl;
            }
            first = false;
            out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
            dump_rec(it.value(), indent, depth + 1, out);
        }
        out += nl + close_pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& v) { return v.is_structured(); }) ||
                          (j.size() == 2 && j[0].is_number() && j[1].is_number());
        out += "[";
        if (!flat) out += nl;
        bool first = true;
        for (const auto& v : j) {
            if (!first) {
                out += ",";
                out += flat ? (indent > 0 ? " " : "") : nl;
            }
            first = false;
            if (!flat) out += pad;
            dump_rec(v, indent, depth + 1, out);
        }
        if (!flat) out += nl + close_pad;
        out += "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace

std::string dump_json(const json& j, int indent)
{
    std::string out;
    dump_rec(j, indent, 0, out);
    out += "\n";
    return out;
}

json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw InvalidArgument("matrix rows must be non-empty arrays");
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j[r][c];
            if (e.is_number()) {
                m(static_cast<Index>(r), static_cast<Index>(c)) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(static_cast<Index>(r), static_cast<Index>(c)) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw InvalidArgument("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

} // namespace symstruct::cli
