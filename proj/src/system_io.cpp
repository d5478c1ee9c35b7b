#include "ensctrl/system_io.hpp"

#include <fstream>
#include <sstream>

namespace ensctrl {

using nlohmann::json;

std::string tool_version() { return "0.1.0"; }

namespace {

std::string fnv1a_digest(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const json& require(const json& j, const std::string& key, const std::string& pointer) {
    if (!j.contains(key)) throw SchemaError("missing field at " + pointer + "/" + key);
    return j.at(key);
}

ExprMatrix parse_matrix(const json& j, const std::string& param, const std::string& pointer,
                        int expect_rows = -1, int expect_cols = -1) {
    if (!j.is_array() || j.empty())
        throw SchemaError("expected a non-empty array of rows at " + pointer);
    ExprMatrix rows;
    std::size_t cols = 0;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& row = j.at(r);
        if (!row.is_array() || row.empty())
            throw SchemaError("expected a non-empty row at " + pointer + "/" + std::to_string(r));
        if (r == 0) cols = row.size();
        if (row.size() != cols)
            throw SchemaError("ragged matrix at " + pointer + "/" + std::to_string(r));
        std::vector<expr::NodePtr> parsed;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const json& cell = row.at(c);
            const std::string where =
                pointer + "/" + std::to_string(r) + "/" + std::to_string(c);
            if (!cell.is_string() && !cell.is_number())
                throw SchemaError("expected an expression string at " + where);
            const std::string text = cell.is_string() ? cell.get<std::string>() : cell.dump();
            try {
                parsed.push_back(expr::parse(text, param));
            } catch (const expr::ParseError& e) {
                throw SchemaError(std::string("expression error at ") + where + ": " + e.what());
            }
        }
        rows.push_back(std::move(parsed));
    }
    if (expect_rows > 0 && static_cast<int>(rows.size()) != expect_rows)
        throw SchemaError("wrong row count at " + pointer);
    if (expect_cols > 0 && static_cast<int>(cols) != expect_cols)
        throw SchemaError("wrong column count at " + pointer);
    return rows;
}

ExprMatrix parse_vector_as_column(const json& j, const std::string& param,
                                  const std::string& pointer, int expect_rows) {
    if (!j.is_array()) throw SchemaError("expected an array at " + pointer);
    ExprMatrix rows;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& cell = j.at(r);
        const std::string where = pointer + "/" + std::to_string(r);
        if (!cell.is_string() && !cell.is_number())
            throw SchemaError("expected an expression string at " + where);
        const std::string text = cell.is_string() ? cell.get<std::string>() : cell.dump();
        try {
            rows.push_back({expr::parse(text, param)});
        } catch (const expr::ParseError& e) {
            throw SchemaError(std::string("expression error at ") + where + ": " + e.what());
        }
    }
    if (static_cast<int>(rows.size()) != expect_rows)
        throw SchemaError("wrong length at " + pointer + ", expected " +
                          std::to_string(expect_rows));
    return rows;
}

}  // namespace

LoadedSystem parse_system(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }

    LoadedSystem out;
    out.input_digest = fnv1a_digest(text);

    const json& param = require(j, "parameter", "");
    out.system.param_name = require(param, "name", "/parameter").get<std::string>();
    const json& iv = require(param, "interval", "/parameter");
    if (!iv.is_array() || iv.size() != 2)
        throw SchemaError("expected [lo, hi] at /parameter/interval");
    try {
        out.system.interval = CompactInterval(iv.at(0).get<double>(), iv.at(1).get<double>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("bad interval at /parameter/interval: ") + e.what());
    }
    if (param.contains("grid")) out.config.n_grid = param.at("grid").get<int>();
    if (out.config.n_grid < 2) throw SchemaError("grid size must be at least 2 at /parameter/grid");

    out.system.a_expr = parse_matrix(require(j, "A", ""), out.system.param_name, "/A");
    out.system.n = static_cast<int>(out.system.a_expr.size());
    if (out.system.a_expr[0].size() != static_cast<std::size_t>(out.system.n))
        throw SchemaError("A must be square at /A");

    out.system.b_expr =
        parse_matrix(require(j, "B", ""), out.system.param_name, "/B", out.system.n);
    out.system.m = static_cast<int>(out.system.b_expr[0].size());

    if (j.contains("x0"))
        out.system.x0_expr =
            parse_vector_as_column(j.at("x0"), out.system.param_name, "/x0", out.system.n);
    if (j.contains("xF"))
        out.system.xf_expr =
            parse_vector_as_column(j.at("xF"), out.system.param_name, "/xF", out.system.n);

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (t.contains("rank")) out.config.tol_rank = t.at("rank").get<double>();
        if (t.contains("mono")) out.config.tol_mono = t.at("mono").get<double>();
        if (t.contains("merge")) out.config.tol_merge = t.at("merge").get<double>();
        if (t.contains("value")) out.config.tol_val = t.at("value").get<double>();
        if (t.contains("vanish")) out.config.tol_vanish = t.at("vanish").get<double>();
    }
    return out;
}

LoadedSystem load_system(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open system file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

json config_to_json(const AnalysisConfig& cfg) {
    return json{{"grid", cfg.n_grid},
                {"eta_samples", cfg.n_eta},
                {"eta_per_channel", cfg.eta_per_channel},
                {"n_tuples", cfg.n_tuples},
                {"tol_rank", cfg.tol_rank},
                {"tol_mono", cfg.tol_mono},
                {"tol_merge", cfg.tol_merge},
                {"tol_val", cfg.tol_val},
                {"tol_vanish", cfg.tol_vanish},
                {"cond_max", cfg.cond_max},
                {"seed", cfg.seed},
                {"stability_check", cfg.stability_check}};
}

json verdict_to_json(const Verdict& v) {
    json evidence = json::array();
    for (const Evidence& e : v.evidence) {
        evidence.push_back(json{{"reason", to_string(e.reason)},
                                {"eta", e.eta},
                                {"kappas", e.kappas},
                                {"rank", e.rank},
                                {"required_rank", e.required_rank},
                                {"detail", e.detail}});
    }
    return json{{"status", to_string(v.status)},
                {"evidence", evidence},
                {"config", config_to_json(v.config)}};
}

json gramian_to_json(const EnsembleGramian& g) {
    std::vector<std::vector<double>> d(g.D.rows());
    for (Eigen::Index r = 0; r < g.D.rows(); ++r)
        d[r].assign(g.D.row(r).begin(), g.D.row(r).end());
    std::vector<double> sv(g.singular_values.begin(), g.singular_values.end());
    const double smallest_kept =
        g.rank > 0 && g.rank <= g.singular_values.size() ? g.singular_values(g.rank - 1) : 0.0;
    return json{{"eta", g.eta},
                {"kappa", g.kappa()},
                {"rank", g.rank},
                {"preimage_points", g.preimage_points},
                {"D", d},
                {"singular_values", sv},
                {"smallest_retained_singular_value", smallest_kept}};
}

json schedule_to_json(const ControlSchedule& s) {
    std::vector<std::vector<double>> values(s.values.rows());
    for (Eigen::Index r = 0; r < s.values.rows(); ++r)
        values[r].assign(s.values.row(r).begin(), s.values.row(r).end());
    return json{{"T", s.horizon}, {"P", s.segments}, {"values", values}};
}

ControlSchedule schedule_from_json(const json& j) {
    if (!j.contains("T") || !j.contains("P") || !j.contains("values"))
        throw SchemaError("schedule requires T, P and values");
    ControlSchedule s{j.at("T").get<double>(), j.at("P").get<int>(), {}};
    const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != s.segments)
        throw SchemaError("schedule value rows must match P at /values");
    const std::size_t m = rows.empty() ? 0 : rows[0].size();
    s.values.resize(s.segments, static_cast<Eigen::Index>(m));
    for (int r = 0; r < s.segments; ++r) {
        if (rows[r].size() != m) throw SchemaError("ragged schedule values at /values");
        for (std::size_t c = 0; c < m; ++c) s.values(r, static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return s;
}

json steering_to_json(const SteeringReport& r) {
    return json{{"predicted_error", r.predicted_error},
                {"simulated_error", r.simulated_error},
                {"epsilon", r.epsilon},
                {"energy", r.energy},
                {"converged", r.converged}};
}

}  // namespace ensctrl
