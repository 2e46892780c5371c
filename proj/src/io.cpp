#include "igw/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace igw {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string line_error(std::size_t line, const std::string& what)
{
    return "line " + std::to_string(line) + ": " + what;
}

template <class T>
bool parse_number(const std::string& s, T& out)
{
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

json matrix_json(const MatrixXd& M)
{
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

json vector_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

MatrixXd json_matrix(const json& j, const char* what)
{
    if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
    if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a matrix");
    const Index r = static_cast<Index>(j.size());
    if (!j[0].is_array()) {
        // A flat array is read as a diagonal.
        MatrixXd M = MatrixXd::Zero(r, r);
        for (Index i = 0; i < r; ++i) M(i, i) = j[i].get<double>();
        return M;
    }
    const Index c = static_cast<Index>(j[0].size());
    MatrixXd M(r, c);
    for (Index i = 0; i < r; ++i) {
        if (!j[i].is_array() || static_cast<Index>(j[i].size()) != c)
            throw ParseError(std::string(what) + ": ragged matrix");
        for (Index k = 0; k < c; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

VectorXd json_vector(const json& j, const char* what)
{
    if (j.is_number()) return VectorXd::Constant(1, j.get<double>());
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    VectorXd v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

double field(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number()) throw ParseError(std::string("prior: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::string format_csv(const TLMMData& data)
{
    std::string out = "group,y,x1\n";
    char buf[96];
    for (Index l = 0; l < data.n(); ++l) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", data.groups[l], data.y(l), data.x1(l));
        out += buf;
    }
    return out;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IOError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IOError("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const TLMMData& data) { write_text(path, format_csv(data)); }

TLMMData parse_csv(const std::string& text, Design design)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<double> y, x;
    std::vector<int> g;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto cells = split(t, ',');
        if (!header) {
            if (cells != std::vector<std::string>{"group", "y", "x1"})
                throw ParseError(line_error(lineno, "expected header 'group,y,x1'"));
            header = true;
            continue;
        }
        if (cells.size() != 3) throw ParseError(line_error(lineno, "expected 3 fields, got " + std::to_string(cells.size())));
        int gi = 0;
        double yi = 0.0, xi = 0.0;
        if (!parse_number(cells[0], gi)) throw ParseError(line_error(lineno, "group '" + cells[0] + "' is not an integer"));
        if (!parse_number(cells[1], yi) || !std::isfinite(yi))
            throw ParseError(line_error(lineno, "y '" + cells[1] + "' is not a finite number"));
        if (!parse_number(cells[2], xi) || !std::isfinite(xi))
            throw ParseError(line_error(lineno, "x1 '" + cells[2] + "' is not a finite number"));
        g.push_back(gi);
        y.push_back(yi);
        x.push_back(xi);
    }
    if (!header) throw ParseError("empty CSV: missing header 'group,y,x1'");
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Index>(y.size()));
    const VectorXd xv = Eigen::Map<const VectorXd>(x.data(), static_cast<Index>(x.size()));
    return make_tlmm_data(yv, xv, g, design);
}

TLMMData read_csv(const std::string& path, Design design)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str(), design);
}

json read_json(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw IOError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json to_json(const PosteriorSummary& s)
{
    json j;
    j["method"] = "vmp";
    j["converged"] = s.converged;
    j["iterations"] = s.iterations;
    j["final_change"] = s.report.final_change;
    j["p"] = s.p;
    j["m"] = s.m;
    j["q"] = s.q;
    j["beta_u"] = {{"mean", vector_json(s.beta_u_mean)}, {"cov", matrix_json(s.beta_u_cov)}};
    j["sigma2"] = {{"delta", s.sigma2_delta}, {"lambda", s.sigma2_lambda}};
    j["Sigma"] = {{"xi", s.Sigma_xi}, {"kappa", s.Sigma_kappa}, {"Lambda", matrix_json(s.Sigma_Lambda)}};
    j["upsilon"] = {{"alpha", s.upsilon_alpha}, {"beta", s.upsilon_beta}};
    j["nu_density"] = {{"grid", s.nu_grid}, {"values", s.nu_density}};
    j["natural"] = {
        {"beta_u", {{"eta1", vector_json(s.q_beta_u.eta1)}, {"eta2", vector_json(s.q_beta_u.eta2)}}},
        {"sigma2", {{"graph", to_string(s.q_sigma2.graph)}, {"eta1", s.q_sigma2.eta1}, {"eta2", vector_json(s.q_sigma2.eta2)}}},
        {"Sigma", {{"graph", to_string(s.q_Sigma.graph)}, {"eta1", s.q_Sigma.eta1}, {"eta2", vector_json(s.q_Sigma.eta2)}}},
        {"upsilon", {s.q_upsilon(0), s.q_upsilon(1)}},
    };
    return j;
}

PosteriorSummary posterior_from_json(const json& j)
{
    PosteriorSummary s;
    try {
        s.converged = j.at("converged").get<bool>();
        s.iterations = j.at("iterations").get<int>();
        s.p = j.at("p").get<Index>();
        s.m = j.at("m").get<Index>();
        s.q = j.at("q").get<Index>();
        s.beta_u_mean = json_vector(j.at("beta_u").at("mean"), "beta_u.mean");
        s.beta_u_cov = json_matrix(j.at("beta_u").at("cov"), "beta_u.cov");
        s.sigma2_delta = j.at("sigma2").at("delta").get<double>();
        s.sigma2_lambda = j.at("sigma2").at("lambda").get<double>();
        s.Sigma_xi = j.at("Sigma").at("xi").get<double>();
        s.Sigma_kappa = j.at("Sigma").at("kappa").get<double>();
        s.Sigma_Lambda = json_matrix(j.at("Sigma").at("Lambda"), "Sigma.Lambda");
        s.upsilon_alpha = j.at("upsilon").at("alpha").get<double>();
        s.upsilon_beta = j.at("upsilon").at("beta").get<double>();
        s.nu_grid = j.at("nu_density").at("grid").get<std::vector<double>>();
        s.nu_density = j.at("nu_density").at("values").get<std::vector<double>>();
        const json& n = j.at("natural");
        s.q_beta_u.eta1 = json_vector(n.at("beta_u").at("eta1"), "natural.beta_u.eta1");
        s.q_beta_u.eta2 = json_vector(n.at("beta_u").at("eta2"), "natural.beta_u.eta2");
        s.q_sigma2.graph = graph_from_string(n.at("sigma2").at("graph").get<std::string>());
        s.q_sigma2.eta1 = n.at("sigma2").at("eta1").get<double>();
        s.q_sigma2.eta2 = json_vector(n.at("sigma2").at("eta2"), "natural.sigma2.eta2");
        s.q_Sigma.graph = graph_from_string(n.at("Sigma").at("graph").get<std::string>());
        s.q_Sigma.eta1 = n.at("Sigma").at("eta1").get<double>();
        s.q_Sigma.eta2 = json_vector(n.at("Sigma").at("eta2"), "natural.Sigma.eta2");
        s.q_upsilon = Eigen::Vector2d(n.at("upsilon").at(0).get<double>(), n.at("upsilon").at(1).get<double>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("posterior JSON: ") + e.what());
    }
    return s;
}

json to_json(const ChainSummary& s)
{
    json params = json::array();
    for (const auto& p : s.params) params.push_back({{"name", p.name}, {"mean", p.mean}, {"sd", p.sd}});
    return {{"parameters", params}, {"split_half_ok", s.split_half_ok}, {"split_half_failures", s.split_half_failures}};
}

PriorSpec parse_prior(const json& j)
{
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw ParseError("prior: expected an object with a 'family' string");
    const std::string fam = lower(j["family"].get<std::string>());
    PriorSpec spec;
    try {
        if (fam == "inverse-chi-squared")
            spec = InvChiSqPrior{field(j, "delta"), field(j, "lambda")};
        else if (fam == "inverse-gamma")
            spec = InvGammaPrior{field(j, "alpha"), field(j, "beta")};
        else if (fam == "inverse-wishart")
            spec = InvWishartPrior{field(j, "kappa"), json_matrix(j.at("Lambda"), "Lambda")};
        else if (fam == "half-t")
            spec = HalfTPrior{field(j, "s"), field(j, "nu")};
        else if (fam == "half-cauchy")
            spec = HalfCauchyPrior{field(j, "s")};
        else if (fam == "huang-wand")
            spec = HuangWandPrior{json_vector(j.at("s"), "s"), j.contains("nu") ? field(j, "nu") : 2.0};
        else if (fam == "matrix-f")
            spec = MatrixFPrior{field(j, "nu"), field(j, "delta"), json_matrix(j.at("B"), "B")};
        else
            throw ParseError("prior: unknown family '" + j["family"].get<std::string>() + "'");
    } catch (const json::exception& e) {
        throw ParseError(std::string("prior: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

json prior_to_json(const PriorSpec& spec)
{
    json j;
    j["family"] = family_name(spec);
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, InvChiSqPrior>) {
                j["delta"] = p.delta;
                j["lambda"] = p.lambda;
            } else if constexpr (std::is_same_v<T, InvGammaPrior>) {
                j["alpha"] = p.alpha;
                j["beta"] = p.beta;
            } else if constexpr (std::is_same_v<T, InvWishartPrior>) {
                j["kappa"] = p.kappa;
                j["Lambda"] = matrix_json(p.Lambda);
            } else if constexpr (std::is_same_v<T, HalfTPrior>) {
                j["s"] = p.s;
                j["nu"] = p.nu;
            } else if constexpr (std::is_same_v<T, HalfCauchyPrior>) {
                j["s"] = p.s;
            } else if constexpr (std::is_same_v<T, HuangWandPrior>) {
                j["s"] = vector_json(p.s);
                j["nu"] = p.nu;
            } else {
                j["nu"] = p.nu;
                j["delta"] = p.delta;
                j["B"] = matrix_json(p.B);
            }
        },
        spec);
    return j;
}

void apply_config(const json& j, TLMMHyper& hyper)
{
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        try {
            if (k == "sigma_beta")
                hyper.sigma_beta = v.get<double>();
            else if (k == "s_sigma")
                hyper.s_sigma = v.get<double>();
            else if (k == "s_Sigma")
                hyper.s_Sigma = json_vector(v, "s_Sigma");
            else if (k == "lambda_nu")
                hyper.lambda_nu = v.get<double>();
            else if (k == "sigma_prior")
                hyper.sigma_prior = parse_prior(v);
            else if (k == "Sigma_prior")
                hyper.Sigma_prior = parse_prior(v);
            else
                throw ParseError("config: unknown key '" + k + "'");
        } catch (const json::exception& e) {
            throw ParseError("config key '" + k + "': " + e.what());
        }
    }
}

}  // namespace igw
