#include "core/serialization.hpp"

#include <fstream>

#include "core/errors.hpp"

namespace sdd {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw IoError(std::string("expansion document: missing key '") + key + "'");
    return *it;
}

}  // namespace

json measure_to_json(const MeasureSpec& m) {
    json doc;
    doc["family"] = family_name(m.family());
    doc["support"] = {m.lower(), m.upper()};
    json params = json::object();
    if (m.family() == Family::TruncatedGaussian) {
        params["mean"] = m.gauss_mean();
        params["stddev"] = m.gauss_stddev();
    } else if (m.family() == Family::Beta) {
        params["alpha"] = m.beta_alpha();
        params["beta"] = m.beta_beta();
    }
    doc["params"] = params;
    return doc;
}

MeasureSpec measure_from_json(const json& doc) {
    const Family family = family_from_name(require(doc, "family").get<std::string>());
    const json support = require(doc, "support");
    if (!support.is_array() || support.size() != 2)
        throw IoError("measure: 'support' must be [a, b]");
    const double a = support[0].get<double>();
    const double b = support[1].get<double>();
    const json params = doc.value("params", json::object());
    switch (family) {
        case Family::Uniform:
            return MeasureSpec::uniform(a, b);
        case Family::TruncatedGaussian:
            return MeasureSpec::truncated_gaussian(a, b, require(params, "mean").get<double>(),
                                                   require(params, "stddev").get<double>());
        case Family::Beta:
            return MeasureSpec::beta(a, b, require(params, "alpha").get<double>(),
                                     require(params, "beta").get<double>());
    }
    throw IoError("measure: unknown family");
}

json expansion_to_json(const SddExpansion& e) {
    json doc;
    doc["version"] = kFormatVersion;
    doc["N"] = e.dimension();
    doc["S"] = e.order();
    doc["y0"] = e.constant();

    json coords = json::array();
    for (int k = 0; k < e.dimension(); ++k) {
        const OrthonormalBasis1D& basis = e.basis(k);
        json c;
        c["measure"] = measure_to_json(basis.measure());
        c["p"] = basis.knots().degree();
        c["knots"] = std::vector<double>(basis.knots().knots().begin(), basis.knots().knots().end());
        const Eigen::MatrixXd& q = basis.cholesky_factor();
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(q.rows()) * q.cols());
        for (int i = 0; i < q.rows(); ++i)
            for (int j = 0; j < q.cols(); ++j) flat.push_back(q(i, j));
        c["whitening"] = flat;
        coords.push_back(std::move(c));
    }
    doc["coordinates"] = std::move(coords);

    json terms = json::array();
    for (const Term& t : e.terms()) {
        json jt;
        std::vector<int> u(t.coords), idx(t.indices);
        for (int& v : u) v += 1;    // one-based coordinates
        for (int& v : idx) v += 1;  // basis numbering starts at 1; first retained index is 2
        jt["u"] = u;
        jt["i_u"] = idx;
        jt["c"] = t.coeff;
        terms.push_back(std::move(jt));
    }
    doc["terms"] = std::move(terms);
    return doc;
}

SddExpansion expansion_from_json(const json& doc) {
    const int version = require(doc, "version").get<int>();
    if (version != kFormatVersion)
        throw IoError("expansion document: unsupported version " + std::to_string(version));
    const int dim = require(doc, "N").get<int>();
    const int order = require(doc, "S").get<int>();
    const double constant = require(doc, "y0").get<double>();

    const json coords = require(doc, "coordinates");
    if (!coords.is_array() || static_cast<int>(coords.size()) != dim)
        throw IoError("expansion document: 'coordinates' must list N entries");

    std::vector<OrthonormalBasis1D> bases;
    bases.reserve(dim);
    for (const json& c : coords) {
        MeasureSpec measure = measure_from_json(require(c, "measure"));
        const int degree = require(c, "p").get<int>();
        std::vector<double> knots = require(c, "knots").get<std::vector<double>>();
        KnotSequence ks(std::move(knots), degree);
        const int n = ks.basis_count();
        std::vector<double> flat = require(c, "whitening").get<std::vector<double>>();
        if (static_cast<int>(flat.size()) != n * n)
            throw IoError("expansion document: whitening matrix size mismatch");
        Eigen::MatrixXd q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q(i, j) = flat[static_cast<std::size_t>(i) * n + j];
        bases.push_back(OrthonormalBasis1D::from_factor(std::move(ks), std::move(measure), std::move(q)));
    }

    std::vector<Term> terms;
    for (const json& jt : require(doc, "terms")) {
        Term t;
        t.coords = require(jt, "u").get<std::vector<int>>();
        t.indices = require(jt, "i_u").get<std::vector<int>>();
        t.coeff = require(jt, "c").get<double>();
        for (int& v : t.coords) v -= 1;
        for (int& v : t.indices) v -= 1;
        terms.push_back(std::move(t));
    }
    return SddExpansion(std::move(bases), order, constant, std::move(terms));
}

std::string expansion_to_string(const SddExpansion& e) { return expansion_to_json(e).dump(2) + "\n"; }

SddExpansion expansion_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw IoError(std::string("expansion document: ") + ex.what());
    }
    return expansion_from_json(doc);
}

void save_expansion(const SddExpansion& e, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << expansion_to_string(e);
    if (!out) throw IoError("write failed: " + path.string());
}

SddExpansion load_expansion(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return expansion_from_string(text);
}

}  // namespace sdd
