// Command-line runner for the sdd shared library: config-driven expansion
// fitting, the example1 error table, basis dumps, surrogate CDFs, and the
// built-in verification suite. Talks to the library through the C API only.

#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdd/sdd.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// logging (SDD_LOG = error | warn | info | debug)

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("SDD_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "error") return 0;
        if (v == "warn") return 1;
        if (v == "info") return 2;
        if (v == "debug") return 3;
        return 1;
    }();
    return level;
}

void log_at(int level, const char* tag, const char* fmt, va_list args) {
    if (log_level() < level) return;
    std::fprintf(stderr, "sdd: %s: ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

void log_warn(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    log_at(1, "warning", fmt, args);
    va_end(args);
}

void log_info(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    log_at(2, "info", fmt, args);
    va_end(args);
}

// Structured failure: names the stage so callers can tell what broke.
[[noreturn]] void fail(const std::string& stage, const std::string& message) {
    std::fprintf(stderr, "sdd: error [stage=%s]: %s\n", stage.c_str(), message.c_str());
    std::exit(1);
}

[[noreturn]] void fail_api(const std::string& stage, const std::string& context) {
    fail(stage, context + ": " + sdd_last_error());
}

// ---------------------------------------------------------------------------
// small helpers

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string join_indices(const std::vector<int>& values, int offset) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(values[i] + offset);
    }
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io", "cannot open for writing: " + path.string());
    out << text;
    if (!out) fail("io", "write failed: " + path.string());
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) fail("validation", where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const std::string& key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) fail("validation", where + ": unknown key '" + it.key() + "'");
    }
}

// RAII wrappers around the C handles
struct MeasureHandle {
    sdd_measure* ptr = nullptr;
    ~MeasureHandle() { sdd_measure_free(ptr); }
    MeasureHandle() = default;
    explicit MeasureHandle(sdd_measure* p) : ptr(p) {}
    MeasureHandle(MeasureHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    MeasureHandle& operator=(MeasureHandle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    MeasureHandle(const MeasureHandle&) = delete;
    MeasureHandle& operator=(const MeasureHandle&) = delete;
};

struct KnotsHandle {
    sdd_knots* ptr = nullptr;
    ~KnotsHandle() { sdd_knots_free(ptr); }
    KnotsHandle() = default;
    explicit KnotsHandle(sdd_knots* p) : ptr(p) {}
    KnotsHandle(KnotsHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    KnotsHandle& operator=(KnotsHandle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    KnotsHandle(const KnotsHandle&) = delete;
    KnotsHandle& operator=(const KnotsHandle&) = delete;
};

struct BasisHandle {
    sdd_basis* ptr = nullptr;
    ~BasisHandle() { sdd_basis_free(ptr); }
    BasisHandle() = default;
    explicit BasisHandle(sdd_basis* p) : ptr(p) {}
    BasisHandle(BasisHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    BasisHandle& operator=(BasisHandle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    BasisHandle(const BasisHandle&) = delete;
    BasisHandle& operator=(const BasisHandle&) = delete;
};

struct ExpansionHandle {
    sdd_expansion* ptr = nullptr;
    ~ExpansionHandle() { sdd_expansion_free(ptr); }
    ExpansionHandle() = default;
    explicit ExpansionHandle(sdd_expansion* p) : ptr(p) {}
    ExpansionHandle(ExpansionHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    ExpansionHandle& operator=(ExpansionHandle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    ExpansionHandle(const ExpansionHandle&) = delete;
    ExpansionHandle& operator=(const ExpansionHandle&) = delete;
};

MeasureHandle measure_from_config(const json& doc, const std::string& where) {
    check_keys(doc, {"family", "support", "params"}, where);
    if (!doc.contains("family") || !doc.contains("support"))
        fail("validation", where + ": needs 'family' and 'support'");
    const std::string family = doc["family"].get<std::string>();
    const json support = doc["support"];
    if (!support.is_array() || support.size() != 2)
        fail("validation", where + ": 'support' must be [a, b]");
    const double a = support[0].get<double>();
    const double b = support[1].get<double>();
    const json params = doc.value("params", json::object());

    sdd_measure* handle = nullptr;
    if (family == "uniform") {
        check_keys(params, {}, where + ".params");
        handle = sdd_measure_uniform(a, b);
    } else if (family == "truncated_gaussian") {
        check_keys(params, {"mean", "stddev"}, where + ".params");
        if (!params.contains("mean") || !params.contains("stddev"))
            fail("validation", where + ": truncated_gaussian needs 'mean' and 'stddev'");
        handle = sdd_measure_truncated_gaussian(a, b, params["mean"].get<double>(),
                                                params["stddev"].get<double>());
    } else if (family == "beta") {
        check_keys(params, {"alpha", "beta"}, where + ".params");
        if (!params.contains("alpha") || !params.contains("beta"))
            fail("validation", where + ": beta needs 'alpha' and 'beta'");
        handle = sdd_measure_beta(a, b, params["alpha"].get<double>(), params["beta"].get<double>());
    } else {
        fail("validation", where + ": unknown family '" + family + "'");
    }
    if (!handle) fail_api("validation", where);
    return MeasureHandle(handle);
}

struct KnotConfig {
    int degree = 0;
    int elements = 1;
    bool repeat_center = false;
    std::vector<double> explicit_knots;  // non-empty means explicit values
};

KnotConfig knots_from_config(const json& doc, const std::string& where) {
    KnotConfig cfg;
    check_keys(doc, {"p", "elements", "repeat_center", "knots"}, where);
    if (!doc.contains("p")) fail("validation", where + ": needs degree 'p'");
    cfg.degree = doc["p"].get<int>();
    if (doc.contains("knots")) {
        if (doc.contains("elements") || doc.contains("repeat_center"))
            fail("validation", where + ": an explicit knot vector excludes 'elements'/'repeat_center'");
        cfg.explicit_knots = doc["knots"].get<std::vector<double>>();
        return cfg;
    }
    cfg.elements = doc.value("elements", 1);
    cfg.repeat_center = doc.value("repeat_center", false);
    if (cfg.repeat_center && cfg.elements % 2 != 0)
        fail("validation", where + ": repeat_center requires an even element count");
    return cfg;
}

KnotsHandle build_knots(const KnotConfig& cfg, double a, double b) {
    sdd_knots* handle = nullptr;
    if (!cfg.explicit_knots.empty()) {
        handle = sdd_knots_from_array(cfg.explicit_knots.data(), cfg.explicit_knots.size(),
                                      cfg.degree);
    } else if (cfg.repeat_center) {
        const int pos = cfg.elements / 2;
        const int val = 2;
        handle = sdd_knots_open_uniform(a, b, cfg.degree, cfg.elements, &pos, &val, 1);
    } else {
        handle = sdd_knots_open_uniform(a, b, cfg.degree, cfg.elements, nullptr, nullptr, 0);
    }
    if (!handle) fail_api("basis", "knot construction");
    return KnotsHandle(handle);
}

double bench_callback(const double* x, int dimension, void* user) {
    (void)dimension;
    double out = std::nan("");
    sdd_bench_eval(static_cast<const sdd_bench*>(user), x, &out);
    return out;
}

std::vector<std::vector<double>> bench_breakpoints(const sdd_bench* bench) {
    const int dim = sdd_bench_dimension(bench);
    std::vector<std::vector<double>> breaks(dim);
    for (int k = 0; k < dim; ++k) {
        size_t count = 0;
        if (sdd_bench_breakpoints(bench, k, nullptr, 0, &count) != SDD_OK)
            fail_api("validation", "benchmark breakpoints");
        breaks[k].resize(count);
        if (count > 0 &&
            sdd_bench_breakpoints(bench, k, breaks[k].data(), count, &count) != SDD_OK)
            fail_api("validation", "benchmark breakpoints");
    }
    return breaks;
}

// ---------------------------------------------------------------------------
// statistics / report writing shared by run and table subcommands

struct TermView {
    std::vector<int> coords;   // zero-based
    std::vector<int> indices;  // zero-based, >= 1
    double coeff = 0.0;
};

std::vector<TermView> expansion_terms(const sdd_expansion* expansion) {
    const size_t count = sdd_expansion_term_count(expansion);
    const int dim = sdd_expansion_dimension(expansion);
    std::vector<TermView> terms(count);
    std::vector<int> coords(dim), indices(dim);
    for (size_t t = 0; t < count; ++t) {
        size_t size = 0;
        double coeff = 0.0;
        if (sdd_expansion_term(expansion, t, coords.data(), indices.data(), coords.size(), &size,
                               &coeff) != SDD_OK)
            fail_api("io", "expansion term query");
        terms[t].coords.assign(coords.begin(), coords.begin() + size);
        terms[t].indices.assign(indices.begin(), indices.begin() + size);
        terms[t].coeff = coeff;
    }
    return terms;
}

std::string statistics_csv(double mean, double variance, std::optional<double> exact_variance) {
    std::string out = "mean,variance,exact_variance,relative_variance_error\n";
    out += format_full(mean) + "," + format_full(variance) + ",";
    if (exact_variance) {
        out += format_full(*exact_variance) + ",";
        out += format_full(std::abs(*exact_variance - variance) / *exact_variance);
    } else {
        out += ",";
    }
    out += "\n";
    return out;
}

std::string coefficients_csv(double mean, const std::vector<TermView>& terms) {
    std::string out = "subset,indices,coefficient\n";
    out += ",," + format_full(mean) + "\n";
    for (const TermView& t : terms)
        out += join_indices(t.coords, 1) + "," + join_indices(t.indices, 1) + "," +
               format_full(t.coeff) + "\n";
    return out;
}

std::string decomposition_csv(const std::vector<TermView>& terms, double variance) {
    std::map<std::vector<int>, double> parts;
    for (const TermView& t : terms) parts[t.coords] += t.coeff * t.coeff;
    std::vector<std::pair<std::vector<int>, double>> rows(parts.begin(), parts.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });
    std::string out = "subset,variance,share\n";
    for (const auto& [subset, value] : rows)
        out += join_indices(subset, 1) + "," + format_full(value) + "," +
               format_full(variance > 0.0 ? value / variance : 0.0) + "\n";
    return out;
}

std::string cdf_csv(const std::vector<double>& sorted, int points) {
    const std::size_t count = sorted.size();
    const std::size_t rows = std::min<std::size_t>(points, count);
    std::string out = "y,cdf\n";
    for (std::size_t j = 0; j < rows; ++j) {
        const std::size_t rank = rows == 1 ? count - 1 : j * (count - 1) / (rows - 1);
        out += format_full(sorted[rank]) + "," +
               format_full(static_cast<double>(rank + 1) / static_cast<double>(count)) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// run subcommand

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::optional<std::uint64_t> seed_override;
};

struct SampleSet {
    std::vector<double> inputs;  // row-major count x dim
    std::vector<double> outputs;
    std::size_t count = 0;
};

SampleSet read_sample_csv(const fs::path& path, int dimension) {
    std::ifstream in(path);
    if (!in) fail("io", "cannot open sample file: " + path.string());
    SampleSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                if (lineno == 1) break;  // header row
                fail("validation", "sample file: bad number at line " + std::to_string(lineno));
            }
        }
        if (lineno == 1 && row.size() != static_cast<std::size_t>(dimension) + 1) continue;
        if (row.size() != static_cast<std::size_t>(dimension) + 1)
            fail("validation", "sample file: expected " + std::to_string(dimension + 1) +
                                   " columns at line " + std::to_string(lineno));
        set.inputs.insert(set.inputs.end(), row.begin(), row.end() - 1);
        set.outputs.push_back(row.back());
        ++set.count;
    }
    if (set.count == 0) fail("validation", "sample file: no data rows");
    return set;
}

void cmd_run(const RunOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();

    std::ifstream in(opts.config_path);
    if (!in) fail("io", "cannot open config: " + opts.config_path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& ex) {
        fail("validation", std::string("config parse: ") + ex.what());
    }

    check_keys(config,
               {"benchmark", "samples", "method", "S", "coordinates", "fit", "mcs", "outputs"},
               "config");
    if (config.contains("benchmark") == config.contains("samples"))
        fail("validation", "config: exactly one of 'benchmark' or 'samples' is required");
    if (!config.contains("coordinates")) fail("validation", "config: 'coordinates' is required");
    if (!config.contains("fit")) fail("validation", "config: 'fit' is required");

    const std::string method = config.value("method", "sdd");
    if (method != "sdd" && method != "pdd" && method != "pce")
        fail("validation", "config: method must be sdd, pdd, or pce");

    const json coords_cfg = config["coordinates"];
    if (!coords_cfg.is_array() || coords_cfg.empty())
        fail("validation", "config: 'coordinates' must be a non-empty list");
    const int dim = static_cast<int>(coords_cfg.size());

    int order = config.value("S", method == "pce" ? dim : 0);
    if (method == "pce") {
        if (config.contains("S") && config["S"].get<int>() != dim)
            fail("validation", "config: pce requires S = N (or omit S)");
        order = dim;
    } else if (!config.contains("S")) {
        fail("validation", "config: 'S' is required for method " + method);
    }
    if (order < 1 || order > dim)
        fail("validation", "config: S must lie in [1, N]; got S=" + std::to_string(order) +
                               ", N=" + std::to_string(dim));

    // benchmark lookup before any heavy work
    const sdd_bench* bench = nullptr;
    if (config.contains("benchmark")) {
        bench = sdd_bench_find(config["benchmark"].get<std::string>().c_str());
        if (!bench) fail("validation", "config: " + std::string(sdd_last_error()));
        if (sdd_bench_dimension(bench) != dim)
            fail("validation", "config: benchmark dimension " +
                                   std::to_string(sdd_bench_dimension(bench)) +
                                   " does not match " + std::to_string(dim) + " coordinates");
    }

    // fit settings
    const json fit_cfg = config["fit"];
    check_keys(fit_cfg,
               {"type", "points_per_element", "samples", "seed", "ridge", "min_oversampling"},
               "config.fit");
    const std::string fit_type = fit_cfg.value("type", "");
    if (fit_type != "quadrature" && fit_type != "regression")
        fail("validation", "config.fit: type must be 'quadrature' or 'regression'");
    if (fit_type == "quadrature" && config.contains("samples"))
        fail("validation", "config: external samples require regression fitting");

    // outputs
    json outputs_cfg = config.value("outputs", json::object());
    check_keys(outputs_cfg, {"expansion", "statistics", "coefficients", "decomposition", "cdf"},
               "config.outputs");
    const std::string out_expansion = outputs_cfg.value("expansion", "expansion.json");
    const std::string out_statistics = outputs_cfg.value("statistics", "statistics.csv");
    const std::string out_coefficients = outputs_cfg.value("coefficients", "coefficients.csv");
    const std::string out_decomposition =
        outputs_cfg.value("decomposition", "variance_decomposition.csv");
    const std::string out_cdf = outputs_cfg.value("cdf", "cdf.csv");

    json mcs_cfg = config.value("mcs", json());
    if (!mcs_cfg.is_null())
        check_keys(mcs_cfg, {"count", "seed", "points"}, "config.mcs");

    // build measures and bases
    std::vector<MeasureHandle> measures;
    std::vector<KnotsHandle> knot_handles;
    std::vector<BasisHandle> bases;
    std::vector<const sdd_basis*> basis_ptrs;
    const auto t_validated = std::chrono::steady_clock::now();
    for (int k = 0; k < dim; ++k) {
        const std::string where = "config.coordinates[" + std::to_string(k) + "]";
        const json& c = coords_cfg[k];
        check_keys(c, {"measure", "knots"}, where);
        if (!c.contains("measure") || !c.contains("knots"))
            fail("validation", where + ": needs 'measure' and 'knots'");
        measures.push_back(measure_from_config(c["measure"], where + ".measure"));

        KnotConfig kc = knots_from_config(c["knots"], where + ".knots");
        if (method != "sdd") {
            if (!kc.explicit_knots.empty() || kc.elements != 1 || kc.repeat_center)
                fail("validation", where + ".knots: " + method +
                                       " uses a single element and no interior knots; give only 'p'");
            kc.elements = 1;
        }
        double a = 0.0, b = 0.0;
        sdd_measure_support(measures[k].ptr, &a, &b);
        knot_handles.push_back(build_knots(kc, a, b));

        sdd_basis* basis = sdd_basis_create(knot_handles[k].ptr, measures[k].ptr, 0);
        if (!basis)
            fail_api(sdd_last_status() == SDD_ERR_CONDITIONING ? "conditioning" : "basis", where);
        bases.push_back(BasisHandle(basis));
        basis_ptrs.push_back(basis);
    }
    const auto t_basis = std::chrono::steady_clock::now();

    // fit
    ExpansionHandle expansion;
    std::uint64_t effective_seed = 0;
    if (fit_type == "quadrature") {
        if (!bench) fail("validation", "config: quadrature fitting requires a benchmark");
        const int points = fit_cfg.value("points_per_element", 0);
        const std::vector<std::vector<double>> breaks = bench_breakpoints(bench);
        std::vector<const double*> break_ptrs(dim);
        std::vector<size_t> break_sizes(dim);
        for (int k = 0; k < dim; ++k) {
            break_ptrs[k] = breaks[k].data();
            break_sizes[k] = breaks[k].size();
        }
        sdd_expansion* fitted = sdd_fit_quadrature(
            basis_ptrs.data(), dim, order, bench_callback,
            const_cast<void*>(static_cast<const void*>(bench)), break_ptrs.data(),
            break_sizes.data(), points, opts.threads);
        if (!fitted) fail_api("fitting", "quadrature fit");
        expansion = ExpansionHandle(fitted);
    } else {
        const double ridge = fit_cfg.value("ridge", 0.0);
        const double oversampling = fit_cfg.value("min_oversampling", 0.0);
        SampleSet set;
        if (bench) {
            if (!fit_cfg.contains("samples"))
                fail("validation", "config.fit: regression needs 'samples'");
            set.count = fit_cfg["samples"].get<std::uint64_t>();
            effective_seed = opts.seed_override.value_or(fit_cfg.value("seed", 0ull));
            set.inputs.resize(set.count * dim);
            std::vector<const sdd_measure*> raw(dim);
            for (int k = 0; k < dim; ++k) raw[k] = measures[k].ptr;
            if (sdd_sample_inputs(raw.data(), dim, set.count, effective_seed, opts.threads,
                                  set.inputs.data()) != SDD_OK)
                fail_api("fitting", "input sampling");
            set.outputs.resize(set.count);
            for (std::size_t r = 0; r < set.count; ++r) {
                if (sdd_bench_eval(bench, set.inputs.data() + r * dim, &set.outputs[r]) != SDD_OK)
                    fail_api("fitting", "benchmark evaluation");
            }
        } else {
            set = read_sample_csv(config["samples"].get<std::string>(), dim);
        }
        double condition = 0.0;
        sdd_expansion* fitted =
            sdd_fit_regression(basis_ptrs.data(), dim, order, set.inputs.data(),
                               set.outputs.data(), set.count, ridge, oversampling, opts.threads,
                               &condition);
        if (!fitted) fail_api("fitting", "regression fit");
        if (condition > 1e10)
            log_warn("regression design matrix condition estimate %.3e exceeds 1e10", condition);
        log_info("regression condition estimate %.3e", condition);
        expansion = ExpansionHandle(fitted);
    }
    const auto t_fit = std::chrono::steady_clock::now();

    // reports. The analytic reference only applies when the fit used the
    // benchmark's own input law.
    const double mean = sdd_expansion_mean(expansion.ptr);
    const double variance = sdd_expansion_variance(expansion.ptr);
    std::optional<double> exact_variance;
    if (bench && sdd_bench_has_exact_statistics(bench)) {
        bool same_law = true;
        for (int k = 0; k < dim && same_law; ++k) {
            MeasureHandle reference(sdd_bench_measure(bench, k));
            same_law = sdd_measure_equal(measures[k].ptr, reference.ptr) == 1;
        }
        if (same_law) {
            exact_variance = sdd_bench_exact_variance(bench);
        } else {
            log_info("input law differs from the benchmark reference; omitting exact columns");
        }
    }

    fs::create_directories(opts.out_dir);
    const fs::path out_dir(opts.out_dir);
    std::vector<std::string> written;

    if (sdd_expansion_save(expansion.ptr, (out_dir / out_expansion).string().c_str()) != SDD_OK)
        fail_api("io", "expansion save");
    written.push_back(out_expansion);

    const std::vector<TermView> terms = expansion_terms(expansion.ptr);
    write_file(out_dir / out_statistics, statistics_csv(mean, variance, exact_variance));
    written.push_back(out_statistics);
    write_file(out_dir / out_coefficients, coefficients_csv(mean, terms));
    written.push_back(out_coefficients);
    write_file(out_dir / out_decomposition, decomposition_csv(terms, variance));
    written.push_back(out_decomposition);

    std::uint64_t mcs_seed = 0;
    if (!mcs_cfg.is_null()) {
        const std::uint64_t count = mcs_cfg.value("count", 100000ull);
        mcs_seed = opts.seed_override.value_or(mcs_cfg.value("seed", 0ull));
        const int points = mcs_cfg.value("points", 1001);
        std::vector<double> sorted(count);
        if (sdd_expansion_sample_sorted(expansion.ptr, count, mcs_seed, opts.threads,
                                        sorted.data()) != SDD_OK)
            fail_api("fitting", "surrogate sampling");
        write_file(out_dir / out_cdf, cdf_csv(sorted, points));
        written.push_back(out_cdf);
    }
    const auto t_reports = std::chrono::steady_clock::now();

    // manifest: everything needed to re-execute the run
    json manifest;
    manifest["tool_version"] = sdd_version();
    manifest["config"] = config;
    manifest["config_hash"] = [&] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(config.dump()));
        return std::string(buf);
    }();
    manifest["seed"] = effective_seed;
    manifest["mcs_seed"] = mcs_seed;
    manifest["threads"] = opts.threads;
    manifest["outputs"] = written;
    auto ms = [](auto a, auto b) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
    };
    manifest["timings_ms"] = {{"validation", ms(t_start, t_validated)},
                              {"basis", ms(t_validated, t_basis)},
                              {"fitting", ms(t_basis, t_fit)},
                              {"reports", ms(t_fit, t_reports)}};
    write_file(out_dir / "run_manifest.json", manifest.dump(2) + "\n");

    std::printf("mean %s\nvariance %s\n", format_full(mean).c_str(), format_full(variance).c_str());
    if (exact_variance)
        std::printf("relative_variance_error %s\n",
                    format_full(std::abs(*exact_variance - variance) / *exact_variance).c_str());
}

// ---------------------------------------------------------------------------
// table-example1 subcommand

struct TableRow {
    std::string method;
    int degree;
    std::string knots;  // none | simple | repeated
    std::int64_t basis_count;
    double relative_error;
};

TableRow table_row(const sdd_bench* bench, const std::string& method, int degree,
                   const std::string& knot_kind, int elements, bool repeat_center, int order,
                   int points, int threads) {
    std::vector<MeasureHandle> measures;
    std::vector<KnotsHandle> knots;
    std::vector<BasisHandle> bases;
    std::vector<const sdd_basis*> basis_ptrs;
    const int dim = sdd_bench_dimension(bench);
    for (int k = 0; k < dim; ++k) {
        measures.emplace_back(sdd_bench_measure(bench, k));
        if (!measures[k].ptr) fail_api("validation", "benchmark measure");
        double a = 0.0, b = 0.0;
        sdd_measure_support(measures[k].ptr, &a, &b);
        KnotConfig kc;
        kc.degree = degree;
        kc.elements = elements;
        kc.repeat_center = repeat_center;
        knots.push_back(build_knots(kc, a, b));
        sdd_basis* basis = sdd_basis_create(knots[k].ptr, measures[k].ptr, 0);
        if (!basis)
            fail_api(sdd_last_status() == SDD_ERR_CONDITIONING ? "conditioning" : "basis",
                     "basis construction");
        bases.push_back(BasisHandle(basis));
        basis_ptrs.push_back(basis);
    }

    const std::vector<std::vector<double>> breaks = bench_breakpoints(bench);
    std::vector<const double*> break_ptrs(dim);
    std::vector<size_t> break_sizes(dim);
    for (int k = 0; k < dim; ++k) {
        break_ptrs[k] = breaks[k].data();
        break_sizes[k] = breaks[k].size();
    }
    sdd_expansion* fitted = sdd_fit_quadrature(basis_ptrs.data(), dim, order, bench_callback,
                                               const_cast<void*>(static_cast<const void*>(bench)),
                                               break_ptrs.data(), break_sizes.data(), points,
                                               threads);
    if (!fitted) fail_api("fitting", "table fit");
    ExpansionHandle expansion(fitted);

    std::vector<int> counts(dim);
    for (int k = 0; k < dim; ++k) counts[k] = sdd_basis_size(basis_ptrs[k]);
    std::int64_t total_terms = 0;
    sdd_term_count(counts.data(), dim, order, &total_terms);

    TableRow row;
    row.method = method;
    row.degree = degree;
    row.knots = knot_kind;
    row.basis_count = total_terms;
    row.relative_error = std::abs(sdd_bench_exact_variance(bench) -
                                  sdd_expansion_variance(expansion.ptr)) /
                         sdd_bench_exact_variance(bench);
    return row;
}

void cmd_table_example1(const std::string& out_dir, int threads) {
    const sdd_bench* bench = sdd_bench_find("example1");
    if (!bench) fail_api("validation", "benchmark lookup");

    std::vector<TableRow> rows;
    rows.push_back(table_row(bench, "pce", 2, "none", 1, false, 2, 64, threads));
    rows.push_back(table_row(bench, "pce", 20, "none", 1, false, 2, 64, threads));
    rows.push_back(table_row(bench, "sdd", 1, "simple", 20, false, 2, 20, threads));
    rows.push_back(table_row(bench, "sdd", 2, "simple", 20, false, 2, 20, threads));
    rows.push_back(table_row(bench, "sdd", 2, "repeated", 20, true, 2, 20, threads));

    std::string csv = "method,p,knots,basis_count,relative_error\n";
    for (const TableRow& r : rows)
        csv += r.method + "," + std::to_string(r.degree) + "," + r.knots + "," +
               std::to_string(r.basis_count) + "," + format_full(r.relative_error) + "\n";

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "error_table.csv", csv);
    std::fputs(csv.c_str(), stdout);
}

// ---------------------------------------------------------------------------
// basis-dump subcommand

void cmd_basis_dump(const std::string& knots_json, const std::string& measure_json,
                    bool orthonormal, int grid, const std::string& out_path) {
    if (grid < 2) fail("validation", "basis-dump: grid must be >= 2");
    json kdoc, mdoc;
    try {
        kdoc = json::parse(knots_json);
        mdoc = json::parse(measure_json);
    } catch (const json::exception& ex) {
        fail("validation", std::string("basis-dump: ") + ex.what());
    }
    MeasureHandle measure = measure_from_config(mdoc, "measure");
    double a = 0.0, b = 0.0;
    sdd_measure_support(measure.ptr, &a, &b);
    const KnotConfig kc = knots_from_config(kdoc, "knots");
    KnotsHandle knots = build_knots(kc, a, b);
    const int n = sdd_knots_basis_count(knots.ptr);

    BasisHandle basis;
    if (orthonormal) {
        basis = BasisHandle(sdd_basis_create(knots.ptr, measure.ptr, 0));
        if (!basis.ptr)
            fail_api(sdd_last_status() == SDD_ERR_CONDITIONING ? "conditioning" : "basis",
                     "basis construction");
    }

    std::string csv = "x";
    for (int i = 1; i <= n; ++i)
        csv += (orthonormal ? ",psi_" : ",B_") + std::to_string(i);
    csv += "\n";
    std::vector<double> vals(n);
    for (int g = 0; g < grid; ++g) {
        const double x = a + (b - a) * g / (grid - 1);
        const sdd_status st = orthonormal ? sdd_basis_eval(basis.ptr, x, vals.data())
                                          : sdd_bspline_eval_all(knots.ptr, x, vals.data());
        if (st != SDD_OK) fail_api("basis", "basis evaluation");
        csv += format_full(x);
        for (int i = 0; i < n; ++i) csv += "," + format_full(vals[i]);
        csv += "\n";
    }
    if (out_path == "-") {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_file(out_path, csv);
    }
}

// ---------------------------------------------------------------------------
// cdf subcommand

void cmd_cdf(const std::string& expansion_path, std::uint64_t count, std::uint64_t seed,
             int points, const std::string& out_path, int threads) {
    sdd_expansion* loaded = sdd_expansion_load(expansion_path.c_str());
    if (!loaded) fail_api("io", "expansion load");
    ExpansionHandle expansion(loaded);
    std::vector<double> sorted(count);
    if (sdd_expansion_sample_sorted(expansion.ptr, count, seed, threads, sorted.data()) != SDD_OK)
        fail_api("fitting", "surrogate sampling");
    const std::string csv = cdf_csv(sorted, points);
    if (out_path == "-") {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_file(out_path, csv);
    }
}

// ---------------------------------------------------------------------------
// verify subcommand

void verify_report(const char* name, int passed, const char* detail, void* user) {
    (void)user;
    std::printf("[%s] %s (%s)\n", passed ? "ok" : "FAIL", name, detail);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spline dimensional decomposition toolkit"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    CLI::App* run = app.add_subcommand("run", "execute a configured experiment");
    run->add_option("--config", run_opts.config_path, "JSON run configuration")->required();
    run->add_option("--out", run_opts.out_dir, "output directory (default .)");
    run->add_option("--threads", run_opts.threads, "worker threads (0 = all cores)");
    run->add_option("--seed", seed_value, "override fitting and MCS seeds")
        ->each([&](const std::string&) { seed_given = true; });

    std::string table_out = ".";
    int table_threads = 0;
    CLI::App* table = app.add_subcommand("table-example1", "error table for the example1 benchmark");
    table->add_option("--out", table_out, "output directory (default .)");
    table->add_option("--threads", table_threads, "worker threads (0 = all cores)");

    std::string dump_knots, dump_measure = R"({"family":"uniform","support":[-1,1]})";
    std::string dump_out = "-";
    bool dump_ortho = false;
    int dump_grid = 401;
    CLI::App* dump = app.add_subcommand("basis-dump", "tabulate basis functions on a grid");
    dump->add_option("--knots-json", dump_knots, R"(knot spec, e.g. {"p":2,"elements":4})")
        ->required();
    dump->add_option("--measure-json", dump_measure, "measure spec (default uniform on [-1,1])");
    dump->add_flag("--orthonormal", dump_ortho, "dump the orthonormalized basis");
    dump->add_option("--grid", dump_grid, "number of grid points (default 401)");
    dump->add_option("--out", dump_out, "output file, or - for stdout");

    std::string cdf_expansion, cdf_out = "cdf.csv";
    std::uint64_t cdf_count = 1000000, cdf_seed = 0;
    int cdf_points = 1001, cdf_threads = 0;
    CLI::App* cdf = app.add_subcommand("cdf", "sample a saved expansion and emit its CDF");
    cdf->add_option("--expansion", cdf_expansion, "expansion JSON file")->required();
    cdf->add_option("--count", cdf_count, "Monte Carlo sample count (default 1e6)");
    cdf->add_option("--seed", cdf_seed, "sampling seed");
    cdf->add_option("--points", cdf_points, "CDF rows to emit (default 1001)");
    cdf->add_option("--out", cdf_out, "output file, or - for stdout");
    cdf->add_option("--threads", cdf_threads, "worker threads (0 = all cores)");

    int verify_threads = 0;
    CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant checks");
    verify->add_option("--threads", verify_threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (seed_given) run_opts.seed_override = seed_value;
        cmd_run(run_opts);
    } else if (table->parsed()) {
        cmd_table_example1(table_out, table_threads);
    } else if (dump->parsed()) {
        cmd_basis_dump(dump_knots, dump_measure, dump_ortho, dump_grid, dump_out);
    } else if (cdf->parsed()) {
        cmd_cdf(cdf_expansion, cdf_count, cdf_seed, cdf_points, cdf_out, cdf_threads);
    } else if (verify->parsed()) {
        const int failures = sdd_verify(verify_report, nullptr, verify_threads);
        if (failures < 0) fail("validation", sdd_last_error());
        if (failures > 0) {
            std::fprintf(stderr, "sdd: %d verification check(s) failed\n", failures);
            return 1;
        }
        std::printf("all checks passed\n");
    }
    return 0;
}
