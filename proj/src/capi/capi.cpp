#include "sdd/sdd.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <map>
#include <mutex>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/bspline.hpp"
#include "core/decomposition.hpp"
#include "core/errors.hpp"
#include "core/serialization.hpp"
#include "core/verify.hpp"

struct sdd_measure {
    sdd::MeasureSpec value;
};
struct sdd_knots {
    sdd::KnotSequence value;
};
struct sdd_basis {
    sdd::OrthonormalBasis1D value;
};
struct sdd_expansion {
    sdd::SddExpansion value;
};
struct sdd_bench {
    sdd::BenchmarkFunction value;
};

namespace {

thread_local std::string g_last_error;
thread_local sdd_status g_last_status = SDD_OK;

sdd_status classify(const std::exception& ex) {
    if (dynamic_cast<const sdd::ConditioningError*>(&ex)) return SDD_ERR_CONDITIONING;
    if (dynamic_cast<const sdd::UnsupportedError*>(&ex)) return SDD_ERR_UNSUPPORTED;
    if (dynamic_cast<const sdd::IoError*>(&ex)) return SDD_ERR_IO;
    if (dynamic_cast<const std::domain_error*>(&ex)) return SDD_ERR_DOMAIN;
    if (dynamic_cast<const std::invalid_argument*>(&ex)) return SDD_ERR_ARGUMENT;
    if (dynamic_cast<const std::bad_alloc*>(&ex)) return SDD_ERR_INTERNAL;
    return SDD_ERR_INTERNAL;
}

template <typename Fn>
sdd_status guarded(Fn&& fn) {
    try {
        fn();
        return SDD_OK;
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        g_last_status = classify(ex);
        return g_last_status;
    } catch (...) {
        g_last_error = "unknown failure";
        g_last_status = SDD_ERR_INTERNAL;
        return g_last_status;
    }
}

template <typename Handle, typename Fn>
Handle* guarded_create(Fn&& fn) {
    try {
        return new Handle{fn()};
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        g_last_status = classify(ex);
        return nullptr;
    } catch (...) {
        g_last_error = "unknown failure";
        g_last_status = SDD_ERR_INTERNAL;
        return nullptr;
    }
}

sdd_status fail_argument(const char* message) {
    g_last_error = message;
    g_last_status = SDD_ERR_ARGUMENT;
    return SDD_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sdd_version(void) { return "1.0.0"; }

const char* sdd_last_error(void) { return g_last_error.c_str(); }

sdd_status sdd_last_status(void) { return g_last_status; }

/* ---- measures ---------------------------------------------------------- */

sdd_measure* sdd_measure_uniform(double a, double b) {
    return guarded_create<sdd_measure>([&] { return sdd::MeasureSpec::uniform(a, b); });
}

sdd_measure* sdd_measure_truncated_gaussian(double a, double b, double mean, double stddev) {
    return guarded_create<sdd_measure>(
        [&] { return sdd::MeasureSpec::truncated_gaussian(a, b, mean, stddev); });
}

sdd_measure* sdd_measure_beta(double a, double b, double alpha, double beta) {
    return guarded_create<sdd_measure>([&] { return sdd::MeasureSpec::beta(a, b, alpha, beta); });
}

void sdd_measure_free(sdd_measure* measure) { delete measure; }

sdd_status sdd_measure_support(const sdd_measure* measure, double* a, double* b) {
    if (!measure || !a || !b) return fail_argument("measure_support: NULL argument");
    *a = measure->value.lower();
    *b = measure->value.upper();
    return SDD_OK;
}

int sdd_measure_equal(const sdd_measure* left, const sdd_measure* right) {
    return left && right && left->value == right->value ? 1 : 0;
}

sdd_status sdd_measure_density(const sdd_measure* measure, double x, double* out) {
    if (!measure || !out) return fail_argument("measure_density: NULL argument");
    return guarded([&] { *out = measure->value.density(x); });
}

sdd_status sdd_measure_cdf(const sdd_measure* measure, double x, double* out) {
    if (!measure || !out) return fail_argument("measure_cdf: NULL argument");
    return guarded([&] { *out = measure->value.cdf(x); });
}

sdd_status sdd_measure_raw_moment(const sdd_measure* measure, int order, double* out) {
    if (!measure || !out) return fail_argument("measure_raw_moment: NULL argument");
    return guarded([&] { *out = measure->value.raw_moment(order); });
}

sdd_status sdd_measure_sample(const sdd_measure* measure, double u, double* out) {
    if (!measure || !out) return fail_argument("measure_sample: NULL argument");
    return guarded([&] { *out = measure->value.sample(u); });
}

sdd_status sdd_measure_quadrature(const sdd_measure* measure, const double* breakpoints,
                                  size_t n_breakpoints, int points_per_element, double* nodes,
                                  double* weights, size_t* count) {
    if (!measure || !count) return fail_argument("measure_quadrature: NULL argument");
    if (n_breakpoints > 0 && !breakpoints)
        return fail_argument("measure_quadrature: NULL breakpoints with nonzero count");
    return guarded([&] {
        const sdd::QuadratureRule rule = sdd::measure_quadrature(
            measure->value, std::span(breakpoints, n_breakpoints), points_per_element);
        if (nodes && weights) {
            if (*count < rule.nodes.size())
                throw std::invalid_argument("measure_quadrature: buffer too small");
            std::memcpy(nodes, rule.nodes.data(), rule.nodes.size() * sizeof(double));
            std::memcpy(weights, rule.weights.data(), rule.weights.size() * sizeof(double));
        }
        *count = rule.nodes.size();
    });
}

sdd_status sdd_sample_inputs(const sdd_measure* const* measures, int dimension, uint64_t count,
                             uint64_t seed, int threads, double* out) {
    if (!measures || !out || dimension < 1) return fail_argument("sample_inputs: bad arguments");
    return guarded([&] {
        std::vector<sdd::MeasureSpec> specs;
        specs.reserve(dimension);
        for (int k = 0; k < dimension; ++k) {
            if (!measures[k]) throw std::invalid_argument("sample_inputs: NULL measure");
            specs.push_back(measures[k]->value);
        }
        const std::vector<double> samples =
            sdd::sample_inputs(sdd::ProductMeasure(std::move(specs)), count, seed, threads);
        std::memcpy(out, samples.data(), samples.size() * sizeof(double));
    });
}

/* ---- knots -------------------------------------------------------------- */

sdd_knots* sdd_knots_open_uniform(double a, double b, int degree, int elements,
                                  const int* mult_positions, const int* mult_values,
                                  size_t n_overrides) {
    return guarded_create<sdd_knots>([&] {
        std::map<int, int> overrides;
        if (n_overrides > 0 && (!mult_positions || !mult_values))
            throw std::invalid_argument("knots_open_uniform: NULL multiplicity arrays");
        for (size_t i = 0; i < n_overrides; ++i) overrides[mult_positions[i]] = mult_values[i];
        return sdd::KnotSequence::open_uniform(a, b, degree, elements, overrides);
    });
}

sdd_knots* sdd_knots_from_array(const double* knots, size_t count, int degree) {
    return guarded_create<sdd_knots>([&] {
        if (!knots) throw std::invalid_argument("knots_from_array: NULL knots");
        return sdd::KnotSequence(std::vector<double>(knots, knots + count), degree);
    });
}

void sdd_knots_free(sdd_knots* knots) { delete knots; }

int sdd_knots_degree(const sdd_knots* knots) { return knots ? knots->value.degree() : -1; }

int sdd_knots_basis_count(const sdd_knots* knots) { return knots ? knots->value.basis_count() : -1; }

int sdd_knots_element_count(const sdd_knots* knots) {
    return knots ? knots->value.element_count() : -1;
}

double sdd_knots_mesh_size(const sdd_knots* knots) { return knots ? knots->value.mesh_size() : -1.0; }

size_t sdd_knots_size(const sdd_knots* knots) { return knots ? knots->value.knots().size() : 0; }

sdd_status sdd_knots_values(const sdd_knots* knots, double* out) {
    if (!knots || !out) return fail_argument("knots_values: NULL argument");
    std::memcpy(out, knots->value.knots().data(), knots->value.knots().size() * sizeof(double));
    return SDD_OK;
}

/* ---- standard B-splines -------------------------------------------------- */

sdd_status sdd_bspline_eval(const sdd_knots* knots, int index, double x, double* out) {
    if (!knots || !out) return fail_argument("bspline_eval: NULL argument");
    return guarded([&] { *out = sdd::eval_bspline(knots->value, index, x); });
}

sdd_status sdd_bspline_eval_all(const sdd_knots* knots, double x, double* out) {
    if (!knots || !out) return fail_argument("bspline_eval_all: NULL argument");
    return guarded([&] { sdd::eval_all(knots->value, x, std::span(out, knots->value.basis_count())); });
}

/* ---- orthonormal basis ---------------------------------------------------- */

sdd_basis* sdd_basis_create(const sdd_knots* knots, const sdd_measure* measure,
                            int points_per_element) {
    if (!knots || !measure) {
        fail_argument("basis_create: NULL argument");
        return nullptr;
    }
    return guarded_create<sdd_basis>([&] {
        return sdd::OrthonormalBasis1D(knots->value, measure->value,
                                       points_per_element > 0 ? points_per_element : 0);
    });
}

void sdd_basis_free(sdd_basis* basis) { delete basis; }

int sdd_basis_size(const sdd_basis* basis) { return basis ? basis->value.size() : -1; }

sdd_status sdd_basis_eval(const sdd_basis* basis, double x, double* out) {
    if (!basis || !out) return fail_argument("basis_eval: NULL argument");
    return guarded([&] { basis->value.eval(x, std::span(out, basis->value.size())); });
}

sdd_status sdd_basis_whitening(const sdd_basis* basis, double* out) {
    if (!basis || !out) return fail_argument("basis_whitening: NULL argument");
    const Eigen::MatrixXd& q = basis->value.cholesky_factor();
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) out[i * q.cols() + j] = q(i, j);
    return SDD_OK;
}

/* ---- fitting ---------------------------------------------------------------- */

sdd_status sdd_term_count(const int* basis_counts, int dimension, int order, int64_t* out) {
    if (!basis_counts || !out || dimension < 1) return fail_argument("term_count: bad arguments");
    return guarded([&] { *out = sdd::term_count(std::span(basis_counts, dimension), order); });
}

namespace {

std::vector<sdd::OrthonormalBasis1D> collect_bases(const sdd_basis* const* bases, int dimension) {
    if (!bases || dimension < 1) throw std::invalid_argument("fit: bad basis list");
    std::vector<sdd::OrthonormalBasis1D> out;
    out.reserve(dimension);
    for (int k = 0; k < dimension; ++k) {
        if (!bases[k]) throw std::invalid_argument("fit: NULL basis");
        out.push_back(bases[k]->value);
    }
    return out;
}

}  // namespace

sdd_expansion* sdd_fit_quadrature(const sdd_basis* const* bases, int dimension, int order,
                                  sdd_output_fn output, void* user,
                                  const double* const* breakpoints, const size_t* n_breakpoints,
                                  int points_per_element, int threads) {
    if (!output) {
        fail_argument("fit_quadrature: NULL output function");
        return nullptr;
    }
    return guarded_create<sdd_expansion>([&] {
        std::vector<sdd::OrthonormalBasis1D> core_bases = collect_bases(bases, dimension);
        sdd::QuadratureFitOptions options;
        options.points_per_element = points_per_element > 0 ? points_per_element : 0;
        options.threads = threads;
        if (breakpoints && n_breakpoints) {
            options.breakpoints.resize(dimension);
            for (int k = 0; k < dimension; ++k)
                if (breakpoints[k] && n_breakpoints[k] > 0)
                    options.breakpoints[k].assign(breakpoints[k], breakpoints[k] + n_breakpoints[k]);
        }
        auto fn = [output, user, dimension](std::span<const double> x) {
            return output(x.data(), dimension, user);
        };
        return sdd::fit_quadrature(fn, std::move(core_bases), order, options);
    });
}

sdd_expansion* sdd_fit_regression(const sdd_basis* const* bases, int dimension, int order,
                                  const double* inputs, const double* outputs, size_t count,
                                  double ridge, double min_oversampling, int threads,
                                  double* condition_estimate) {
    if (!inputs || !outputs) {
        fail_argument("fit_regression: NULL sample arrays");
        return nullptr;
    }
    return guarded_create<sdd_expansion>([&] {
        std::vector<sdd::OrthonormalBasis1D> core_bases = collect_bases(bases, dimension);
        std::vector<sdd::SurrogateSample> samples(count);
        for (size_t r = 0; r < count; ++r) {
            samples[r].x.assign(inputs + r * dimension, inputs + (r + 1) * dimension);
            samples[r].y = outputs[r];
        }
        sdd::RegressionOptions options;
        options.ridge = ridge;
        if (min_oversampling > 0.0) options.min_oversampling = min_oversampling;
        options.threads = threads;
        sdd::RegressionInfo info;
        sdd::SddExpansion fitted =
            sdd::fit_regression(samples, std::move(core_bases), order, options, &info);
        if (condition_estimate) *condition_estimate = info.condition_estimate;
        return fitted;
    });
}

void sdd_expansion_free(sdd_expansion* expansion) { delete expansion; }

int sdd_expansion_dimension(const sdd_expansion* expansion) {
    return expansion ? expansion->value.dimension() : -1;
}

int sdd_expansion_order(const sdd_expansion* expansion) {
    return expansion ? expansion->value.order() : -1;
}

size_t sdd_expansion_term_count(const sdd_expansion* expansion) {
    return expansion ? expansion->value.terms().size() : 0;
}

double sdd_expansion_mean(const sdd_expansion* expansion) {
    return expansion ? expansion->value.mean() : 0.0;
}

double sdd_expansion_variance(const sdd_expansion* expansion) {
    return expansion ? expansion->value.variance() : 0.0;
}

sdd_status sdd_expansion_eval(const sdd_expansion* expansion, const double* x, double* out) {
    if (!expansion || !x || !out) return fail_argument("expansion_eval: NULL argument");
    return guarded(
        [&] { *out = expansion->value.evaluate(std::span(x, expansion->value.dimension())); });
}

sdd_status sdd_expansion_term(const sdd_expansion* expansion, size_t term, int* coords,
                              int* indices, size_t capacity, size_t* size, double* coeff) {
    if (!expansion || !size) return fail_argument("expansion_term: NULL argument");
    const auto& terms = expansion->value.terms();
    if (term >= terms.size()) return fail_argument("expansion_term: index out of range");
    const sdd::Term& t = terms[term];
    *size = t.coords.size();
    if (coeff) *coeff = t.coeff;
    if (coords || indices) {
        if (capacity < t.coords.size())
            return fail_argument("expansion_term: buffer too small");
        for (size_t l = 0; l < t.coords.size(); ++l) {
            if (coords) coords[l] = t.coords[l];
            if (indices) indices[l] = t.indices[l];
        }
    }
    return SDD_OK;
}

sdd_status sdd_expansion_sample_sorted(const sdd_expansion* expansion, uint64_t count,
                                       uint64_t seed, int threads, double* out) {
    if (!expansion || !out) return fail_argument("expansion_sample_sorted: NULL argument");
    return guarded([&] {
        const std::vector<double> samples =
            sdd::sample_surrogate(expansion->value, count, seed, threads);
        std::memcpy(out, samples.data(), samples.size() * sizeof(double));
    });
}

sdd_status sdd_expansion_save(const sdd_expansion* expansion, const char* path) {
    if (!expansion || !path) return fail_argument("expansion_save: NULL argument");
    return guarded([&] { sdd::save_expansion(expansion->value, path); });
}

sdd_expansion* sdd_expansion_load(const char* path) {
    if (!path) {
        fail_argument("expansion_load: NULL path");
        return nullptr;
    }
    return guarded_create<sdd_expansion>([&] { return sdd::load_expansion(path); });
}

char* sdd_expansion_to_json(const sdd_expansion* expansion) {
    if (!expansion) {
        fail_argument("expansion_to_json: NULL expansion");
        return nullptr;
    }
    try {
        const std::string text = sdd::expansion_to_string(expansion->value);
        char* out = static_cast<char*>(std::malloc(text.size() + 1));
        if (!out) throw std::bad_alloc();
        std::memcpy(out, text.c_str(), text.size() + 1);
        return out;
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        g_last_status = classify(ex);
        return nullptr;
    }
}

sdd_expansion* sdd_expansion_from_json(const char* text) {
    if (!text) {
        fail_argument("expansion_from_json: NULL text");
        return nullptr;
    }
    return guarded_create<sdd_expansion>([&] { return sdd::expansion_from_string(text); });
}

void sdd_string_free(char* text) { std::free(text); }

/* ---- benchmarks --------------------------------------------------------------- */

const sdd_bench* sdd_bench_find(const char* name) {
    if (!name) return nullptr;
    static std::map<std::string, sdd_bench>* registry = new std::map<std::string, sdd_bench>;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = registry->find(name);
    if (it == registry->end()) {
        const sdd::BenchmarkFunction* bench = sdd::find_benchmark(name);
        if (!bench) {
            g_last_error = std::string("unknown benchmark: ") + name;
            g_last_status = SDD_ERR_ARGUMENT;
            return nullptr;
        }
        it = registry->emplace(name, sdd_bench{*bench}).first;
    }
    return &it->second;
}

int sdd_bench_dimension(const sdd_bench* bench) { return bench ? bench->value.dimension : -1; }

sdd_status sdd_bench_eval(const sdd_bench* bench, const double* x, double* out) {
    if (!bench || !x || !out) return fail_argument("bench_eval: NULL argument");
    return guarded([&] { *out = bench->value.evaluate(std::span(x, bench->value.dimension)); });
}

int sdd_bench_has_exact_statistics(const sdd_bench* bench) {
    return bench && bench->value.exact_mean && bench->value.exact_variance ? 1 : 0;
}

double sdd_bench_exact_mean(const sdd_bench* bench) {
    return bench && bench->value.exact_mean ? *bench->value.exact_mean : 0.0;
}

double sdd_bench_exact_variance(const sdd_bench* bench) {
    return bench && bench->value.exact_variance ? *bench->value.exact_variance : 0.0;
}

sdd_status sdd_bench_breakpoints(const sdd_bench* bench, int coordinate, double* out,
                                 size_t capacity, size_t* count) {
    if (!bench || !count) return fail_argument("bench_breakpoints: NULL argument");
    if (coordinate < 0 || coordinate >= bench->value.dimension)
        return fail_argument("bench_breakpoints: coordinate out of range");
    const std::vector<double>& breaks = bench->value.breakpoints[coordinate];
    *count = breaks.size();
    if (out) {
        if (capacity < breaks.size()) return fail_argument("bench_breakpoints: buffer too small");
        std::memcpy(out, breaks.data(), breaks.size() * sizeof(double));
    }
    return SDD_OK;
}

sdd_measure* sdd_bench_measure(const sdd_bench* bench, int coordinate) {
    if (!bench || coordinate < 0 || coordinate >= bench->value.dimension) {
        fail_argument("bench_measure: bad arguments");
        return nullptr;
    }
    return guarded_create<sdd_measure>([&] { return bench->value.measures[coordinate]; });
}

/* ---- verification ----------------------------------------------------------------- */

int sdd_verify(sdd_check_report_fn report, void* user, int threads) {
    try {
        const std::vector<sdd::CheckResult> results = sdd::run_verification(threads);
        int failures = 0;
        for (const sdd::CheckResult& r : results) {
            if (!r.passed) ++failures;
            if (report) report(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
        }
        return failures;
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        g_last_status = SDD_ERR_INTERNAL;
        return -1;
    }
}

} /* extern "C" */
