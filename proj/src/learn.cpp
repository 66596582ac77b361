#include "ldptop/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>

#include "ldptop/errors.hpp"

using json = nlohmann::json;

namespace ldptop {

std::size_t LabeledSet::count(int label) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label)); }

void LabeledSet::add(std::vector<double> x, int label) {
    if (!features.empty() && x.size() != dim())
        throw DimensionMismatchError("feature of length " + std::to_string(x.size()) + " added to a set of dimension " +
                                     std::to_string(dim()));
    features.push_back(std::move(x));
    labels.push_back(label);
}

std::size_t Scaler::constant_features() const {
    return static_cast<std::size_t>(std::count(stddev.begin(), stddev.end(), 0.0));
}

Scaler fit_scaler(const LabeledSet& set) {
    if (set.size() == 0) throw ParameterError("cannot fit a scaler on an empty set");
    const std::size_t n = set.size(), d = set.dim();
    Scaler s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (const auto& x : set.features)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += x[j];
    for (auto& m : s.mean) m /= static_cast<double>(n);
    // Two-pass variance; exact zero for constant columns.
    for (const auto& x : set.features)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = x[j] - s.mean[j];
            s.stddev[j] += c * c;
        }
    for (auto& v : s.stddev) v = std::sqrt(v / static_cast<double>(n));
    return s;
}

std::vector<double> apply_scaler(const Scaler& scaler, std::span<const double> x) {
    if (x.size() != scaler.dim())
        throw DimensionMismatchError("feature length " + std::to_string(x.size()) + " != scaler dimension " +
                                     std::to_string(scaler.dim()));
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = scaler.stddev[j] > 0.0 ? (x[j] - scaler.mean[j]) / scaler.stddev[j] : 0.0;
    return out;
}

LabeledSet apply_scaler(const Scaler& scaler, const LabeledSet& set) {
    LabeledSet out;
    out.labels = set.labels;
    out.features.reserve(set.size());
    for (const auto& x : set.features) out.features.push_back(apply_scaler(scaler, x));
    return out;
}

namespace {

constexpr double kTau = 1e-12;

/// LRU cache of linear-kernel rows K(i, .).
class KernelRows {
public:
    KernelRows(const std::vector<double>& x, std::size_t n, std::size_t d, std::size_t budget_bytes)
        : x_(x), n_(n), d_(d), rows_(n), where_(n) {
        capacity_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, n * sizeof(double)));
    }

    double dot(std::size_t i, std::size_t j) const {
        const double* a = &x_[i * d_];
        const double* b = &x_[j * d_];
        double s = 0.0;
        for (std::size_t k = 0; k < d_; ++k) s += a[k] * b[k];
        return s;
    }

    const std::vector<double>& row(std::size_t i) {
        if (!rows_[i].empty()) {
            lru_.splice(lru_.begin(), lru_, where_[i]);
            return rows_[i];
        }
        if (lru_.size() >= capacity_) {
            const auto victim = lru_.back();
            lru_.pop_back();
            rows_[victim].clear();
            rows_[victim].shrink_to_fit();
        }
        auto& r = rows_[i];
        r.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) r[t] = dot(i, t);
        lru_.push_front(i);
        where_[i] = lru_.begin();
        return r;
    }

private:
    const std::vector<double>& x_;
    std::size_t n_, d_, capacity_;
    std::vector<std::vector<double>> rows_;
    std::list<std::size_t> lru_;
    std::vector<std::list<std::size_t>::iterator> where_;
};

}  // namespace

double primal_objective(std::span<const double> weights, double bias, const LabeledSet& set, double C) {
    double norm = 0.0;
    for (double v : weights) norm += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        double f = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) f += weights[j] * set.features[i][j];
        const double y = set.labels[i] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * f);
    }
    return 0.5 * norm + C * hinge;
}

SvmSolution solve_svm(const LabeledSet& set, const SvmParams& params) {
    const std::size_t n = set.size();
    if (n == 0) throw ParameterError("empty training set");
    if (!(params.C > 0.0)) throw ParameterError("C must be positive");
    if (!(params.tol > 0.0)) throw ParameterError("tol must be positive");
    if (set.count(0) == 0 || set.count(1) == 0)
        throw ParameterError("training needs both classes (got " + std::to_string(set.count(0)) + " real, " +
                             std::to_string(set.count(1)) + " manipulated)");
    if (set.count(0) + set.count(1) != n) throw ParameterError("labels must be 0 or 1");
    const std::size_t d = set.dim();

    std::vector<double> x(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        if (set.features[i].size() != d) throw DimensionMismatchError("ragged training matrix");
        for (std::size_t j = 0; j < d; ++j) {
            const double v = set.features[i][j];
            if (!std::isfinite(v))
                throw ParameterError("non-finite feature at sample " + std::to_string(i) + ", index " + std::to_string(j));
            x[i * d + j] = v;
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = set.labels[i] == 1 ? 1.0 : -1.0;

    const double C = params.C;
    KernelRows kernel(x, n, d, params.cache_megabytes << 20);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) qd[i] = kernel.dot(i, i);

    SvmSolution sol;
    auto& alpha = sol.alpha;
    alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a

    const long epochs = params.max_epochs > 0 ? params.max_epochs : 10 * static_cast<long>(n);
    const long max_iter = epochs > std::numeric_limits<long>::max() / static_cast<long>(n)
                              ? std::numeric_limits<long>::max()
                              : epochs * static_cast<long>(n);

    auto bias = [&]() {
        double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
        std::size_t free = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yg = y[i] * grad[i];
            if (alpha[i] >= C) {
                if (y[i] < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (alpha[i] <= 0.0) {
                if (y[i] > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++free;
                sum_free += yg;
            }
        }
        const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
        return -rho;
    };

    // Both objectives follow from the gradient: a'Qa = sum a_i (G_i + 1) and
    // y_i f(x_i) = G_i + 1 + y_i b.
    auto record = [&]() {
        double quad = 0.0, lin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            quad += alpha[i] * (grad[i] + 1.0);
            lin += alpha[i];
        }
        const double b = bias();
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - (grad[i] + 1.0 + y[i] * b));
        sol.dual_trace.push_back(lin - 0.5 * quad);
        sol.primal_trace.push_back(0.5 * quad + C * hinge);
    };

    long iter = 0;
    for (; iter < max_iter; ++iter) {
        // Working set: maximal violator i, then the j with the largest second-order gain.
        double gmax = -std::numeric_limits<double>::infinity();
        long wi = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            const bool up = y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0;
            if (up && v >= gmax) {
                gmax = v;
                wi = static_cast<long>(t);
            }
        }
        if (wi < 0) {
            sol.converged = true;
            break;
        }
        const std::size_t i = static_cast<std::size_t>(wi);
        const auto& ki = kernel.row(i);
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        long wj = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const bool low = y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C;
            if (!low) continue;
            const double v = -y[t] * grad[t];
            gmax2 = std::max(gmax2, -v);
            const double diff = gmax - v;
            if (diff > 0.0) {
                double quad = qd[i] + qd[t] - 2.0 * ki[t];
                if (quad <= 0.0) quad = kTau;
                const double gain = -(diff * diff) / quad;
                if (gain <= best) {
                    best = gain;
                    wj = static_cast<long>(t);
                }
            }
        }
        sol.max_violation = gmax + gmax2;
        if (gmax + gmax2 < params.tol || wj < 0) {
            sol.converged = true;
            break;
        }
        const std::size_t j = static_cast<std::size_t>(wj);
        const auto kij = ki[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        double quad = qd[i] + qd[j] - 2.0 * kij;
        if (quad <= 0.0) quad = kTau;
        double& ai = alpha[i];
        double& aj = alpha[j];
        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
                if (ai > C) {
                    ai = C;
                    aj = C - diff;
                }
            } else {
                if (ai < 0.0) {
                    ai = 0.0;
                    aj = -diff;
                }
                if (aj > C) {
                    aj = C;
                    ai = C + diff;
                }
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C) {
                if (ai > C) {
                    ai = C;
                    aj = sum - C;
                }
                if (aj > C) {
                    aj = C;
                    ai = sum - C;
                }
            } else {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = sum;
                }
                if (ai < 0.0) {
                    ai = 0.0;
                    aj = sum;
                }
            }
        }
        const double dai = (ai - old_ai) * y[i];
        const double daj = (aj - old_aj) * y[j];
        const auto& kj = kernel.row(j);
        const auto& ki2 = kernel.row(i);  // j's fetch may have evicted i's row
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki2[t] * dai + kj[t] * daj);

        if ((iter + 1) % static_cast<long>(n) == 0) record();
    }
    sol.iterations = iter;
    record();

    sol.weights.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] == 0.0) continue;
        const double c = alpha[i] * y[i];
        for (std::size_t j = 0; j < d; ++j) sol.weights[j] += c * x[i * d + j];
    }
    sol.bias = bias();
    sol.dual_objective = sol.dual_trace.back();
    sol.primal_objective = primal_objective(sol.weights, sol.bias, set, C);
    return sol;
}

LinearSvmModel train_svm(const LabeledSet& set, const SvmParams& params, const ModelMetadata& metadata) {
    const auto scaler = fit_scaler(set);
    const auto sol = solve_svm(apply_scaler(scaler, set), params);
    LinearSvmModel m;
    m.weights = sol.weights;
    m.bias = sol.bias;
    m.C = params.C;
    m.tol = params.tol;
    m.scaler = scaler;
    m.metadata = metadata;
    m.iterations = sol.iterations;
    m.converged = sol.converged;
    return m;
}

Prediction predict(const LinearSvmModel& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw DimensionMismatchError("feature length " + std::to_string(x.size()) + " != model dimension " +
                                     std::to_string(model.dim()));
    const auto z = apply_scaler(model.scaler, x);
    double s = model.bias;
    for (std::size_t j = 0; j < z.size(); ++j) s += model.weights[j] * z[j];
    return {s > 0.0 ? 1 : 0, s};
}

std::string encode_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double decode_double(const std::string& s) {
    // istringstream does not parse hex floats portably; strtod does.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw FormatError("bad encoded double '" + s + "'");
    return v;
}

namespace {

json encode_vector(const std::vector<double>& v) {
    json a = json::array();
    for (double d : v) a.push_back(encode_double(d));
    return a;
}

std::vector<double> decode_vector(const json& a, const char* field) {
    if (!a.is_array()) throw FormatError(std::string("model field '") + field + "' must be an array");
    std::vector<double> v;
    v.reserve(a.size());
    for (const auto& e : a) v.push_back(decode_double(e.get<std::string>()));
    return v;
}

}  // namespace

json model_to_json(const LinearSvmModel& m) {
    return json{{"schema_version", kModelSchemaVersion},
                {"technique", to_string(m.metadata.technique)},
                {"descriptor", to_string(m.metadata.descriptor)},
                {"area", to_string(m.metadata.area)},
                {"mode", to_string(m.metadata.mode)},
                {"windowing",
                 {{"d_seconds", m.metadata.windowing.d_seconds},
                  {"s_seconds", m.metadata.windowing.s_seconds},
                  {"sliding", m.metadata.windowing.sliding}}},
                {"C", encode_double(m.C)},
                {"tol", encode_double(m.tol)},
                {"weights", encode_vector(m.weights)},
                {"bias", encode_double(m.bias)},
                {"scaler_mean", encode_vector(m.scaler.mean)},
                {"scaler_std", encode_vector(m.scaler.stddev)},
                {"solver", {{"iterations", m.iterations}, {"converged", m.converged}}},
                {"config", m.metadata.config}};
}

LinearSvmModel model_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("model file is not a JSON object");
    if (!j.contains("schema_version") || j["schema_version"] != kModelSchemaVersion)
        throw FormatError("unsupported model schema_version " +
                          (j.contains("schema_version") ? j["schema_version"].dump() : std::string("(missing)")) +
                          ", expected " + std::to_string(kModelSchemaVersion));
    for (const char* key : {"scaler_mean", "scaler_std"})
        if (!j.contains(key)) throw FormatError(std::string("model schema error: missing scaler block '") + key + "'");
    for (const char* key : {"technique", "descriptor", "area", "mode", "windowing", "C", "tol", "weights", "bias"})
        if (!j.contains(key)) throw FormatError(std::string("model schema error: missing field '") + key + "'");
    LinearSvmModel m;
    try {
        m.metadata.technique = parse_technique(j["technique"].get<std::string>());
        m.metadata.descriptor = parse_descriptor(j["descriptor"].get<std::string>());
        m.metadata.area = parse_area(j["area"].get<std::string>());
        m.metadata.mode = parse_mode(j["mode"].get<std::string>());
        const auto& w = j["windowing"];
        m.metadata.windowing = {w.at("d_seconds").get<double>(), w.at("s_seconds").get<double>(),
                                w.at("sliding").get<bool>()};
        m.metadata.config = j.value("config", json());
        m.C = decode_double(j["C"].get<std::string>());
        m.tol = decode_double(j["tol"].get<std::string>());
        m.bias = decode_double(j["bias"].get<std::string>());
        m.weights = decode_vector(j["weights"], "weights");
        m.scaler.mean = decode_vector(j["scaler_mean"], "scaler_mean");
        m.scaler.stddev = decode_vector(j["scaler_std"], "scaler_std");
        if (j.contains("solver")) {
            m.iterations = j["solver"].value("iterations", 0L);
            m.converged = j["solver"].value("converged", false);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("model schema error: ") + e.what());
    }
    if (m.weights.size() != m.scaler.mean.size() || m.weights.size() != m.scaler.stddev.size())
        throw FormatError("model schema error: weights and scaler dimensions differ");
    return m;
}

void save_model(const LinearSvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write model " + path.string());
    out << model_to_json(model).dump(1) << '\n';
}

LinearSvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open model " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("model " + path.string() + " is corrupt or truncated: " + e.what());
    }
    return model_from_json(j);
}

}  // namespace ldptop
