#include "magbend/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "magbend/curve.hpp"
#include "magbend/errors.hpp"

namespace magbend {

namespace {

constexpr int kNumInputs = 8;
// Branch input slices: mt [0,1), e [1,4), l [4,7), cs [7,8).
constexpr int kBranchOffset[4] = {0, 1, 4, 7};
constexpr int kBranchDim[4] = {1, 3, 3, 1};

double uniform_from(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw; avoids distribution-object portability surprises.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

}  // namespace

Normalizer Normalizer::fit_to(const std::vector<BendSample>& train_set) {
    if (train_set.empty())
        throw std::invalid_argument("normalizer: empty training set");
    Normalizer n;
    auto row = [](const BendSample& s) {
        return std::array<double, 8>{s.mt, s.e[0], s.e[1], s.e[2],
                                     s.l[0], s.l[1], s.l[2], s.cs};
    };
    n.in_lo = n.in_hi = row(train_set.front());
    n.target_lo = n.target_hi = train_set.front().a_hat;
    for (const BendSample& s : train_set) {
        const auto r = row(s);
        for (int i = 0; i < kNumInputs; ++i) {
            n.in_lo[i] = std::min(n.in_lo[i], r[i]);
            n.in_hi[i] = std::max(n.in_hi[i], r[i]);
        }
        n.target_lo = std::min(n.target_lo, s.a_hat);
        n.target_hi = std::max(n.target_hi, s.a_hat);
    }
    n.fitted = true;
    return n;
}

std::array<double, 8> Normalizer::transform(double mt, const std::array<double, 3>& e,
                                            const std::array<double, 3>& l, double cs) const {
    if (!fitted) throw std::logic_error("normalizer: not fitted");
    const std::array<double, 8> r{mt, e[0], e[1], e[2], l[0], l[1], l[2], cs};
    std::array<double, 8> out{};
    for (int i = 0; i < kNumInputs; ++i) {
        const double span = in_hi[i] - in_lo[i];
        out[i] = span > 0.0 ? (r[i] - in_lo[i]) / span : 0.0;
    }
    return out;
}

double Normalizer::normalize_target(double a_hat) const {
    if (!fitted) throw std::logic_error("normalizer: not fitted");
    const double span = target_hi - target_lo;
    return span > 0.0 ? (a_hat - target_lo) / span : 0.0;
}

double Normalizer::denormalize_target(double y) const {
    if (!fitted) throw std::logic_error("normalizer: not fitted");
    return target_lo + y * (target_hi - target_lo);
}

SurrogateModel::SurrogateModel(std::uint64_t seed, int branch_width, int fusion_width)
    : seed_(seed), branch_width_(branch_width), fusion_width_(fusion_width) {
    if (branch_width < 1 || fusion_width < 1)
        throw std::invalid_argument("surrogate: layer widths must be >= 1");
    std::mt19937_64 rng(seed);
    auto init = [&rng](Layer& layer, int rows, int cols) {
        layer.rows = rows;
        layer.cols = cols;
        layer.w.resize(static_cast<size_t>(rows) * cols);
        layer.b.resize(rows);
        const double bound = std::sqrt(1.0 / cols);
        for (double& v : layer.w) v = uniform_from(rng, -bound, bound);
        for (double& v : layer.b) v = uniform_from(rng, -bound, bound);
    };
    for (int br = 0; br < 4; ++br) init(branches_[br], branch_width, kBranchDim[br]);
    init(fusion_, fusion_width, 4 * branch_width);
    init(output_, 1, fusion_width);
}

double SurrogateModel::forward_normalized(const std::array<double, 8>& x) const {
    std::vector<double> cat(4 * static_cast<size_t>(branch_width_));
    for (int br = 0; br < 4; ++br) {
        const Layer& L = branches_[br];
        for (int r = 0; r < L.rows; ++r) {
            double z = L.b[r];
            for (int c = 0; c < L.cols; ++c)
                z += L.w[static_cast<size_t>(r) * L.cols + c] * x[kBranchOffset[br] + c];
            cat[static_cast<size_t>(br) * branch_width_ + r] = std::tanh(z);
        }
    }
    std::vector<double> fused(fusion_width_);
    for (int r = 0; r < fusion_.rows; ++r) {
        double z = fusion_.b[r];
        for (int c = 0; c < fusion_.cols; ++c)
            z += fusion_.w[static_cast<size_t>(r) * fusion_.cols + c] * cat[c];
        fused[r] = std::tanh(z);
    }
    double out = output_.b[0];
    for (int c = 0; c < output_.cols; ++c) out += output_.w[c] * fused[c];
    return out;
}

double SurrogateModel::forward(double mt, const std::array<double, 3>& e,
                               const std::array<double, 3>& l, double cs) const {
    if (!norm_.fitted)
        throw std::logic_error("surrogate: forward called before the normalizer was fitted");
    return norm_.denormalize_target(forward_normalized(norm_.transform(mt, e, l, cs)));
}

std::vector<double> SurrogateModel::parameters() const {
    std::vector<double> p;
    auto push = [&p](const Layer& L) {
        p.insert(p.end(), L.w.begin(), L.w.end());
        p.insert(p.end(), L.b.begin(), L.b.end());
    };
    for (const Layer& L : branches_) push(L);
    push(fusion_);
    push(output_);
    return p;
}

void SurrogateModel::set_parameters(const std::vector<double>& p) {
    size_t at = 0;
    auto pull = [&](Layer& L) {
        for (double& v : L.w) v = p.at(at++);
        for (double& v : L.b) v = p.at(at++);
    };
    for (Layer& L : branches_) pull(L);
    pull(fusion_);
    pull(output_);
    if (at != p.size())
        throw std::invalid_argument("surrogate: parameter vector length mismatch");
}

double SurrogateModel::loss_and_gradient(const std::vector<BendSample>& samples,
                                         std::vector<double>& grad) const {
    if (samples.empty())
        throw std::invalid_argument("surrogate: loss over an empty sample set");
    if (!norm_.fitted) throw std::logic_error("surrogate: normalizer not fitted");

    const size_t n_params = parameters().size();
    grad.assign(n_params, 0.0);

    // Gradient slices in the parameters() layout.
    std::array<size_t, 6> w_at{}, b_at{};
    {
        size_t at = 0;
        auto mark = [&](int idx, const Layer& L) {
            w_at[idx] = at;
            at += L.w.size();
            b_at[idx] = at;
            at += L.b.size();
        };
        for (int br = 0; br < 4; ++br) mark(br, branches_[br]);
        mark(4, fusion_);
        mark(5, output_);
    }

    const int bw = branch_width_;
    std::vector<double> cat(4 * static_cast<size_t>(bw)), fused(fusion_width_);
    std::vector<double> dcat(cat.size()), dfused(fused.size());

    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (const BendSample& s : samples) {
        const auto x = norm_.transform(s.mt, s.e, s.l, s.cs);
        const double y = norm_.normalize_target(s.a_hat);

        for (int br = 0; br < 4; ++br) {
            const Layer& L = branches_[br];
            for (int r = 0; r < L.rows; ++r) {
                double z = L.b[r];
                for (int c = 0; c < L.cols; ++c)
                    z += L.w[static_cast<size_t>(r) * L.cols + c] * x[kBranchOffset[br] + c];
                cat[static_cast<size_t>(br) * bw + r] = std::tanh(z);
            }
        }
        for (int r = 0; r < fusion_.rows; ++r) {
            double z = fusion_.b[r];
            for (int c = 0; c < fusion_.cols; ++c)
                z += fusion_.w[static_cast<size_t>(r) * fusion_.cols + c] * cat[c];
            fused[r] = std::tanh(z);
        }
        double pred = output_.b[0];
        for (int c = 0; c < output_.cols; ++c) pred += output_.w[c] * fused[c];

        const double r = pred - y;
        loss += std::abs(r) * inv_n;
        const double dpred = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) * inv_n;

        // Output layer.
        for (int c = 0; c < output_.cols; ++c) {
            grad[w_at[5] + c] += dpred * fused[c];
            dfused[c] = dpred * output_.w[c];
        }
        grad[b_at[5]] += dpred;

        // Fusion layer.
        std::fill(dcat.begin(), dcat.end(), 0.0);
        for (int rr = 0; rr < fusion_.rows; ++rr) {
            const double dz = dfused[rr] * (1.0 - fused[rr] * fused[rr]);
            for (int c = 0; c < fusion_.cols; ++c) {
                grad[w_at[4] + static_cast<size_t>(rr) * fusion_.cols + c] += dz * cat[c];
                dcat[c] += dz * fusion_.w[static_cast<size_t>(rr) * fusion_.cols + c];
            }
            grad[b_at[4] + rr] += dz;
        }

        // Branches.
        for (int br = 0; br < 4; ++br) {
            const Layer& L = branches_[br];
            for (int rr = 0; rr < L.rows; ++rr) {
                const double h = cat[static_cast<size_t>(br) * bw + rr];
                const double dz = dcat[static_cast<size_t>(br) * bw + rr] * (1.0 - h * h);
                for (int c = 0; c < L.cols; ++c)
                    grad[w_at[br] + static_cast<size_t>(rr) * L.cols + c] +=
                        dz * x[kBranchOffset[br] + c];
                grad[b_at[br] + rr] += dz;
            }
        }
    }
    return loss;
}

TrainReport SurrogateModel::train(const std::vector<BendSample>& train_set,
                                  const TrainOptions& opts,
                                  const std::vector<BendSample>* test_set) {
    if (train_set.empty())
        throw std::invalid_argument("surrogate: empty training set");
    if (opts.epochs < 1)
        throw std::invalid_argument("surrogate: epochs must be >= 1");
    if (!(opts.learning_rate > 0.0))
        throw std::invalid_argument("surrogate: learning rate must be > 0");

    norm_ = Normalizer::fit_to(train_set);

    std::vector<double> params = parameters();
    std::vector<double> g, m(params.size(), 0.0), v(params.size(), 0.0);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    TrainReport report;
    report.epochs = opts.epochs;
    report.learning_rate = opts.learning_rate;
    report.loss_history.reserve(opts.epochs);

    double b1t = 1.0, b2t = 1.0;
    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        const double loss = loss_and_gradient(train_set, g);
        if (!std::isfinite(loss))
            throw std::runtime_error(
                "surrogate: loss became non-finite at epoch " + std::to_string(epoch) +
                "; try a smaller learning rate (current " + std::to_string(opts.learning_rate) +
                ")");
        report.loss_history.push_back(loss);
        b1t *= beta1;
        b2t *= beta2;
        for (size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            const double mhat = m[i] / (1.0 - b1t);
            const double vhat = v[i] / (1.0 - b2t);
            params[i] -= opts.learning_rate * mhat / (std::sqrt(vhat) + eps);
        }
        set_parameters(params);
    }

    report.final_train_mse = evaluate(train_set);
    if (test_set != nullptr && !test_set->empty()) {
        report.test_mse = evaluate(*test_set);
        report.test_mse_normalized = evaluate_normalized(*test_set);
    }
    return report;
}

double SurrogateModel::evaluate(const std::vector<BendSample>& dataset) const {
    if (dataset.empty())
        throw std::invalid_argument("surrogate: evaluate on an empty dataset");
    double sum = 0.0;
    for (const BendSample& s : dataset) {
        const double d = s.a_hat - forward(s.mt, s.e, s.l, s.cs);
        sum += d * d;
    }
    return sum / static_cast<double>(dataset.size());
}

double SurrogateModel::evaluate_normalized(const std::vector<BendSample>& dataset) const {
    if (dataset.empty())
        throw std::invalid_argument("surrogate: evaluate on an empty dataset");
    double sum = 0.0;
    for (const BendSample& s : dataset) {
        const double d = norm_.normalize_target(s.a_hat) -
                         forward_normalized(norm_.transform(s.mt, s.e, s.l, s.cs));
        sum += d * d;
    }
    return sum / static_cast<double>(dataset.size());
}

std::string SurrogateModel::to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["seed"] = seed_;
    j["branch_width"] = branch_width_;
    j["fusion_width"] = fusion_width_;
    nlohmann::ordered_json norm;
    norm["input_lo"] = norm_.in_lo;
    norm["input_hi"] = norm_.in_hi;
    norm["target_lo"] = norm_.target_lo;
    norm["target_hi"] = norm_.target_hi;
    norm["fitted"] = norm_.fitted;
    j["normalizer"] = norm;
    auto layer_json = [](const Layer& L) {
        nlohmann::ordered_json lj;
        lj["rows"] = L.rows;
        lj["cols"] = L.cols;
        lj["weights"] = L.w;
        lj["bias"] = L.b;
        return lj;
    };
    nlohmann::ordered_json layers;
    const char* names[4] = {"fc_mt", "fc_e", "fc_l", "fc_cs"};
    for (int br = 0; br < 4; ++br) layers[names[br]] = layer_json(branches_[br]);
    layers["fusion"] = layer_json(fusion_);
    layers["output"] = layer_json(output_);
    j["layers"] = layers;
    return j.dump(2) + "\n";
}

SurrogateModel SurrogateModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw io_error("model file: unsupported format version");
        SurrogateModel model(j.at("seed").get<std::uint64_t>(),
                             j.at("branch_width").get<int>(),
                             j.at("fusion_width").get<int>());
        const auto& norm = j.at("normalizer");
        Normalizer n;
        n.in_lo = norm.at("input_lo").get<std::array<double, 8>>();
        n.in_hi = norm.at("input_hi").get<std::array<double, 8>>();
        n.target_lo = norm.at("target_lo").get<double>();
        n.target_hi = norm.at("target_hi").get<double>();
        n.fitted = norm.at("fitted").get<bool>();
        model.norm_ = n;
        auto load_layer = [](Layer& L, const nlohmann::json& lj) {
            const int rows = lj.at("rows").get<int>();
            const int cols = lj.at("cols").get<int>();
            if (rows != L.rows || cols != L.cols)
                throw io_error("model file: layer shape does not match widths");
            L.w = lj.at("weights").get<std::vector<double>>();
            L.b = lj.at("bias").get<std::vector<double>>();
            if (L.w.size() != static_cast<size_t>(rows) * cols ||
                L.b.size() != static_cast<size_t>(rows))
                throw io_error("model file: weight array length mismatch");
        };
        const auto& layers = j.at("layers");
        const char* names[4] = {"fc_mt", "fc_e", "fc_l", "fc_cs"};
        for (int br = 0; br < 4; ++br) load_layer(model.branches_[br], layers.at(names[br]));
        load_layer(model.fusion_, layers.at("fusion"));
        load_layer(model.output_, layers.at("output"));
        for (double w : model.parameters())
            if (!std::isfinite(w)) throw io_error("model file: non-finite weight");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("model file: missing or mistyped field: ") + e.what());
    }
}

std::vector<BendSample> build_dataset(const std::vector<RodSpec>& specs,
                                      const std::vector<double>& fields,
                                      double segments_per_mm, const SolverOptions& sopts,
                                      int* excluded) {
    if (excluded != nullptr) *excluded = 0;
    std::vector<BendSample> out;
    out.reserve(specs.size() * fields.size());
    for (const RodSpec& spec : specs) {
        const DiscreteRod rod = build_rod(spec, segments_per_mm);
        for (double field : fields) {
            const Equilibrium eq = solve_equilibrium(rod, field, std::numbers::pi / 2, sopts);
            if (!eq.converged) {
                if (excluded != nullptr) ++(*excluded);
                continue;
            }
            BendSample s;
            s.mt = field;
            for (int i = 0; i < 3; ++i) {
                s.e[i] = spec.sections[i].youngs_modulus;
                s.l[i] = spec.sections[i].length;
            }
            s.cs = spec.cross_section_side;
            s.a_hat = fit_quadratic(Curve2D{eq.points, CurveSource::simulation}).a;
            out.push_back(s);
        }
    }
    return out;
}

void split_holdout(const std::vector<BendSample>& dataset, double held_out_field,
                   std::vector<BendSample>& train_out, std::vector<BendSample>& test_out) {
    train_out.clear();
    test_out.clear();
    auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    // Group identity: the full (e, l, cs) parameter tuple.
    std::map<std::array<double, 7>, int> group_hits;
    for (const BendSample& s : dataset) {
        const std::array<double, 7> key{s.e[0], s.e[1], s.e[2], s.l[0], s.l[1], s.l[2], s.cs};
        group_hits.try_emplace(key, 0);
        if (near(s.mt, held_out_field)) ++group_hits[key];
    }
    for (const auto& [key, hits] : group_hits) {
        if (hits == 0)
            throw std::invalid_argument(
                "split_holdout: a parameter group has no sample at the held-out field");
        if (hits > 1)
            throw std::invalid_argument(
                "split_holdout: a parameter group has duplicate samples at the held-out field");
    }
    for (const BendSample& s : dataset)
        (near(s.mt, held_out_field) ? test_out : train_out).push_back(s);
}

std::string dataset_to_csv(const std::vector<BendSample>& samples) {
    std::string out = "mt_mT,e1_MPa,e2_MPa,e3_MPa,l1_mm,l2_mm,l3_mm,cs_mm,a_per_mm\n";
    char buf[512];
    for (const BendSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      s.mt * 1e3, s.e[0] * 1e-6, s.e[1] * 1e-6, s.e[2] * 1e-6, s.l[0] * 1e3,
                      s.l[1] * 1e3, s.l[2] * 1e3, s.cs * 1e3, s.a_hat * 1e-3);
        out += buf;
    }
    return out;
}

std::vector<BendSample> dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw io_error("dataset: empty CSV");
    if (line.find("mt_mT") == std::string::npos)
        throw io_error("dataset: missing header row");
    std::vector<BendSample> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[9];
        const int got = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf",
                                    &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7], &v[8]);
        if (got != 9)
            throw io_error("dataset: malformed CSV row at line " + std::to_string(lineno));
        BendSample s;
        s.mt = v[0] * 1e-3;
        for (int i = 0; i < 3; ++i) s.e[i] = v[1 + i] * 1e6;
        for (int i = 0; i < 3; ++i) s.l[i] = v[4 + i] * 1e-3;
        s.cs = v[7] * 1e-3;
        s.a_hat = v[8] * 1e3;
        out.push_back(s);
    }
    return out;
}

}  // namespace magbend
