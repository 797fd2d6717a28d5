#pragma once

// Multi-branch regression network mapping (field strength, modulus triple,
// length triple, cross-section side) to the quadratic bending coefficient.
// One fully connected tanh branch per input group, concatenation, one tanh
// fusion layer, linear scalar output. Trained full-batch with Adam on mean
// L1 loss in min-max normalized coordinates.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "magbend/rod.hpp"
#include "magbend/solver.hpp"

namespace magbend {

struct BendSample {
    double mt = 0.0;               // field strength, T
    std::array<double, 3> e{};     // Young's moduli, Pa, bottom -> top
    std::array<double, 3> l{};     // section lengths, m, bottom -> top
    double cs = 0.0;               // cross-section side, m
    double a_hat = 0.0;            // fitted quadratic coefficient, 1/m
};

// Per-dimension min-max over a training set; inputs ordered mt, e0..e2,
// l0..l2, cs. Degenerate dimensions (max == min) map to 0.
struct Normalizer {
    std::array<double, 8> in_lo{}, in_hi{};
    double target_lo = 0.0, target_hi = 0.0;
    bool fitted = false;

    static Normalizer fit_to(const std::vector<BendSample>& train_set);
    std::array<double, 8> transform(double mt, const std::array<double, 3>& e,
                                    const std::array<double, 3>& l, double cs) const;
    double normalize_target(double a_hat) const;
    double denormalize_target(double y) const;
};

struct TrainOptions {
    double learning_rate = 1e-3;
    int epochs = 5000;
};

struct TrainReport {
    std::vector<double> loss_history;  // mean L1 per epoch, normalized units
    double final_train_mse = 0.0;      // (1/m)^2
    double test_mse = 0.0;             // (1/m)^2; 0 when no test set given
    double test_mse_normalized = 0.0;  // normalized-coefficient units
    int epochs = 0;
    double learning_rate = 0.0;
};

class SurrogateModel {
public:
    explicit SurrogateModel(std::uint64_t seed = 42, int branch_width = 8,
                            int fusion_width = 16);

    // Deterministic inference; requires a fitted normalizer. Returns 1/m.
    double forward(double mt, const std::array<double, 3>& e,
                   const std::array<double, 3>& l, double cs) const;

    // Fits the normalizer on train_set, then runs Adam (beta1 0.9, beta2
    // 0.999, eps 1e-8) full batch. Mutates the model in place.
    TrainReport train(const std::vector<BendSample>& train_set, const TrainOptions& opts,
                      const std::vector<BendSample>* test_set = nullptr);

    // Mean squared (a_hat - forward) over the dataset, (1/m)^2.
    double evaluate(const std::vector<BendSample>& dataset) const;
    double evaluate_normalized(const std::vector<BendSample>& dataset) const;

    // Flat parameter vector (branches, fusion, output; weights row-major,
    // then bias, per layer) for gradient checks and serialization.
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& p);

    // Mean L1 loss over normalized samples and its analytic gradient in the
    // parameters() layout.
    double loss_and_gradient(const std::vector<BendSample>& samples,
                             std::vector<double>& grad) const;

    const Normalizer& normalizer() const { return norm_; }
    void set_normalizer(const Normalizer& n) { norm_ = n; }
    std::uint64_t seed() const { return seed_; }
    int branch_width() const { return branch_width_; }
    int fusion_width() const { return fusion_width_; }

    std::string to_json() const;
    static SurrogateModel from_json(const std::string& text);

private:
    struct Layer {
        int rows = 0, cols = 0;
        std::vector<double> w;  // row-major rows x cols
        std::vector<double> b;  // rows
    };

    double forward_normalized(const std::array<double, 8>& x) const;

    std::uint64_t seed_;
    int branch_width_;
    int fusion_width_;
    std::array<Layer, 4> branches_;  // mt, e, l, cs
    Layer fusion_;
    Layer output_;
    Normalizer norm_;
};

// Solve every (spec, field) pair, fit the quadratic coefficient, and emit
// one sample per converged solve (spec-major order). Non-converged solves
// are excluded and counted in *excluded when provided.
std::vector<BendSample> build_dataset(const std::vector<RodSpec>& specs,
                                      const std::vector<double>& fields,
                                      double segments_per_mm, const SolverOptions& sopts,
                                      int* excluded = nullptr);

// Exact partition: test receives the one sample per parameter group whose
// field matches held_out_field; every group must contain that field.
void split_holdout(const std::vector<BendSample>& dataset, double held_out_field,
                   std::vector<BendSample>& train_out, std::vector<BendSample>& test_out);

// Dataset CSV: header mt_mT,e1_MPa,e2_MPa,e3_MPa,l1_mm,l2_mm,l3_mm,cs_mm,a_per_mm.
std::string dataset_to_csv(const std::vector<BendSample>& samples);
std::vector<BendSample> dataset_from_csv(const std::string& text);

}  // namespace magbend
