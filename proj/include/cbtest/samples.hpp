#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cbtest {

// Simulation-side view: the pair labels are known. Real colour-blind data
// never arrives in this form.
struct LabeledSample {
    std::vector<std::pair<double, double>> pairs;  // (x_i, y_i), each in [0,1]
    int n() const { return static_cast<int>(pairs.size()); }
};

// What the observer actually has: per pair only (max, min), plus the pooled
// order statistics of all 2n values.
struct ColourBlindSample {
    std::vector<std::pair<double, double>> pairs;  // (u_i, v_i) with v_i <= u_i
    std::vector<double> pooled;                    // sorted ascending, length 2n
    int n() const { return static_cast<int>(pairs.size()); }
};

ColourBlindSample blind(const LabeledSample& s);

// right-continuous step function; EDFs and simulated distribution curves
struct StepFunction {
    std::vector<double> xs;   // strictly increasing jump points
    std::vector<double> ys;   // value at and after xs[i]
    double left = 0.0;        // value before the first jump

    double operator()(double x) const;
};

// EDF of a value multiset; ties merge into one jump of the full height
StepFunction edf_of(std::vector<double> values);

struct Edfs {
    StepFunction pmin;  // EDF of the minima v_i
    StepFunction pmax;  // EDF of the maxima u_i
    StepFunction qn;    // pooled EDF = (pmin + pmax)/2
};

Edfs edfs(const ColourBlindSample& s);

}  // namespace cbtest
