#pragma once

#include <map>
#include <string>
#include <vector>

#include "cocyclelab/budget.hpp"
#include "cocyclelab/subshift.hpp"

namespace cocyclelab {

// One locally constant layer: a real value per legal (2*radius+1)-window,
// weighted by `coefficient`.
struct SamplingLayer {
    int radius = 0;
    std::map<Word, double> table;
    double coefficient = 1.0;
};

// Continuous sampling function represented as a finite sum of locally
// constant layers plus a declared tail bound for whatever was truncated
// away.  With tail == 0 the function is exactly locally constant at the
// maximal layer radius.
class LayeredSamplingFunction {
public:
    LayeredSamplingFunction(std::vector<SamplingLayer> layers, double tail = 0.0);

    // radius-0 constant layer
    static LayeredSamplingFunction constant(double value, const SubshiftSpec& spec);
    // radius-0 layer that is `scale` on `symbol` and 0 elsewhere
    static LayeredSamplingFunction indicator(char symbol, const SubshiftSpec& spec,
                                             double scale = 1.0);
    // single layer that is `scale` on the given window word and 0 on the
    // other legal windows of the same length
    static LayeredSamplingFunction window_indicator(const Word& window, const SubshiftSpec& spec,
                                                    double scale = 1.0, const Budget& budget = {});

    const std::vector<SamplingLayer>& layers() const { return layers_; }
    double tail() const { return tail_; }
    int radius() const { return radius_; }

    // Exact evaluation (up to tail) on a window of length 2*radius()+1; each
    // layer reads its centered subwindow.
    double evaluate(const Word& window) const;

    // sum_j |c_j| * sup |layer_j| + tail; upper bound for the sup norm
    double sup_norm_bound() const;

    // min / max over the legal windows of a given subshift
    std::pair<double, double> range_on(const SubshiftSpec& spec, const Budget& budget = {}) const;

    LayeredSamplingFunction plus_layer(SamplingLayer extra) const;
    LayeredSamplingFunction scaled(double s) const;
    friend LayeredSamplingFunction operator+(const LayeredSamplingFunction& f,
                                             const LayeredSamplingFunction& g);

private:
    std::vector<SamplingLayer> layers_;
    double tail_ = 0.0;
    int radius_ = 0;
};

}  // namespace cocyclelab
