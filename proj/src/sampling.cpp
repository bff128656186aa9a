#include "cocyclelab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocyclelab/errors.hpp"

namespace cocyclelab {

LayeredSamplingFunction::LayeredSamplingFunction(std::vector<SamplingLayer> layers, double tail)
    : layers_(std::move(layers)), tail_(tail) {
    if (tail_ < 0.0) throw ConfigError("tail bound must be >= 0");
    for (const auto& layer : layers_) {
        if (layer.radius < 0) throw ConfigError("layer radius must be >= 0");
        for (const auto& [window, value] : layer.table) {
            if (static_cast<int>(window.size()) != 2 * layer.radius + 1)
                throw ConfigError("layer table key \"" + window +
                                  "\" does not match radius " + std::to_string(layer.radius));
            if (!std::isfinite(value)) throw ConfigError("layer values must be finite");
        }
        radius_ = std::max(radius_, layer.radius);
    }
}

LayeredSamplingFunction LayeredSamplingFunction::constant(double value,
                                                          const SubshiftSpec& spec) {
    SamplingLayer layer;
    layer.radius = 0;
    layer.coefficient = 1.0;
    for (char c : spec.alphabet()) layer.table[Word(1, c)] = value;
    return LayeredSamplingFunction({std::move(layer)});
}

LayeredSamplingFunction LayeredSamplingFunction::indicator(char symbol, const SubshiftSpec& spec,
                                                           double scale) {
    if (spec.alphabet().find(symbol) == std::string::npos)
        throw ConfigError(std::string("indicator symbol '") + symbol + "' not in alphabet");
    SamplingLayer layer;
    layer.radius = 0;
    layer.coefficient = 1.0;
    for (char c : spec.alphabet()) layer.table[Word(1, c)] = (c == symbol) ? scale : 0.0;
    return LayeredSamplingFunction({std::move(layer)});
}

LayeredSamplingFunction LayeredSamplingFunction::window_indicator(const Word& window,
                                                                  const SubshiftSpec& spec,
                                                                  double scale,
                                                                  const Budget& budget) {
    if (window.empty() || window.size() % 2 == 0)
        throw ConfigError("window indicator needs an odd-length window word");
    const int radius = static_cast<int>(window.size() / 2);
    const FactorLanguage lang = factor_set(spec, 2 * radius + 1, budget);
    SamplingLayer layer;
    layer.radius = radius;
    layer.coefficient = 1.0;
    bool found = false;
    for (const Word& w : lang.words) {
        layer.table[w] = (w == window) ? scale : 0.0;
        found = found || (w == window);
    }
    if (!found) throw IllegalWindowError(window);
    return LayeredSamplingFunction({std::move(layer)});
}

double LayeredSamplingFunction::evaluate(const Word& window) const {
    if (static_cast<int>(window.size()) != 2 * radius_ + 1)
        throw ConfigError("window length " + std::to_string(window.size()) +
                          " does not match sampling radius " + std::to_string(radius_));
    double value = 0.0;
    for (const auto& layer : layers_) {
        const int offset = radius_ - layer.radius;
        const Word sub = window.substr(offset, 2 * layer.radius + 1);
        auto it = layer.table.find(sub);
        if (it == layer.table.end()) throw IllegalWindowError(sub);
        value += layer.coefficient * it->second;
    }
    return value;
}

double LayeredSamplingFunction::sup_norm_bound() const {
    double bound = tail_;
    for (const auto& layer : layers_) {
        double sup = 0.0;
        for (const auto& [window, value] : layer.table) sup = std::max(sup, std::abs(value));
        bound += std::abs(layer.coefficient) * sup;
    }
    return bound;
}

std::pair<double, double> LayeredSamplingFunction::range_on(const SubshiftSpec& spec,
                                                            const Budget& budget) const {
    const FactorLanguage lang = factor_set(spec, 2 * radius_ + 1, budget);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Word& w : lang.words) {
        const double v = evaluate(w);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

LayeredSamplingFunction LayeredSamplingFunction::plus_layer(SamplingLayer extra) const {
    std::vector<SamplingLayer> layers = layers_;
    layers.push_back(std::move(extra));
    return LayeredSamplingFunction(std::move(layers), tail_);
}

LayeredSamplingFunction LayeredSamplingFunction::scaled(double s) const {
    std::vector<SamplingLayer> layers = layers_;
    for (auto& layer : layers) layer.coefficient *= s;
    return LayeredSamplingFunction(std::move(layers), tail_ * std::abs(s));
}

LayeredSamplingFunction operator+(const LayeredSamplingFunction& f,
                                  const LayeredSamplingFunction& g) {
    std::vector<SamplingLayer> layers = f.layers_;
    layers.insert(layers.end(), g.layers_.begin(), g.layers_.end());
    return LayeredSamplingFunction(std::move(layers), f.tail_ + g.tail_);
}

}  // namespace cocyclelab
