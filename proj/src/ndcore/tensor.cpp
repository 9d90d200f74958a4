#include "folio/ndcore/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace folio::nd {

std::string shape_str(const Shape& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(s[i]);
    }
    out += ")";
    return out;
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    require(data.size() == shape_numel(shape), "tensor: data length ", data.size(),
            " does not match shape ", shape_str(shape));
}

Tensor Tensor::full(Shape s, double v) {
    Tensor t(std::move(s));
    t.fill(v);
    return t;
}

Tensor Tensor::vec(std::initializer_list<double> vals) {
    return Tensor({vals.size()}, std::vector<double>(vals));
}

bool Tensor::all_finite() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

} // namespace folio::nd
