#pragma once

#include <cstddef>
#include <vector>

namespace hclab {

// Gauss-Hermite rule rescaled to the standard normal weight, so that
// expect(g) approximates E g(Z) for Z ~ N(0, 1).
class GaussHermite {
public:
    explicit GaussHermite(std::size_t nodes = 101);

    std::size_t size() const noexcept { return z_.size(); }
    const std::vector<double>& nodes() const noexcept { return z_; }
    const std::vector<double>& weights() const noexcept { return w_; }

    template <class G>
    double expect(G&& g) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < z_.size(); ++i)
            s += w_[i] * g(z_[i]);
        return s;
    }

private:
    std::vector<double> z_;
    std::vector<double> w_;
};

// Shared default rule (101 nodes).
const GaussHermite& default_rule();

}  // namespace hclab
