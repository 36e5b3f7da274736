#pragma once

#include <cstddef>
#include <vector>

#include "beliefplan/errors.hpp"

namespace beliefplan {

/// Probability distribution over hidden states: entries >= 0, sum == 1
/// within 1e-9.
class Belief {
public:
    Belief() = default;
    explicit Belief(std::vector<double> probs) : p_(std::move(probs)) {}

    static Belief point_mass(std::size_t dim, std::size_t index) {
        std::vector<double> p(dim, 0.0);
        p.at(index) = 1.0;
        return Belief(std::move(p));
    }

    static Belief uniform(std::size_t dim) {
        return Belief(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
    }

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

    double sum() const {
        double s = 0.0;
        for (double v : p_) s += v;
        return s;
    }

    double max_component() const {
        double m = 0.0;
        for (double v : p_) {
            if (v > m) m = v;
        }
        return m;
    }

    /// Throws ModelError unless entries are nonnegative and sum to 1 within tol.
    void validate(double tol = 1e-9) const;

private:
    std::vector<double> p_;
};

} // namespace beliefplan
