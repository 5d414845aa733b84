#pragma once

#include <Eigen/Dense>

namespace wblab {

using Field = Eigen::VectorXd;

// Two-component state (position, velocity) sampled at grid nodes.
struct StateField {
    Field w1;
    Field w2;

    StateField() = default;
    StateField(Field a, Field b) : w1(std::move(a)), w2(std::move(b)) {}
    static StateField zero(Eigen::Index n) {
        return {Field::Zero(n), Field::Zero(n)};
    }

    StateField operator+(const StateField& o) const { return {w1 + o.w1, w2 + o.w2}; }
    StateField operator-(const StateField& o) const { return {w1 - o.w1, w2 - o.w2}; }
    StateField operator*(double c) const { return {c * w1, c * w2}; }
    StateField& operator+=(const StateField& o) {
        w1 += o.w1;
        w2 += o.w2;
        return *this;
    }
};

inline StateField operator*(double c, const StateField& q) { return q * c; }

} // namespace wblab
