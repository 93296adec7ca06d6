#pragma once

#include <deque>
#include <vector>

#include "ffns/errors.hpp"
#include "ffns/field.hpp"

namespace ffns {

/// Fornberg weights for the m-th derivative at x0 from the given nodes.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

/// Ring of uniformly spaced snapshots, newest last. Supplies the discrete
/// stand-ins for time derivatives used by the space-time conormal norms.
template <class T>
class HistoryRing {
  public:
    explicit HistoryRing(std::size_t depth = 4) : depth_(depth) {}

    void push(double t, T value) {
        t_.push_back(t);
        v_.push_back(std::move(value));
        while (v_.size() > depth_) {
            v_.pop_front();
            t_.pop_front();
        }
    }

    std::size_t size() const { return v_.size(); }
    std::size_t depth() const { return depth_; }
    void set_depth(std::size_t d) { depth_ = d; }
    const T& newest() const { return v_.back(); }
    const T& at(std::size_t i) const { return v_[i]; }  // oldest first
    double time(std::size_t i) const { return t_[i]; }
    double newest_time() const { return t_.back(); }

    /// Backward finite difference of order >= 2 for the ell-th time
    /// derivative at the newest snapshot.
    T derivative(int ell) const {
        if (ell == 0) return v_.back();
        const std::size_t need = std::size_t(ell) + 2;  // one extra point: order 2
        if (v_.size() < need)
            throw Error(ErrorCode::InsufficientHistory,
                        "time derivative of order " + std::to_string(ell) + " needs " +
                            std::to_string(need) + " snapshots, have " +
                            std::to_string(v_.size()));
        std::vector<double> nodes(need);
        for (std::size_t k = 0; k < need; ++k) nodes[k] = t_[t_.size() - 1 - k];
        auto w = fd_weights(t_.back(), nodes, ell);
        T out = w[0] * v_.back();
        for (std::size_t k = 1; k < need; ++k) axpy(w[k], v_[v_.size() - 1 - k], out);
        return out;
    }

  private:
    std::size_t depth_;
    std::deque<double> t_;
    std::deque<T> v_;
};

template <class T>
T time_derivative_from_history(const HistoryRing<T>& ring, int ell) {
    return ring.derivative(ell);
}

} // namespace ffns
