#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "biphoton/errors.hpp"

namespace biphoton {

/// Mode bookkeeping for the two sides of a biphoton experiment.
///
/// `m_unprimed` / `m_primed` count all modes, including auxiliary loss modes.
/// Only the first `window_unprimed` / `window_primed` modes are seen by detectors.
/// Indices in this library are zero-based; mode q corresponds to index q - 1.
class ModeSpace {
public:
    ModeSpace(std::size_t m_unprimed, std::size_t m_primed)
        : ModeSpace(m_unprimed, m_primed, m_unprimed, m_primed) {}

    ModeSpace(std::size_t m_unprimed, std::size_t m_primed, std::size_t window_unprimed,
              std::size_t window_primed)
        : m_unprimed_(m_unprimed), m_primed_(m_primed), window_unprimed_(window_unprimed),
          window_primed_(window_primed) {
        if (m_unprimed == 0 || m_primed == 0)
            throw DimensionError("ModeSpace: mode counts must be positive");
        if (window_unprimed < 1 || window_unprimed > m_unprimed)
            throw DimensionError("ModeSpace: need 1 <= N <= M, got N=" + std::to_string(window_unprimed) +
                                 ", M=" + std::to_string(m_unprimed));
        if (window_primed < 1 || window_primed > m_primed)
            throw DimensionError("ModeSpace: need 1 <= N' <= M', got N'=" + std::to_string(window_primed) +
                                 ", M'=" + std::to_string(m_primed));
    }

    std::size_t m_unprimed() const { return m_unprimed_; }
    std::size_t m_primed() const { return m_primed_; }
    std::size_t window_unprimed() const { return window_unprimed_; }
    std::size_t window_primed() const { return window_primed_; }

    std::size_t dimension() const { return m_unprimed_ * m_primed_; }

    bool lossless() const { return window_unprimed_ == m_unprimed_ && window_primed_ == m_primed_; }

    /// Same windows, more modes.
    ModeSpace extended(std::size_t m_unprimed, std::size_t m_primed) const {
        return ModeSpace(m_unprimed, m_primed, window_unprimed_, window_primed_);
    }

    ModeSpace with_windows(std::size_t window_unprimed, std::size_t window_primed) const {
        return ModeSpace(m_unprimed_, m_primed_, window_unprimed, window_primed);
    }

    /// Index of |1_i, 1_j'> in the i-major tensor basis (zero-based i, j).
    std::size_t basis_index(std::size_t i, std::size_t j) const { return i * m_primed_ + j; }

    std::pair<std::size_t, std::size_t> unflatten(std::size_t index) const {
        return {index / m_primed_, index % m_primed_};
    }

    friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

private:
    std::size_t m_unprimed_;
    std::size_t m_primed_;
    std::size_t window_unprimed_;
    std::size_t window_primed_;
};

} // namespace biphoton
