#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>

namespace zdet {

inline double monotonic_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

/// Running means of the two operation costs the controller arbitrates
/// between: one rational system solving and one modular LU.
class Stopwatch {
public:
    enum class Kind { solving = 0, modular_lu = 1 };

    void record(Kind k, double seconds) {
        auto& s = slots_[int(k)];
        s.total += seconds;
        ++s.count;
    }

    std::size_t count(Kind k) const { return slots_[int(k)].count; }

    double mean(Kind k) const {
        const auto& s = slots_[int(k)];
        if (s.count == 0) throw std::logic_error("Stopwatch: no measurement of this kind yet");
        return s.total / double(s.count);
    }

    bool primed() const { return slots_[0].count > 0 && slots_[1].count > 0; }

private:
    struct Slot {
        double total = 0;
        std::size_t count = 0;
    };
    Slot slots_[2];
};

}  // namespace zdet
