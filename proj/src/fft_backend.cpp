#include "fft_backend.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "cflb/error.hpp"

namespace cflb::detail {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    Plan(Shape shape, FftDirection dir) : count_(shape.count()) {
        std::lock_guard lock(planner_mutex());
        buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count_));
        if (buffer_ == nullptr) throw NumericalError("fft: allocation failed");
        // FFTW_ESTIMATE keeps the chosen algorithm, and therefore the bits, reproducible.
        plan_ = fftw_plan_dft_2d(shape.height, shape.width, buffer_, buffer_,
                                 dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            fftw_free(buffer_);
            throw NumericalError("fft: planning failed");
        }
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buffer_);
    }

    void run(std::span<std::complex<double>> data) {
        std::memcpy(buffer_, data.data(), sizeof(fftw_complex) * count_);
        fftw_execute(plan_);
        std::memcpy(static_cast<void*>(data.data()), buffer_, sizeof(fftw_complex) * count_);
    }

private:
    std::size_t count_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan plan_ = nullptr;
};

using PlanKey = std::tuple<int, int, int>;

Plan& plan_for(Shape shape, FftDirection dir) {
    thread_local std::map<PlanKey, std::unique_ptr<Plan>> cache;
    const PlanKey key{shape.height, shape.width, static_cast<int>(dir)};
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<Plan>(shape, dir)).first;
    }
    return *it->second;
}

}  // namespace

void fft2_inplace(Shape shape, std::span<std::complex<double>> data, FftDirection dir) {
    if (data.size() != shape.count()) throw InvalidArgument("fft: buffer size mismatch");
    plan_for(shape, dir).run(data);
}

}  // namespace cflb::detail
