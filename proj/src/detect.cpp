#include "cflb/detect.hpp"

#include <cmath>

#include "cflb/error.hpp"

namespace cflb {

ResponseMap make_response_map(Signal2D response) {
    ResponseMap r;
    const auto v = response.samples();
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[best]) best = k;
    }
    r.peak_value = v[best];
    r.peak_loc = {static_cast<int>(best / response.width()), static_cast<int>(best % response.width())};
    r.response = std::move(response);
    return r;
}

ResponseMap correlate(const FilterModel& f, const Signal2D& image) {
    if (image.shape() != f.mask.outer) throw InvalidArgument("correlate: image does not match the filter window");
    return make_response_map(idft2(hadamard_conj(dft2(image), f.h_hat_padded)));
}

ResponseMap correlate(const Signal2D& h, const MaskSpec& mask, const Signal2D& image) {
    mask.validate();
    if (image.shape() != mask.outer) throw InvalidArgument("correlate: image does not match the mask");
    return make_response_map(idft2(hadamard_conj(dft2(image), dft2(pad(h, mask)))));
}

Pixel locate(const ResponseMap& r, const MaskSpec& mask) {
    const Pixel a = mask.anchor();
    const int h = r.response.height();
    const int w = r.response.width();
    return {(r.peak_loc.row + a.row) % h, (r.peak_loc.col + a.col) % w};
}

double psr(const ResponseMap& r, int exclusion_radius) {
    if (exclusion_radius < 0) throw InvalidArgument("psr: negative exclusion radius");
    const Signal2D& s = r.response;
    double sum = 0.0;
    long n = 0;
    for (int i = 0; i < s.height(); ++i) {
        for (int j = 0; j < s.width(); ++j) {
            if (std::abs(i - r.peak_loc.row) <= exclusion_radius &&
                std::abs(j - r.peak_loc.col) <= exclusion_radius) {
                continue;
            }
            sum += s(i, j);
            ++n;
        }
    }
    if (n == 0) throw DegenerateInput("psr: exclusion window covers the whole response");
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (int i = 0; i < s.height(); ++i) {
        for (int j = 0; j < s.width(); ++j) {
            if (std::abs(i - r.peak_loc.row) <= exclusion_radius &&
                std::abs(j - r.peak_loc.col) <= exclusion_radius) {
                continue;
            }
            var += (s(i, j) - mean) * (s(i, j) - mean);
        }
    }
    var /= static_cast<double>(n);
    if (!(var > 0.0)) throw DegenerateInput("psr: sidelobe has zero variance");
    return (r.peak_value - mean) / std::sqrt(var);
}

double normalized_distance(Pixel pred, Pixel right_eye, Pixel left_eye) {
    const double iod = std::hypot(left_eye.row - right_eye.row, left_eye.col - right_eye.col);
    if (!(iod > 0.0)) throw InvalidArgument("normalized_distance: eye coordinates coincide");
    return std::hypot(pred.row - right_eye.row, pred.col - right_eye.col) / iod;
}

}  // namespace cflb
